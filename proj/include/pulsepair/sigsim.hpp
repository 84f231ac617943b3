#ifndef PULSEPAIR_SIGSIM_HPP
#define PULSEPAIR_SIGSIM_HPP

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "pulsepair/core.hpp"

namespace pulsepair {

enum class GenerationMode : std::uint8_t {
  kTimeDomain,  ///< complex baseband samples, FFT per frame
  kDense,       ///< one complex Gaussian per bin, every bin
  kSparse,      ///< exact threshold-exceedance sampling, dense only where signals sit
};

std::string_view to_string(GenerationMode m);
GenerationMode parse_generation_mode(std::string_view text);

/// Receiver, site and schedule description of one synthetic observation.
/// All quantities SI except RA (hours) and declination/angles (degrees).
struct ObservationConfig {
  double band_low_hz = 1405e6;
  double band_high_hz = 1455e6;
  double excision_low_hz = 1424e6;
  double excision_high_hz = 1426e6;
  double frame_seconds = 0.27;
  double frame_hop_seconds = 0.27;
  int bins_per_segment = 256;
  double baseline_meters = 30.0;
  double latitude_deg = 38.4331;
  double longitude_deg = -79.8397;
  double azimuth_deg = 180.0;
  double dec_deg = -8.0;
  /// Element power-beam FWHM, degrees of RA angle.
  double fwhm_deg = 9.0;
  double tau_int_true_s = 0.0;
  /// Mean noise power per bin.
  double noise_power = 1.0;
  std::uint64_t seed = 1;
  double start_utc_s = 1717200000.0;
  double duration_days = 1.0;
  /// Pointing-RA interval recorded on every transit.
  double ra_window_low_hr = 3.3;
  double ra_window_high_hr = 7.3;
  Polarization polarization = Polarization::kX;
  GenerationMode generation = GenerationMode::kSparse;

  std::int64_t bin_count() const;
  double bin_width_hz() const { return 1.0 / frame_seconds; }
  double segment_bandwidth_hz() const { return bins_per_segment / frame_seconds; }
  std::int64_t segment_count() const;
  /// Size of segment `s`; the last one may be partial.
  int segment_size(std::int64_t s) const;
  double bin_frequency_hz(std::int64_t bin) const { return band_low_hz + bin / frame_seconds; }
  /// Nearest bin to an RF frequency, or -1 outside the band.
  std::int64_t bin_of_frequency(double rf_hz) const;
  bool in_excision(double rf_hz) const {
    return rf_hz >= excision_low_hz && rf_hz <= excision_high_hz;
  }

  /// Throws ValidationError on the first violated invariant.
  void validate() const;
};

struct SourceSpec {
  double ra_hr = 5.25;
  double dec_deg = -7.6;
  /// Mean injected pairs per frame at beam centre.
  double pulse_rate_per_frame = 0.0;
  /// Pair spacing is drawn log-uniformly in [min, max].
  double delta_f_min_hz = 7.9;
  double delta_f_max_hz = 2.0e6;
  int delta_t_frames = 0;
  double snr_target_db = 40.0;
  Polarization polarization = Polarization::kX;
};

enum class RfiKind : std::uint8_t { kBroadbandFlat, kNarrowbandCarrier };
enum class RfiDirection : std::uint8_t { kCommonMode, kSidelobeDelay };

std::string_view to_string(RfiKind k);
std::string_view to_string(RfiDirection d);
RfiKind parse_rfi_kind(std::string_view text);
RfiDirection parse_rfi_direction(std::string_view text);

struct RfiSpec {
  RfiKind kind = RfiKind::kNarrowbandCarrier;
  double rf_freq_hz = 1410e6;
  /// Linear power relative to the per-bin noise power.
  double power_rel_noise = 100.0;
  RfiDirection direction = RfiDirection::kCommonMode;
  /// West-minus-East delay of the sidelobe path (the instrument delay is added).
  double sidelobe_delay_s = 0.0;
  double duty_cycle = 1.0;
};

/// West-minus-East geometric delay of an East-West baseline for a source at
/// the given hour angle. Zero on the meridian.
template <typename Scalar>
Scalar geometric_delay(Scalar baseline_m, Scalar dec_deg, Scalar hour_angle_rad) {
  const Scalar dec = dec_deg * std::numbers::pi_v<Scalar> / Scalar(180);
  return baseline_m / Scalar(kSpeedOfLight) * std::cos(dec) * std::sin(hour_angle_rad);
}

/// Gaussian main-lobe power response for an angular offset (degrees).
inline double beam_gain(double offset_deg, double fwhm_deg) {
  const double r = offset_deg / fwhm_deg;
  return std::exp(-4.0 * std::numbers::ln2 * r * r);
}

struct FrameTiming {
  std::int64_t frame_index = 0;
  int transit = 0;
  double utc_s = 0.0;
  double lst_hr = 0.0;
  double ra_pointing_hr = 0.0;
};

/// Maps frame indices onto sidereal transits of the configured RA window.
/// Transit `d` begins when the pointing RA reaches `ra_window_low_hr` on the
/// d-th sidereal day after `start_utc_s`; frames are spaced by the hop.
class FrameSchedule {
 public:
  explicit FrameSchedule(const ObservationConfig& config);

  int transit_count() const { return transits_; }
  std::int64_t frames_per_transit() const { return frames_per_transit_; }
  std::int64_t frame_count() const { return frames_per_transit_ * transits_; }
  FrameTiming timing(std::int64_t frame_index) const;
  double transit_start_utc(int transit) const;

 private:
  double first_start_utc_ = 0.0;
  double hop_ = 0.0;
  double pointing_offset_hr_ = 0.0;
  double longitude_deg_ = 0.0;
  std::int64_t frames_per_transit_ = 0;
  int transits_ = 0;
};

struct FrameSpectrum {
  std::int64_t frame_index = 0;
  double utc_s = 0.0;
  double ra_pointing_hr = 0.0;
  Element element = Element::kEast;
  Polarization polarization = Polarization::kNone;
  /// Complex bin voltages, one per 1/frame_seconds bin from band_low.
  Eigen::VectorXcd bins;
};

struct FramePair {
  FrameSpectrum east;
  FrameSpectrum west;
};

/// A tone occupying one bin in both elements.
struct InjectedTone {
  std::int64_t bin = 0;
  std::complex<double> east;
  std::complex<double> west;
};

/// Full-segment spectra for segments that carry injected signal or RFI.
struct SegmentSpectra {
  std::int64_t segment = 0;
  std::int64_t first_bin = 0;
  Eigen::VectorXcd east;
  Eigen::VectorXcd west;
};

/// A bin whose SNR exceeds the threshold in both elements, drawn by the sparse
/// noise sampler.
struct DualExceedance {
  std::int64_t bin = 0;
  double snr_east_db = 0.0;
  double snr_west_db = 0.0;
  double phase_east_rad = 0.0;
  double phase_west_rad = 0.0;
};

struct SparseFrame {
  FrameTiming timing;
  Polarization polarization = Polarization::kNone;
  std::vector<SegmentSpectra> dense_segments;
  std::vector<DualExceedance> exceedances;
};

/// Deterministic two-element observation generator. Every frame is a pure
/// function of (config, sources, rfi, frame_index).
class Simulator {
 public:
  Simulator(ObservationConfig config, std::vector<SourceSpec> sources,
            std::vector<RfiSpec> rfi = {});

  const ObservationConfig& config() const { return config_; }
  const FrameSchedule& schedule() const { return schedule_; }
  const std::vector<SourceSpec>& sources() const { return sources_; }

  /// Whole-band spectra of one frame. Uses the time-domain path when the
  /// configured mode is kTimeDomain, per-bin synthesis otherwise.
  FramePair frame(std::int64_t frame_index) const;
  FramePair frame(std::int64_t frame_index, GenerationMode mode) const;

  /// Frames [first, first + count) in index order.
  std::vector<FramePair> frames(std::int64_t first, std::int64_t count, int threads = 1) const;

  /// Sparse representation of one frame for a given first-level threshold.
  SparseFrame sparse_frame(std::int64_t frame_index, double snr_threshold_db,
                           bool exclude_test_bin) const;

  /// Tones (pulses and carriers) present in a frame.
  std::vector<InjectedTone> tones(std::int64_t frame_index) const;

  /// West-minus-East delay applied to a source pulse at `utc_s`.
  double source_delay(const SourceSpec& source, double lst_hr) const;

 private:
  struct Plan;
  Plan plan(std::int64_t frame_index) const;
  void fill_segment(std::int64_t frame_index, std::int64_t segment, const Plan& plan,
                    Eigen::Ref<Eigen::VectorXcd> east, Eigen::Ref<Eigen::VectorXcd> west) const;

  ObservationConfig config_;
  std::vector<SourceSpec> sources_;
  std::vector<RfiSpec> rfi_;
  FrameSchedule schedule_;
  double pointing_offset_hr_ = 0.0;
};

/// Synthetic delay-tap calibration data: a broadband calibrator common to both
/// elements, delayed by `tau_true_s` in the West path, plus independent noise.
struct CorrelatorSimSpec {
  double band_low_hz = 1405e6;
  double bandwidth_hz = 50e6;
  int channels = 512;
  int frames = 64;
  double tau_true_s = -144e-9;
  /// Calibrator power relative to per-channel noise, dB.
  double calibrator_snr_db = -10.0;
  std::uint64_t seed = 1;
};

struct CorrelatorData {
  Eigen::VectorXd channel_freq_hz;
  /// frames x channels
  Eigen::MatrixXcd east;
  Eigen::MatrixXcd west;
};

CorrelatorData simulate_correlator_frames(const CorrelatorSimSpec& spec);

}  // namespace pulsepair

#endif  // PULSEPAIR_SIGSIM_HPP
