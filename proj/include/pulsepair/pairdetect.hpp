#ifndef PULSEPAIR_PAIRDETECT_HPP
#define PULSEPAIR_PAIRDETECT_HPP

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "pulsepair/channelizer.hpp"
#include "pulsepair/core.hpp"
#include "pulsepair/sigsim.hpp"

namespace pulsepair {

/// A bin that crossed the SNR threshold in both elements.
struct PulseEvent {
  double utc_s = 0.0;
  std::int64_t frame_index = 0;
  std::int64_t bin_index = 0;
  double rf_freq_hz = 0.0;
  double snr_east_db = 0.0;
  double snr_west_db = 0.0;
  double phase_east_rad = 0.0;
  double phase_west_rad = 0.0;
  Polarization polarization = Polarization::kNone;
  double ra_pointing_hr = 0.0;

  friend bool operator==(const PulseEvent&, const PulseEvent&) = default;
};

/// Two consecutive events of the bin-sorted order: `a` is i-1, `b` is i.
struct PairCandidate {
  PulseEvent a;
  PulseEvent b;
  double delta_t_s = 0.0;
  /// rf(b) - rf(a)
  double delta_f_hz = 0.0;
  double log10_delta_f_mhz = 0.0;
  /// Filled by the phase filter.
  double phase_metric_rad = 0.0;
  double ra_pointing_hr = 0.0;
};

struct FirstLevelParams {
  double snr_threshold_db = 8.5;
  double band_low_hz = 1405e6;
  double band_high_hz = 1455e6;
  double excision_low_hz = 1424e6;
  double excision_high_hz = 1426e6;
  bool exclude_test_bin = false;

  static FirstLevelParams from(const ObservationConfig& config, double snr_threshold_db = 8.5,
                               bool exclude_test_bin = false);
  /// Band limits (closed) and excision (closed) on the RF frequency.
  bool frequency_passes(double rf_hz) const;
  bool passes(double rf_hz, double snr_east_db, double snr_west_db) const;
};

/// One PulseEvent per (frame, bin) where both elements exceed the threshold
/// and the frequency passes. Streams must cover the same frame and bin grid.
std::vector<PulseEvent> first_level_filter(std::span<const BinMeasurement> east,
                                           std::span<const BinMeasurement> west,
                                           const FirstLevelParams& params);

/// Level-1 events of one simulated frame, using the simulator's configured
/// generation mode.
std::vector<PulseEvent> detect_frame(const Simulator& sim, std::int64_t frame_index,
                                     const FirstLevelParams& params);

/// Level-1 events of frames [first, first + count), frame-ordered.
std::vector<PulseEvent> detect_frames(const Simulator& sim, std::int64_t first, std::int64_t count,
                                      const FirstLevelParams& params, int threads = 1);

struct PairingParams {
  /// Events within blocks of (2 * window + 1) consecutive frames are sorted
  /// together; 0 pairs within a single frame only.
  int pairing_window_frames = 0;
  bool require_same_polarization = false;
};

struct PairingStats {
  std::int64_t blocks = 0;
  std::int64_t same_bin_skipped = 0;
  std::int64_t polarization_skipped = 0;
};

/// Bin-sorted consecutive pairing. Sorting key is (bin, frame, utc), so the
/// result does not depend on input order.
std::vector<PairCandidate> form_pairs(std::span<const PulseEvent> events,
                                      const PairingParams& params, PairingStats* stats = nullptr);

struct DeltaFRange {
  double log_low = -5.1;
  double log_high = 0.3;
  /// Slack on both limits. The limits are one-decimal roundings of the
  /// 7.9 Hz and 2.0 MHz end points, which this slack keeps inside.
  double log_tolerance = 2.5e-3;
};

/// True iff log10(|df| / 1 MHz) lies in [log_low, log_high] (within the
/// tolerance); df = 0 is false.
bool delta_f_filter(const PairCandidate& candidate, const DeltaFRange& range = {});

// Level-1 archive ----------------------------------------------------------

inline constexpr int kLevel1SchemaVersion = 1;

void write_level1_header(std::ostream& out);
void write_level1_rows(std::ostream& out, std::span<const PulseEvent> events);
std::vector<PulseEvent> read_level1(std::istream& in);

/// Appends to an existing archive (header written only for a new or empty file).
void write_level1_archive(const std::filesystem::path& path, std::span<const PulseEvent> events,
                          bool append = false);
std::vector<PulseEvent> read_level1_archive(const std::filesystem::path& path);

}  // namespace pulsepair

#endif  // PULSEPAIR_PAIRDETECT_HPP
