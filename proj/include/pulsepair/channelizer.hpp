#ifndef PULSEPAIR_CHANNELIZER_HPP
#define PULSEPAIR_CHANNELIZER_HPP

#include <Eigen/Core>

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "pulsepair/core.hpp"
#include "pulsepair/sigsim.hpp"

namespace pulsepair {

struct BinMeasurement {
  std::int64_t frame_index = 0;
  double utc_s = 0.0;
  double ra_pointing_hr = 0.0;
  Element element = Element::kEast;
  Polarization polarization = Polarization::kNone;
  std::int64_t bin_index = 0;
  double rf_freq_hz = 0.0;
  double power = 0.0;
  double snr_db = 0.0;
  double phase_rad = 0.0;
  std::int64_t segment_index = 0;
};

enum class ZeroPadding : std::uint8_t {
  kNone,      ///< length must already be a power of two
  kNextPow2,  ///< zero-pad up to the next power of two
};

/// Unit-gain DFT: X[k] = (1/N) sum_n x[n] exp(-2 pi i k n / N), so a tone
/// centred in bin k with amplitude A yields |X[k]|^2 = |A|^2.
Eigen::VectorXcd fft_frame(const Eigen::VectorXcd& samples, double frame_seconds,
                           ZeroPadding padding = ZeroPadding::kNone);

/// Inverse of fft_frame (no padding).
Eigen::VectorXcd inverse_fft_frame(const Eigen::VectorXcd& bins);

/// 10 log10(bin_power / mean(segment_powers)). With `exclude_test_bin` the
/// bin under test is removed from the mean; `test_index` locates it.
double snr_db(double bin_power, std::span<const double> segment_powers);
double snr_db_excluding(double bin_power, std::span<const double> segment_powers,
                        std::size_t test_index);

/// Principal argument in (-pi, pi]. Zero amplitude is an error.
double phase_rad(std::complex<double> amplitude);

struct ChannelizerOptions {
  int bins_per_segment = 256;
  bool exclude_test_bin = false;
};

/// SNR of every bin of a contiguous block of whole segments (the last segment
/// may be short), written into `snr_out`.
void segment_snr_db(const Eigen::Ref<const Eigen::VectorXcd>& bins, int bins_per_segment,
                    bool exclude_test_bin, Eigen::Ref<Eigen::VectorXd> snr_out);

std::vector<BinMeasurement> channelize(const FrameSpectrum& frame, const ObservationConfig& config,
                                       const ChannelizerOptions& options);

void write_bin_measurements_csv(std::ostream& out, std::span<const BinMeasurement> rows);

}  // namespace pulsepair

#endif  // PULSEPAIR_CHANNELIZER_HPP
