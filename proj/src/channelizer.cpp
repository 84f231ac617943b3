#include "pulsepair/channelizer.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numeric>
#include <ostream>

#include "pulsepair/format.hpp"

namespace pulsepair {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::Index next_power_of_two(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Eigen::VectorXcd fft_frame(const Eigen::VectorXcd& samples, double frame_seconds,
                           ZeroPadding padding) {
  if (!(frame_seconds > 0.0)) throw ValidationError("frame_seconds must be positive");
  const Eigen::Index n = samples.size();
  if (n == 0) throw ValidationError("empty sample frame");
  Eigen::VectorXcd in;
  if (!is_power_of_two(n)) {
    if (padding == ZeroPadding::kNone)
      throw ValidationError("frame length " + std::to_string(n) + " is not a power of two");
    in = Eigen::VectorXcd::Zero(next_power_of_two(n));
    in.head(n) = samples;
  } else {
    in = samples;
  }
  Eigen::FFT<double> fft;
  Eigen::VectorXcd out;
  fft.fwd(out, in);
  // Unit gain refers to the unpadded length: a tone of amplitude A spanning
  // the n real samples still lands with amplitude A.
  out /= static_cast<double>(n);
  return out;
}

Eigen::VectorXcd inverse_fft_frame(const Eigen::VectorXcd& bins) {
  Eigen::FFT<double> fft;
  Eigen::VectorXcd out;
  fft.inv(out, bins);
  out *= static_cast<double>(bins.size());
  return out;
}

double snr_db(double bin_power, std::span<const double> segment_powers) {
  if (segment_powers.empty()) throw ValidationError("empty segment");
  const double mean = std::accumulate(segment_powers.begin(), segment_powers.end(), 0.0) /
                      static_cast<double>(segment_powers.size());
  if (!(mean > 0.0)) throw ValidationError("segment mean power must be positive");
  return 10.0 * std::log10(bin_power / mean);
}

double snr_db_excluding(double bin_power, std::span<const double> segment_powers,
                        std::size_t test_index) {
  if (segment_powers.size() < 2 || test_index >= segment_powers.size())
    throw ValidationError("segment too short to exclude the test bin");
  const double sum = std::accumulate(segment_powers.begin(), segment_powers.end(), 0.0);
  const double mean =
      (sum - segment_powers[test_index]) / static_cast<double>(segment_powers.size() - 1);
  if (!(mean > 0.0)) throw ValidationError("segment mean power must be positive");
  return 10.0 * std::log10(bin_power / mean);
}

double phase_rad(std::complex<double> amplitude) {
  if (amplitude == std::complex<double>(0.0, 0.0))
    throw ValidationError("phase of a zero amplitude is undefined");
  const double p = std::arg(amplitude);
  return p <= -std::numbers::pi ? std::numbers::pi : p;
}

void segment_snr_db(const Eigen::Ref<const Eigen::VectorXcd>& bins, int bins_per_segment,
                    bool exclude_test_bin, Eigen::Ref<Eigen::VectorXd> snr_out) {
  const Eigen::Index n = bins.size();
  for (Eigen::Index first = 0; first < n; first += bins_per_segment) {
    const Eigen::Index size = std::min<Eigen::Index>(bins_per_segment, n - first);
    const Eigen::ArrayXd power = bins.segment(first, size).array().abs2();
    const double sum = power.sum();
    if (exclude_test_bin && size < 2) throw ValidationError("segment too short to exclude the test bin");
    for (Eigen::Index k = 0; k < size; ++k) {
      const double mean = exclude_test_bin ? (sum - power[k]) / static_cast<double>(size - 1)
                                           : sum / static_cast<double>(size);
      if (!(mean > 0.0)) throw ValidationError("segment mean power must be positive");
      snr_out[first + k] = 10.0 * std::log10(power[k] / mean);
    }
  }
}

std::vector<BinMeasurement> channelize(const FrameSpectrum& frame, const ObservationConfig& config,
                                       const ChannelizerOptions& options) {
  const Eigen::Index n = frame.bins.size();
  if (n != config.bin_count()) throw ValidationError("frame bin count does not match the band");
  Eigen::VectorXd snr(n);
  segment_snr_db(frame.bins, options.bins_per_segment, options.exclude_test_bin, snr);
  std::vector<BinMeasurement> out(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    BinMeasurement& m = out[static_cast<std::size_t>(k)];
    m.frame_index = frame.frame_index;
    m.utc_s = frame.utc_s;
    m.ra_pointing_hr = frame.ra_pointing_hr;
    m.element = frame.element;
    m.polarization = frame.polarization;
    m.bin_index = k;
    m.rf_freq_hz = config.bin_frequency_hz(k);
    m.power = std::norm(frame.bins[k]);
    m.snr_db = snr[k];
    m.phase_rad = m.power > 0.0 ? phase_rad(frame.bins[k]) : 0.0;
    m.segment_index = k / options.bins_per_segment;
  }
  return out;
}

void write_bin_measurements_csv(std::ostream& out, std::span<const BinMeasurement> rows) {
  out << "frame_index,utc_s,element,bin_index,rf_freq_hz,power,snr_db,phase_rad,segment_index\n";
  for (const auto& m : rows) {
    out << m.frame_index << ',' << fixed(m.utc_s, 3) << ',' << to_string(m.element) << ','
        << m.bin_index << ',' << fixed(m.rf_freq_hz, 1) << ',' << sig(m.power, 6) << ','
        << sig(m.snr_db, 6) << ',' << sig(m.phase_rad, 6) << ',' << m.segment_index << '\n';
  }
}

}  // namespace pulsepair
