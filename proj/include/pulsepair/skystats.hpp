#ifndef PULSEPAIR_SKYSTATS_HPP
#define PULSEPAIR_SKYSTATS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pulsepair/core.hpp"
#include "pulsepair/pairdetect.hpp"

namespace pulsepair {

/// Contiguous equal-width RA bins over [low_hr, high_hr).
struct RaBinning {
  double low_hr = 3.3;
  double high_hr = 7.3;
  double width_hr = 0.1;

  int count() const;
  double bin_low(int i) const { return low_hr + i * width_hr; }
  double bin_high(int i) const { return low_hr + (i + 1) * width_hr; }
  double bin_center(int i) const { return low_hr + (i + 0.5) * width_hr; }
  /// Bin holding `ra_hr`, or -1 outside the window. Edges belong to the bin above.
  int bin_of(double ra_hr) const;
  void validate() const;
};

enum class ProbabilityMode : std::uint8_t { kUniform, kExposure };
std::string_view to_string(ProbabilityMode m);
ProbabilityMode parse_probability_mode(std::string_view text);

/// Per-bin candidate probability. Uniform: width / window. Exposure:
/// proportional to the level-1 event density per bin.
std::vector<double> bin_probabilities(std::span<const PulseEvent> level1, const RaBinning& binning,
                                      ProbabilityMode mode);

/// (observed - n p) / sqrt(n p (1 - p)); requires 0 < p < 1 and n >= 1.
double cohens_d(double observed, std::int64_t n, double p);

double binomial_log_pmf(std::int64_t n, double p, std::int64_t k);
double binomial_pmf(std::int64_t n, double p, std::int64_t k);
/// strict: P(X > k), otherwise P(X >= k). Exact log-space summation from the
/// tail end.
double binomial_tail(std::int64_t n, double p, std::int64_t k, bool strict);

struct RABinStats {
  double ra_low_hr = 0.0;
  double ra_high_hr = 0.0;
  std::int64_t trials_n = 0;
  double p_bin = 0.0;
  double expected_mean = 0.0;
  double sigma = 0.0;
  std::int64_t observed_count = 0;
  double cohens_d = 0.0;
  double tail_prob_ge = 1.0;
  double tail_prob_gt = 1.0;
};

/// Statistics of one bin for one sidereal day.
struct DailyBinStats {
  int day = 0;
  int bin = 0;
  RABinStats stats;
};

struct PeakReport {
  bool valid = false;
  int bin = -1;
  RABinStats stats;
  /// Caption line in the style "Binomial cumulative probability: (...) = 2.8e-4".
  std::string caption;
};

struct AnalyzeOptions {
  RaBinning binning;
  ProbabilityMode mode = ProbabilityMode::kUniform;
  /// Restricts the peak search; the whole window when empty.
  std::optional<RaInterval> peak_window;
  bool per_day = false;
  /// Start of day 0 for the per-day view; defaults to the earliest candidate.
  std::optional<double> day_origin_utc_s;
};

struct Analysis {
  std::vector<RABinStats> bins;
  PeakReport peak;
  std::vector<DailyBinStats> daily;
  std::vector<std::string> warnings;
};

/// Bins candidates by ra_pointing_hr. Trials are the candidates that fall in
/// the analysis window. `level1` is only consulted in exposure mode.
Analysis analyze(std::span<const PairCandidate> candidates, const AnalyzeOptions& options,
                 std::span<const PulseEvent> level1 = {});

/// Per-bin stats from known counts.
std::vector<RABinStats> bin_stats(std::span<const std::int64_t> counts,
                                  std::span<const double> p_bin, const RaBinning& binning);

/// Peak by Cohen's d among bins whose centre lies in `window`.
PeakReport find_peak(std::span<const RABinStats> bins, const std::optional<RaInterval>& window);

std::string peak_caption(const RABinStats& peak);

/// Largest |d| among bins with a defined effect size.
double max_abs_d(std::span<const RABinStats> bins);

struct FalseAlarmCheck {
  double empirical_rate = 0.0;
  /// exp(-10^(threshold/10)), the infinite-segment exponential tail.
  double predicted_rate = 0.0;
  /// Exact per-bin rate for the finite segment-mean estimator.
  double finite_segment_rate = 0.0;
  std::int64_t trials = 0;
  std::int64_t crossings = 0;
  /// Fewer than 100 crossings expected.
  bool low_count_warning = false;
};

struct FalseAlarmOptions {
  int bins_per_segment = 256;
  bool exclude_test_bin = false;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Noise-only per-bin threshold crossing rate from the dense frequency-domain
/// simulator.
FalseAlarmCheck false_alarm_tail_check(double snr_threshold_db, std::int64_t n_trials,
                                       const FalseAlarmOptions& options = {});

void write_stats_csv(std::ostream& out, std::span<const RABinStats> bins);
std::vector<RABinStats> read_stats_csv(std::istream& in);
void write_daily_csv(std::ostream& out, std::span<const DailyBinStats> daily);

}  // namespace pulsepair

#endif  // PULSEPAIR_SKYSTATS_HPP
