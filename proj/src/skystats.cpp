#include "pulsepair/skystats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "pulsepair/channelizer.hpp"
#include "pulsepair/exceedance.hpp"
#include "pulsepair/format.hpp"
#include "pulsepair/parallel.hpp"
#include "pulsepair/sigsim.hpp"

namespace pulsepair {

namespace {

constexpr double kEdgeSlack = 1e-9;

}  // namespace

int RaBinning::count() const {
  return static_cast<int>(std::llround((high_hr - low_hr) / width_hr));
}

int RaBinning::bin_of(double ra_hr) const {
  if (!std::isfinite(ra_hr)) return -1;
  const double pos = (ra_hr - low_hr) / width_hr + kEdgeSlack;
  if (pos < 0.0) return -1;
  const auto i = static_cast<int>(std::floor(pos));
  return i < count() ? i : -1;
}

void RaBinning::validate() const {
  if (!(width_hr > 0.0)) throw ValidationError("RA bin width must be positive");
  if (!(high_hr > low_hr)) throw ValidationError("RA window is empty");
  const double bins = (high_hr - low_hr) / width_hr;
  if (std::abs(bins - std::round(bins)) > 1e-6)
    throw ValidationError("RA window is not a whole number of bins");
}

std::string_view to_string(ProbabilityMode m) {
  return m == ProbabilityMode::kUniform ? "uniform" : "exposure";
}

ProbabilityMode parse_probability_mode(std::string_view text) {
  if (text == "uniform") return ProbabilityMode::kUniform;
  if (text == "exposure") return ProbabilityMode::kExposure;
  throw ValidationError("unknown probability mode '" + std::string(text) + "'");
}

std::vector<double> bin_probabilities(std::span<const PulseEvent> level1, const RaBinning& binning,
                                      ProbabilityMode mode) {
  binning.validate();
  const int n = binning.count();
  if (mode == ProbabilityMode::kUniform) return std::vector<double>(n, 1.0 / n);
  std::vector<double> counts(n, 0.0);
  double total = 0.0;
  for (const auto& e : level1) {
    const int b = binning.bin_of(e.ra_pointing_hr);
    if (b < 0) continue;
    counts[b] += 1.0;
    total += 1.0;
  }
  if (total == 0.0) throw ValidationError("exposure mode needs level-1 events inside the window");
  for (double& c : counts) c /= total;
  return counts;
}

double cohens_d(double observed, std::int64_t n, double p) {
  if (n < 1) throw ValidationError("cohens_d needs n >= 1");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("cohens_d needs 0 < p < 1");
  const double mean = static_cast<double>(n) * p;
  return (observed - mean) / std::sqrt(mean * (1.0 - p));
}

namespace {

// Extended precision keeps the tail accurate to well below 1e-12 for small n.
long double log_pmf_extended(std::int64_t n, double p, std::int64_t k) {
  const auto nd = static_cast<long double>(n);
  const auto kd = static_cast<long double>(k);
  const long double pl = p;
  return std::lgamma(nd + 1.0L) - std::lgamma(kd + 1.0L) - std::lgamma(nd - kd + 1.0L) +
         kd * std::log(pl) + (nd - kd) * std::log1p(-pl);
}

}  // namespace

double binomial_log_pmf(std::int64_t n, double p, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) throw ValidationError("binomial pmf needs 0 <= k <= n");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("binomial p must lie in [0, 1]");
  const double inf = std::numeric_limits<double>::infinity();
  if (p == 0.0) return k == 0 ? 0.0 : -inf;
  if (p == 1.0) return k == n ? 0.0 : -inf;
  return static_cast<double>(log_pmf_extended(n, p, k));
}

double binomial_pmf(std::int64_t n, double p, std::int64_t k) {
  return std::exp(binomial_log_pmf(n, p, k));
}

double binomial_tail(std::int64_t n, double p, std::int64_t k, bool strict) {
  if (n < 0 || k < 0 || k > n) throw ValidationError("binomial tail needs 0 <= k <= n");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("binomial p must lie in [0, 1]");
  const std::int64_t first = strict ? k + 1 : k;
  if (first <= 0) return 1.0;
  if (first > n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  std::vector<long double> logs;
  logs.reserve(static_cast<std::size_t>(n - first + 1));
  long double peak = -std::numeric_limits<long double>::infinity();
  for (std::int64_t j = first; j <= n; ++j) {
    logs.push_back(log_pmf_extended(n, p, j));
    peak = std::max(peak, logs.back());
  }
  // Smallest terms first.
  std::sort(logs.begin(), logs.end());
  long double sum = 0.0L;
  for (long double l : logs) sum += std::exp(l - peak);
  return static_cast<double>(std::min(1.0L, std::exp(peak) * sum));
}

std::vector<RABinStats> bin_stats(std::span<const std::int64_t> counts,
                                  std::span<const double> p_bin, const RaBinning& binning) {
  if (counts.size() != p_bin.size() || static_cast<int>(counts.size()) != binning.count())
    throw ValidationError("counts and probabilities do not match the binning");
  std::int64_t n = 0;
  for (auto c : counts) n += c;
  std::vector<RABinStats> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    RABinStats& s = out[i];
    const int bi = static_cast<int>(i);
    s.ra_low_hr = binning.bin_low(bi);
    s.ra_high_hr = binning.bin_high(bi);
    s.trials_n = n;
    s.p_bin = p_bin[i];
    s.observed_count = counts[i];
    s.expected_mean = static_cast<double>(n) * s.p_bin;
    s.sigma = std::sqrt(s.expected_mean * (1.0 - s.p_bin));
    const auto obs = static_cast<double>(s.observed_count);
    if (s.sigma > 0.0) {
      s.cohens_d = (obs - s.expected_mean) / s.sigma;
    } else if (obs == s.expected_mean) {
      s.cohens_d = 0.0;
    } else {
      s.cohens_d = obs > s.expected_mean ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
    }
    s.tail_prob_ge = binomial_tail(n, s.p_bin, s.observed_count, false);
    s.tail_prob_gt = binomial_tail(n, s.p_bin, s.observed_count, true);
  }
  return out;
}

std::string peak_caption(const RABinStats& s) {
  return "Binomial cumulative probability: (" + std::to_string(s.trials_n) + " trials, " +
         fixed(s.expected_mean, 1) + " mean, count > mean, at " + fixed(s.cohens_d, 1) +
         " s.d.) = " + compact_sci(s.tail_prob_gt, 1);
}

PeakReport find_peak(std::span<const RABinStats> bins, const std::optional<RaInterval>& window) {
  PeakReport r;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const double center = 0.5 * (bins[i].ra_low_hr + bins[i].ra_high_hr);
    if (window && !window->contains(center)) continue;
    if (std::isnan(bins[i].cohens_d)) continue;
    if (!r.valid || bins[i].cohens_d > r.stats.cohens_d) {
      r.valid = true;
      r.bin = static_cast<int>(i);
      r.stats = bins[i];
    }
  }
  if (r.valid) r.caption = peak_caption(r.stats);
  return r;
}

double max_abs_d(std::span<const RABinStats> bins) {
  double m = 0.0;
  for (const auto& b : bins)
    if (!std::isnan(b.cohens_d)) m = std::max(m, std::abs(b.cohens_d));
  return m;
}

Analysis analyze(std::span<const PairCandidate> candidates, const AnalyzeOptions& options,
                 std::span<const PulseEvent> level1) {
  const RaBinning& binning = options.binning;
  binning.validate();
  Analysis a;
  const int nb = binning.count();
  std::vector<std::int64_t> counts(nb, 0);
  std::int64_t in_window = 0;
  for (const auto& c : candidates) {
    const int b = binning.bin_of(c.ra_pointing_hr);
    if (b < 0) continue;
    ++counts[b];
    ++in_window;
  }
  if (in_window == 0) {
    a.warnings.push_back(candidates.empty() ? "no candidates to analyze"
                                            : "no candidates inside the analysis window");
    return a;
  }
  const auto p = bin_probabilities(level1, binning, options.mode);
  a.bins = bin_stats(counts, p, binning);
  a.peak = find_peak(a.bins, options.peak_window);

  if (options.per_day) {
    double origin = std::numeric_limits<double>::infinity();
    if (options.day_origin_utc_s) {
      origin = *options.day_origin_utc_s;
    } else {
      for (const auto& c : candidates) origin = std::min(origin, c.b.utc_s);
    }
    std::vector<std::vector<std::int64_t>> per_day;
    for (const auto& c : candidates) {
      const int b = binning.bin_of(c.ra_pointing_hr);
      if (b < 0) continue;
      const auto day = static_cast<int>(std::floor((c.b.utc_s - origin) / kSiderealDaySeconds));
      if (day < 0) continue;
      if (static_cast<std::size_t>(day) >= per_day.size()) per_day.resize(day + 1);
      if (per_day[day].empty()) per_day[day].assign(nb, 0);
      ++per_day[day][b];
    }
    for (std::size_t d = 0; d < per_day.size(); ++d) {
      if (per_day[d].empty()) continue;
      const auto stats = bin_stats(per_day[d], p, binning);
      for (int b = 0; b < nb; ++b) a.daily.push_back({static_cast<int>(d), b, stats[b]});
    }
  }
  return a;
}

FalseAlarmCheck false_alarm_tail_check(double snr_threshold_db, std::int64_t n_trials,
                                       const FalseAlarmOptions& options) {
  if (n_trials < 1) throw ValidationError("n_trials must be positive");
  if (options.bins_per_segment < 2) throw ValidationError("bins_per_segment must be at least 2");
  FalseAlarmCheck r;
  r.predicted_rate = std::exp(-std::pow(10.0, snr_threshold_db / 10.0));
  r.finite_segment_rate = ExceedanceSampler::single_bin_rate(
      options.bins_per_segment, snr_threshold_db, options.exclude_test_bin);

  // Each frame contributes two independent elements of `bins` trials.
  const std::int64_t bps = options.bins_per_segment;
  const std::int64_t wanted_bins = (n_trials + 1) / 2;
  const std::int64_t bins =
      std::min<std::int64_t>(256 * bps, (wanted_bins + bps - 1) / bps * bps);
  const std::int64_t frames = (wanted_bins + bins - 1) / bins;

  ObservationConfig cfg;
  cfg.frame_seconds = 0.27;
  cfg.frame_hop_seconds = 0.27;
  cfg.bins_per_segment = options.bins_per_segment;
  cfg.band_low_hz = 1405e6;
  cfg.band_high_hz = cfg.band_low_hz + static_cast<double>(bins) / cfg.frame_seconds;
  cfg.excision_low_hz = cfg.band_low_hz;
  cfg.excision_high_hz = cfg.band_low_hz;
  cfg.seed = options.seed;
  cfg.generation = GenerationMode::kDense;
  const double frames_per_day =
      (cfg.ra_window_high_hr - cfg.ra_window_low_hr) * kSecondsPerSiderealHour / cfg.frame_seconds;
  cfg.duration_days = std::ceil(static_cast<double>(frames) / std::floor(frames_per_day)) + 1.0;
  const Simulator sim(cfg, {});

  constexpr std::int64_t kChunk = 8;
  const std::int64_t chunks = (frames + kChunk - 1) / kChunk;
  const auto parts = ordered_map<std::int64_t>(chunks, options.threads, [&](std::int64_t c) {
    std::int64_t hits = 0;
    Eigen::VectorXd snr(bins);
    for (std::int64_t f = c * kChunk; f < std::min(frames, (c + 1) * kChunk); ++f) {
      const FramePair fp = sim.frame(f);
      for (const FrameSpectrum* fs : {&fp.east, &fp.west}) {
        segment_snr_db(fs->bins, options.bins_per_segment, options.exclude_test_bin, snr);
        hits += (snr.array() > snr_threshold_db).count();
      }
    }
    return hits;
  });
  for (auto h : parts) r.crossings += h;
  r.trials = frames * bins * 2;
  r.empirical_rate = static_cast<double>(r.crossings) / static_cast<double>(r.trials);
  r.low_count_warning = r.predicted_rate * static_cast<double>(r.trials) < 100.0;
  return r;
}

void write_stats_csv(std::ostream& out, std::span<const RABinStats> bins) {
  out << "ra_low_hr,ra_high_hr,trials_n,p_bin,expected_mean,sigma,observed_count,cohens_d,"
         "tail_prob_ge,tail_prob_gt\n";
  for (const auto& b : bins) {
    out << fixed(b.ra_low_hr, 4) << ',' << fixed(b.ra_high_hr, 4) << ',' << b.trials_n << ','
        << sig(b.p_bin, 10) << ',' << fixed(b.expected_mean, 6) << ',' << fixed(b.sigma, 6) << ','
        << b.observed_count << ',' << fixed(b.cohens_d, 6) << ',' << sig(b.tail_prob_ge, 6) << ','
        << sig(b.tail_prob_gt, 6) << '\n';
  }
}

std::vector<RABinStats> read_stats_csv(std::istream& in) {
  std::vector<RABinStats> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  auto num = [&](std::string_view t, std::size_t ln) {
    const auto v = parse_double(t);
    if (!v) throw FormatError("bad number '" + std::string(t) + "'", ln);
    return *v;
  };
  auto integer = [&](std::string_view t, std::size_t ln) {
    const auto v = parse_int(t);
    if (!v) throw FormatError("bad integer '" + std::string(t) + "'", ln);
    return *v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (!header) {
      if (text.rfind("ra_low_hr,ra_high_hr,trials_n", 0) != 0)
        throw FormatError("stats header does not match schema", line_no);
      header = true;
      continue;
    }
    const auto cols = split(text, ',');
    if (cols.size() != 10) throw FormatError("expected 10 columns", line_no);
    RABinStats s;
    s.ra_low_hr = num(cols[0], line_no);
    s.ra_high_hr = num(cols[1], line_no);
    s.trials_n = integer(cols[2], line_no);
    s.p_bin = num(cols[3], line_no);
    s.expected_mean = num(cols[4], line_no);
    s.sigma = num(cols[5], line_no);
    s.observed_count = integer(cols[6], line_no);
    s.cohens_d = num(cols[7], line_no);
    s.tail_prob_ge = num(cols[8], line_no);
    s.tail_prob_gt = num(cols[9], line_no);
    out.push_back(s);
  }
  if (!header) throw FormatError("stats CSV has no header", 0);
  return out;
}

void write_daily_csv(std::ostream& out, std::span<const DailyBinStats> daily) {
  out << "day,ra_low_hr,ra_high_hr,trials_n,expected_mean,observed_count,cohens_d\n";
  for (const auto& d : daily) {
    out << d.day << ',' << fixed(d.stats.ra_low_hr, 4) << ',' << fixed(d.stats.ra_high_hr, 4)
        << ',' << d.stats.trials_n << ',' << fixed(d.stats.expected_mean, 6) << ','
        << d.stats.observed_count << ',' << fixed(d.stats.cohens_d, 6) << '\n';
  }
}

}  // namespace pulsepair
