#include "doctest.h"

#include <cmath>
#include <vector>
#include <sstream>

#include "pulsepair/skystats.hpp"

using namespace pulsepair;

namespace {

PairCandidate at_ra(double ra, double utc = 0.0) {
  PairCandidate c;
  c.ra_pointing_hr = ra;
  c.a.utc_s = c.b.utc_s = utc;
  return c;
}

PulseEvent event_at(double ra) {
  PulseEvent e;
  e.ra_pointing_hr = ra;
  return e;
}

// Exact enumeration over all 2^n outcomes.
double brute_tail(int n, double p, int k, bool strict) {
  // Probability of each outcome, indexed by its number of successes.
  std::vector<long double> weight(static_cast<std::size_t>(n) + 1);
  for (int ones = 0; ones <= n; ++ones)
    weight[static_cast<std::size_t>(ones)] = std::pow(static_cast<long double>(p), ones) *
                                             std::pow(1.0L - static_cast<long double>(p), n - ones);
  long double total = 0.0L;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int ones = __builtin_popcount(mask);
    if (strict ? ones > k : ones >= k) total += weight[static_cast<std::size_t>(ones)];
  }
  return static_cast<double>(total);
}

}  // namespace

TEST_CASE("RA binning") {
  RaBinning b;
  CHECK(b.count() == 40);
  CHECK(b.bin_of(3.3) == 0);
  CHECK(b.bin_of(5.25) == 19);
  CHECK(b.bin_of(5.3) == 20);  // edges belong to the bin above
  CHECK(b.bin_of(7.3) == -1);
  CHECK(b.bin_of(3.2) == -1);
  CHECK(b.bin_center(19) == doctest::Approx(5.25));
  RaBinning bad{3.3, 7.3, 0.3};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("bin probabilities") {
  const auto u = bin_probabilities({}, RaBinning{}, ProbabilityMode::kUniform);
  REQUIRE(u.size() == 40);
  CHECK(u[7] == doctest::Approx(0.025));
  std::vector<PulseEvent> flat;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 5; ++j) flat.push_back(event_at(3.3 + 0.1 * i + 0.02 * j + 0.01));
  const auto e = bin_probabilities(flat, RaBinning{}, ProbabilityMode::kExposure);
  for (int i = 0; i < 40; ++i) CHECK(e[i] == doctest::Approx(u[i]));
  const std::vector<PulseEvent> one{event_at(5.25), event_at(5.27)};
  const auto d = bin_probabilities(one, RaBinning{}, ProbabilityMode::kExposure);
  CHECK(d[19] == 1.0);
  CHECK(d[18] == 0.0);
  CHECK_THROWS_AS(bin_probabilities({}, RaBinning{}, ProbabilityMode::kExposure), ValidationError);
  CHECK(parse_probability_mode("exposure") == ProbabilityMode::kExposure);
  CHECK_THROWS_AS(parse_probability_mode("other"), ValidationError);
}

TEST_CASE("Cohen's d examples") {
  CHECK(cohens_d(8.2, 328, 0.025) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cohens_d(19, 328, 0.025) == doctest::Approx(3.82).epsilon(0.005 / 3.82));
  CHECK(std::sqrt(328 * 0.025 * 0.975) == doctest::Approx(2.828).epsilon(0.001 / 2.828));
  CHECK(cohens_d(15, 246, 6.1 / 246) == doctest::Approx(3.65).epsilon(0.005 / 3.65));
  CHECK_THROWS_AS(cohens_d(1, 10, 0.0), ValidationError);
  CHECK_THROWS_AS(cohens_d(1, 10, 1.0), ValidationError);
  CHECK_THROWS_AS(cohens_d(1, 0, 0.5), ValidationError);
}

TEST_CASE("binomial tail examples") {
  CHECK(binomial_tail(328, 0.025, 19, true) == doctest::Approx(2.786e-4).epsilon(1e-3));
  CHECK(binomial_tail(4, 0.5, 2, false) == doctest::Approx(0.6875).epsilon(1e-14));
  CHECK(binomial_tail(17, 0.3, 0, false) == 1.0);
  CHECK(binomial_tail(246, 6.1 / 246, 15, false) == doctest::Approx(1.39988e-3).epsilon(1e-4));
  CHECK(binomial_tail(246, 6.1 / 246, 15, true) == doctest::Approx(4.9769e-4).epsilon(1e-4));
  CHECK(binomial_tail(10, 0.5, 10, true) == 0.0);
  CHECK_THROWS_AS(binomial_tail(10, 0.5, 11, false), ValidationError);
  CHECK_THROWS_AS(binomial_tail(10, 0.5, -1, false), ValidationError);
  CHECK_THROWS_AS(binomial_tail(10, 1.5, 2, false), ValidationError);
}

TEST_CASE("binomial tail identities and brute-force oracle") {
  for (int n = 1; n <= 20; ++n) {
    for (double p : {0.01, 0.025, 0.3, 0.5, 0.77}) {
      double pmf_sum = 0.0;
      double previous = 2.0;
      for (int k = 0; k <= n; ++k) {
        const double ge = binomial_tail(n, p, k, false);
        const double gt = binomial_tail(n, p, k, true);
        CHECK(std::abs(ge - brute_tail(n, p, k, false)) < 1e-12);
        CHECK(std::abs(gt - brute_tail(n, p, k, true)) < 1e-12);
        CHECK(ge == doctest::Approx(gt + binomial_pmf(n, p, k)).epsilon(1e-12));
        CHECK(ge <= previous + 1e-15);
        previous = ge;
        pmf_sum += binomial_pmf(n, p, k);
      }
      CHECK(pmf_sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  // Monotone in p.
  CHECK(binomial_tail(100, 0.2, 30, false) < binomial_tail(100, 0.25, 30, false));
}

TEST_CASE("analyze: Fig. 1 composition") {
  std::vector<PairCandidate> cands;
  // 19 candidates in 5.2-5.3, the remaining 309 spread over other bins.
  for (int i = 0; i < 19; ++i) cands.push_back(at_ra(5.25));
  for (int i = 0; i < 309; ++i) {
    int bin = i % 39;
    if (bin >= 19) ++bin;
    cands.push_back(at_ra(3.3 + 0.1 * bin + 0.05));
  }
  AnalyzeOptions opt;
  opt.peak_window = RaInterval{4.95, 5.55};
  const Analysis a = analyze(cands, opt);
  REQUIRE(a.bins.size() == 40);
  const RABinStats& b = a.bins[19];
  CHECK(b.trials_n == 328);
  CHECK(b.observed_count == 19);
  CHECK(b.expected_mean == doctest::Approx(8.2));
  CHECK(b.sigma == doctest::Approx(2.828).epsilon(1e-3));
  CHECK(b.cohens_d == doctest::Approx(3.819).epsilon(1e-3));
  CHECK(b.tail_prob_gt == doctest::Approx(2.786e-4).epsilon(1e-3));
  REQUIRE(a.peak.valid);
  CHECK(a.peak.bin == 19);
  CHECK(a.peak.caption ==
        "Binomial cumulative probability: (328 trials, 8.2 mean, count > mean, at 3.8 s.d.) = 2.8e-4");
  std::int64_t total = 0;
  for (const auto& s : a.bins) total += s.observed_count;
  CHECK(total == 328);
}

TEST_CASE("analyze: empty input and out-of-window candidates") {
  const Analysis empty = analyze({}, AnalyzeOptions{});
  CHECK(empty.bins.empty());
  CHECK_FALSE(empty.peak.valid);
  CHECK_FALSE(empty.warnings.empty());
  const std::vector<PairCandidate> outside{at_ra(1.0), at_ra(9.0)};
  CHECK(analyze(outside, AnalyzeOptions{}).bins.empty());
}

TEST_CASE("analyze: per-day view groups by sidereal day") {
  std::vector<PairCandidate> cands;
  for (int day = 0; day < 3; ++day)
    for (int i = 0; i < 40; ++i)
      cands.push_back(at_ra(3.35 + 0.1 * i, 1000.0 + day * kSiderealDaySeconds + i));
  AnalyzeOptions opt;
  opt.per_day = true;
  const Analysis a = analyze(cands, opt);
  CHECK(a.daily.size() == 3 * 40);
  for (const auto& d : a.daily) {
    CHECK(d.stats.trials_n == 40);
    CHECK(d.stats.observed_count == 1);
  }
}

TEST_CASE("analyze: injection concentrated at 5.25 hr peaks there") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(3.3, 7.3);
  std::normal_distribution<double> g(5.25, 0.02);
  std::vector<PairCandidate> cands;
  for (int i = 0; i < 300; ++i) cands.push_back(at_ra(u(rng)));
  for (int i = 0; i < 25; ++i) cands.push_back(at_ra(g(rng)));
  const Analysis a = analyze(cands, AnalyzeOptions{});
  REQUIRE(a.peak.valid);
  CHECK(a.peak.stats.ra_low_hr <= 5.25);
  CHECK(a.peak.stats.ra_high_hr > 5.25);
}

TEST_CASE("analyze: uniform null rarely reaches 3.3 s.d.") {
  // With n = 328 over 40 bins the per-run probability that some bin reaches
  // d >= 3.3 is about 7%, set by the binomial tail at 18 counts.
  Rng rng(17);
  std::uniform_real_distribution<double> u(3.3, 7.3);
  int below = 0;
  const int seeds = 400;
  for (int s = 0; s < seeds; ++s) {
    std::vector<PairCandidate> cands;
    for (int i = 0; i < 328; ++i) cands.push_back(at_ra(u(rng)));
    if (max_abs_d(analyze(cands, AnalyzeOptions{}).bins) < 3.3) ++below;
  }
  const double rate = static_cast<double>(below) / seeds;
  MESSAGE("fraction of null runs with max |d| < 3.3: " << rate);
  const double exact = std::pow(1.0 - binomial_tail(328, 0.025, 18, false), 40);
  CHECK(rate == doctest::Approx(exact).epsilon(0.04));
}

TEST_CASE("bin_stats handles zero variance and mismatches") {
  RaBinning b{0.0, 0.2, 0.1};
  const std::vector<std::int64_t> counts{3, 0};
  const std::vector<double> p{1.0, 0.0};
  const auto s = bin_stats(counts, p, b);
  CHECK(s[0].sigma == 0.0);
  CHECK(s[0].cohens_d == 0.0);
  CHECK(s[1].cohens_d == 0.0);
  CHECK_THROWS_AS(bin_stats(counts, std::vector<double>{1.0}, b), ValidationError);
}

TEST_CASE("false-alarm tail check") {
  const auto chk = false_alarm_tail_check(8.5, 1000000);
  CHECK(chk.predicted_rate == doctest::Approx(8.4223e-4).epsilon(1e-4));
  CHECK(chk.finite_segment_rate == doctest::Approx(7.8397e-4).epsilon(1e-4));
  CHECK(chk.trials >= 1000000);
  CHECK_FALSE(chk.low_count_warning);
  const double sd = std::sqrt(chk.finite_segment_rate * chk.trials);
  CHECK(std::abs(chk.crossings - chk.finite_segment_rate * chk.trials) < 4.0 * sd);
  CHECK(false_alarm_tail_check(0.0, 10000).predicted_rate == doctest::Approx(0.3679).epsilon(1e-3));
  CHECK(false_alarm_tail_check(8.5, 10000).low_count_warning);
  FalseAlarmOptions opt;
  opt.threads = 3;
  const auto threaded = false_alarm_tail_check(8.5, 1000000, opt);
  CHECK(threaded.crossings == chk.crossings);
}

TEST_CASE("stats CSV round trip") {
  std::vector<PairCandidate> cands;
  Rng rng(1);
  std::uniform_real_distribution<double> u(3.3, 7.3);
  for (int i = 0; i < 200; ++i) cands.push_back(at_ra(u(rng)));
  const Analysis a = analyze(cands, AnalyzeOptions{});
  std::stringstream s;
  write_stats_csv(s, a.bins);
  const auto back = read_stats_csv(s);
  REQUIRE(back.size() == a.bins.size());
  std::stringstream s2;
  write_stats_csv(s2, back);
  CHECK(s2.str() == s.str());
  CHECK(back[5].observed_count == a.bins[5].observed_count);
  std::istringstream bad("ra_low_hr\n1,2\n");
  CHECK_THROWS_AS(read_stats_csv(bad), FormatError);
}
