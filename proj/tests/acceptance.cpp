// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// numbers alongside. Exit status is non-zero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pulsepair/calib.hpp"
#include "pulsepair/format.hpp"
#include "pulsepair/pipeline.hpp"
#include "pulsepair/svgplot.hpp"
#include "test_util.hpp"

using namespace pulsepair;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << title << " :: " << detail
            << std::endl;
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Monte Carlo estimate of P(X >= k) (strict: X > k) for X ~ Binomial(n, p).
struct McEstimate {
  double rate;
  double sigma;
};

McEstimate monte_carlo_tail(std::int64_t n, double p, std::int64_t k, bool strict,
                            std::int64_t trials, std::uint64_t seed) {
  Rng rng(seed);
  std::binomial_distribution<std::int64_t> draw(n, p);
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const auto x = draw(rng);
    hits += strict ? (x > k) : (x >= k);
  }
  const double rate = static_cast<double>(hits) / static_cast<double>(trials);
  return {rate, std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials))};
}

/// Direct enumeration of the tail with the multiplicative pmf recurrence.
double enumerate_tail(std::int64_t n, double p, std::int64_t k, bool strict) {
  long double pmf = std::pow(1.0L - p, static_cast<long double>(n));
  long double below = 0.0L;
  const std::int64_t first = strict ? k + 1 : k;
  for (std::int64_t j = 0; j < first; ++j) {
    below += pmf;
    pmf *= static_cast<long double>(n - j) / static_cast<long double>(j + 1) * p / (1.0L - p);
  }
  long double above = 0.0L;
  for (std::int64_t j = first; j <= n; ++j) {
    above += pmf;
    pmf *= static_cast<long double>(n - j) / static_cast<long double>(j + 1) * p / (1.0L - p);
  }
  (void)below;
  return static_cast<double>(above);
}

std::string num(double v, int digits = 4) { return sig(v, digits); }

// ---------------------------------------------------------------------------

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double exact = binomial_tail(328, 0.025, 19, true);
  const auto mc = monte_carlo_tail(328, 0.025, 19, true, 20'000'000, 101);
  const bool in_range = exact >= 2.5e-4 && exact <= 3.1e-4;
  const bool agrees = std::abs(mc.rate - exact) <= 3.0 * mc.sigma;
  const double secs = seconds_since(t0);
  report(1, in_range && agrees && secs < 60.0, "binomial caption, 328 trials",
         "P(X>19)=" + num(exact) + " (caption form " + compact_sci(exact, 1) + "), MC(2e7)=" +
             num(mc.rate) + " +/- " + num(mc.sigma, 2) + ", " + fixed(secs, 1) + " s");
}

void criterion_2() {
  const std::int64_t n = 246;
  const double p = 6.1 / 246.0;
  const double ge = binomial_tail(n, p, 15, false);
  const double gt = binomial_tail(n, p, 15, true);
  const double ge_enum = enumerate_tail(n, p, 15, false);
  const double gt_enum = enumerate_tail(n, p, 15, true);
  const auto mc_ge = monte_carlo_tail(n, p, 15, false, 20'000'000, 202);
  const auto mc_gt = monte_carlo_tail(n, p, 15, true, 20'000'000, 203);
  const bool values = std::abs(ge - 1.4e-3) < 0.05e-3 && std::abs(gt - 4.9e-4) < 0.15e-4;
  const bool bracket = gt < 9e-4 && 9e-4 < ge;
  const bool oracle = std::abs(ge - ge_enum) < 1e-12 && std::abs(gt - gt_enum) < 1e-12 &&
                      std::abs(mc_ge.rate - ge) <= 3.0 * mc_ge.sigma &&
                      std::abs(mc_gt.rate - gt) <= 3.0 * mc_gt.sigma;
  report(2, values && bracket && oracle, "binomial caption, 246 trials (both conventions)",
         "P(X>=15)=" + num(ge) + " P(X>15)=" + num(gt) + " bracket 9e-4: " +
             (bracket ? "yes" : "no") + "; MC " + num(mc_ge.rate) + " / " + num(mc_gt.rate) +
             "; d=" + fixed(cohens_d(15, n, p), 3));
}

void criterion_3() {
  const double d = cohens_d(19, 328, 0.025);
  const double sigma = std::sqrt(328 * 0.025 * 0.975);
  report(3, std::abs(d - 3.82) <= 0.005 && std::abs(sigma - 2.828) <= 0.001, "Cohen's d arithmetic",
         "d=" + fixed(d, 4) + " sigma=" + fixed(sigma, 4));
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  FalseAlarmOptions opt;
  opt.seed = 404;
  const auto chk = false_alarm_tail_check(8.5, 20'000'000, opt);
  const double rel = chk.empirical_rate / chk.predicted_rate - 1.0;
  const double sd = std::sqrt(chk.finite_segment_rate / static_cast<double>(chk.trials));
  const double z = (chk.empirical_rate - chk.finite_segment_rate) / sd;
  const double secs = seconds_since(t0);
  report(4, std::abs(rel) <= 0.10 && secs < 300.0, "false-alarm rate at 8.5 dB",
         "empirical=" + num(chk.empirical_rate) + " over " + std::to_string(chk.trials) +
             " bins, exp(-10^0.85)=" + num(chk.predicted_rate) + " (" + fixed(100 * rel, 2) +
             "%), 256-bin estimator law=" + num(chk.finite_segment_rate) + " (ratio " +
             fixed(chk.finite_segment_rate / chk.predicted_rate, 4) + ", z=" + fixed(z, 2) + "), " +
             fixed(secs, 1) + " s");
}

// ---------------------------------------------------------------------------

ObservationConfig five_mhz_band() {
  ObservationConfig o;
  o.band_low_hz = 1405e6;
  o.band_high_hz = 1410e6;
  o.excision_low_hz = 1409.99e6;
  o.excision_high_hz = 1410e6;
  return o;
}

void criterion_5() {
  // (a) Co-directional pairs, residual delay at most 1.5 + 1.3 ns.
  ObservationConfig o = five_mhz_band();
  o.tau_int_true_s = -144e-9;
  o.ra_window_low_hr = 5.2;
  o.ra_window_high_hr = 5.3;
  o.duration_days = 20;
  SourceSpec src;
  src.pulse_rate_per_frame = 0.02;
  src.snr_target_db = 60.0;
  src.delta_f_min_hz = 11.2;
  src.delta_f_max_hz = 2.0e6;
  const Simulator sim(o, {src});
  FirstLevelParams fl = FirstLevelParams::from(o, 15.0);
  const auto events = detect_frames(sim, 0, sim.schedule().frame_count(), fl);
  // At 15 dB noise never crosses, so every event is an injected tone and
  // every candidate joins two tones of the same source.
  std::int64_t tones = 0;
  for (std::int64_t f = 0; f < sim.schedule().frame_count(); ++f)
    tones += static_cast<std::int64_t>(sim.tones(f).size());
  const auto cands = form_pairs(events, {});
  PhaseMetricParams pm;
  pm.tau_int_s = -144e-9 + 1.5e-9;
  const auto r = second_level_filter(cands, pm);
  double worst = 0.0;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (r.verdicts[i] != FilterVerdict::kDeltaF) worst = std::max(worst, std::abs(r.metrics[i]));
  const auto gated = static_cast<std::int64_t>(cands.size() - r.rejected_delta_f);
  const double pass_rate = gated > 0 ? static_cast<double>(r.passed.size()) / gated : 0.0;
  const bool co_ok = static_cast<std::int64_t>(events.size()) == tones && gated >= 300 &&
                     pass_rate >= 0.99;

  // (b) Sidelobe carriers with a 100 ns West-path delay.
  ObservationConfig so = five_mhz_band();
  so.tau_int_true_s = -144e-9;
  so.ra_window_low_hr = 5.2;
  so.ra_window_high_hr = 5.21;
  PhaseMetricParams sp;
  sp.tau_int_s = -144e-9;
  const int points = 80;
  double last_pass = 0.0, first_fail = 0.0;
  bool monotone = true, seen_fail = false;
  for (int i = 0; i < points; ++i) {
    const double df = 1e3 * std::pow(1990.0, static_cast<double>(i) / (points - 1));
    RfiSpec a;
    a.rf_freq_hz = 1405.5e6;
    a.power_rel_noise = 1e6;
    a.direction = RfiDirection::kSidelobeDelay;
    a.sidelobe_delay_s = 100e-9;
    RfiSpec b = a;
    b.rf_freq_hz = a.rf_freq_hz + df;
    const Simulator rs(so, {}, {a, b});
    const auto ev = detect_frame(rs, 0, FirstLevelParams::from(so, 15.0));
    const auto pc = form_pairs(ev, {});
    if (pc.size() != 1) {
      monotone = false;
      continue;
    }
    const bool pass = second_level_filter(pc, sp).passed.size() == 1;
    if (pass) {
      if (seen_fail) monotone = false;
      last_pass = pc[0].delta_f_hz;
    } else if (!seen_fail) {
      seen_fail = true;
      first_fail = pc[0].delta_f_hz;
    }
  }
  const double predicted = 0.04 / (kTwoPi * 100e-9);
  const double cutoff = std::sqrt(last_pass * first_fail);
  const bool side_ok = monotone && seen_fail && cutoff > predicted / 2 && cutoff < predicted * 2;
  report(5, co_ok && side_ok, "phase filter discrimination",
         "co-directional: " + std::to_string(r.passed.size()) + "/" + std::to_string(gated) +
             " pairs inside the df range pass (" + fixed(100 * pass_rate, 2) +
             "%, max |metric| " + num(worst, 3) + " rad, " + std::to_string(events.size()) +
             " events from " + std::to_string(tones) + " tones); sidelobe cutoff " +
             num(cutoff / 1e3, 4) + " kHz vs predicted " + num(predicted / 1e3, 4) + " kHz" +
             (monotone ? "" : " (non-monotone)"));
}

// ---------------------------------------------------------------------------

ExperimentConfig scaled_run(double rate) {
  ExperimentConfig c;
  c.experiment_id = "scaled";
  c.observation.band_high_hz = 1406e6;
  c.observation.excision_low_hz = 1405.99e6;
  c.observation.excision_high_hz = 1406e6;
  c.observation.duration_days = 6;
  c.pairing.pairing_window_frames = 4;
  SourceSpec s;
  s.ra_hr = 5.25;
  s.dec_deg = -7.6;
  s.pulse_rate_per_frame = rate;
  s.snr_target_db = 40.0;
  s.delta_f_min_hz = 10.0;
  s.delta_f_max_hz = 20e3;
  c.sources.push_back(s);
  return c;
}

/// Sum of beam gains over the frames of the whole schedule and of one RA bin.
struct GainSums {
  double all = 0.0;
  double bin = 0.0;
};

GainSums gain_sums(const ExperimentConfig& c, const RaInterval& bin) {
  const Simulator sim(c.observation, c.sources);
  const SourceSpec& s = c.sources.front();
  GainSums g;
  for (std::int64_t f = 0; f < sim.schedule().frame_count(); ++f) {
    const FrameTiming t = sim.schedule().timing(f);
    const double dra = std::remainder(t.ra_pointing_hr - s.ra_hr, 24.0) * 15.0;
    const double gain =
        beam_gain(std::hypot(dra, c.observation.dec_deg - s.dec_deg), c.observation.fwhm_deg);
    g.all += gain;
    if (t.ra_pointing_hr >= bin.low_hr && t.ra_pointing_hr < bin.high_hr) g.bin += gain;
  }
  return g;
}

struct ScaledResult {
  int bin = -1;
  double d_bin = 0.0;
  double excess = 0.0;
  double max_abs = 0.0;
  bool bin_is_peak = false;
  std::int64_t trials = 0;
};

ScaledResult run_scaled(const ExperimentConfig& c, const fs::path& dir) {
  RunOptions o;
  o.resume = false;
  o.last_stage = "analyze";
  const RunSummary s = run_experiment(c, dir, o);
  ScaledResult r;
  r.bin = c.analysis.binning.bin_of(5.25);
  const RABinStats& b = s.analysis.bins.at(static_cast<std::size_t>(r.bin));
  r.d_bin = b.cohens_d;
  r.excess = static_cast<double>(b.observed_count) - b.expected_mean;
  r.max_abs = max_abs_d(s.analysis.bins);
  r.trials = b.trials_n;
  const PeakReport peak = find_peak(s.analysis.bins, std::nullopt);
  r.bin_is_peak = peak.valid && peak.bin == r.bin;
  return r;
}

void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  const RaInterval bin{5.2, 5.3};
  const double p = 0.025;
  const GainSums g = gain_sums(scaled_run(1.0), bin);
  // Expected excess of the 5.2-5.3 hr bin over its binomial mean, per unit rate.
  const double per_rate = g.bin - p * g.all;
  const double target_excess = 11.0;
  const double rate = target_excess / per_rate;

  const auto dir = testutil::scratch_dir("acceptance6");
  int detected = 0, peak_and_detected = 0, null_clear = 0;
  double excess_sum = 0.0, trials_sum = 0.0, null_max = 0.0;
  const int seeds = 20;
  for (int seed = 1; seed <= seeds; ++seed) {
    ExperimentConfig inj = scaled_run(rate);
    inj.observation.seed = static_cast<std::uint64_t>(seed);
    const ScaledResult ri = run_scaled(inj, dir / ("inj" + std::to_string(seed)));
    ExperimentConfig null = inj;
    null.sources.clear();
    const ScaledResult rn = run_scaled(null, dir / ("null" + std::to_string(seed)));
    detected += ri.d_bin >= 3.5;
    peak_and_detected += ri.d_bin >= 3.5 && ri.bin_is_peak;
    null_clear += rn.max_abs < 3.5;
    null_max = std::max(null_max, rn.max_abs);
    excess_sum += ri.excess;
    trials_sum += static_cast<double>(rn.trials);
    std::cout << "      seed " << seed << ": injected d(5.2-5.3)=" << fixed(ri.d_bin, 2)
              << " excess=" << fixed(ri.excess, 1) << (ri.bin_is_peak ? " (peak)" : "")
              << "; null max|d|=" << fixed(rn.max_abs, 2) << " trials=" << rn.trials << std::endl;
  }
  // Not part of the verdict: detection power with a larger excess.
  int strong_detected = 0;
  double strong_excess = 0.0;
  const double strong_target = 20.0;
  for (int seed = 1; seed <= seeds; ++seed) {
    ExperimentConfig inj = scaled_run(strong_target / per_rate);
    inj.observation.seed = static_cast<std::uint64_t>(seed);
    const ScaledResult ri = run_scaled(inj, dir / ("strong" + std::to_string(seed)));
    strong_detected += ri.d_bin >= 3.5;
    strong_excess += ri.excess;
  }
  std::cout << "      info: with an expected excess of " << fixed(strong_target, 0)
            << " (measured mean " << fixed(strong_excess / seeds, 1) << ") d>=3.5 in "
            << strong_detected << "/20 seeds" << std::endl;
  fs::remove_all(dir);
  const double secs = seconds_since(t0);
  const bool inj_ok = detected * 100 >= 90 * seeds;
  const bool null_ok = null_clear * 100 >= 95 * seeds;
  report(6, inj_ok && null_ok && secs < 900.0, "scaled end-to-end injection recovery",
         "rate " + num(rate, 3) + "/frame, mean excess " + fixed(excess_sum / seeds, 1) +
             " over mean " + fixed(trials_sum / seeds * p, 1) + "; injected d>=3.5 in " +
             std::to_string(detected) + "/20 (also peak: " + std::to_string(peak_and_detected) +
             "), null max|d|<3.5 in " + std::to_string(null_clear) + "/20 (largest " +
             fixed(null_max, 2) + "), " + fixed(secs, 0) + " s");
}

// ---------------------------------------------------------------------------

void criterion_7() {
  // (a) delay-tap scan of a synthetic correlator calibrator.
  const auto data = simulate_correlator_frames(CorrelatorSimSpec{});
  const auto coarse = tau_int_scan(data, -200e-9, 0.0, 10e-9);
  const auto fine = tau_int_scan(data, -200e-9, 0.0, 1e-9);
  const bool scan_ok = std::abs(coarse.tau_int_s + 144e-9) <= 10e-9 + 1e-15 &&
                       std::abs(fine.tau_int_s + 144e-9) <= 1e-9 + 1e-15;

  // (b) grid search on an injected run. One 0.6 hr bin covers the beam FWHM,
  // and a 12 m baseline spreads the geometric delay inside it by about the
  // filter tolerance at 2 MHz, so the in-beam count peaks at the true delay.
  ExperimentConfig c;
  c.observation = five_mhz_band();
  c.observation.baseline_meters = 12.0;
  c.observation.tau_int_true_s = -144e-9;
  c.observation.ra_window_low_hr = 4.95;
  c.observation.ra_window_high_hr = 5.55;
  c.observation.duration_days = 2;
  c.analysis.binning = {3.15, 7.35, 0.6};
  SourceSpec s;
  s.pulse_rate_per_frame = 0.05;
  s.snr_target_db = 35.0;
  s.delta_f_min_hz = 1.8e6;
  s.delta_f_max_hz = 2.0e6;
  c.sources.push_back(s);
  const auto level1 = run_detect(c);
  const auto cands = form_pairs(level1, c.pairing);
  const auto objective = peak_d_objective(c, level1);
  std::string detail;
  bool tune_ok = true;
  for (double center : {-144e-9, -140e-9, -150e-9}) {
    const auto r = tune_tau_int(cands, c.phase.centered(center, 10e-9), c.analysis.fwhm_window(),
                                objective);
    const bool ok = std::abs(r.tau_best_s + 144e-9) <= 1e-9 + 1e-15;
    tune_ok = tune_ok && ok;
    detail += " grid " + fixed(center * 1e9, 0) + "+/-10 ns -> " + fixed(r.tau_best_s * 1e9, 0) +
              " ns (d=" + fixed(r.d_best, 2) + ");";
  }
  report(7, scan_ok && tune_ok, "instrument delay recovery",
         "tap scan 10 ns -> " + fixed(coarse.tau_int_s * 1e9, 0) + " ns, 1 ns -> " +
             fixed(fine.tau_int_s * 1e9, 0) + " ns;" + detail);
}

void criterion_8() {
  struct Case {
    double fwhm_deg;
    double snr_db;
  };
  double worst = 0.0;
  bool all_converged = true;
  for (const Case& k : {Case{9.0, 0.18}, Case{8.2, 0.25}}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      DriftScanSynthSpec spec;
      spec.fwhm_deg = k.fwhm_deg;
      spec.amplitude = spec.floor * (std::pow(10.0, k.snr_db / 10.0) - 1.0);
      spec.noise_rel = 0.01;
      spec.seed = seed;
      const auto fit = fit_gauss_flat(synthesize_drift_scan(spec));
      all_converged = all_converged && fit.converged;
      if (!fit.converged) continue;
      const double errs[] = {
          std::abs(fit.fwhm_deg() / k.fwhm_deg - 1.0),
          std::abs(continuum_snr_db(fit) / k.snr_db - 1.0),
          std::abs(fit.amplitude / spec.amplitude - 1.0),
          std::abs(fit.floor / spec.floor - 1.0),
          std::abs(fit.center_ra_hr - spec.center_ra_hr) / (k.fwhm_deg / 15.0),
      };
      for (double e : errs) worst = std::max(worst, e);
    }
  }
  report(8, all_converged && worst <= 0.02, "drift-scan calibration fit",
         "worst relative parameter error " + fixed(100 * worst, 3) +
             "% over FWHM 9.0/8.2 deg, 0.18/0.25 dB, 5 seeds each, 1% floor noise");
}

void criterion_9() {
  double worst = 0.0;
  for (int n = 0; n <= 20; ++n) {
    for (double p : {0.001, 0.025, 0.1, 0.37, 0.5, 0.9}) {
      std::vector<long double> weight(static_cast<std::size_t>(n) + 1);
      for (int ones = 0; ones <= n; ++ones)
        weight[static_cast<std::size_t>(ones)] =
            std::pow(static_cast<long double>(p), ones) *
            std::pow(1.0L - static_cast<long double>(p), n - ones);
      for (int k = 0; k <= n; ++k) {
        for (bool strict : {false, true}) {
          long double brute = 0.0L;
          for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            const int ones = __builtin_popcount(mask);
            if (strict ? ones > k : ones >= k) brute += weight[static_cast<std::size_t>(ones)];
          }
          worst = std::max(worst, std::abs(binomial_tail(n, p, k, strict) -
                                           static_cast<double>(brute)));
        }
      }
    }
  }

  // A fixed 10^4-event archive, re-read from disk, re-filtered under 50
  // successive random widenings.
  Rng rng(909);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PulseEvent> events;
  for (int i = 0; i < 10000; ++i) {
    PulseEvent e;
    e.frame_index = i / 4;
    e.bin_index = static_cast<std::int64_t>(u(rng) * 13.5e6);
    e.utc_s = 1717200000.0 + 0.27 * e.frame_index;
    e.rf_freq_hz = 1405e6 + e.bin_index / 0.27;
    e.snr_east_db = 8.6 + 4 * u(rng);
    e.snr_west_db = 8.6 + 4 * u(rng);
    e.phase_east_rad = uniform_phase(rng);
    e.phase_west_rad = uniform_phase(rng);
    e.polarization = Polarization::kX;
    e.ra_pointing_hr = 3.3 + 4.0 * u(rng);
    events.push_back(e);
  }
  const auto dir = testutil::scratch_dir("acceptance9");
  write_level1_archive(dir / "level1.csv", events);
  const auto archive = read_level1_archive(dir / "level1.csv");
  fs::remove_all(dir);
  const auto cands = form_pairs(archive, {});
  PhaseMetricParams params;
  params.delta_f.log_tolerance = 0.0;
  std::size_t count = second_level_filter(cands, params).passed.size();
  const std::size_t first = count;
  bool monotone = true;
  for (int i = 0; i < 50; ++i) {
    params.filter_halfwidth_rad += 0.05 * u(rng);
    params.delta_f.log_low -= 0.2 * u(rng);
    params.delta_f.log_high += 0.2 * u(rng);
    const std::size_t c = second_level_filter(cands, params).passed.size();
    monotone = monotone && c >= count;
    count = c;
  }
  report(9, worst <= 1e-12 && monotone && archive.size() == 10000, "oracle equivalence",
         "max |tail - enumeration| = " + num(worst, 3) + " for n<=20; passing count " +
             std::to_string(first) + " -> " + std::to_string(count) + " over 50 widenings" +
             (monotone ? "" : " (NOT monotone)"));
}

void criterion_10() {
  ExperimentConfig c = scaled_run(2e-3);
  c.observation.duration_days = 2;
  c.analysis.per_day = true;
  const auto dir = testutil::scratch_dir("acceptance10");
  std::string stats, svg, hash;
  bool same = true;
  for (int threads : {1, 2, 8}) {
    RunOptions o;
    o.threads = threads;
    const fs::path out = dir / ("t" + std::to_string(threads));
    const RunSummary s = run_experiment(c, out, o);
    const std::string st = testutil::slurp(out / "stats.csv");
    const std::string sv = testutil::slurp(out / "stats.svg");
    if (stats.empty()) {
      stats = st;
      svg = sv;
      hash = s.manifest.content_hash;
    } else {
      same = same && st == stats && sv == svg && s.manifest.content_hash == hash;
    }
  }
  fs::remove_all(dir);
  report(10, same && !stats.empty() && !svg.empty(), "determinism across worker counts",
         std::string("stats.csv and stats.svg ") + (same ? "byte-identical" : "DIFFER") +
             " for 1, 2 and 8 threads; content hash " + hash.substr(0, 16));
}

}  // namespace

// Optional arguments select criteria by number; no arguments runs all of them.
int main(int argc, char** argv) {
  std::vector<bool> selected(11, argc <= 1);
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id >= 1 && id <= 10) selected[static_cast<std::size_t>(id)] = true;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<void (*)()> criteria = {criterion_1, criterion_2, criterion_3, criterion_4,
                                            criterion_5, criterion_6, criterion_7, criterion_8,
                                            criterion_9, criterion_10};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i + 1]) continue;
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, "criterion raised", e.what());
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << " in " << fixed(seconds_since(t0), 0) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
