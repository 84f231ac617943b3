// Command-line front end for the pulse-pair pipeline.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pulsepair/calib.hpp"
#include "pulsepair/channelizer.hpp"
#include "pulsepair/config.hpp"
#include "pulsepair/format.hpp"
#include "pulsepair/pipeline.hpp"
#include "pulsepair/svgplot.hpp"

namespace fs = std::filesystem;
using namespace pulsepair;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kStageFailure = 2, kValidation = 3 };

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int threads = 1;
  std::string format = "csv";
  std::vector<std::string> overrides;
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig c = g.config_path.empty() ? ExperimentConfig{} : load_config(g.config_path);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
    set_config_value(c, std::string(trim(std::string_view(kv).substr(0, eq))),
                     std::string(trim(std::string_view(kv).substr(eq + 1))));
  }
  if (g.seed) c.observation.seed = *g.seed;
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void print_summary(const RunSummary& s) {
  std::cout << "experiment: " << s.manifest.experiment_id << '\n'
            << "level-1 events: " << s.level1_events << '\n'
            << "second-level candidates: " << s.passed << '\n';
  for (const auto& st : s.manifest.stages) std::cout << "stage " << st.name << ": " << st.status << '\n';
  for (const auto& w : s.analysis.warnings) std::cerr << "warning: " << w << '\n';
  if (s.analysis.peak.valid) {
    const auto& p = s.analysis.peak.stats;
    std::cout << "peak bin: " << fixed(p.ra_low_hr, 2) << "-" << fixed(p.ra_high_hr, 2)
              << " hr, d = " << fixed(p.cohens_d, 3) << ", P(X >= k) = " << sig(p.tail_prob_ge, 4)
              << ", P(X > k) = " << sig(p.tail_prob_gt, 4) << '\n'
              << s.analysis.peak.caption << '\n';
  }
  std::cout << "content hash: " << s.manifest.content_hash << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interferometric pulse-pair simulator and analysis pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Experiment config file (key = value lines)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override the simulation seed");
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on this)")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
  app.add_option("--format", g.format, "Primary output format")
      ->check(CLI::IsMember({"csv", "svg"}))
      ->capture_default_str();
  app.add_option("--set", g.overrides, "Override a config key (key=value), repeatable");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Write channelized bin measurements of simulated frames");
  std::int64_t sim_first = 0, sim_frames = 1;
  sim_cmd->add_option("--first-frame", sim_first, "First frame index")->capture_default_str();
  sim_cmd->add_option("--frames", sim_frames, "Number of frames")->capture_default_str();

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "Simulate and first-level filter into level1.csv");
  bool no_resume = false;
  detect_cmd->add_flag("--no-resume", no_resume, "Recompute every stage");

  // refilter
  auto* refilter_cmd =
      app.add_subcommand("refilter", "Pair and second-level filter a level-1 archive");
  std::string level1_in;
  refilter_cmd->add_option("--level1", level1_in, "Level-1 archive (default: <out>/level1.csv)");
  std::string diag_path;
  refilter_cmd->add_option("--phase-diagnostics", diag_path,
                           "Write (delta_f, metric, pass, reason) rows to this CSV");
  refilter_cmd->add_flag("--no-resume", no_resume, "Recompute every stage");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Full pipeline up to RA-binned statistics");
  std::string analyze_level1;
  analyze_cmd->add_option("--level1", analyze_level1, "Start from this level-1 archive");
  analyze_cmd->add_flag("--no-resume", no_resume, "Recompute every stage");

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "Drift-scan fit and delay-tap scan");
  std::string scan_path;
  DriftScanSynthSpec synth;
  double synth_snr_db = 0.18;
  bool tau_scan = false;
  CorrelatorSimSpec corr;
  double tap_low = -200e-9, tap_high = 0.0, tap_step = 10e-9;
  std::string source_name = "NRAO 5690";
  cal_cmd->add_option("--scan", scan_path, "Drift-scan CSV (utc_s, power); synthesized if absent");
  cal_cmd->add_option("--source-name", source_name)->capture_default_str();
  cal_cmd->add_option("--fwhm-deg", synth.fwhm_deg, "Synthetic scan FWHM (RA degrees)")->capture_default_str();
  cal_cmd->add_option("--continuum-snr-db", synth_snr_db, "Synthetic scan peak over floor")->capture_default_str();
  cal_cmd->add_option("--noise-rel", synth.noise_rel, "Synthetic scan noise / floor")->capture_default_str();
  cal_cmd->add_option("--center-ra-hr", synth.center_ra_hr)->capture_default_str();
  cal_cmd->add_flag("--tau-scan", tau_scan, "Also run the correlator delay-tap scan");
  cal_cmd->add_option("--tau-true", corr.tau_true_s, "Synthetic instrument delay (s)")->capture_default_str();
  cal_cmd->add_option("--tap-low", tap_low)->capture_default_str();
  cal_cmd->add_option("--tap-high", tap_high)->capture_default_str();
  cal_cmd->add_option("--tap-step", tap_step)->capture_default_str();

  // tune-tau
  auto* tune_cmd = app.add_subcommand("tune-tau", "Grid-search tau_int for the largest in-beam d");
  std::string tune_level1;
  tune_cmd->add_option("--level1", tune_level1, "Level-1 archive (default: run detect)");

  // null-mc
  auto* null_cmd = app.add_subcommand("null-mc", "Null (no injection) Monte Carlo over seeds");
  int null_runs = 20;
  null_cmd->add_option("--runs", null_runs, "Number of seeds")->check(CLI::Range(1, 100000))->capture_default_str();

  // report
  auto* report_cmd = app.add_subcommand("report", "Summarize or re-plot an experiment directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const fs::path out(g.out_dir);
  try {
    if (*sim_cmd) {
      const ExperimentConfig c = load(g);
      const Simulator sim(c.observation, c.sources, c.rfi);
      if (sim_first < 0 || sim_frames < 1 || sim_first + sim_frames > sim.schedule().frame_count())
        throw ValidationError("frame range outside the schedule");
      std::ostringstream text;
      std::vector<BinMeasurement> rows;
      const ChannelizerOptions opts{c.observation.bins_per_segment, c.exclude_test_bin};
      for (const auto& fp : sim.frames(sim_first, sim_frames, g.threads)) {
        for (const FrameSpectrum* f : {&fp.east, &fp.west}) {
          auto m = channelize(*f, c.observation, opts);
          rows.insert(rows.end(), m.begin(), m.end());
        }
      }
      write_bin_measurements_csv(text, rows);
      write_text(out / "bins.csv", text.str());
      std::cout << "wrote " << rows.size() << " bin measurements to " << (out / "bins.csv").string() << '\n';
      return kOk;
    }

    if (*detect_cmd || *refilter_cmd || *analyze_cmd) {
      const ExperimentConfig c = load(g);
      RunOptions ro;
      ro.threads = g.threads;
      ro.resume = !no_resume;
      if (*detect_cmd) ro.last_stage = "detect";
      if (*refilter_cmd) ro.last_stage = "refilter";
      if (*analyze_cmd) ro.last_stage = g.format == "svg" ? "plot" : "analyze";
      const std::string& l1 = *refilter_cmd ? level1_in : analyze_level1;
      if (!l1.empty()) ro.level1_input = fs::path(l1);
      if (*refilter_cmd && l1.empty() && fs::exists(out / "level1.csv"))
        ro.level1_input = out / "level1.csv";
      const RunSummary s = run_experiment(c, out, ro);
      if (*refilter_cmd && !diag_path.empty()) {
        const auto events = read_level1_archive(out / "level1.csv");
        const auto r = run_refilter(events, c);
        std::ostringstream text;
        write_phase_diagnostics_csv(text, r.candidates, r.second_level);
        write_text(diag_path, text.str());
      }
      print_summary(s);
      return kOk;
    }

    if (*cal_cmd) {
      DriftScan scan;
      if (!scan_path.empty()) {
        std::ifstream in(scan_path);
        if (!in) throw Error("cannot open " + scan_path);
        scan = read_drift_scan_csv(in);
        const ExperimentConfig c = load(g);
        scan.longitude_deg = c.observation.longitude_deg;
        scan.dec_deg = c.observation.dec_deg;
      } else {
        if (g.seed) synth.seed = *g.seed;
        synth.amplitude = synth.floor * (std::pow(10.0, synth_snr_db / 10.0) - 1.0);
        scan = synthesize_drift_scan(synth);
        std::ostringstream text;
        write_drift_scan_csv(text, scan);
        write_text(out / "drift_scan.csv", text.str());
      }
      scan.source_name = source_name;
      const GaussFlatFit fit = fit_gauss_flat(scan);
      std::ostringstream report;
      write_fit_report(report, scan, fit);
      if (tau_scan) {
        if (g.seed) corr.seed = *g.seed;
        const auto data = simulate_correlator_frames(corr);
        const auto r = tau_int_scan(data, tap_low, tap_high, tap_step);
        report << "tau_int_s = " << sig(r.tau_int_s, 6) << '\n'
               << "tau_int_uncertainty_s = " << sig(r.uncertainty_s, 6) << '\n';
      }
      write_text(out / "calibration.txt", report.str());
      std::cout << report.str();
      return fit.converged ? kOk : kStageFailure;
    }

    if (*tune_cmd) {
      const ExperimentConfig c = load(g);
      const auto level1 = tune_level1.empty() ? run_detect(c, g.threads) : read_level1_archive(tune_level1);
      const auto cands = form_pairs(level1, c.pairing);
      const auto r = tune_tau_int(cands, c.phase, c.analysis.fwhm_window(),
                                  peak_d_objective(c, level1), g.threads);
      std::ostringstream text;
      text << "tau_s,peak_d\n";
      for (Eigen::Index k = 0; k < r.taus_s.size(); ++k)
        text << sig(r.taus_s[k], 9) << ',' << fixed(r.objective[k], 6) << '\n';
      write_text(out / "tune_tau.csv", text.str());
      std::cout << "tau_best_s = " << sig(r.tau_best_s, 6) << "\nd_best = " << fixed(r.d_best, 4) << '\n';
      return kOk;
    }

    if (*null_cmd) {
      const ExperimentConfig c = load(g);
      const auto runs = null_monte_carlo(c, c.observation.seed, null_runs, g.threads);
      std::ostringstream text;
      text << "seed,trials_n,max_abs_d,peak_ra_hr,flagged\n";
      int flagged = 0;
      for (const auto& r : runs) {
        text << r.seed << ',' << r.trials << ',' << fixed(r.max_abs_d, 6) << ','
             << fixed(r.peak_ra_hr, 3) << ',' << (r.flagged ? 1 : 0) << '\n';
        flagged += r.flagged ? 1 : 0;
      }
      write_text(out / "null_mc.csv", text.str());
      std::cout << "runs: " << runs.size() << ", flagged at |d| >= "
                << fixed(c.analysis.significance_d, 2) << ": " << flagged << '\n';
      return kOk;
    }

    if (*report_cmd) {
      const ExperimentManifest m = read_manifest_file(out / "manifest.txt");
      std::ifstream in(out / "stats.csv");
      if (!in) throw Error("no stats.csv in " + out.string());
      const auto stats = read_stats_csv(in);
      const PeakReport peak = find_peak(stats, m.config.analysis.fwhm_window());
      if (g.format == "svg") {
        PlotOptions po;
        po.title = m.experiment_id + ": Cohen's d vs RA";
        write_text(out / "report.svg", plot_stats(stats, m.config.analysis.fwhm_center_hr,
                                                  m.config.analysis.fwhm_width_hr, po));
      }
      std::cout << "experiment: " << m.experiment_id << " (" << m.status << ")\n"
                << "tool: " << m.tool_version << "\ncontent hash: " << m.content_hash << '\n';
      if (peak.valid) {
        std::cout << "in-beam peak: " << fixed(peak.stats.ra_low_hr, 2) << "-"
                  << fixed(peak.stats.ra_high_hr, 2) << " hr, d = " << fixed(peak.stats.cohens_d, 3)
                  << "\nP(X >= k) = " << sig(peak.stats.tail_prob_ge, 4)
                  << ", P(X > k) = " << sig(peak.stats.tail_prob_gt, 4) << '\n'
                  << peak.caption << '\n';
      } else {
        std::cout << "no statistics in the in-beam window\n";
      }
      return m.status == "ok" ? kOk : kStageFailure;
    }
  } catch (const StageError& e) {
    std::cerr << "stage failure: " << e.what() << '\n';
    return kStageFailure;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const FormatError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStageFailure;
  }
  return kUsage;
}
