#include "pulsepair/pipeline.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "pulsepair/format.hpp"
#include "pulsepair/svgplot.hpp"

namespace pulsepair {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

// Lines of the canonical config whose key satisfies `keep`.
template <typename Pred>
std::string config_subset(const ExperimentConfig& config, Pred keep) {
  std::istringstream in(canonical_config(config));
  std::string line, out;
  while (std::getline(in, line)) {
    const std::string key(trim(std::string_view(line).substr(0, line.find('='))));
    if (keep(key)) out += line + '\n';
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

bool detect_key(const std::string& k) {
  return !(starts_with(k, "phase.") || starts_with(k, "pairing.") || starts_with(k, "analysis.") ||
           k == "experiment_id");
}

}  // namespace

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

std::vector<PulseEvent> run_detect(const ExperimentConfig& config, int threads) {
  config.validate();
  const Simulator sim(config.observation, config.sources, config.rfi);
  return detect_frames(sim, 0, sim.schedule().frame_count(), config.first_level(), threads);
}

RefilterOutput run_refilter(std::span<const PulseEvent> level1, const ExperimentConfig& config) {
  RefilterOutput out;
  out.candidates = form_pairs(level1, config.pairing, &out.pairing);
  out.second_level = second_level_filter(out.candidates, config.phase);
  return out;
}

AnalyzeOptions analyze_options(const ExperimentConfig& config) {
  AnalyzeOptions o;
  o.binning = config.analysis.binning;
  o.mode = config.analysis.mode;
  o.per_day = config.analysis.per_day;
  return o;
}

Analysis run_analyze(std::span<const PairCandidate> passed, std::span<const PulseEvent> level1,
                     const ExperimentConfig& config) {
  return analyze(passed, analyze_options(config), level1);
}

TauObjective peak_d_objective(const ExperimentConfig& config, std::span<const PulseEvent> level1) {
  AnalyzeOptions opts = analyze_options(config);
  opts.per_day = false;
  std::vector<PulseEvent> events(level1.begin(), level1.end());
  return [opts, events](std::span<const PairCandidate> passed, const RaInterval& window) {
    AnalyzeOptions o = opts;
    o.peak_window = window;
    const Analysis a = analyze(passed, o, events);
    return a.peak.valid ? a.peak.stats.cohens_d : -std::numeric_limits<double>::infinity();
  };
}

// ---------------------------------------------------------------------------
// Candidates CSV

namespace {

constexpr std::string_view kCandidateHeader =
    "frame_a,bin_a,rf_a_hz,utc_a_s,phase_east_a_rad,phase_west_a_rad,frame_b,bin_b,rf_b_hz,"
    "utc_b_s,phase_east_b_rad,phase_west_b_rad,delta_t_s,delta_f_hz,log10_delta_f_mhz,"
    "phase_metric_rad,ra_pointing_hr";

}  // namespace

void write_candidates_csv(std::ostream& out, std::span<const PairCandidate> candidates) {
  out << kCandidateHeader << '\n';
  for (const auto& c : candidates) {
    for (const PulseEvent* e : {&c.a, &c.b})
      out << e->frame_index << ',' << e->bin_index << ',' << fixed(e->rf_freq_hz, 1) << ','
          << fixed(e->utc_s, 3) << ',' << sig(e->phase_east_rad, 6) << ','
          << sig(e->phase_west_rad, 6) << ',';
    out << fixed(c.delta_t_s, 3) << ',' << fixed(c.delta_f_hz, 1) << ','
        << sig(c.log10_delta_f_mhz, 9) << ',' << sig(c.phase_metric_rad, 9) << ','
        << sig(c.ra_pointing_hr, 9) << '\n';
  }
}

std::vector<PairCandidate> read_candidates_csv(std::istream& in) {
  std::vector<PairCandidate> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (!header) {
      if (text != kCandidateHeader) throw FormatError("candidates header does not match", line_no);
      header = true;
      continue;
    }
    const auto cols = split(text, ',');
    if (cols.size() != 17) throw FormatError("expected 17 columns", line_no);
    std::array<double, 17> v{};
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto d = parse_double(cols[i]);
      if (!d) throw FormatError("bad number '" + std::string(cols[i]) + "'", line_no);
      v[i] = *d;
    }
    PairCandidate c;
    std::size_t k = 0;
    for (PulseEvent* e : {&c.a, &c.b}) {
      e->frame_index = static_cast<std::int64_t>(v[k++]);
      e->bin_index = static_cast<std::int64_t>(v[k++]);
      e->rf_freq_hz = v[k++];
      e->utc_s = v[k++];
      e->phase_east_rad = v[k++];
      e->phase_west_rad = v[k++];
    }
    c.delta_t_s = v[k++];
    c.delta_f_hz = v[k++];
    c.log10_delta_f_mhz = v[k++];
    c.phase_metric_rad = v[k++];
    c.ra_pointing_hr = v[k++];
    c.a.ra_pointing_hr = c.b.ra_pointing_hr = c.ra_pointing_hr;
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

const StageRecord* ExperimentManifest::stage(std::string_view name) const {
  for (const auto& s : stages)
    if (s.name == name) return &s;
  return nullptr;
}

void write_manifest(std::ostream& out, const ExperimentManifest& m) {
  out << "experiment_id = " << m.experiment_id << '\n'
      << "tool_version = " << m.tool_version << '\n'
      << "status = " << m.status << '\n';
  if (!m.failed_stage.empty()) out << "failed_stage = " << m.failed_stage << '\n';
  if (!m.error.empty()) {
    std::string err = m.error;
    for (char& c : err)
      if (c == '\n') c = ' ';
    out << "error = " << err << '\n';
  }
  out << "config_hash = " << m.config_hash << '\n';
  out << "content_hash = " << m.content_hash << '\n';
  for (std::size_t i = 0; i < m.inputs.size(); ++i) out << "input." << i << " = " << m.inputs[i] << '\n';
  for (const auto& s : m.stages) {
    out << "stage." << s.name << ".status = " << s.status << '\n';
    out << "stage." << s.name << ".input_hash = " << s.input_hash << '\n';
    for (const auto& [file, hash] : s.output_hashes)
      out << "stage." << s.name << ".output." << file << " = " << hash << '\n';
  }
  std::istringstream cfg(canonical_config(m.config));
  std::string line;
  while (std::getline(cfg, line)) out << "config." << line << '\n';
}

ExperimentManifest read_manifest(std::istream& in) {
  ExperimentManifest m;
  m.tool_version.clear();
  std::ostringstream cfg;
  std::string line;
  std::size_t line_no = 0;
  auto stage_ref = [&](const std::string& name) -> StageRecord& {
    for (auto& s : m.stages)
      if (s.name == name) return s;
    m.stages.push_back({name, "", "", {}});
    return m.stages.back();
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw FormatError("expected 'key = value'", line_no);
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (starts_with(key, "config.")) {
      cfg << key.substr(7) << " = " << value << '\n';
    } else if (starts_with(key, "stage.")) {
      const auto dot = key.find('.', 6);
      if (dot == std::string::npos) throw FormatError("bad stage key", line_no);
      StageRecord& s = stage_ref(key.substr(6, dot - 6));
      const std::string rest = key.substr(dot + 1);
      if (rest == "status") s.status = value;
      else if (rest == "input_hash") s.input_hash = value;
      else if (starts_with(rest, "output.")) s.output_hashes[rest.substr(7)] = value;
      else throw FormatError("unknown stage field '" + rest + "'", line_no);
    } else if (starts_with(key, "input.")) {
      m.inputs.push_back(value);
    } else if (key == "experiment_id") {
      m.experiment_id = value;
    } else if (key == "tool_version") {
      m.tool_version = value;
    } else if (key == "status") {
      m.status = value;
    } else if (key == "failed_stage") {
      m.failed_stage = value;
    } else if (key == "error") {
      m.error = value;
    } else if (key == "config_hash") {
      m.config_hash = value;
    } else if (key == "content_hash") {
      m.content_hash = value;
    } else {
      throw FormatError("unknown manifest key '" + key + "'", line_no);
    }
  }
  std::istringstream cfg_in(cfg.str());
  m.config = parse_config(cfg_in);
  return m;
}

ExperimentManifest read_manifest_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  return read_manifest(in);
}

// ---------------------------------------------------------------------------
// run_experiment

namespace {

struct StageContext {
  const fs::path& dir;
  const std::optional<ExperimentManifest>& previous;
  bool resume;

  /// True when the previous run recorded the same inputs and its outputs are
  /// still on disk unchanged.
  bool reusable(const std::string& name, const std::string& input_hash) const {
    if (!resume || !previous) return false;
    const StageRecord* s = previous->stage(name);
    if (!s || s->status == "failed" || s->input_hash != input_hash || s->output_hashes.empty())
      return false;
    for (const auto& [file, hash] : s->output_hashes) {
      const fs::path p = dir / file;
      if (!fs::exists(p) || sha256_file(p) != hash) return false;
    }
    return true;
  }
};

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config, const fs::path& out_dir,
                          const RunOptions& options) {
  config.validate();
  // Source and RFI checks happen here so they surface as validation errors.
  { const Simulator probe(config.observation, config.sources, config.rfi); }

  fs::create_directories(out_dir);
  const fs::path manifest_path = out_dir / "manifest.txt";
  std::optional<ExperimentManifest> previous;
  if (options.resume && fs::exists(manifest_path)) {
    try {
      previous = read_manifest_file(manifest_path);
    } catch (const Error&) {
      previous.reset();
    }
  }

  RunSummary summary;
  ExperimentManifest& m = summary.manifest;
  m.experiment_id = config.experiment_id;
  m.config = config;
  m.config_hash = sha256_hex(canonical_config(config));
  const StageContext ctx{out_dir, previous, options.resume};

  std::string current_stage;
  auto finish = [&]() {
    std::string all;
    for (const auto& s : m.stages)
      for (const auto& [file, hash] : s.output_hashes) all += s.name + ' ' + file + ' ' + hash + '\n';
    m.content_hash = sha256_hex(all);
    std::ostringstream text;
    write_manifest(text, m);
    write_file(manifest_path, text.str());
  };
  auto stop_after = [&](const std::string& stage) { return options.last_stage == stage; };

  try {
    // detect ------------------------------------------------------------
    current_stage = "detect";
    const fs::path level1_path = out_dir / "level1.csv";
    StageRecord detect{"detect", "done", "", {}};
    if (options.level1_input) {
      const std::string hash = sha256_file(*options.level1_input);
      m.inputs.push_back(options.level1_input->string());
      detect.status = "external";
      detect.input_hash = hash;
      if (fs::absolute(*options.level1_input) != fs::absolute(level1_path))
        fs::copy_file(*options.level1_input, level1_path, fs::copy_options::overwrite_existing);
      detect.output_hashes["level1.csv"] = hash;
    } else {
      detect.input_hash = sha256_hex(config_subset(config, detect_key));
      if (ctx.reusable("detect", detect.input_hash)) {
        detect.status = "reused";
        detect.output_hashes = previous->stage("detect")->output_hashes;
      } else {
        const auto events = run_detect(config, options.threads);
        std::ostringstream text;
        write_level1_header(text);
        write_level1_rows(text, events);
        write_file(level1_path, text.str());
        detect.output_hashes["level1.csv"] = sha256_hex(text.str());
      }
    }
    m.stages.push_back(detect);
    // Later stages always consume the archived values so that a fresh run
    // and a resumed one see identical inputs.
    const auto level1 = read_level1_archive(level1_path);
    summary.level1_events = static_cast<std::int64_t>(level1.size());
    if (stop_after("detect")) {
      finish();
      return summary;
    }

    // refilter ----------------------------------------------------------
    current_stage = "refilter";
    const fs::path cand_path = out_dir / "candidates.csv";
    StageRecord refilter{"refilter", "done", "", {}};
    refilter.input_hash = sha256_hex(
        detect.output_hashes["level1.csv"] + '\n' + config_subset(config, [](const std::string& k) {
          return starts_with(k, "phase.") || starts_with(k, "pairing.");
        }));
    if (ctx.reusable("refilter", refilter.input_hash)) {
      refilter.status = "reused";
      refilter.output_hashes = previous->stage("refilter")->output_hashes;
    } else {
      const RefilterOutput r = run_refilter(level1, config);
      summary.candidates = static_cast<std::int64_t>(r.candidates.size());
      std::ostringstream text;
      write_candidates_csv(text, r.second_level.passed);
      write_file(cand_path, text.str());
      refilter.output_hashes["candidates.csv"] = sha256_hex(text.str());
    }
    m.stages.push_back(refilter);
    std::vector<PairCandidate> passed;
    {
      std::ifstream in(cand_path);
      passed = read_candidates_csv(in);
    }
    summary.passed = static_cast<std::int64_t>(passed.size());
    if (stop_after("refilter")) {
      finish();
      return summary;
    }

    // analyze -----------------------------------------------------------
    current_stage = "analyze";
    const fs::path stats_path = out_dir / "stats.csv";
    const fs::path daily_path = out_dir / "stats_daily.csv";
    StageRecord an{"analyze", "done", "", {}};
    an.input_hash = sha256_hex(refilter.output_hashes["candidates.csv"] + '\n' +
                               (config.analysis.mode == ProbabilityMode::kExposure
                                    ? detect.output_hashes["level1.csv"] + '\n'
                                    : std::string()) +
                               config_subset(config, [](const std::string& k) {
                                 return starts_with(k, "analysis.");
                               }));
    summary.analysis = run_analyze(passed, level1, config);
    {
      std::ostringstream text;
      write_stats_csv(text, summary.analysis.bins);
      const std::string stats_text = text.str();
      const bool reuse = ctx.reusable("analyze", an.input_hash);
      if (!reuse) write_file(stats_path, stats_text);
      an.output_hashes["stats.csv"] = sha256_hex(stats_text);
      if (config.analysis.per_day) {
        std::ostringstream daily;
        write_daily_csv(daily, summary.analysis.daily);
        if (!reuse) write_file(daily_path, daily.str());
        an.output_hashes["stats_daily.csv"] = sha256_hex(daily.str());
      }
      an.status = reuse ? "reused" : "done";
    }
    m.stages.push_back(an);
    if (stop_after("analyze")) {
      finish();
      return summary;
    }

    // plot --------------------------------------------------------------
    current_stage = "plot";
    const fs::path svg_path = out_dir / "stats.svg";
    StageRecord plot{"plot", "done", "", {}};
    plot.input_hash = sha256_hex(an.output_hashes["stats.csv"] + '\n' +
                                 (an.output_hashes.count("stats_daily.csv")
                                      ? an.output_hashes["stats_daily.csv"] + '\n'
                                      : std::string()) +
                                 config_subset(config, [](const std::string& k) {
                                   return starts_with(k, "analysis.fwhm") || k == "experiment_id";
                                 }));
    if (ctx.reusable("plot", plot.input_hash)) {
      plot.status = "reused";
      plot.output_hashes = previous->stage("plot")->output_hashes;
    } else {
      std::ifstream in(stats_path);
      const auto stats = read_stats_csv(in);
      PlotOptions po;
      po.title = config.experiment_id + ": Cohen's d vs RA";
      const std::string svg = plot_stats(stats, config.analysis.fwhm_center_hr,
                                         config.analysis.fwhm_width_hr, po, summary.analysis.daily);
      write_file(svg_path, svg);
      plot.output_hashes["stats.svg"] = sha256_hex(svg);
    }
    m.stages.push_back(plot);
  } catch (const std::exception& e) {
    m.status = "failed";
    m.failed_stage = current_stage;
    m.error = e.what();
    m.stages.push_back({current_stage, "failed", "", {}});
    finish();
    throw StageError(current_stage, e.what());
  }
  finish();
  return summary;
}

std::vector<NullRun> null_monte_carlo(const ExperimentConfig& config, std::uint64_t first_seed,
                                      int runs, int threads) {
  if (runs < 1) throw ValidationError("null Monte Carlo needs at least one run");
  std::vector<NullRun> out;
  for (int r = 0; r < runs; ++r) {
    ExperimentConfig c = config;
    c.sources.clear();
    c.observation.seed = first_seed + static_cast<std::uint64_t>(r);
    const auto level1 = run_detect(c, threads);
    const auto refiltered = run_refilter(level1, c);
    const Analysis a = run_analyze(refiltered.second_level.passed, level1, c);
    NullRun n;
    n.seed = c.observation.seed;
    n.trials = a.bins.empty() ? 0 : a.bins.front().trials_n;
    n.max_abs_d = max_abs_d(a.bins);
    for (const auto& b : a.bins)
      if (std::abs(b.cohens_d) == n.max_abs_d) {
        n.peak_ra_hr = 0.5 * (b.ra_low_hr + b.ra_high_hr);
        break;
      }
    n.flagged = n.max_abs_d >= c.analysis.significance_d;
    out.push_back(n);
  }
  return out;
}

}  // namespace pulsepair
