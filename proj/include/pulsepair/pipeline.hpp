#ifndef PULSEPAIR_PIPELINE_HPP
#define PULSEPAIR_PIPELINE_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pulsepair/config.hpp"
#include "pulsepair/phasefilter.hpp"
#include "pulsepair/skystats.hpp"

namespace pulsepair {

inline constexpr std::string_view kToolVersion = "pulsepair 0.1.0";

/// A stage that threw. `stage()` names it; the message is the cause.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Stage functions -----------------------------------------------------------

std::vector<PulseEvent> run_detect(const ExperimentConfig& config, int threads = 1);

struct RefilterOutput {
  std::vector<PairCandidate> candidates;
  SecondLevelResult second_level;
  PairingStats pairing;
};

RefilterOutput run_refilter(std::span<const PulseEvent> level1, const ExperimentConfig& config);

AnalyzeOptions analyze_options(const ExperimentConfig& config);
Analysis run_analyze(std::span<const PairCandidate> passed, std::span<const PulseEvent> level1,
                     const ExperimentConfig& config);

/// Peak in-window Cohen's d objective for tau tuning.
TauObjective peak_d_objective(const ExperimentConfig& config,
                              std::span<const PulseEvent> level1 = {});

/// Second-level candidates CSV (passing pairs with their metric).
void write_candidates_csv(std::ostream& out, std::span<const PairCandidate> candidates);
std::vector<PairCandidate> read_candidates_csv(std::istream& in);

// Experiments ---------------------------------------------------------------

struct StageRecord {
  std::string name;
  /// done, reused, external or failed
  std::string status;
  /// Fingerprint of the stage inputs (config subset and upstream artifacts).
  std::string input_hash;
  std::map<std::string, std::string> output_hashes;
};

struct ExperimentManifest {
  std::string experiment_id;
  ExperimentConfig config;
  std::string config_hash;
  std::string tool_version{kToolVersion};
  std::vector<std::string> inputs;
  std::vector<StageRecord> stages;
  /// Hash over every output hash, in stage order.
  std::string content_hash;
  std::string status = "ok";
  std::string failed_stage;
  std::string error;

  const StageRecord* stage(std::string_view name) const;
};

void write_manifest(std::ostream& out, const ExperimentManifest& manifest);
ExperimentManifest read_manifest(std::istream& in);
ExperimentManifest read_manifest_file(const std::filesystem::path& path);

struct RunOptions {
  int threads = 1;
  /// Skip stages whose recorded inputs and outputs still match.
  bool resume = true;
  /// Use this archive instead of simulating and detecting.
  std::optional<std::filesystem::path> level1_input;
  /// Stop after this stage (detect, refilter, analyze, plot).
  std::string last_stage = "plot";
};

struct RunSummary {
  ExperimentManifest manifest;
  std::int64_t level1_events = 0;
  std::int64_t candidates = 0;
  std::int64_t passed = 0;
  Analysis analysis;
};

/// Runs detect -> refilter -> analyze -> plot inside `out_dir`, writing
/// level1.csv, candidates.csv, stats.csv, stats.svg and manifest.txt (last).
/// On a stage failure the manifest is written with status=failed and a
/// StageError is thrown.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          const RunOptions& options = {});

struct NullRun {
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  double max_abs_d = 0.0;
  double peak_ra_hr = 0.0;
  bool flagged = false;
};

/// Repeats the in-memory pipeline with all injected sources removed, for
/// seeds first_seed .. first_seed + runs - 1.
std::vector<NullRun> null_monte_carlo(const ExperimentConfig& config, std::uint64_t first_seed,
                                      int runs, int threads = 1);

}  // namespace pulsepair

#endif  // PULSEPAIR_PIPELINE_HPP
