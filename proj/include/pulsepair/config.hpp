#ifndef PULSEPAIR_CONFIG_HPP
#define PULSEPAIR_CONFIG_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pulsepair/pairdetect.hpp"
#include "pulsepair/phasefilter.hpp"
#include "pulsepair/sigsim.hpp"
#include "pulsepair/skystats.hpp"

namespace pulsepair {

struct AnalysisParams {
  RaBinning binning;
  ProbabilityMode mode = ProbabilityMode::kUniform;
  /// In-beam window used for the peak search, shading and tau tuning.
  double fwhm_center_hr = 5.25;
  double fwhm_width_hr = 0.6;
  bool per_day = false;
  /// |d| at or above this flags a bin as significant.
  double significance_d = 3.5;

  RaInterval fwhm_window() const {
    return {fwhm_center_hr - 0.5 * fwhm_width_hr, fwhm_center_hr + 0.5 * fwhm_width_hr};
  }
};

/// Everything that can change a pipeline output.
struct ExperimentConfig {
  std::string experiment_id = "experiment";
  ObservationConfig observation;
  std::vector<SourceSpec> sources;
  std::vector<RfiSpec> rfi;
  double snr_threshold_db = 8.5;
  bool exclude_test_bin = false;
  PairingParams pairing;
  PhaseMetricParams phase;
  AnalysisParams analysis;

  FirstLevelParams first_level() const {
    return FirstLevelParams::from(observation, snr_threshold_db, exclude_test_bin);
  }
  void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys, repeated
/// keys and malformed values are FormatErrors carrying the line number.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies one assignment; throws ValidationError for unknown keys or bad values.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Every key with its value, one per line, in a fixed order. Doubles are
/// written in shortest round-trip form, so parse_config(canonical) restores
/// the exact configuration.
std::string canonical_config(const ExperimentConfig& config);

/// Sorted list of every scalar key (sources and RFI use their indices).
std::vector<std::string> config_keys(const ExperimentConfig& config);

}  // namespace pulsepair

#endif  // PULSEPAIR_CONFIG_HPP
