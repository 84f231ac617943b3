#ifndef PULSEPAIR_PHASEFILTER_HPP
#define PULSEPAIR_PHASEFILTER_HPP

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "pulsepair/core.hpp"
#include "pulsepair/pairdetect.hpp"

namespace pulsepair {

struct PhaseMetricParams {
  double tau_int_s = 0.0;
  double filter_halfwidth_rad = 0.04;
  double tau_search_low_s = -10e-9;
  double tau_search_high_s = 10e-9;
  double tau_search_step_s = 1e-9;
  /// +1 adds 2 pi df tau to the phase difference, -1 subtracts it. The
  /// simulator's convention is +1.
  double correction_sign = 1.0;
  DeltaFRange delta_f;

  /// Throws ValidationError; `require_tau_in_range` checks tau_int_s against
  /// the search range as well.
  void validate(bool require_tau_in_range = false) const;
  /// Search range centred on `center` with half-width `halfwidth`.
  PhaseMetricParams centered(double center, double halfwidth) const;
};

/// wrap[(phiW_b - phiE_b) - (phiW_a - phiE_a) + sign * 2 pi df tau], wrapped
/// once after the correction is added.
double phase_metric(double phase_west_b, double phase_east_b, double phase_west_a,
                    double phase_east_a, double delta_f_hz, double tau_int_s,
                    double correction_sign = 1.0);

/// Metric of a candidate; df is rf(b) - rf(a). Non-finite phases are an error.
double phase_metric(const PairCandidate& candidate, double tau_int_s, double correction_sign = 1.0);

enum class FilterVerdict : std::uint8_t { kPass, kDeltaF, kPhase };
std::string_view to_string(FilterVerdict v);

struct SecondLevelResult {
  /// Candidates that passed, with phase_metric_rad filled in.
  std::vector<PairCandidate> passed;
  /// One verdict per input candidate, input order.
  std::vector<FilterVerdict> verdicts;
  /// Metric of every input candidate.
  std::vector<double> metrics;
  std::int64_t rejected_delta_f = 0;
  std::int64_t rejected_phase = 0;
};

/// Keeps candidates with |metric| <= halfwidth (closed) and a passing df.
SecondLevelResult second_level_filter(std::span<const PairCandidate> candidates,
                                      const PhaseMetricParams& params);

/// (delta_f_hz, phase_metric_rad, pass, reason) rows.
void write_phase_diagnostics_csv(std::ostream& out, std::span<const PairCandidate> candidates,
                                 const SecondLevelResult& result);

/// Objective used to rank a tau grid point: receives the candidates passing
/// the second-level filter and the in-beam RA window, returns a score (the
/// peak in-window Cohen's d in the pipeline).
using TauObjective =
    std::function<double(std::span<const PairCandidate> passed, const RaInterval& window)>;

struct TauTuneResult {
  double tau_best_s = 0.0;
  double d_best = 0.0;
  Eigen::VectorXd taus_s;
  Eigen::VectorXd objective;
};

/// Exhaustive grid search over [tau_search_low_s, tau_search_high_s].
/// Ties go to the grid point closest to the centre of the range.
TauTuneResult tune_tau_int(std::span<const PairCandidate> candidates,
                           const PhaseMetricParams& params, const RaInterval& fwhm_window,
                           const TauObjective& objective, int threads = 1);

}  // namespace pulsepair

#endif  // PULSEPAIR_PHASEFILTER_HPP
