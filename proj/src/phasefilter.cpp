#include "pulsepair/phasefilter.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "pulsepair/format.hpp"
#include "pulsepair/parallel.hpp"

namespace pulsepair {

void PhaseMetricParams::validate(bool require_tau_in_range) const {
  if (!(filter_halfwidth_rad > 0.0)) throw ValidationError("filter_halfwidth_rad must be positive");
  if (!(tau_search_step_s > 0.0)) throw ValidationError("tau_search_step_s must be positive");
  if (!(tau_search_low_s <= tau_search_high_s))
    throw ValidationError("tau search range is inverted");
  if (correction_sign != 1.0 && correction_sign != -1.0)
    throw ValidationError("correction_sign must be +1 or -1");
  if (!std::isfinite(tau_int_s)) throw ValidationError("tau_int_s must be finite");
  if (require_tau_in_range && !(tau_int_s >= tau_search_low_s && tau_int_s <= tau_search_high_s))
    throw ValidationError("tau search range does not contain tau_int_s");
}

PhaseMetricParams PhaseMetricParams::centered(double center, double halfwidth) const {
  PhaseMetricParams p = *this;
  p.tau_int_s = center;
  p.tau_search_low_s = center - halfwidth;
  p.tau_search_high_s = center + halfwidth;
  return p;
}

double phase_metric(double phase_west_b, double phase_east_b, double phase_west_a,
                    double phase_east_a, double delta_f_hz, double tau_int_s,
                    double correction_sign) {
  const double raw = (phase_west_b - phase_east_b) - (phase_west_a - phase_east_a);
  return wrap_phase(raw + correction_sign * kTwoPi * delta_f_hz * tau_int_s);
}

double phase_metric(const PairCandidate& c, double tau_int_s, double correction_sign) {
  if (!std::isfinite(c.a.phase_east_rad) || !std::isfinite(c.a.phase_west_rad) ||
      !std::isfinite(c.b.phase_east_rad) || !std::isfinite(c.b.phase_west_rad))
    throw ValidationError("candidate is missing a phase measurement");
  return phase_metric(c.b.phase_west_rad, c.b.phase_east_rad, c.a.phase_west_rad,
                      c.a.phase_east_rad, c.delta_f_hz, tau_int_s, correction_sign);
}

std::string_view to_string(FilterVerdict v) {
  switch (v) {
    case FilterVerdict::kPass: return "pass";
    case FilterVerdict::kDeltaF: return "delta_f";
    case FilterVerdict::kPhase: return "phase";
  }
  return "?";
}

SecondLevelResult second_level_filter(std::span<const PairCandidate> candidates,
                                      const PhaseMetricParams& params) {
  params.validate();
  SecondLevelResult r;
  r.verdicts.reserve(candidates.size());
  r.metrics.reserve(candidates.size());
  for (const auto& c : candidates) {
    const double m = phase_metric(c, params.tau_int_s, params.correction_sign);
    r.metrics.push_back(m);
    if (!delta_f_filter(c, params.delta_f)) {
      r.verdicts.push_back(FilterVerdict::kDeltaF);
      ++r.rejected_delta_f;
    } else if (std::abs(m) > params.filter_halfwidth_rad) {
      r.verdicts.push_back(FilterVerdict::kPhase);
      ++r.rejected_phase;
    } else {
      r.verdicts.push_back(FilterVerdict::kPass);
      PairCandidate kept = c;
      kept.phase_metric_rad = m;
      r.passed.push_back(kept);
    }
  }
  return r;
}

void write_phase_diagnostics_csv(std::ostream& out, std::span<const PairCandidate> candidates,
                                 const SecondLevelResult& result) {
  out << "delta_f_hz,phase_metric_rad,pass,reason\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const FilterVerdict v = result.verdicts[i];
    out << fixed(candidates[i].delta_f_hz, 1) << ',' << sig(result.metrics[i], 6) << ','
        << (v == FilterVerdict::kPass ? 1 : 0) << ',' << to_string(v) << '\n';
  }
}

TauTuneResult tune_tau_int(std::span<const PairCandidate> candidates,
                           const PhaseMetricParams& params, const RaInterval& fwhm_window,
                           const TauObjective& objective, int threads) {
  params.validate();
  if (candidates.empty()) throw ValidationError("tau tuning needs at least one candidate");
  const double span = params.tau_search_high_s - params.tau_search_low_s;
  const auto points = static_cast<std::int64_t>(std::floor(span / params.tau_search_step_s + 1e-9)) + 1;

  TauTuneResult r;
  r.taus_s.resize(points);
  for (std::int64_t k = 0; k < points; ++k)
    r.taus_s[k] = params.tau_search_low_s + static_cast<double>(k) * params.tau_search_step_s;

  const auto scores = ordered_map<double>(points, threads, [&](std::int64_t k) {
    PhaseMetricParams p = params;
    p.tau_int_s = r.taus_s[k];
    const auto filtered = second_level_filter(candidates, p);
    const double v = objective(filtered.passed, fwhm_window);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  });
  r.objective = Eigen::Map<const Eigen::VectorXd>(scores.data(), points);

  const double center = 0.5 * (params.tau_search_low_s + params.tau_search_high_s);
  std::int64_t best = 0;
  for (std::int64_t k = 1; k < points; ++k) {
    const double v = scores[static_cast<std::size_t>(k)];
    const double bv = scores[static_cast<std::size_t>(best)];
    if (v > bv || (v == bv && std::abs(r.taus_s[k] - center) < std::abs(r.taus_s[best] - center)))
      best = k;
  }
  r.tau_best_s = r.taus_s[best];
  r.d_best = scores[static_cast<std::size_t>(best)];
  return r;
}

}  // namespace pulsepair
