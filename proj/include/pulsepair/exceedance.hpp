#ifndef PULSEPAIR_EXCEEDANCE_HPP
#define PULSEPAIR_EXCEEDANCE_HPP

#include <span>
#include <vector>

#include "pulsepair/core.hpp"

namespace pulsepair {

/// Exact sampler for the bins of one noise-only segment whose segment-relative
/// SNR exceeds a threshold.
///
/// For N i.i.d. exponential bin powers the normalized vector P/sum(P) is
/// uniform on the simplex, so the exceedance event "P_k > T * mean" reduces to
/// "D_k > x" for a Dirichlet(1,...,1) coordinate D_k:
///
///   test bin included in the mean:  x = T / N
///   test bin excluded:               x = T / (N - 1 + T)
///
/// Any j given coordinates all exceed x with probability (1 - j x)^(N-1), which
/// yields the law of the exceedance count by inclusion-exclusion. Given the
/// count, the exceeding set is a uniform subset; given the set, the values are
/// drawn by rejection from the shifted Dirichlet.
class ExceedanceSampler {
 public:
  ExceedanceSampler(int segment_size, double snr_threshold_db, bool exclude_test_bin);

  int segment_size() const { return n_; }
  double threshold_fraction() const { return x_; }
  /// P(at least one bin of the segment exceeds).
  double prob_any() const { return prob_any_; }
  /// P(a given bin exceeds).
  double prob_single() const;
  /// Closed form of prob_single() that is valid at any reachable threshold,
  /// including low ones where the count law is numerically unusable.
  static double single_bin_rate(int segment_size, double snr_threshold_db, bool exclude_test_bin);
  const std::vector<double>& count_pmf() const { return pmf_; }

  /// Exceedance count conditioned on being >= 1.
  int sample_count_given_any(Rng& rng) const;
  /// Uniform subset of [0, N) of the given size, ascending.
  std::vector<int> sample_subset(Rng& rng, int size) const;
  /// SNR (dB) of the members of `set`, conditioned on `set` being exactly the
  /// exceeding set.
  std::vector<double> sample_snr_db(Rng& rng, std::span<const int> set) const;

  double snr_db_from_fraction(double d) const;

 private:
  int n_;
  double threshold_linear_;
  bool exclude_;
  double x_;
  double prob_any_ = 0.0;
  std::vector<double> pmf_;          // P(K = k), k = 0..kmax
  std::vector<double> cdf_given_any_; // P(K <= k | K >= 1), k = 1..kmax
};

}  // namespace pulsepair

#endif  // PULSEPAIR_EXCEEDANCE_HPP
