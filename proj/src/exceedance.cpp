#include "pulsepair/exceedance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pulsepair {

namespace {

long double log_choose(int n, int k) {
  return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(k) + 1) -
         std::lgamma(static_cast<long double>(n - k) + 1);
}

}  // namespace

ExceedanceSampler::ExceedanceSampler(int segment_size, double snr_threshold_db,
                                     bool exclude_test_bin)
    : n_(segment_size),
      threshold_linear_(std::pow(10.0, snr_threshold_db / 10.0)),
      exclude_(exclude_test_bin) {
  if (n_ < 2) throw ValidationError("exceedance sampler needs at least 2 bins per segment");
  x_ = exclude_ ? threshold_linear_ / (n_ - 1 + threshold_linear_) : threshold_linear_ / n_;
  if (!(x_ > 0.0) || x_ >= 1.0)
    throw ValidationError("SNR threshold cannot be reached inside a " + std::to_string(n_) +
                          "-bin segment");

  // Value sampling rejects draws in which a bin outside the set also exceeds;
  // its acceptance rate is roughly exp(-N * prob_single).
  if (n_ * std::pow(1.0 - x_, n_ - 1) > 4.0)
    throw ValidationError(
        "sparse generation is numerically unstable at this SNR threshold; use dense generation");

  // a_j = C(N, j) (1 - j x)^(N-1): expected number of j-subsets all exceeding.
  const int jmax = std::min(n_, static_cast<int>(std::floor(1.0 / x_)));
  std::vector<long double> s(static_cast<std::size_t>(jmax) + 1, 0.0L);
  for (int j = 0; j <= jmax; ++j) {
    const long double base = 1.0L - static_cast<long double>(j) * x_;
    if (base <= 0.0L) break;
    s[static_cast<std::size_t>(j)] =
        std::exp(log_choose(n_, j) + (n_ - 1) * std::log(base));
  }
  // P(K = k) = sum_{j >= k} (-1)^(j-k) C(j, k) s_j
  pmf_.assign(static_cast<std::size_t>(jmax) + 1, 0.0);
  long double total = 0.0L;
  long double largest = 0.0L;
  for (int k = 0; k <= jmax; ++k) {
    long double acc = 0.0L;
    for (int j = jmax; j >= k; --j) {
      const long double term = std::exp(log_choose(j, k)) * s[static_cast<std::size_t>(j)];
      largest = std::max(largest, term);
      acc += ((j - k) % 2 == 0) ? term : -term;
    }
    if (largest > 1e8L || acc < -1e-12L || acc > 1.0L + 1e-12L)
      throw ValidationError(
          "sparse generation is numerically unstable at this SNR threshold; use dense generation");
    pmf_[static_cast<std::size_t>(k)] = static_cast<double>(std::max(acc, 0.0L));
    total += pmf_[static_cast<std::size_t>(k)];
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-9)
    throw ValidationError(
        "sparse generation is numerically unstable at this SNR threshold; use dense generation");

  // Summing the k >= 1 terms avoids cancellation in 1 - P(K = 0).
  long double any = 0.0L;
  for (std::size_t k = pmf_.size(); k-- > 1;) any += pmf_[k];
  prob_any_ = static_cast<double>(any);
  cdf_given_any_.assign(pmf_.size(), 0.0);
  double run = 0.0;
  for (std::size_t k = 1; k < pmf_.size(); ++k) {
    run += pmf_[k];
    cdf_given_any_[k] = run / prob_any_;
  }
  cdf_given_any_.back() = 1.0;
}

double ExceedanceSampler::prob_single() const { return std::pow(1.0 - x_, n_ - 1); }

double ExceedanceSampler::single_bin_rate(int segment_size, double snr_threshold_db,
                                          bool exclude_test_bin) {
  if (segment_size < 2) throw ValidationError("exceedance rate needs at least 2 bins per segment");
  const double t = std::pow(10.0, snr_threshold_db / 10.0);
  const double x = exclude_test_bin ? t / (segment_size - 1 + t) : t / segment_size;
  if (x >= 1.0) return 0.0;
  return std::pow(1.0 - x, segment_size - 1);
}

int ExceedanceSampler::sample_count_given_any(Rng& rng) const {
  const double u = std::generate_canonical<double, 53>(rng);
  const auto it = std::upper_bound(cdf_given_any_.begin() + 1, cdf_given_any_.end(), u);
  if (it == cdf_given_any_.end()) return static_cast<int>(cdf_given_any_.size()) - 1;
  return static_cast<int>(it - cdf_given_any_.begin());
}

std::vector<int> ExceedanceSampler::sample_subset(Rng& rng, int size) const {
  // Floyd's algorithm.
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size));
  for (int j = n_ - size; j < n_; ++j) {
    std::uniform_int_distribution<int> pick(0, j);
    const int t = pick(rng);
    if (std::find(out.begin(), out.end(), t) == out.end())
      out.push_back(t);
    else
      out.push_back(j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> ExceedanceSampler::sample_snr_db(Rng& rng, std::span<const int> set) const {
  const int j = static_cast<int>(set.size());
  const double scale = 1.0 - j * x_;
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> e(static_cast<std::size_t>(n_));
  std::vector<char> member(static_cast<std::size_t>(n_), 0);
  for (int idx : set) member[static_cast<std::size_t>(idx)] = 1;

  for (int attempt = 0; attempt < 100000; ++attempt) {
    double sum = 0.0;
    for (auto& v : e) {
      v = expo(rng);
      sum += v;
    }
    // Others must stay at or below x after the shift.
    const double others_limit = x_ / scale * sum;
    bool ok = true;
    for (int i = 0; i < n_ && ok; ++i)
      if (!member[static_cast<std::size_t>(i)] && e[static_cast<std::size_t>(i)] > others_limit)
        ok = false;
    if (!ok) continue;
    std::vector<double> snr;
    snr.reserve(set.size());
    for (int idx : set) {
      const double d = x_ + scale * e[static_cast<std::size_t>(idx)] / sum;
      snr.push_back(snr_db_from_fraction(d));
    }
    return snr;
  }
  throw Error("exceedance value sampling did not converge");
}

double ExceedanceSampler::snr_db_from_fraction(double d) const {
  const double ratio = exclude_ ? (n_ - 1) * d / (1.0 - d) : n_ * d;
  return 10.0 * std::log10(ratio);
}

}  // namespace pulsepair
