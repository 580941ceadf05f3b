#pragma once

#include "dicp/core.hpp"

#include <cstdint>
#include <random>

namespace dicp {

// Median of a copy of `values` (mean of the two middle values for even n).
double median(std::span<const double> values);

// Raw median absolute deviation about `center` (no consistency factor).
double mad(std::span<const double> values, double center);

/// Consistency factor making the MAD unbiased for the normal sd.
inline constexpr double kMadConsistency = 1.4826;

/// 1.4826 * MAD about the median.
double robust_scale(std::span<const double> values);

template <typename Derived>
double median(const Eigen::DenseBase<Derived>& values) {
  const Vector v = values;
  return median(std::span<const double>(v.data(), v.size()));
}

template <typename Derived>
double robust_scale(const Eigen::DenseBase<Derived>& values) {
  const Vector v = values;
  return robust_scale(std::span<const double>(v.data(), v.size()));
}

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// CDF of the chi-square distribution with `dof` degrees of freedom.
double chi2_cdf(double x, double dof);

/// Inverse CDF of chi-square(dof), found by bisection on chi2_cdf.
double chi2_quantile(double prob, double dof);

/// sqrt of the chi-square(1) quantile: the two-sided normal cutoff.
inline double chi2_1_cutoff(double prob) {
  return std::sqrt(chi2_quantile(prob, 1.0));
}

// Seeds --------------------------------------------------------------------

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent stream identified by (master, a, b).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b = 0);

using Rng = std::mt19937_64;

/// Student t(2): N(0, 1) / sqrt(chi2_2 / 2) with chi2_2 = -2 ln U.
double sample_t2(Rng& rng);

/// Skew-normal SN(0, 1, shape) via the two-normal representation.
double sample_skew_normal(Rng& rng, double shape);

}  // namespace dicp
