#include "dicp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dicp {

double median(std::span<const double> values) {
  if (values.empty()) throw Error("median of empty set");
  std::vector<double> tmp(values.begin(), values.end());
  const std::size_t mid = tmp.size() / 2;
  std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid),
                   tmp.end());
  double med = tmp[mid];
  if (tmp.size() % 2 == 0) {
    const double lower = *std::max_element(
        tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid));
    med = 0.5 * (med + lower);
  }
  return med;
}

double mad(std::span<const double> values, double center) {
  std::vector<double> dev(values.size());
  std::transform(values.begin(), values.end(), dev.begin(),
                 [center](double v) { return std::fabs(v - center); });
  return median(dev);
}

double robust_scale(std::span<const double> values) {
  return kMadConsistency * mad(values, median(values));
}

namespace {

// Series expansion, converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), used for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw Error("incomplete gamma needs a > 0");
  if (x < 0.0) throw Error("incomplete gamma needs x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double chi2_cdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double prob, double dof) {
  if (!(prob > 0.0 && prob < 1.0))
    throw Error("chi-square quantile needs prob in (0, 1)");
  double lo = 0.0;
  double hi = 1.0;
  while (chi2_cdf(hi, dof) < prob) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(mid, dof) < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b) {
  return mix64(mix64(mix64(master) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

double sample_t2(Rng& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  const double z = normal(rng);
  // chi2(2) = -2 ln U, so chi2(2) / 2 = -ln U; 1 - U avoids log(0).
  const double half_chi2 = -std::log(1.0 - unif(rng));
  return z / std::sqrt(half_chi2);
}

double sample_skew_normal(Rng& rng, double shape) {
  std::normal_distribution<double> normal;
  const double delta = shape / std::sqrt(1.0 + shape * shape);
  const double z1 = normal(rng);
  const double z2 = normal(rng);
  return delta * std::fabs(z1) + std::sqrt(1.0 - delta * delta) * z2;
}

}  // namespace dicp
