#pragma once

#include "dicp/conformal.hpp"
#include "dicp/core.hpp"
#include "dicp/model.hpp"
#include "dicp/stats.hpp"

#include <cstdint>
#include <optional>

namespace dicp {

enum class Setting { A, B, C };

char setting_name(Setting s);
Setting parse_setting(std::string_view name);

/// Synthetic regression design.
///   A: X ~ N(0, I), Y = beta'X + N(0, 1).
///   B: X ~ N(0, I), Y = sum_j g_j(x_j) + t(2), each g_j a cubic B-spline
///      expansion (clamped knots, `interior_knots` equally spaced interior
///      knots on [knot_lo, knot_hi], inputs clamped to that range) with
///      N(0, 1) coefficients drawn from `seed`.
///   C: cells drawn from 1/3 N(0,1) + 1/3 SN(0,1,5) + 1/3 Bern(0.5), then
///      sequentially replaced by the mean of themselves and up to `lags`
///      previous (already smoothed) cells; Y = beta'X + t(2) scaled by
///      1 + 2|f(X)|^3 / E|f(X)|^3.
struct SettingSpec {
  Setting setting = Setting::A;
  Index d = 15;
  Vector beta;  // empty means all ones
  std::uint64_t seed = 0;
  int interior_knots = 5;
  double knot_lo = -3.0;
  double knot_hi = 3.0;
  int lags = 3;
  double skew_shape = 5.0;
  Index moment_draws = 10000;
};

/// Clamped-knot B-spline basis of `degree` at x (x is clamped to the knot
/// range). Returns knots.size() - degree - 1 values summing to one.
Vector bspline_basis(double x, const std::vector<double>& knots, int degree);

class DataGenerator {
 public:
  /// Spline coefficients come from spec.seed; the Setting C moment
  /// E|f(X)|^3 is estimated from spec.moment_draws fresh draws seeded by
  /// `moment_seed`.
  explicit DataGenerator(SettingSpec spec, std::uint64_t moment_seed = 0);

  const SettingSpec& spec() const { return spec_; }
  const Vector& beta() const { return beta_; }
  const Matrix& spline_coefficients() const { return spline_coef_; }
  const std::vector<double>& knots() const { return knots_; }
  double cubic_moment() const { return cubic_moment_; }

  /// f(x) = E[Y | X = x].
  double mean_function(const Vector& x) const;

  Matrix sample_features(Index n, Rng& rng) const;
  LabeledDataset generate(Index n, std::uint64_t seed) const;

 private:
  double noise(double f, Rng& rng) const;

  SettingSpec spec_;
  Vector beta_;
  std::vector<double> knots_;
  Matrix spline_coef_;  // d x basis count (Setting B)
  double cubic_moment_ = 1.0;
};

/// DataGenerator(spec, seed).generate(n, seed).
LabeledDataset generate(const SettingSpec& spec, Index n, std::uint64_t seed);

/// Cellwise contamination: each cell is replaced with probability epsilon
/// by fixed_value if set, else by a draw from N(mu_j, sigma_j) (sigma is a
/// standard deviation).
struct ContaminationSpec {
  double epsilon = 0.1;
  double mu_lo = 0.0;
  double mu_hi = 10.0;
  double sigma_lo = 0.0;
  double sigma_hi = 10.0;
  std::optional<double> fixed_value;
};

/// Per-coordinate outlier law, drawn once per trial.
struct OutlierLaw {
  Vector mu;
  Vector sigma;
  std::optional<double> fixed_value;
};

OutlierLaw draw_outlier_law(const ContaminationSpec& spec, Index d,
                            std::uint64_t seed);

TestCase contaminate(const Vector& x_clean, const ContaminationSpec& spec,
                     const OutlierLaw& law, std::uint64_t seed);

/// Draws the law and the contamination from one seed.
TestCase contaminate(const Vector& x_clean, const ContaminationSpec& spec,
                     std::uint64_t seed);

/// Value of the undetected second coordinate that forces
/// |Y - mu(x~)| >= M for Y = X_1 + X_2 with X_1, X_2 in [0, 1]:
/// (M + 1 - b) / b2 when b1 >= 1, (M - b1 + 2 - b) / b2 otherwise, where b
/// is the model intercept.
double adversarial_value(double M, const LinearModel& model);

/// Test case with X ~ U(0,1)^2, Y = X_1 + X_2 and coordinate 2 replaced by
/// adversarial_value. Requires a 2-dimensional model.
TestCase adversarial_case(double M, const LinearModel& model,
                          std::uint64_t seed);

}  // namespace dicp
