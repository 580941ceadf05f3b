#pragma once

#include "dicp/core.hpp"

namespace dicp {

/// mu(x) = beta' x + intercept.
struct LinearModel {
  Vector beta;
  double intercept = 0.0;

  Index dim() const { return beta.size(); }
};

/// Lower and upper conditional-quantile planes for CQR scores.
struct QuantilePair {
  LinearModel lower;
  LinearModel upper;
  double lower_level = 0.05;
  double upper_level = 0.95;
};

/// Least squares with a 1e-8 (trace-scaled) ridge jitter on the centered
/// normal equations; the intercept is not penalized.
LinearModel fit_ols(const LabeledDataset& train);

double predict(const LinearModel& model, const Vector& x);

/// Sum of |beta_j|: bounds |mu(x) - mu(x')| by S * ||x - x'||_1.
double l1_sensitivity(const LinearModel& model);

/// Mean pinball loss of `model` at quantile level `tau`.
double pinball_loss(const LinearModel& model, const LabeledDataset& data,
                    double tau);

struct QuantileFitOptions {
  int iterations = 2000;
  double step = 1.0;  // multiplies scale(residuals) / sqrt(t)
};

/// Linear quantile regression at level `tau` by full-batch subgradient
/// descent started from the OLS plane shifted to the tau-quantile of its
/// residuals. Returns the iterate with the smallest loss, so the result
/// never does worse than the start.
LinearModel fit_quantile(const LabeledDataset& train, double tau,
                         const QuantileFitOptions& options = {});

/// Planes at levels alpha/2 and 1 - alpha/2.
QuantilePair fit_quantile_pair(const LabeledDataset& train, double alpha,
                               const QuantileFitOptions& options = {});

/// Logistic regression p(class 1 | x) fitted by ridge-damped IRLS.
struct LogisticModel {
  Vector beta;
  double intercept = 0.0;

  double probability(const Vector& x) const;
};

LogisticModel fit_logistic(const Matrix& class0, const Matrix& class1,
                           double ridge = 1e-4, int max_iterations = 50);

}  // namespace dicp
