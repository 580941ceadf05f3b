#include "dicp/model.hpp"

#include "dicp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dicp {

LinearModel fit_ols(const LabeledDataset& train) {
  validate(train);
  const Vector xbar = train.features.colwise().mean().transpose();
  const double ybar = train.labels.mean();
  const Matrix xc = train.features.rowwise() - xbar.transpose();
  const Vector yc = train.labels.array() - ybar;

  Matrix gram = xc.transpose() * xc;
  const double jitter =
      1e-8 * std::max(gram.trace() / static_cast<double>(gram.rows()), 1.0);
  gram.diagonal().array() += jitter;

  LinearModel model;
  model.beta = gram.ldlt().solve(xc.transpose() * yc);
  model.intercept = ybar - model.beta.dot(xbar);
  return model;
}

double predict(const LinearModel& model, const Vector& x) {
  if (x.size() != model.beta.size())
    throw Error("feature length " + std::to_string(x.size()) +
                " does not match model dimension " +
                std::to_string(model.beta.size()));
  return model.beta.dot(x) + model.intercept;
}

double l1_sensitivity(const LinearModel& model) {
  return model.beta.lpNorm<1>();
}

double pinball_loss(const LinearModel& model, const LabeledDataset& data,
                    double tau) {
  const Vector r = (data.labels - data.features * model.beta).array() -
                   model.intercept;
  double loss = 0.0;
  for (Index i = 0; i < r.size(); ++i)
    loss += r(i) >= 0 ? tau * r(i) : (tau - 1.0) * r(i);
  return loss / static_cast<double>(r.size());
}

LinearModel fit_quantile(const LabeledDataset& train, double tau,
                         const QuantileFitOptions& options) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error("quantile level must lie in (0, 1)");
  validate(train);
  const Index n = train.size();
  const Index d = train.dim();

  // Work on standardized columns; constant columns keep unit scale.
  const Vector xbar = train.features.colwise().mean().transpose();
  Vector xsd = ((train.features.rowwise() - xbar.transpose())
                    .colwise()
                    .squaredNorm()
                    .transpose() /
                static_cast<double>(std::max<Index>(n - 1, 1)))
                   .cwiseSqrt();
  for (Index j = 0; j < d; ++j)
    if (!(xsd(j) > 1e-12)) xsd(j) = 1.0;
  const Matrix xs = (train.features.rowwise() - xbar.transpose()).array().rowwise() /
                    xsd.transpose().array();
  const LabeledDataset standardized{xs, train.labels};

  LinearModel current = fit_ols(standardized);
  const Vector ols_resid =
      (train.labels - xs * current.beta).array() - current.intercept;
  {
    std::vector<double> r(ols_resid.data(), ols_resid.data() + n);
    const auto k = static_cast<std::size_t>(
        std::clamp<double>(std::ceil(tau * static_cast<double>(n)) - 1, 0,
                           static_cast<double>(n - 1)));
    std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k), r.end());
    current.intercept += r[k];
  }

  double scale = robust_scale(ols_resid);
  if (!(scale > 0.0)) scale = std::sqrt(ols_resid.squaredNorm() / static_cast<double>(n));
  if (!(scale > 0.0)) scale = 1.0;

  LinearModel best = current;
  double best_loss = pinball_loss(current, standardized, tau);
  for (int t = 1; t <= options.iterations; ++t) {
    const Vector r = (train.labels - xs * current.beta).array() - current.intercept;
    // d/dprediction of the pinball loss: 1{r < 0} - tau.
    const Vector g = r.unaryExpr([tau](double v) { return (v < 0 ? 1.0 : 0.0) - tau; });
    const Vector grad_beta = xs.transpose() * g / static_cast<double>(n);
    const double grad_b = g.mean();
    const double eta = options.step * scale / std::sqrt(static_cast<double>(t));
    current.beta -= eta * grad_beta;
    current.intercept -= eta * grad_b;
    const double loss = pinball_loss(current, standardized, tau);
    if (loss < best_loss) {
      best_loss = loss;
      best = current;
    }
  }

  LinearModel out;
  out.beta = best.beta.array() / xsd.array();
  out.intercept = best.intercept - out.beta.dot(xbar);
  return out;
}

QuantilePair fit_quantile_pair(const LabeledDataset& train, double alpha,
                               const QuantileFitOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  QuantilePair pair;
  pair.lower_level = alpha / 2.0;
  pair.upper_level = 1.0 - alpha / 2.0;
  pair.lower = fit_quantile(train, pair.lower_level, options);
  pair.upper = fit_quantile(train, pair.upper_level, options);
  return pair;
}

double LogisticModel::probability(const Vector& x) const {
  const double eta = beta.dot(x) + intercept;
  return 1.0 / (1.0 + std::exp(-eta));
}

LogisticModel fit_logistic(const Matrix& class0, const Matrix& class1,
                           double ridge, int max_iterations) {
  if (class0.cols() != class1.cols())
    throw Error("logistic classes differ in dimension");
  if (class0.rows() < 1 || class1.rows() < 1)
    throw Error("logistic regression needs both classes");
  const Index d = class0.cols();
  const Index n = class0.rows() + class1.rows();

  Matrix design(n, d + 1);
  design.topLeftCorner(class0.rows(), d) = class0;
  design.bottomLeftCorner(class1.rows(), d) = class1;
  design.col(d).setOnes();
  Vector y = Vector::Zero(n);
  y.tail(class1.rows()).setOnes();

  Vector w = Vector::Zero(d + 1);
  Matrix penalty = Matrix::Identity(d + 1, d + 1) * ridge * static_cast<double>(n);
  penalty(d, d) = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector eta = design * w;
    Vector p(n);
    Vector weight(n);
    for (Index i = 0; i < n; ++i) {
      p(i) = 1.0 / (1.0 + std::exp(-eta(i)));
      weight(i) = std::max(p(i) * (1.0 - p(i)), 1e-10);
    }
    const Vector grad = design.transpose() * (y - p) - penalty * w;
    const Matrix hess =
        design.transpose() * weight.asDiagonal() * design + penalty;
    const Vector step = hess.ldlt().solve(grad);
    w += step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  LogisticModel model;
  model.beta = w.head(d);
  model.intercept = w(d);
  return model;
}

}  // namespace dicp
