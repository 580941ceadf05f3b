#include "dicp/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dicp {

ConformalContext::ConformalContext(Predictor predictor, ScoreKind score_kind,
                                   FittedDetector detector,
                                   FittedImputer imputer, LabeledDataset calib,
                                   double alpha)
    : predictor_(std::move(predictor)),
      score_kind_(score_kind),
      detector_(std::move(detector)),
      imputer_(std::move(imputer)),
      calib_(std::move(calib)),
      alpha_(alpha) {
  const bool is_pair = std::holds_alternative<QuantilePair>(predictor_);
  if (is_pair != (score_kind_ == ScoreKind::cqr))
    throw Error("score kind does not match the predictor type");
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw Error("alpha must lie in (0, 1)");
  validate(calib_);
  if (detector_.dim() != calib_.dim() || imputer_.dim() != calib_.dim())
    throw Error("detector, imputer and calibration dimensions differ");

  calib_union_ = CellMask(calib_.dim());
  calib_masks_.reserve(static_cast<std::size_t>(calib_.size()));
  raw_scores_.resize(calib_.size());
  for (Index i = 0; i < calib_.size(); ++i) {
    const Vector xi = calib_.features.row(i).transpose();
    calib_masks_.push_back(detect(detector_, xi));
    calib_union_ |= calib_masks_.back();
    raw_scores_(i) = score(xi, calib_.labels(i));
  }
}

double ConformalContext::fit_lower(const Vector& x) const {
  if (const auto* m = std::get_if<LinearModel>(&predictor_)) return predict(*m, x);
  return predict(std::get<QuantilePair>(predictor_).lower, x);
}

double ConformalContext::fit_upper(const Vector& x) const {
  if (const auto* m = std::get_if<LinearModel>(&predictor_)) return predict(*m, x);
  return predict(std::get<QuantilePair>(predictor_).upper, x);
}

double ConformalContext::score(const Vector& x, double y) const {
  if (score_kind_ == ScoreKind::abs_residual)
    return std::fabs(y - fit_lower(x));
  return std::max(fit_lower(x) - y, y - fit_upper(x));
}

double WeightModel::weight(const Vector& x) const {
  const double p = classifier.probability(x);
  const double w = p / (1.0 - p);
  if (std::isnan(w)) throw Error("non-finite covariate-shift weight");
  return std::clamp(w, min_weight, max_weight);
}

WeightModel fit_weight_model(const Matrix& calib_features,
                             const Matrix& test_features) {
  return WeightModel{fit_logistic(calib_features, test_features)};
}

namespace {

const Vector& require_observed(const ConformalContext& ctx, const Vector& x) {
  if (x.size() != ctx.dim())
    throw Error("test feature length " + std::to_string(x.size()) +
                " does not match dimension " + std::to_string(ctx.dim()));
  return x;
}

const CellMask& require_oracle(const TestCase& test, const char* method) {
  if (!test.true_mask)
    throw Error(std::string(method) + " requires oracle mask");
  return *test.true_mask;
}

PredictionInterval around(const ConformalContext& ctx, const Vector& x,
                          double q) {
  return {ctx.fit_lower(x) - q, ctx.fit_upper(x) + q};
}

// Split-conformal interval on processed features: calibration row i is
// imputed with masks[i], the test point with test_mask.
PredictionInterval masked_split_interval(const ConformalContext& ctx,
                                         const std::vector<CellMask>& masks,
                                         const Vector& x_observed,
                                         const CellMask& test_mask) {
  const Vector scores = calibration_scores(ctx, masks);
  const double q = quantile_hi(scores, ctx.alpha());
  return around(ctx, impute(ctx.imputer(), x_observed, test_mask), q);
}

std::vector<CellMask> same_mask(const ConformalContext& ctx,
                                const CellMask& mask) {
  return std::vector<CellMask>(static_cast<std::size_t>(ctx.calib_size()), mask);
}

std::vector<CellMask> united_with_detections(const ConformalContext& ctx,
                                             const CellMask& mask) {
  std::vector<CellMask> out;
  out.reserve(ctx.calib_detections().size());
  for (const CellMask& m : ctx.calib_detections()) out.push_back(m | mask);
  return out;
}

}  // namespace

Vector calibration_scores(const ConformalContext& ctx,
                          const std::vector<CellMask>& masks) {
  if (static_cast<Index>(masks.size()) != ctx.calib_size())
    throw Error("one mask per calibration row required");
  const LabeledDataset& calib = ctx.calib();
  Vector scores(calib.size());
  for (Index i = 0; i < calib.size(); ++i) {
    const CellMask& m = masks[static_cast<std::size_t>(i)];
    if (m.empty()) {
      scores(i) = ctx.raw_scores()(i);
      continue;
    }
    const Vector xi = calib.features.row(i).transpose();
    scores(i) = ctx.score(impute(ctx.imputer(), xi, m), calib.labels(i));
  }
  return scores;
}

PredictionInterval scp_interval(const ConformalContext& ctx,
                                const Vector& x_observed) {
  require_observed(ctx, x_observed);
  return around(ctx, x_observed, quantile_hi(ctx.raw_scores(), ctx.alpha()));
}

PredictionInterval wcp_interval(const ConformalContext& ctx,
                                const Vector& x_observed,
                                std::span<const double> calib_weights,
                                double test_weight) {
  require_observed(ctx, x_observed);
  const Vector& s = ctx.raw_scores();
  const double q = weighted_quantile_hi<double>(
      std::span<const double>(s.data(), static_cast<std::size_t>(s.size())),
      calib_weights, test_weight, ctx.alpha());
  return around(ctx, x_observed, q);
}

PredictionInterval wcp_interval(const ConformalContext& ctx,
                                const Vector& x_observed,
                                const WeightModel& weights) {
  std::vector<double> w(static_cast<std::size_t>(ctx.calib_size()));
  for (Index i = 0; i < ctx.calib_size(); ++i)
    w[static_cast<std::size_t>(i)] =
        weights.weight(ctx.calib().features.row(i).transpose());
  return wcp_interval(ctx, x_observed, w, weights.weight(x_observed));
}

PredictionInterval baseline_interval(const ConformalContext& ctx,
                                     const TestCase& test) {
  const CellMask& oracle = require_oracle(test, "baseline");
  return masked_split_interval(ctx, same_mask(ctx, oracle),
                               require_observed(ctx, test.x_observed), oracle);
}

PredictionInterval naive_di_interval(const ConformalContext& ctx,
                                     const Vector& x_observed) {
  const CellMask test_mask = detect(ctx.detector(), require_observed(ctx, x_observed));
  return masked_split_interval(ctx, same_mask(ctx, test_mask), x_observed,
                               test_mask);
}

PredictionInterval odi_interval(const ConformalContext& ctx,
                                const TestCase& test) {
  const CellMask& oracle = require_oracle(test, "odi");
  const Vector& x = require_observed(ctx, test.x_observed);
  return masked_split_interval(ctx, united_with_detections(ctx, oracle), x,
                               detect(ctx.detector(), x));
}

PredictionInterval pdi_interval(const ConformalContext& ctx,
                                const Vector& x_observed) {
  const CellMask test_mask = detect(ctx.detector(), require_observed(ctx, x_observed));
  return masked_split_interval(ctx, united_with_detections(ctx, test_mask),
                               x_observed, test_mask);
}

PredictionInterval jdi_interval(const ConformalContext& ctx,
                                const Vector& x_observed) {
  const CellMask test_mask = detect(ctx.detector(), require_observed(ctx, x_observed));
  const std::vector<CellMask> masks = united_with_detections(ctx, test_mask);
  const Vector scores = calibration_scores(ctx, masks);

  Vector lo(ctx.calib_size());
  Vector hi(ctx.calib_size());
  for (Index i = 0; i < ctx.calib_size(); ++i) {
    const Vector xi = impute(ctx.imputer(), x_observed, masks[static_cast<std::size_t>(i)]);
    lo(i) = ctx.fit_lower(xi) - scores(i);
    hi(i) = ctx.fit_upper(xi) + scores(i);
  }
  return {quantile_lo(lo, ctx.alpha()), quantile_hi(hi, ctx.alpha())};
}

PredictionInterval cjdi_interval(const ConformalContext& ctx,
                                 const Vector& x_observed) {
  const CellMask joint =
      ctx.calib_detection_union() | detect(ctx.detector(), require_observed(ctx, x_observed));
  return masked_split_interval(ctx, same_mask(ctx, joint), x_observed, joint);
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::baseline: return "baseline";
    case Method::scp: return "scp";
    case Method::wcp: return "wcp";
    case Method::naive_di: return "naive_di";
    case Method::odi: return "odi";
    case Method::pdi: return "pdi";
    case Method::jdi: return "jdi";
    case Method::cjdi: return "cjdi";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::baseline, Method::scp, Method::wcp, Method::naive_di,
                   Method::odi, Method::pdi, Method::jdi, Method::cjdi})
    if (method_name(m) == name) return m;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

bool method_needs_oracle(Method m) {
  return m == Method::baseline || m == Method::odi;
}

PredictionInterval interval(const ConformalContext& ctx, Method method,
                            const TestCase& test, const WeightModel* weights) {
  switch (method) {
    case Method::baseline: return baseline_interval(ctx, test);
    case Method::scp: return scp_interval(ctx, test.x_observed);
    case Method::wcp:
      if (!weights) throw Error("wcp requires a weight model");
      return wcp_interval(ctx, test.x_observed, *weights);
    case Method::naive_di: return naive_di_interval(ctx, test.x_observed);
    case Method::odi: return odi_interval(ctx, test);
    case Method::pdi: return pdi_interval(ctx, test.x_observed);
    case Method::jdi: return jdi_interval(ctx, test.x_observed);
    case Method::cjdi: return cjdi_interval(ctx, test.x_observed);
  }
  throw Error("unknown method");
}

std::vector<CellMask> calibration_masks(const ConformalContext& ctx,
                                        Method method, const TestCase& test) {
  const Vector& x = require_observed(ctx, test.x_observed);
  switch (method) {
    case Method::scp:
      return same_mask(ctx, CellMask(ctx.dim()));
    case Method::baseline:
      return same_mask(ctx, require_oracle(test, "baseline"));
    case Method::naive_di:
      return same_mask(ctx, detect(ctx.detector(), x));
    case Method::odi:
      return united_with_detections(ctx, require_oracle(test, "odi"));
    case Method::pdi:
    case Method::jdi:
      return united_with_detections(ctx, detect(ctx.detector(), x));
    case Method::cjdi:
      return same_mask(ctx, ctx.calib_detection_union() | detect(ctx.detector(), x));
    case Method::wcp:
      break;
  }
  throw Error("calibration masks are not defined for wcp");
}

}  // namespace dicp
