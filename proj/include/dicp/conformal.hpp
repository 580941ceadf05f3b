#pragma once

#include "dicp/core.hpp"
#include "dicp/detect.hpp"
#include "dicp/impute.hpp"
#include "dicp/model.hpp"

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace dicp {

enum class ScoreKind { abs_residual, cqr };

/// Fitted predictor: a single regression plane for absolute-residual
/// scores, or a quantile pair for CQR scores.
using Predictor = std::variant<LinearModel, QuantilePair>;

/// Everything an interval constructor needs, fitted on the training split
/// and applied to the calibration split. Calibration detections D(X_i) and
/// their union are computed once at construction.
class ConformalContext {
 public:
  ConformalContext(Predictor predictor, ScoreKind score_kind,
                   FittedDetector detector, FittedImputer imputer,
                   LabeledDataset calib, double alpha);

  const Predictor& predictor() const { return predictor_; }
  ScoreKind score_kind() const { return score_kind_; }
  const FittedDetector& detector() const { return detector_; }
  const FittedImputer& imputer() const { return imputer_; }
  const LabeledDataset& calib() const { return calib_; }
  double alpha() const { return alpha_; }
  Index dim() const { return calib_.dim(); }
  Index calib_size() const { return calib_.size(); }

  /// D(X_i) for every calibration row.
  const std::vector<CellMask>& calib_detections() const { return calib_masks_; }
  /// Union of all calibration detections.
  const CellMask& calib_detection_union() const { return calib_union_; }

  /// Lower / upper fitted values; both equal mu(x) for absolute residuals.
  double fit_lower(const Vector& x) const;
  double fit_upper(const Vector& x) const;

  /// |y - mu(x)|, or max(lo(x) - y, y - up(x)) for CQR.
  double score(const Vector& x, double y) const;

  /// Scores of the unprocessed calibration rows.
  const Vector& raw_scores() const { return raw_scores_; }

 private:
  Predictor predictor_;
  ScoreKind score_kind_;
  FittedDetector detector_;
  FittedImputer imputer_;
  LabeledDataset calib_;
  double alpha_;
  std::vector<CellMask> calib_masks_;
  CellMask calib_union_;
  Vector raw_scores_;
};

/// A test point. The clean feature, true outlier mask and label are only
/// known in simulation.
struct TestCase {
  std::optional<Vector> x_clean;
  Vector x_observed;
  std::optional<CellMask> true_mask;
  std::optional<double> y_true;
};

/// Covariate-shift weights w(x) = p(x) / (1 - p(x)) from a classifier of
/// calibration (class 0) versus observed test features (class 1), clipped
/// to [1e-6, 1e6].
struct WeightModel {
  LogisticModel classifier;
  double min_weight = 1e-6;
  double max_weight = 1e6;

  double weight(const Vector& x) const;
};

WeightModel fit_weight_model(const Matrix& calib_features,
                             const Matrix& test_features);

// Interval constructors ----------------------------------------------------

/// Split conformal on raw features.
PredictionInterval scp_interval(const ConformalContext& ctx,
                                const Vector& x_observed);

/// Weighted conformal with the +inf atom carrying the test weight.
PredictionInterval wcp_interval(const ConformalContext& ctx,
                                const Vector& x_observed,
                                const WeightModel& weights);

/// Weighted conformal with explicit weights (one per calibration row).
PredictionInterval wcp_interval(const ConformalContext& ctx,
                                const Vector& x_observed,
                                std::span<const double> calib_weights,
                                double test_weight);

/// Oracle masking of calibration and test features by the true mask.
PredictionInterval baseline_interval(const ConformalContext& ctx,
                                     const TestCase& test);

/// Calibration masked by the test detections only.
PredictionInterval naive_di_interval(const ConformalContext& ctx,
                                     const Vector& x_observed);

/// Calibration masked by D(X_i) united with the true mask.
PredictionInterval odi_interval(const ConformalContext& ctx,
                                const TestCase& test);

/// Proxy detect-then-impute: calibration masked by D(X_i) | D(x~).
PredictionInterval pdi_interval(const ConformalContext& ctx,
                                const Vector& x_observed);

/// Jackknife+-style pairwise masking; coverage at least 1 - 2 alpha.
PredictionInterval jdi_interval(const ConformalContext& ctx,
                                const Vector& x_observed);

/// Every feature masked by the union of all calibration detections and
/// D(x~).
PredictionInterval cjdi_interval(const ConformalContext& ctx,
                                 const Vector& x_observed);

// Method dispatch ----------------------------------------------------------

enum class Method { baseline, scp, wcp, naive_di, odi, pdi, jdi, cjdi };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
bool method_needs_oracle(Method m);

/// Calls the constructor for `method`; wcp requires `weights`.
PredictionInterval interval(const ConformalContext& ctx, Method method,
                            const TestCase& test,
                            const WeightModel* weights = nullptr);

// Inspection ---------------------------------------------------------------

/// Per-calibration-row masks a method applies for this test point (jdi
/// shares pdi's masks; undefined for wcp).
std::vector<CellMask> calibration_masks(const ConformalContext& ctx,
                                        Method method, const TestCase& test);

/// Calibration scores on the processed features of `calibration_masks`.
Vector calibration_scores(const ConformalContext& ctx,
                          const std::vector<CellMask>& masks);

}  // namespace dicp
