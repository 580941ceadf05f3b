#pragma once

#include "dicp/core.hpp"

#include <vector>

namespace dicp {

enum class ImputerKind { mean, knn, mice };

struct ImputerParams {
  Index knn_k = 5;
  int mice_sweeps = 10;
  double mice_ridge = 1e-6;  // scaled by trace(X'X) / d of the predictors
};

/// Counts calls where a kNN or MICE imputer saw a fully masked vector and
/// fell back to mean imputation.
struct ImputeDiagnostics {
  std::size_t full_mask_fallbacks = 0;
};

/// Imputation rule fitted on a training split.
///
/// The imputed vector equals x off the mask. Masked cells are filled from
/// the observed cells only:
///   mean: training column means;
///   knn:  mean over the k training rows nearest on the observed cells
///         (Euclidean distance scaled by 1/sqrt(#observed), ties by row);
///   mice: masked cells start at the column means and are refreshed by
///         `mice_sweeps` fixed-order passes of per-column ridge regressions
///         on all other columns.
class FittedImputer {
 public:
  ImputerKind kind() const { return kind_; }
  Index dim() const { return means_.size(); }
  const Vector& means() const { return means_; }
  const ImputerParams& params() const { return params_; }

  /// MICE coefficients: row j holds column j's weights on every column
  /// (zero on the diagonal); intercepts are separate.
  const Matrix& mice_coefficients() const { return mice_coef_; }
  const Vector& mice_intercepts() const { return mice_intercept_; }

 private:
  friend FittedImputer fit_imputer(ImputerKind, const Matrix&,
                                   const ImputerParams&);
  friend Vector impute(const FittedImputer&, const Vector&, const CellMask&,
                       ImputeDiagnostics*);

  ImputerKind kind_ = ImputerKind::mean;
  ImputerParams params_;
  Vector means_;
  Matrix train_;
  Matrix mice_coef_;
  Vector mice_intercept_;
};

FittedImputer fit_imputer(ImputerKind kind, const Matrix& train,
                          const ImputerParams& params = {});

/// I(x, mask).
Vector impute(const FittedImputer& imp, const Vector& x, const CellMask& mask,
              ImputeDiagnostics* diagnostics = nullptr);

}  // namespace dicp
