#pragma once

#include "dicp/core.hpp"

#include <vector>

namespace dicp {

enum class DetectorKind { zscore, ddc };

/// One connected predictor column of a DDC-lite cell.
struct DdcLink {
  Index column = 0;
  double slope = 0.0;   // robust slope of z_j on z_column
  double weight = 0.0;  // |robust correlation|
};

/// Cellwise detector fitted on a training split. Cell j is flagged when its
/// score exceeds thresholds()(j).
///
/// zscore: score_j = |x_j - mean_j| / sd_j, which reads only x_j.
/// ddc:    cells are robustly standardized (median, 1.4826 MAD); each cell
///         is predicted from its correlated columns that are not themselves
///         univariately flagged, and the score is the standardized residual
///         of that prediction. Cells without usable predictors fall back to
///         the robust z-score.
class FittedDetector {
 public:
  /// A z-score detector that never flags anything.
  static FittedDetector inert(Index dim);

  DetectorKind kind() const { return kind_; }
  Index dim() const { return center_.size(); }
  const Vector& center() const { return center_; }
  const Vector& scale() const { return scale_; }
  const Vector& thresholds() const { return thresholds_; }
  const Vector& residual_scale() const { return residual_scale_; }
  const std::vector<std::vector<DdcLink>>& links() const { return links_; }

  /// Per-cell scores of `x`; throws on length mismatch.
  Vector scores(const Vector& x) const;

  /// Copy with all thresholds replaced.
  FittedDetector with_thresholds(Vector thresholds) const;

 private:
  friend FittedDetector fit_zscore(const Matrix&, double);
  friend FittedDetector fit_ddc(const Matrix&, double, double);

  double ddc_score(const Vector& z, Index j) const;

  DetectorKind kind_ = DetectorKind::zscore;
  Vector center_;
  Vector scale_;
  Vector thresholds_;
  Vector residual_scale_;
  std::vector<std::vector<DdcLink>> links_;
};

FittedDetector fit_zscore(const Matrix& train, double z_threshold = 3.0);

/// DDC-lite with cutoff sqrt(chi2_1 quantile at `chi2_prob`) and
/// predictor columns chosen by |robust correlation| > corr_cutoff.
FittedDetector fit_ddc(const Matrix& train, double chi2_prob = 0.99,
                       double corr_cutoff = 0.5);

/// D(x) = { j : score_j(x) > tau_j }.
CellMask detect(const FittedDetector& det, const Vector& x);

/// Gnanadesikan-Kettenring correlation of two standardized columns, using
/// 1.4826 MAD as the scale of their sum and difference.
double robust_correlation(const Vector& zi, const Vector& zj);

}  // namespace dicp
