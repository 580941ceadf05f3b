#include "dicp/detect.hpp"

#include "dicp/stats.hpp"

#include <cmath>
#include <limits>

namespace dicp {

namespace {

constexpr double kScaleFloor = 1e-8;

void check_length(const FittedDetector& det, const Vector& x) {
  if (x.size() != det.dim())
    throw Error("feature length " + std::to_string(x.size()) +
                " does not match detector dimension " +
                std::to_string(det.dim()));
}

}  // namespace

FittedDetector FittedDetector::inert(Index dim) {
  FittedDetector det;
  det.kind_ = DetectorKind::zscore;
  det.center_ = Vector::Zero(dim);
  det.scale_ = Vector::Ones(dim);
  det.thresholds_ =
      Vector::Constant(dim, std::numeric_limits<double>::infinity());
  return det;
}

FittedDetector FittedDetector::with_thresholds(Vector thresholds) const {
  if (thresholds.size() != dim()) throw Error("threshold length mismatch");
  FittedDetector copy = *this;
  copy.thresholds_ = std::move(thresholds);
  return copy;
}

double FittedDetector::ddc_score(const Vector& z, Index j) const {
  const double tau = thresholds_(j);
  double num = 0.0;
  double den = 0.0;
  for (const DdcLink& link : links_[static_cast<std::size_t>(j)]) {
    const double zk = z(link.column);
    if (std::fabs(zk) > tau) continue;
    num += link.weight * link.slope * zk;
    den += link.weight;
  }
  if (den <= 0.0) return std::fabs(z(j));
  return std::fabs(z(j) - num / den) / residual_scale_(j);
}

Vector FittedDetector::scores(const Vector& x) const {
  check_length(*this, x);
  const Vector z = ((x - center_).array() / scale_.array()).matrix();
  if (kind_ == DetectorKind::zscore) return z.cwiseAbs();
  Vector s(z.size());
  for (Index j = 0; j < z.size(); ++j) s(j) = ddc_score(z, j);
  return s;
}

FittedDetector fit_zscore(const Matrix& train, double z_threshold) {
  if (train.rows() < 2) throw Error("z-score detector needs at least 2 rows");
  FittedDetector det;
  det.kind_ = DetectorKind::zscore;
  det.center_ = train.colwise().mean().transpose();
  const Matrix centered = train.rowwise() - det.center_.transpose();
  det.scale_ = (centered.colwise().squaredNorm().transpose() /
                static_cast<double>(train.rows() - 1))
                   .cwiseSqrt();
  for (Index j = 0; j < det.scale_.size(); ++j)
    if (!(det.scale_(j) > 0.0))
      throw Error("zero-variance column " + std::to_string(j));
  det.thresholds_ = Vector::Constant(train.cols(), z_threshold);
  det.residual_scale_ = Vector::Ones(train.cols());
  det.links_.assign(static_cast<std::size_t>(train.cols()), {});
  return det;
}

double robust_correlation(const Vector& zi, const Vector& zj) {
  const double su = robust_scale(zi + zj);
  const double sv = robust_scale(zi - zj);
  const double a = su * su;
  const double b = sv * sv;
  if (a + b <= 0.0) return 0.0;
  return (a - b) / (a + b);
}

namespace {

double robust_slope(const Vector& target, const Vector& predictor) {
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(target.size()));
  for (Index i = 0; i < target.size(); ++i)
    if (std::fabs(predictor(i)) > 1e-8) ratios.push_back(target(i) / predictor(i));
  if (ratios.empty()) return 0.0;
  return median(ratios);
}

}  // namespace

FittedDetector fit_ddc(const Matrix& train, double chi2_prob,
                       double corr_cutoff) {
  if (train.rows() < 10) throw Error("DDC detector needs at least 10 rows");
  if (train.cols() < 2) throw Error("DDC detector needs at least 2 columns");
  const Index n = train.rows();
  const Index d = train.cols();

  FittedDetector det;
  det.kind_ = DetectorKind::ddc;
  det.center_.resize(d);
  det.scale_.resize(d);
  for (Index j = 0; j < d; ++j) {
    const Vector col = train.col(j);
    det.center_(j) = median(col);
    det.scale_(j) = kMadConsistency *
                    mad(std::span<const double>(col.data(), col.size()),
                        det.center_(j));
    if (!(det.scale_(j) > 0.0))
      throw Error("zero MAD in column " + std::to_string(j));
  }
  det.thresholds_ = Vector::Constant(d, chi2_1_cutoff(chi2_prob));

  const Matrix z = (train.rowwise() - det.center_.transpose()).array().rowwise() /
                   det.scale_.transpose().array();

  det.links_.assign(static_cast<std::size_t>(d), {});
  for (Index j = 0; j < d; ++j) {
    for (Index k = 0; k < d; ++k) {
      if (k == j) continue;
      const double corr = robust_correlation(z.col(j), z.col(k));
      if (std::fabs(corr) <= corr_cutoff) continue;
      det.links_[static_cast<std::size_t>(j)].push_back(
          {k, robust_slope(z.col(j), z.col(k)), std::fabs(corr)});
    }
  }

  // Residual scale of each cell's prediction over the training rows that
  // have at least one usable predictor.
  det.residual_scale_ = Vector::Ones(d);
  for (Index j = 0; j < d; ++j) {
    const auto& links = det.links_[static_cast<std::size_t>(j)];
    if (links.empty()) continue;
    std::vector<double> residuals;
    residuals.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      double num = 0.0;
      double den = 0.0;
      for (const DdcLink& link : links) {
        const double zk = z(i, link.column);
        if (std::fabs(zk) > det.thresholds_(j)) continue;
        num += link.weight * link.slope * zk;
        den += link.weight;
      }
      if (den > 0.0) residuals.push_back(z(i, j) - num / den);
    }
    if (residuals.size() >= 2)
      det.residual_scale_(j) = std::max(robust_scale(residuals), kScaleFloor);
  }
  return det;
}

CellMask detect(const FittedDetector& det, const Vector& x) {
  if (!x.allFinite()) throw Error("non-finite feature value in detect");
  const Vector s = det.scores(x);
  std::vector<Index> flagged;
  for (Index j = 0; j < s.size(); ++j)
    if (s(j) > det.thresholds()(j)) flagged.push_back(j);
  return CellMask(det.dim(), std::move(flagged));
}

}  // namespace dicp
