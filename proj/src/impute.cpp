#include "dicp/impute.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dicp {

FittedImputer fit_imputer(ImputerKind kind, const Matrix& train,
                          const ImputerParams& params) {
  if (train.rows() < 1 || train.cols() < 1)
    throw Error("imputer needs a nonempty training matrix");
  FittedImputer imp;
  imp.kind_ = kind;
  imp.params_ = params;
  imp.means_ = train.colwise().mean().transpose();

  switch (kind) {
    case ImputerKind::mean:
      break;
    case ImputerKind::knn:
      if (params.knn_k < 1 || params.knn_k > train.rows())
        throw Error("knn k must lie in [1, training rows]");
      imp.train_ = train;
      break;
    case ImputerKind::mice: {
      const Index d = train.cols();
      if (d < 2) throw Error("MICE imputer needs at least 2 columns");
      if (params.mice_sweeps < 1) throw Error("MICE needs at least one sweep");
      const Matrix centered = train.rowwise() - imp.means_.transpose();
      const Matrix gram = centered.transpose() * centered;
      imp.mice_coef_ = Matrix::Zero(d, d);
      imp.mice_intercept_.resize(d);
      for (Index j = 0; j < d; ++j) {
        std::vector<Index> others;
        for (Index k = 0; k < d; ++k)
          if (k != j) others.push_back(k);
        const auto m = static_cast<Index>(others.size());
        Matrix a(m, m);
        Vector rhs(m);
        for (Index r = 0; r < m; ++r) {
          rhs(r) = gram(others[r], j);
          for (Index c = 0; c < m; ++c) a(r, c) = gram(others[r], others[c]);
        }
        const double lambda =
            params.mice_ridge * std::max(a.trace() / static_cast<double>(m), 1e-12);
        a.diagonal().array() += lambda;
        const Vector coef = a.ldlt().solve(rhs);
        double intercept = imp.means_(j);
        for (Index r = 0; r < m; ++r) {
          imp.mice_coef_(j, others[r]) = coef(r);
          intercept -= coef(r) * imp.means_(others[r]);
        }
        imp.mice_intercept_(j) = intercept;
      }
      if (!imp.mice_coef_.allFinite()) throw Error("non-finite MICE coefficients");
      break;
    }
  }
  return imp;
}

namespace {

void knn_fill(const Matrix& train, Index k, const CellMask& mask, Vector& out) {
  std::vector<Index> observed;
  for (Index j = 0; j < out.size(); ++j)
    if (!mask.contains(j)) observed.push_back(j);
  const double scale = 1.0 / std::sqrt(static_cast<double>(observed.size()));

  std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(train.rows()));
  for (Index i = 0; i < train.rows(); ++i) {
    double sq = 0.0;
    for (Index j : observed) {
      const double diff = train(i, j) - out(j);
      sq += diff * diff;
    }
    dist[static_cast<std::size_t>(i)] = {std::sqrt(sq) * scale, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  for (Index j : mask) {
    double sum = 0.0;
    for (Index r = 0; r < k; ++r) sum += train(dist[static_cast<std::size_t>(r)].second, j);
    out(j) = sum / static_cast<double>(k);
  }
}

void mice_fill(const Matrix& coef, const Vector& intercept, int sweeps,
               const CellMask& mask, Vector& out) {
  for (int s = 0; s < sweeps; ++s)
    for (Index j : mask) out(j) = intercept(j) + coef.row(j).dot(out);
}

}  // namespace

Vector impute(const FittedImputer& imp, const Vector& x, const CellMask& mask,
              ImputeDiagnostics* diagnostics) {
  if (x.size() != imp.dim())
    throw Error("feature length " + std::to_string(x.size()) +
                " does not match imputer dimension " + std::to_string(imp.dim()));
  if (mask.dim() != imp.dim()) throw Error("mask dimension mismatch");
  Vector out = x;
  if (mask.empty()) return out;
  for (Index j : mask) out(j) = imp.means_(j);

  if (imp.kind_ == ImputerKind::mean) return out;
  if (mask.is_full()) {
    if (diagnostics) ++diagnostics->full_mask_fallbacks;
    return out;
  }
  if (imp.kind_ == ImputerKind::knn)
    knn_fill(imp.train_, imp.params_.knn_k, mask, out);
  else
    mice_fill(imp.mice_coef_, imp.mice_intercept_, imp.params_.mice_sweeps, mask,
              out);
  return out;
}

}  // namespace dicp
