#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dicp {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error categories. The CLI maps ConfigError to exit code 1 and DataError
// to exit code 2; everything else derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

/// Labeled data: one row of `features` per label.
struct LabeledDataset {
  Matrix features;
  Vector labels;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
};

/// Throws DataError unless the dataset is nonempty, consistent and finite.
void validate(const LabeledDataset& data);

/// Sorted, duplicate-free set of 0-based coordinate indices in [0, dim).
class CellMask {
 public:
  CellMask() = default;
  explicit CellMask(Index dim) : dim_(dim) {}
  CellMask(Index dim, std::vector<Index> indices);
  CellMask(Index dim, std::initializer_list<Index> indices)
      : CellMask(dim, std::vector<Index>(indices)) {}

  static CellMask full(Index dim);

  Index dim() const { return dim_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(Index j) const {
    return std::binary_search(indices_.begin(), indices_.end(), j);
  }
  bool is_full() const { return static_cast<Index>(indices_.size()) == dim_; }
  bool is_subset_of(const CellMask& other) const;

  const std::vector<Index>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  CellMask operator|(const CellMask& other) const;
  CellMask operator&(const CellMask& other) const;
  CellMask operator-(const CellMask& other) const;
  CellMask& operator|=(const CellMask& other) { return *this = *this | other; }

  friend bool operator==(const CellMask&, const CellMask&) = default;

 private:
  Index dim_ = 0;
  std::vector<Index> indices_;
};

/// Closed interval on the label axis; either end may be infinite.
template <typename Scalar>
struct BasicInterval {
  Scalar lo = -std::numeric_limits<Scalar>::infinity();
  Scalar hi = std::numeric_limits<Scalar>::infinity();

  Scalar length() const { return hi - lo; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool contains(Scalar y) const { return lo <= y && y <= hi; }

  friend bool operator==(const BasicInterval&, const BasicInterval&) = default;
};

using PredictionInterval = BasicInterval<double>;

namespace detail {

// Order-statistic rank ceil(level * (n + 1)). The guard absorbs the
// representation error of decimal alpha values such as 0.1, so that
// exact multiples (0.9 * 10 = 9) land on the intended rank.
inline std::ptrdiff_t conformal_rank(double level, std::size_t n) {
  const double raw = level * static_cast<double>(n + 1);
  return static_cast<std::ptrdiff_t>(std::ceil(raw - 1e-9));
}

template <typename Scalar>
Scalar kth_smallest(std::span<const Scalar> values, std::ptrdiff_t k) {
  std::vector<Scalar> tmp(values.begin(), values.end());
  auto nth = tmp.begin() + (k - 1);
  std::nth_element(tmp.begin(), nth, tmp.end());
  return *nth;
}

inline void check_quantile_args(std::size_t n, double alpha) {
  if (n == 0) throw Error("empty residual set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
}

}  // namespace detail

/// The ceil((1 - alpha)(n + 1))-th smallest value, or +inf past the end.
template <typename Scalar>
Scalar quantile_hi(std::span<const Scalar> values, double alpha) {
  detail::check_quantile_args(values.size(), alpha);
  const auto k = detail::conformal_rank(1.0 - alpha, values.size());
  if (k > static_cast<std::ptrdiff_t>(values.size()))
    return std::numeric_limits<Scalar>::infinity();
  return detail::kth_smallest(values, std::max<std::ptrdiff_t>(k, 1));
}

/// The ceil(alpha (n + 1))-th smallest value; -inf below rank 1 and +inf
/// past the end.
template <typename Scalar>
Scalar quantile_lo(std::span<const Scalar> values, double alpha) {
  detail::check_quantile_args(values.size(), alpha);
  const auto k = detail::conformal_rank(alpha, values.size());
  if (k < 1) return -std::numeric_limits<Scalar>::infinity();
  if (k > static_cast<std::ptrdiff_t>(values.size()))
    return std::numeric_limits<Scalar>::infinity();
  return detail::kth_smallest(values, k);
}

template <typename Derived>
typename Derived::Scalar quantile_hi(const Eigen::DenseBase<Derived>& values,
                                     double alpha) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = values;
  return quantile_hi<Scalar>(std::span<const Scalar>(v.data(), v.size()),
                             alpha);
}

template <typename Derived>
typename Derived::Scalar quantile_lo(const Eigen::DenseBase<Derived>& values,
                                     double alpha) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = values;
  return quantile_lo<Scalar>(std::span<const Scalar>(v.data(), v.size()),
                             alpha);
}

/// Upper quantile of the weighted distribution
///   sum_i p_i delta_{values_i} + p_test delta_{+inf},
/// with p proportional to the given weights: the smallest value whose
/// cumulative mass reaches 1 - alpha, or +inf when only the atom at
/// infinity gets there.
template <typename Scalar>
Scalar weighted_quantile_hi(std::span<const Scalar> values,
                            std::span<const Scalar> weights,
                            Scalar test_weight, double alpha) {
  detail::check_quantile_args(values.size(), alpha);
  if (weights.size() != values.size())
    throw Error("weight count does not match value count");
  Scalar total = test_weight;
  if (!std::isfinite(test_weight) || test_weight < 0)
    throw Error("non-finite or negative test weight");
  for (Scalar w : weights) {
    if (!std::isfinite(w) || w < 0) throw Error("non-finite or negative weight");
    total += w;
  }
  if (!(total > 0)) throw Error("weights sum to zero");

  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  // Same slack as conformal_rank, in rank units: equal weights then
  // reproduce quantile_hi exactly.
  const double n1 = static_cast<double>(values.size() + 1);
  const Scalar target =
      total * static_cast<Scalar>((1.0 - alpha) - 1e-9 / n1);
  Scalar cumulative = 0;
  for (std::size_t idx : order) {
    cumulative += weights[idx];
    if (cumulative >= target) return values[idx];
  }
  return std::numeric_limits<Scalar>::infinity();
}

/// 1-based split point n0 with 1 < n0 <= n: rows [0, n0-1) train the
/// model, rows [n0-1, n) calibrate it.
struct SplitIndex {
  Index n0 = 0;

  /// n0 = floor(n / 2) + 1, i.e. two equal halves for even n.
  static SplitIndex half(Index n) { return {n / 2 + 1}; }
};

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data,
                                                SplitIndex n0);

/// Rows of `data` selected by `rows`, in the given order.
LabeledDataset take_rows(const LabeledDataset& data,
                         std::span<const Index> rows);

}  // namespace dicp
