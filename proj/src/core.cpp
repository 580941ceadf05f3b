#include "dicp/core.hpp"

#include <iterator>

namespace dicp {

void validate(const LabeledDataset& data) {
  if (data.features.rows() < 1 || data.features.cols() < 1)
    throw DataError("dataset needs at least one row and one feature");
  if (data.labels.size() != data.features.rows())
    throw DataError("label count " + std::to_string(data.labels.size()) +
                    " does not match row count " +
                    std::to_string(data.features.rows()));
  if (!data.features.allFinite()) throw DataError("non-finite feature value");
  if (!data.labels.allFinite()) throw DataError("non-finite label value");
}

CellMask::CellMask(Index dim, std::vector<Index> indices)
    : dim_(dim), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (!indices_.empty() && (indices_.front() < 0 || indices_.back() >= dim_))
    throw Error("cell index out of range for dimension " + std::to_string(dim_));
}

CellMask CellMask::full(Index dim) {
  CellMask m(dim);
  m.indices_.resize(static_cast<std::size_t>(dim));
  for (Index j = 0; j < dim; ++j) m.indices_[static_cast<std::size_t>(j)] = j;
  return m;
}

bool CellMask::is_subset_of(const CellMask& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

namespace {
void check_same_dim(const CellMask& a, const CellMask& b) {
  if (a.dim() != b.dim()) throw Error("cell masks of different dimension");
}
}  // namespace

CellMask CellMask::operator|(const CellMask& other) const {
  check_same_dim(*this, other);
  CellMask out(dim_);
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                 other.indices_.end(), std::back_inserter(out.indices_));
  return out;
}

CellMask CellMask::operator&(const CellMask& other) const {
  check_same_dim(*this, other);
  CellMask out(dim_);
  std::set_intersection(indices_.begin(), indices_.end(),
                        other.indices_.begin(), other.indices_.end(),
                        std::back_inserter(out.indices_));
  return out;
}

CellMask CellMask::operator-(const CellMask& other) const {
  check_same_dim(*this, other);
  CellMask out(dim_);
  std::set_difference(indices_.begin(), indices_.end(), other.indices_.begin(),
                      other.indices_.end(), std::back_inserter(out.indices_));
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data,
                                                SplitIndex n0) {
  const Index n = data.size();
  if (!(n0.n0 > 1 && n0.n0 <= n))
    throw Error("split point n0=" + std::to_string(n0.n0) +
                " must satisfy 1 < n0 <= n=" + std::to_string(n));
  const Index n_train = n0.n0 - 1;
  const Index n_calib = n - n_train;
  LabeledDataset train{data.features.topRows(n_train),
                       data.labels.head(n_train)};
  LabeledDataset calib{data.features.bottomRows(n_calib),
                       data.labels.tail(n_calib)};
  return {std::move(train), std::move(calib)};
}

LabeledDataset take_rows(const LabeledDataset& data,
                         std::span<const Index> rows) {
  LabeledDataset out{Matrix(static_cast<Index>(rows.size()), data.dim()),
                     Vector(static_cast<Index>(rows.size()))};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = static_cast<Index>(r);
    out.features.row(i) = data.features.row(rows[r]);
    out.labels(i) = data.labels(rows[r]);
  }
  return out;
}

}  // namespace dicp
