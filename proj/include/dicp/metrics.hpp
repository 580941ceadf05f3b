#pragma once

#include "dicp/core.hpp"

#include <span>
#include <vector>

namespace dicp {

/// Outcome of one interval on one test point.
struct IntervalRecord {
  bool covered = false;
  double length = 0.0;  // may be +inf
};

/// Detection outcome on one test point.
struct DetectionRecord {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t outliers = 0;  // |O*|
};

DetectionRecord detection_record(const CellMask& detected,
                                 const CellMask& truth);

/// Fraction of covered records; infinite intervals count as covered when
/// the caller recorded them so.
double coverage(std::span<const IntervalRecord> records);

/// Mean length over finite intervals (NaN when none is finite).
double average_length(std::span<const IntervalRecord> records);

/// Fraction of intervals with infinite length.
double infinite_fraction(std::span<const IntervalRecord> records);

struct TprFdr {
  double tpr = 0.0;
  double fdr = 0.0;
};

enum class Averaging {
  /// TPR averaged over points with outliers, FDR averaged over all points
  /// with FDR_i = FP_i / max(|detected_i|, 1).
  per_point,
  /// Cell counts summed over points first.
  pooled,
};

/// TPR is 0 when no point has outliers.
TprFdr tpr_fdr(std::span<const DetectionRecord> records,
               Averaging averaging = Averaging::per_point);

TprFdr tpr_fdr(std::span<const CellMask> detected,
               std::span<const CellMask> truth,
               Averaging averaging = Averaging::per_point);

/// |a & b| / |a | b|, with jaccard(empty, empty) = 1.
double jaccard(const CellMask& a, const CellMask& b);

/// Running summary of a scalar: count, mean, sample sd (Welford).
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double sd() const;
  double stderr_of_mean() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace dicp
