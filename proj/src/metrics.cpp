#include "dicp/metrics.hpp"

#include <cmath>
#include <limits>

namespace dicp {

DetectionRecord detection_record(const CellMask& detected,
                                 const CellMask& truth) {
  const std::size_t tp = (detected & truth).size();
  return {tp, detected.size() - tp, truth.size()};
}

double coverage(std::span<const IntervalRecord> records) {
  if (records.empty()) throw Error("coverage of no records");
  std::size_t hits = 0;
  for (const auto& r : records) hits += r.covered ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

double average_length(std::span<const IntervalRecord> records) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : records) {
    if (!std::isfinite(r.length)) continue;
    sum += r.length;
    ++count;
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : sum / static_cast<double>(count);
}

double infinite_fraction(std::span<const IntervalRecord> records) {
  if (records.empty()) throw Error("infinite fraction of no records");
  std::size_t inf = 0;
  for (const auto& r : records) inf += std::isfinite(r.length) ? 0 : 1;
  return static_cast<double>(inf) / static_cast<double>(records.size());
}

TprFdr tpr_fdr(std::span<const DetectionRecord> records, Averaging averaging) {
  TprFdr out;
  if (records.empty()) return out;
  if (averaging == Averaging::pooled) {
    std::size_t tp = 0, fp = 0, truth = 0;
    for (const auto& r : records) {
      tp += r.true_positives;
      fp += r.false_positives;
      truth += r.outliers;
    }
    out.tpr = truth ? static_cast<double>(tp) / static_cast<double>(truth) : 0.0;
    out.fdr = (tp + fp) ? static_cast<double>(fp) / static_cast<double>(tp + fp) : 0.0;
    return out;
  }
  double tpr_sum = 0.0, fdr_sum = 0.0;
  std::size_t with_outliers = 0;
  for (const auto& r : records) {
    if (r.outliers > 0) {
      tpr_sum += static_cast<double>(r.true_positives) / static_cast<double>(r.outliers);
      ++with_outliers;
    }
    const std::size_t flagged = r.true_positives + r.false_positives;
    fdr_sum += static_cast<double>(r.false_positives) /
               static_cast<double>(std::max<std::size_t>(flagged, 1));
  }
  out.tpr = with_outliers ? tpr_sum / static_cast<double>(with_outliers) : 0.0;
  out.fdr = fdr_sum / static_cast<double>(records.size());
  return out;
}

TprFdr tpr_fdr(std::span<const CellMask> detected,
               std::span<const CellMask> truth, Averaging averaging) {
  if (detected.size() != truth.size())
    throw Error("detections and truths are not aligned");
  std::vector<DetectionRecord> records;
  records.reserve(detected.size());
  for (std::size_t i = 0; i < detected.size(); ++i)
    records.push_back(detection_record(detected[i], truth[i]));
  return tpr_fdr(records, averaging);
}

double jaccard(const CellMask& a, const CellMask& b) {
  const std::size_t uni = (a | b).size();
  if (uni == 0) return 1.0;
  return static_cast<double>((a & b).size()) / static_cast<double>(uni);
}

void RunningStats::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

double RunningStats::sd() const {
  return count_ < 2 ? 0.0 : std::sqrt(m2_ / static_cast<double>(count_ - 1));
}

double RunningStats::stderr_of_mean() const {
  return count_ < 1 ? 0.0 : sd() / std::sqrt(static_cast<double>(count_));
}

}  // namespace dicp
