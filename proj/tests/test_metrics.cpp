#include "dicp/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace dicp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CellMask random_mask(Index d, std::mt19937_64& rng, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Index> idx;
  for (Index j = 0; j < d; ++j)
    if (coin(rng)) idx.push_back(j);
  return CellMask(d, idx);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("coverage, length and infinite fraction") {
  std::vector<IntervalRecord> r(100);
  for (int i = 0; i < 100; ++i) r[static_cast<std::size_t>(i)] = {i < 90, 2.0};
  CHECK(coverage(r) == doctest::Approx(0.9));
  CHECK(average_length(r) == 2.0);
  CHECK(infinite_fraction(r) == 0.0);

  std::vector<IntervalRecord> all{{true, 1.0}, {true, 3.0}};
  CHECK(coverage(all) == 1.0);
  std::vector<IntervalRecord> none{{false, 1.0}, {false, 3.0}};
  CHECK(coverage(none) == 0.0);

  std::vector<IntervalRecord> mixed{{true, kInf}, {true, 1.0}, {false, 3.0}, {true, kInf}};
  CHECK(average_length(mixed) == 2.0);
  CHECK(infinite_fraction(mixed) == 0.5);
  std::vector<IntervalRecord> infinite{{true, kInf}};
  CHECK(std::isnan(average_length(infinite)));
  CHECK_THROWS_AS(coverage(std::vector<IntervalRecord>{}), Error);
}

TEST_CASE("coverage matches a recount") {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.7);
  std::vector<IntervalRecord> r(333);
  int covered = 0;
  for (auto& x : r) {
    x.covered = coin(rng);
    covered += x.covered ? 1 : 0;
  }
  CHECK(coverage(r) == static_cast<double>(covered) / 333.0);
}

TEST_CASE("tpr and fdr examples") {
  const CellMask truth(15, {1, 4, 7});
  const std::vector<CellMask> t{truth};
  CHECK(tpr_fdr(std::vector<CellMask>{truth}, t).tpr == 1.0);
  CHECK(tpr_fdr(std::vector<CellMask>{truth}, t).fdr == 0.0);
  const auto empty = tpr_fdr(std::vector<CellMask>{CellMask(15)}, t);
  CHECK(empty.tpr == 0.0);
  CHECK(empty.fdr == 0.0);
  const auto extra = tpr_fdr(std::vector<CellMask>{CellMask(15, {1, 4, 7, 9})}, t);
  CHECK(extra.tpr == 1.0);
  CHECK(extra.fdr == 0.25);
}

TEST_CASE("per-point and pooled averaging differ as defined") {
  // Point 1: O* = {0}, detected {0, 1, 2}. Point 2: O* = {}, detected {}.
  // Point 3: O* = {0, 1, 2, 3}, detected {0}.
  const std::vector<CellMask> det{CellMask(5, {0, 1, 2}), CellMask(5), CellMask(5, {0})};
  const std::vector<CellMask> tru{CellMask(5, {0}), CellMask(5), CellMask(5, {0, 1, 2, 3})};
  const auto pp = tpr_fdr(det, tru, Averaging::per_point);
  CHECK(pp.tpr == doctest::Approx((1.0 + 0.25) / 2.0));
  CHECK(pp.fdr == doctest::Approx((2.0 / 3.0 + 0.0 + 0.0) / 3.0));
  const auto pooled = tpr_fdr(det, tru, Averaging::pooled);
  CHECK(pooled.tpr == doctest::Approx(2.0 / 5.0));
  CHECK(pooled.fdr == doctest::Approx(2.0 / 4.0));
  CHECK_THROWS_AS(tpr_fdr(det, std::vector<CellMask>{CellMask(5)}), Error);
}

TEST_CASE("detection records count the set algebra") {
  const auto r = detection_record(CellMask(6, {0, 2, 5}), CellMask(6, {2, 3}));
  CHECK(r.true_positives == 1);
  CHECK(r.false_positives == 2);
  CHECK(r.outliers == 2);
}

TEST_CASE("jaccard examples") {
  CHECK(jaccard(CellMask(5, {1, 2}), CellMask(5, {2, 3})) == doctest::Approx(1.0 / 3.0));
  CHECK(jaccard(CellMask(5, {1, 2}), CellMask(5, {1, 2})) == 1.0);
  CHECK(jaccard(CellMask(5, {0}), CellMask(5, {4})) == 0.0);
  CHECK(jaccard(CellMask(5), CellMask(5)) == 1.0);
  CHECK(jaccard(CellMask(5), CellMask(5, {3})) == 0.0);
}

TEST_CASE("metrics stay in the unit interval and jaccard is symmetric") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 500; ++rep) {
    const CellMask a = random_mask(8, rng, 0.3), b = random_mask(8, rng, 0.3);
    const double j = jaccard(a, b);
    REQUIRE(j == jaccard(b, a));
    REQUIRE(j >= 0.0);
    REQUIRE(j <= 1.0);
    std::vector<CellMask> det, tru;
    for (int i = 0; i < 10; ++i) {
      det.push_back(random_mask(8, rng, 0.2));
      tru.push_back(random_mask(8, rng, 0.2));
    }
    for (Averaging avg : {Averaging::per_point, Averaging::pooled}) {
      const auto m = tpr_fdr(det, tru, avg);
      REQUIRE(m.tpr >= 0.0);
      REQUIRE(m.tpr <= 1.0);
      REQUIRE(m.fdr >= 0.0);
      REQUIRE(m.fdr <= 1.0);
    }
  }
}

TEST_CASE("aggregation over trials equals flat pooled aggregation") {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.85);
  std::uniform_int_distribution<int> size(5, 40);
  std::vector<IntervalRecord> flat;
  double weighted = 0;
  std::size_t total = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<IntervalRecord> r(static_cast<std::size_t>(size(rng)));
    for (auto& x : r) x = {coin(rng), 1.0};
    weighted += coverage(r) * static_cast<double>(r.size());
    total += r.size();
    flat.insert(flat.end(), r.begin(), r.end());
  }
  CHECK(weighted / static_cast<double>(total) == doctest::Approx(coverage(flat)).epsilon(1e-12));

  std::vector<CellMask> det_all, tru_all;
  std::size_t tp = 0, fp = 0, out = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<DetectionRecord> recs;
    for (int i = 0; i < 7; ++i) {
      const CellMask d = random_mask(6, rng, 0.3), t = random_mask(6, rng, 0.2);
      recs.push_back(detection_record(d, t));
      det_all.push_back(d);
      tru_all.push_back(t);
    }
    for (const auto& r : recs) {
      tp += r.true_positives;
      fp += r.false_positives;
      out += r.outliers;
    }
  }
  const auto pooled = tpr_fdr(det_all, tru_all, Averaging::pooled);
  CHECK(pooled.tpr == doctest::Approx(static_cast<double>(tp) / static_cast<double>(out)));
  CHECK(pooled.fdr == doctest::Approx(static_cast<double>(fp) / static_cast<double>(tp + fp)));
}

TEST_CASE("running statistics") {
  RunningStats s;
  for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) s.add(x);
  CHECK(s.count() == 8);
  CHECK(s.mean() == doctest::Approx(5.0));
  CHECK(s.sd() == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(s.stderr_of_mean() == doctest::Approx(std::sqrt(32.0 / 7.0 / 8.0)));
  RunningStats one;
  one.add(3.0);
  CHECK(one.sd() == 0.0);
}

}  // TEST_SUITE
