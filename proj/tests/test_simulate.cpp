#include "dicp/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dicp;

namespace {

// Direct mixture sampler: pick a component, then draw from it. The skew
// normal uses the sign-flip rejection form: with Z1, Z2 iid N(0, 1),
// X = Z1 if shape * Z1 > Z2 and -Z1 otherwise.
double mixture_draw(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const double c = u(rng);
  if (c < 1.0 / 3.0) return g(rng);
  if (c < 2.0 / 3.0) {
    const double z1 = g(rng), z2 = g(rng);
    return 5.0 * z1 > z2 ? z1 : -z1;
  }
  return u(rng) < 0.5 ? 1.0 : 0.0;
}

struct Moments {
  double mean3 = 0, var3 = 0;
};

Moments third_moment(const std::vector<double>& v) {
  double s = 0, s2 = 0;
  for (double x : v) {
    s += x * x * x;
    s2 += x * x * x * x * x * x;
  }
  const double n = static_cast<double>(v.size());
  return {s / n, s2 / n - (s / n) * (s / n)};
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("B-spline basis is a clamped partition of unity") {
  const std::vector<double> knots{-3, -3, -3, -3, -2, -1, 0, 1, 2, 3, 3, 3, 3};
  for (double x = -5.0; x <= 5.0; x += 0.173) {
    const Vector b = bspline_basis(x, knots, 3);
    REQUIRE(b.size() == 9);
    CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.minCoeff() >= 0.0);
  }
  CHECK(bspline_basis(-3.0, knots, 3)(0) == doctest::Approx(1.0));
  CHECK(bspline_basis(3.0, knots, 3)(8) == doctest::Approx(1.0));
  CHECK(bspline_basis(-7.0, knots, 3) == bspline_basis(-3.0, knots, 3));
  // Uniform interior span: the cubic pieces at a knot are 1/6, 2/3, 1/6.
  const Vector mid = bspline_basis(0.0, knots, 3);
  CHECK(mid(3) == doctest::Approx(1.0 / 6.0));
  CHECK(mid(4) == doctest::Approx(2.0 / 3.0));
  CHECK(mid(5) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("generation is deterministic in the seed") {
  for (Setting s : {Setting::A, Setting::B, Setting::C}) {
    SettingSpec spec;
    spec.setting = s;
    spec.d = 6;
    spec.moment_draws = 500;
    const auto a = generate(spec, 40, 11);
    const auto b = generate(spec, 40, 11);
    const auto c = generate(spec, 40, 12);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK(a.labels != c.labels);
  }
}

TEST_CASE("Setting A with zero coefficients is pure noise") {
  SettingSpec spec;
  spec.beta = Vector::Zero(15);
  const auto data = generate(spec, 10000, 3);
  CHECK(std::abs(data.labels.mean()) < 0.05);
}

TEST_CASE("Setting A columns are standard normal") {
  const auto data = generate(SettingSpec{}, 10000, 4);
  REQUIRE(data.features.cols() == 15);
  for (Index j = 0; j < 15; ++j) {
    const Vector c = data.features.col(j);
    const double m = c.mean();
    const double sd = std::sqrt((c.array() - m).square().sum() / (c.size() - 1));
    CHECK(std::abs(m) < 0.05);
    CHECK(std::abs(sd - 1.0) < 0.05);
  }
}

TEST_CASE("Setting A regression function is linear") {
  SettingSpec spec;
  spec.d = 3;
  spec.beta = Vector(3);
  spec.beta << 1.0, -2.0, 0.5;
  const auto data = generate(spec, 20000, 5);
  const Vector resid = data.labels - data.features * spec.beta;
  CHECK(std::abs(resid.mean()) < 0.03);
  const Matrix xc = data.features;
  for (Index j = 0; j < 3; ++j)
    CHECK(std::abs(xc.col(j).dot(resid) / 20000.0) < 0.03);
}

TEST_CASE("Setting B mean function is additive") {
  SettingSpec spec;
  spec.setting = Setting::B;
  spec.d = 4;
  spec.seed = 9;
  const DataGenerator gen(spec);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.5);
  for (int rep = 0; rep < 200; ++rep) {
    Vector x(4), y(4);
    for (Index j = 0; j < 4; ++j) {
      x(j) = g(rng);
      y(j) = g(rng);
    }
    const double t = g(rng);
    Vector x2 = x, y2 = y;
    x2(0) = t;
    y2(0) = t;
    y(0) = x(0);
    REQUIRE(gen.mean_function(x2) - gen.mean_function(x) ==
            doctest::Approx(gen.mean_function(y2) - gen.mean_function(y)).epsilon(1e-10));
  }
  CHECK(gen.spline_coefficients().rows() == 4);
  CHECK(gen.spline_coefficients().cols() == 9);
}

TEST_CASE("Setting C marginal third moment matches a direct mixture sampler") {
  SettingSpec spec;
  spec.setting = Setting::C;
  spec.d = 1;
  spec.lags = 0;
  spec.moment_draws = 100;
  const DataGenerator gen(spec);
  Rng rng(21);
  const Index n = 100000;
  const Matrix x = gen.sample_features(n, rng);
  std::vector<double> lib(x.data(), x.data() + n), direct(static_cast<std::size_t>(n));
  std::mt19937 orng(22);
  for (auto& v : direct) v = mixture_draw(orng);
  const auto a = third_moment(lib), b = third_moment(direct);
  const double se = std::sqrt(a.var3 / n + b.var3 / n);
  CHECK(std::abs(a.mean3 - b.mean3) < 4.0 * se);
}

TEST_CASE("Setting C smoothing averages the available lags") {
  SettingSpec raw;
  raw.setting = Setting::C;
  raw.d = 6;
  raw.lags = 0;
  raw.moment_draws = 10;
  SettingSpec smooth = raw;
  smooth.lags = 3;
  Rng r1(5), r2(5);
  const Matrix a = DataGenerator(raw).sample_features(50, r1);
  const Matrix b = DataGenerator(smooth).sample_features(50, r2);
  for (Index i = 0; i < 50; ++i) {
    Vector expect = a.row(i).transpose();
    for (Index j = 1; j < 6; ++j) {
      const Index first = j >= 3 ? j - 3 : 0;
      double s = 0;
      for (Index l = first; l < j; ++l) s += expect(l);
      expect(j) = (s + a(i, j)) / static_cast<double>(j - first + 1);
    }
    for (Index j = 0; j < 6; ++j)
      REQUIRE(b(i, j) == doctest::Approx(expect(j)).epsilon(1e-12));
  }
}

TEST_CASE("contamination leaves unmasked cells untouched") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  ContaminationSpec spec;
  spec.epsilon = 0.3;
  for (int rep = 0; rep < 1000; ++rep) {
    Vector x(15);
    for (Index j = 0; j < 15; ++j) x(j) = g(rng);
    const TestCase t = contaminate(x, spec, static_cast<std::uint64_t>(rep));
    REQUIRE(t.x_clean.has_value());
    REQUIRE(*t.x_clean == x);
    for (Index j = 0; j < 15; ++j)
      if (!t.true_mask->contains(j)) REQUIRE(t.x_observed(j) == x(j));
  }
}

TEST_CASE("contamination at the extremes of epsilon") {
  const Vector x = Vector::LinSpaced(15, -1.0, 1.0);
  ContaminationSpec spec;
  spec.epsilon = 0.0;
  const auto none = contaminate(x, spec, 1);
  CHECK(none.x_observed == x);
  CHECK(none.true_mask->empty());
  spec.epsilon = 1.0;
  spec.fixed_value = 10.0;
  const auto all = contaminate(x, spec, 1);
  CHECK(*all.true_mask == CellMask::full(15));
  CHECK(all.x_observed == Vector::Constant(15, 10.0));
  spec.epsilon = 1.5;
  CHECK_THROWS_AS(contaminate(x, spec, 1), ConfigError);
}

TEST_CASE("empirical mask rate is epsilon") {
  const Vector x = Vector::Zero(15);
  for (double eps : {0.05, 0.2}) {
    ContaminationSpec spec;
    spec.epsilon = eps;
    const int draws = 10000;
    double cells = 0, nonempty = 0;
    for (int r = 0; r < draws; ++r) {
      const auto t = contaminate(x, spec, derive_seed(3, static_cast<std::uint64_t>(r)));
      cells += static_cast<double>(t.true_mask->size());
      nonempty += t.true_mask->empty() ? 0 : 1;
    }
    const double rate = cells / (15.0 * draws);
    CHECK(std::abs(rate - eps) < 3.0 * std::sqrt(eps * (1 - eps) / (15.0 * draws)));
    const double p = 1.0 - std::pow(1.0 - eps, 15);
    CHECK(std::abs(nonempty / draws - p) < 3.0 * std::sqrt(p * (1 - p) / draws));
  }
}

TEST_CASE("outlier law is shared across a trial") {
  ContaminationSpec spec;
  spec.epsilon = 1.0;
  spec.sigma_lo = spec.sigma_hi = 0.0;
  const OutlierLaw law = draw_outlier_law(spec, 5, 77);
  for (Index j = 0; j < 5; ++j) {
    CHECK(law.mu(j) >= 0.0);
    CHECK(law.mu(j) <= 10.0);
  }
  for (std::uint64_t s = 0; s < 20; ++s)
    CHECK(contaminate(Vector::Zero(5), spec, law, s).x_observed == law.mu);
  CHECK(draw_outlier_law(spec, 5, 77).mu == law.mu);
  spec.mu_lo = 4.0;
  spec.mu_hi = 1.0;
  CHECK_THROWS_AS(draw_outlier_law(spec, 5, 1), ConfigError);
}

TEST_CASE("adversarial value follows the two branches") {
  LinearModel m{Vector(2), 0.0};
  m.beta << 1.0, 1.0;
  CHECK(adversarial_value(10.0, m) == 11.0);
  m.beta << 0.5, 2.0;
  CHECK(adversarial_value(10.0, m) == 5.75);
  m.beta << 0.5, 0.0;
  CHECK_THROWS_AS(adversarial_value(10.0, m), Error);
  LinearModel three{Vector::Ones(3), 0.0};
  CHECK_THROWS_AS(adversarial_value(10.0, three), Error);
}

TEST_CASE("adversarial case forces a large residual") {
  for (double b1 : {1.0, 0.5, 2.0, -0.3})
    for (double M : {10.0, 100.0}) {
      LinearModel m{Vector(2), 0.2};
      m.beta << b1, 1.7;
      for (std::uint64_t s = 0; s < 50; ++s) {
        const TestCase t = adversarial_case(M, m, s);
        REQUIRE(t.y_true.has_value());
        CHECK(*t.y_true == doctest::Approx(t.x_clean->sum()));
        CHECK(std::abs(*t.y_true - predict(m, t.x_observed)) >= M);
        CHECK(*t.true_mask == CellMask(2, {1}));
      }
    }
}

TEST_CASE("setting names") {
  CHECK(parse_setting("A") == Setting::A);
  CHECK(parse_setting("c") == Setting::C);
  CHECK(setting_name(Setting::B) == 'B');
  CHECK_THROWS_AS(parse_setting("D"), ConfigError);
}

}  // TEST_SUITE
