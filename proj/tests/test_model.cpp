#include "dicp/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dicp;

namespace {

LabeledDataset linear_data(Index n, std::uint64_t seed, double noise_sd) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  LabeledDataset data;
  data.features.resize(n, 2);
  data.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    data.features(i, 0) = g(rng);
    data.features(i, 1) = g(rng);
    data.labels(i) = 2.0 * data.features(i, 0) - data.features(i, 1) + 1.0 +
                     noise_sd * g(rng);
  }
  return data;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("OLS recovers a noiseless plane") {
  const auto m = fit_ols(linear_data(50, 1, 0.0));
  CHECK(m.beta(0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m.beta(1) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(m.intercept == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("OLS on constant labels and on two points") {
  auto data = linear_data(30, 2, 1.0);
  data.labels.setConstant(4.5);
  const auto c = fit_ols(data);
  CHECK(c.beta.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(c.intercept == doctest::Approx(4.5));

  LabeledDataset two;
  two.features.resize(2, 1);
  two.features << 0, 1;
  two.labels.resize(2);
  two.labels << 0, 1;
  const auto m = fit_ols(two);
  CHECK(m.beta(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(m.intercept) < 1e-6);
}

TEST_CASE("OLS residuals are orthogonal to the fitted values") {
  const auto data = linear_data(200, 3, 1.0);
  const auto m = fit_ols(data);
  const Vector r = (data.labels - data.features * m.beta).array() - m.intercept;
  const Matrix xc = data.features.rowwise() - data.features.colwise().mean();
  CHECK((xc.transpose() * r).cwiseAbs().maxCoeff() < 1e-7 * xc.squaredNorm());
  CHECK(std::abs(r.sum()) < 1e-8);
}

TEST_CASE("predict and l1 sensitivity examples") {
  LinearModel m;
  m.beta = Vector(3);
  m.beta << 1, -2, 3;
  m.intercept = 0.0;
  CHECK(predict(m, Vector::Ones(3)) == 2.0);
  CHECK(l1_sensitivity(m) == 6.0);
  m.intercept = 1.5;
  CHECK(predict(m, Vector::Zero(3)) == 1.5);
  m.beta.setZero();
  CHECK(predict(m, Vector::Constant(3, 7.0)) == 1.5);
  CHECK(l1_sensitivity(m) == 0.0);
  LinearModel one{Vector::Constant(1, 0.5), 0.0};
  CHECK(l1_sensitivity(one) == 0.5);
  CHECK_THROWS_AS(predict(one, Vector::Zero(2)), Error);
}

TEST_CASE("prediction change is bounded by l1 sensitivity") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int rep = 0; rep < 1000; ++rep) {
    LinearModel m{Vector(4), g(rng)};
    Vector x(4), y(4);
    for (Index j = 0; j < 4; ++j) {
      m.beta(j) = g(rng);
      x(j) = g(rng);
      y(j) = g(rng);
    }
    const double bound = l1_sensitivity(m) * (x - y).lpNorm<1>();
    REQUIRE(std::abs(predict(m, x) - predict(m, y)) <= bound * (1 + 1e-12));
  }
}

TEST_CASE("quantile pair brackets the median plane") {
  const auto data = linear_data(500, 5, 1.0);
  const auto pair = fit_quantile_pair(data, 0.1);
  CHECK(pair.lower_level == doctest::Approx(0.05));
  CHECK(pair.upper_level == doctest::Approx(0.95));
  int ordered = 0;
  for (Index i = 0; i < data.size(); ++i) {
    const Vector x = data.features.row(i).transpose();
    ordered += predict(pair.lower, x) <= predict(pair.upper, x) ? 1 : 0;
  }
  CHECK(ordered >= 475);
  // Levels 0.05 / 0.95 of N(0, 1) noise: about -1.645 / +1.645 around 1.
  CHECK(pair.lower.intercept == doctest::Approx(1.0 - 1.645).epsilon(0.15));
  CHECK(pair.upper.intercept == doctest::Approx(1.0 + 1.645).epsilon(0.15));
}

TEST_CASE("intercept-only quantile fit on uniform noise") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LabeledDataset data;
  data.features = Matrix::Zero(400, 1);
  data.labels.resize(400);
  for (Index i = 0; i < 400; ++i) data.labels(i) = u(rng);
  const auto pair = fit_quantile_pair(data, 0.2);
  CHECK(std::abs(pair.lower.intercept - 0.1) < 0.05);
  CHECK(std::abs(pair.upper.intercept - 0.9) < 0.05);
}

TEST_CASE("quantile fit on constant labels") {
  auto data = linear_data(100, 7, 1.0);
  data.labels.setConstant(-2.0);
  const auto pair = fit_quantile_pair(data, 0.1);
  const Vector x = data.features.row(3).transpose();
  CHECK(predict(pair.lower, x) == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(predict(pair.upper, x) == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("quantile descent never increases the pinball loss") {
  const auto data = linear_data(300, 8, 1.5);
  for (double tau : {0.05, 0.5, 0.95}) {
    QuantileFitOptions none;
    none.iterations = 0;
    const double start = pinball_loss(fit_quantile(data, tau, none), data, tau);
    const double end = pinball_loss(fit_quantile(data, tau), data, tau);
    CHECK(end <= start);
  }
}

TEST_CASE("logistic regression separates shifted classes") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(200, 2), b(200, 2);
  for (Index i = 0; i < 200; ++i) {
    a(i, 0) = g(rng);
    a(i, 1) = g(rng);
    b(i, 0) = g(rng) + 2.0;
    b(i, 1) = g(rng);
  }
  const auto lr = fit_logistic(a, b);
  // Equal-variance Gaussians: the log-odds slope is the mean shift, 2.
  CHECK(lr.beta(0) == doctest::Approx(2.0).epsilon(0.25));
  CHECK(std::abs(lr.beta(1)) < 0.4);
  Vector x(2);
  x << 1.0, 0.0;
  CHECK(lr.probability(x) == doctest::Approx(0.5).epsilon(0.15));
}

}  // TEST_SUITE
