#include "dicp/simulate.hpp"

#include <cmath>
#include <random>

namespace dicp {

char setting_name(Setting s) {
  switch (s) {
    case Setting::A: return 'A';
    case Setting::B: return 'B';
    case Setting::C: return 'C';
  }
  return '?';
}

Setting parse_setting(std::string_view name) {
  if (name == "A" || name == "a") return Setting::A;
  if (name == "B" || name == "b") return Setting::B;
  if (name == "C" || name == "c") return Setting::C;
  throw ConfigError("unknown setting '" + std::string(name) + "'");
}

Vector bspline_basis(double x, const std::vector<double>& knots, int degree) {
  const auto m = static_cast<int>(knots.size());
  const int count = m - degree - 1;
  if (count < 1) throw Error("too few knots for the spline degree");
  x = std::clamp(x, knots[static_cast<std::size_t>(degree)],
                 knots[static_cast<std::size_t>(count)]);

  // Degree-0 indicators on half-open spans; the right end belongs to the
  // last nonempty span.
  Vector b = Vector::Zero(m - 1);
  int span = degree;
  while (span < count - 1 && x >= knots[static_cast<std::size_t>(span + 1)]) ++span;
  b(span) = 1.0;

  for (int p = 1; p <= degree; ++p) {
    Vector next = Vector::Zero(m - 1 - p);
    for (int i = 0; i < m - 1 - p; ++i) {
      const double t0 = knots[static_cast<std::size_t>(i)];
      const double t1 = knots[static_cast<std::size_t>(i + 1)];
      const double tp = knots[static_cast<std::size_t>(i + p)];
      const double tp1 = knots[static_cast<std::size_t>(i + p + 1)];
      double v = 0.0;
      if (tp > t0) v += (x - t0) / (tp - t0) * b(i);
      if (tp1 > t1) v += (tp1 - x) / (tp1 - t1) * b(i + 1);
      next(i) = v;
    }
    b = std::move(next);
  }
  return b;
}

DataGenerator::DataGenerator(SettingSpec spec, std::uint64_t moment_seed)
    : spec_(std::move(spec)) {
  if (spec_.d < 1) throw ConfigError("dimension must be at least 1");
  beta_ = spec_.beta.size() == 0 ? Vector::Ones(spec_.d) : spec_.beta;
  if (beta_.size() != spec_.d)
    throw ConfigError("beta length does not match dimension");

  if (spec_.setting == Setting::B) {
    constexpr int degree = 3;
    knots_.assign(degree + 1, spec_.knot_lo);
    const int interior = spec_.interior_knots;
    for (int k = 1; k <= interior; ++k)
      knots_.push_back(spec_.knot_lo +
                       (spec_.knot_hi - spec_.knot_lo) * k / (interior + 1));
    knots_.insert(knots_.end(), degree + 1, spec_.knot_hi);
    const auto basis = static_cast<Index>(knots_.size()) - degree - 1;
    Rng rng(derive_seed(spec_.seed, 0x5b11e));
    std::normal_distribution<double> normal;
    spline_coef_.resize(spec_.d, basis);
    for (Index j = 0; j < spec_.d; ++j)
      for (Index k = 0; k < basis; ++k) spline_coef_(j, k) = normal(rng);
  }

  if (spec_.setting == Setting::C) {
    Rng rng(derive_seed(moment_seed, 0xc0b1c));
    const Matrix x = sample_features(spec_.moment_draws, rng);
    double sum = 0.0;
    for (Index i = 0; i < x.rows(); ++i)
      sum += std::pow(std::fabs(mean_function(x.row(i).transpose())), 3);
    cubic_moment_ = sum / static_cast<double>(x.rows());
    if (!(cubic_moment_ > 0.0)) cubic_moment_ = 1.0;
  }
}

double DataGenerator::mean_function(const Vector& x) const {
  if (spec_.setting != Setting::B) return beta_.dot(x);
  double f = 0.0;
  for (Index j = 0; j < x.size(); ++j)
    f += spline_coef_.row(j).dot(bspline_basis(x(j), knots_, 3));
  return f;
}

Matrix DataGenerator::sample_features(Index n, Rng& rng) const {
  const Index d = spec_.d;
  Matrix x(n, d);
  std::normal_distribution<double> normal;
  if (spec_.setting != Setting::C) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < d; ++j) x(i, j) = normal(rng);
    return x;
  }
  std::uniform_int_distribution<int> component(0, 2);
  std::bernoulli_distribution coin(0.5);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) {
      switch (component(rng)) {
        case 0: x(i, j) = normal(rng); break;
        case 1: x(i, j) = sample_skew_normal(rng, spec_.skew_shape); break;
        default: x(i, j) = coin(rng) ? 1.0 : 0.0; break;
      }
    }
    for (Index j = 1; j < d; ++j) {
      const Index first = std::max<Index>(0, j - spec_.lags);
      x(i, j) = x.row(i).segment(first, j - first + 1).mean();
    }
  }
  return x;
}

double DataGenerator::noise(double f, Rng& rng) const {
  switch (spec_.setting) {
    case Setting::A: {
      std::normal_distribution<double> normal;
      return normal(rng);
    }
    case Setting::B:
      return sample_t2(rng);
    case Setting::C:
      return sample_t2(rng) *
             (1.0 + 2.0 * std::pow(std::fabs(f), 3) / cubic_moment_);
  }
  return 0.0;
}

LabeledDataset DataGenerator::generate(Index n, std::uint64_t seed) const {
  if (n < 1) throw Error("sample size must be positive");
  Rng rng(seed);
  LabeledDataset data{sample_features(n, rng), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    const double f = mean_function(data.features.row(i).transpose());
    data.labels(i) = f + noise(f, rng);
  }
  return data;
}

LabeledDataset generate(const SettingSpec& spec, Index n, std::uint64_t seed) {
  return DataGenerator(spec, seed).generate(n, seed);
}

OutlierLaw draw_outlier_law(const ContaminationSpec& spec, Index d,
                            std::uint64_t seed) {
  if (!(spec.mu_lo <= spec.mu_hi) || !(spec.sigma_lo <= spec.sigma_hi) ||
      spec.sigma_lo < 0.0)
    throw ConfigError("invalid outlier parameter ranges");
  Rng rng(seed);
  OutlierLaw law{Vector(d), Vector(d), spec.fixed_value};
  std::uniform_real_distribution<double> mu(spec.mu_lo, spec.mu_hi);
  std::uniform_real_distribution<double> sigma(spec.sigma_lo, spec.sigma_hi);
  for (Index j = 0; j < d; ++j) {
    law.mu(j) = mu(rng);
    law.sigma(j) = sigma(rng);
  }
  return law;
}

TestCase contaminate(const Vector& x_clean, const ContaminationSpec& spec,
                     const OutlierLaw& law, std::uint64_t seed) {
  if (!(spec.epsilon >= 0.0 && spec.epsilon <= 1.0))
    throw ConfigError("epsilon must lie in [0, 1]");
  const Index d = x_clean.size();
  if (law.mu.size() != d) throw Error("outlier law dimension mismatch");
  Rng rng(seed);
  std::bernoulli_distribution pick(spec.epsilon);
  std::normal_distribution<double> normal;
  Vector observed = x_clean;
  std::vector<Index> cells;
  for (Index j = 0; j < d; ++j) {
    if (!pick(rng)) continue;
    cells.push_back(j);
    observed(j) = law.fixed_value ? *law.fixed_value
                                  : law.mu(j) + law.sigma(j) * normal(rng);
  }
  return TestCase{x_clean, std::move(observed), CellMask(d, std::move(cells)),
                  std::nullopt};
}

TestCase contaminate(const Vector& x_clean, const ContaminationSpec& spec,
                     std::uint64_t seed) {
  const OutlierLaw law =
      draw_outlier_law(spec, x_clean.size(), derive_seed(seed, 0x1a3));
  return contaminate(x_clean, spec, law, derive_seed(seed, 0xce11));
}

double adversarial_value(double M, const LinearModel& model) {
  if (model.beta.size() != 2) throw Error("adversarial case needs d = 2");
  const double b1 = model.beta(0);
  const double b2 = model.beta(1);
  if (b2 == 0.0) throw Error("adversarial case needs a nonzero second coefficient");
  const double base = b1 >= 1.0 ? M + 1.0 : M - b1 + 2.0;
  return (base - model.intercept) / b2;
}

TestCase adversarial_case(double M, const LinearModel& model,
                          std::uint64_t seed) {
  const double value = adversarial_value(M, model);
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector clean(2);
  clean << unif(rng), unif(rng);
  Vector observed = clean;
  observed(1) = value;
  return TestCase{clean, observed, CellMask(2, {1}), clean.sum()};
}

}  // namespace dicp
