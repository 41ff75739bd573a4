#include "scrn/errors.hpp"
#include "scrn/problems.hpp"
#include "scrn/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace scrn;

GlmData dense_data(const Matrix& a, const Vector& b) {
  GlmData d;
  d.A = a.sparseView();
  d.b = b;
  return d;
}

GlmData random_data(std::size_t m, Eigen::Index n, std::uint64_t seed, bool binary) {
  RngStream rng(seed, StreamId::test, 0);
  Matrix a(static_cast<Eigen::Index>(m), n);
  Vector b(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
    b(i) = binary ? (rng.uniform() < 0.5 ? 0.0 : 1.0) : rng.normal();
  }
  return dense_data(a, b);
}

Vector random_point(Eigen::Index n, RngStream& rng, double scale = 1.0) {
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = scale * rng.normal();
  return x;
}

void expect_derivatives_consistent(const ProblemInstance& p, std::uint64_t seed) {
  RngStream rng(seed, StreamId::test, 1);
  for (int t = 0; t < 10; ++t) {
    const Vector x = random_point(p.dim(), rng, 0.5);
    const Vector g = p.gradient(x);
    const Vector fd = finite_difference_gradient(p, x);
    EXPECT_LE((g - fd).norm(), 1e-5 * std::max(1.0, g.norm())) << p.name();
    const Vector v = random_point(p.dim(), rng);
    const Vector hv = p.hessian(x) * v;
    const Vector fdv = finite_difference_hessian_vector(p, x, v);
    EXPECT_LE((hv - fdv).norm(), 1e-4 * std::max(1.0, hv.norm())) << p.name();
    const Matrix h = p.hessian(x).dense();
    EXPECT_EQ(h, h.transpose());
    EXPECT_GE(p.value(x), p.lower_bound());
  }
}

TEST(Logistic, SymmetricPointValue) {
  const GlmData d = random_data(20, 5, 1, true);
  const auto p = logistic_objective(d);
  EXPECT_NEAR(p->value(Vector::Zero(5)), 20.0 * std::log(2.0), 1e-12);
  LogisticOptions as_written;
  as_written.negate_data_term = false;
  EXPECT_NEAR(logistic_objective(d, as_written)->value(Vector::Zero(5)), 20.0 * std::log(0.5), 1e-12);
}

TEST(Logistic, GammaZeroDropsRegularizer) {
  const GlmData d = random_data(20, 5, 2, true);
  LogisticOptions no_reg{0.5, 0.0, true};
  LogisticOptions zero_lambda{0.0, 10.0, true};
  const Vector x = Vector::LinSpaced(5, -1.0, 1.0);
  EXPECT_NEAR(logistic_objective(d, no_reg)->value(x), logistic_objective(d, zero_lambda)->value(x), 1e-12);
  EXPECT_LE((logistic_objective(d, no_reg)->gradient(x) - logistic_objective(d, zero_lambda)->gradient(x)).norm(),
            1e-12);
}

TEST(Logistic, DerivativesMatchFiniteDifferences) {
  expect_derivatives_consistent(*logistic_objective(random_data(20, 5, 3, true)), 3);
  LogisticOptions as_written;
  as_written.negate_data_term = false;
  const auto p = logistic_objective(random_data(20, 5, 3, true), as_written);
  EXPECT_TRUE(std::isinf(p->lower_bound()));
}

TEST(Logistic, RejectsNonBinaryLabels) {
  EXPECT_THROW(logistic_objective(random_data(10, 3, 4, false)), InvalidInput);
}

TEST(Nls, PlantedFitLeavesOnlyRegularizer) {
  GlmData d = random_data(30, 4, 5, false);
  const Vector x0 = Vector::LinSpaced(4, -0.5, 0.5);
  const Vector z = d.A * x0;
  for (Eigen::Index i = 0; i < z.size(); ++i) d.b(i) = 1.0 / (1.0 + std::exp(-z(i)));
  const double lambda = 0.01, gamma = 2.0;
  double reg = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double y = gamma * x0(j);
    reg += lambda * y * y / (1.0 + y * y);
  }
  EXPECT_NEAR(nls_objective(d, lambda, gamma)->value(x0), reg, 1e-14);
}

TEST(Nls, SingleSampleAtHalf) {
  Matrix a(1, 2);
  a << 1.0, 0.0;
  Vector b(1);
  b << 0.5;
  EXPECT_EQ(nls_objective(dense_data(a, b), 0.0, 1.0)->value(Vector::Zero(2)), 0.0);
}

TEST(Nls, DerivativesMatchFiniteDifferences) {
  GlmData d = random_data(25, 6, 6, true);
  expect_derivatives_consistent(*nls_objective(d), 6);
}

TEST(Robust, ZeroResidualIsGlobalMinimum) {
  GlmData d = random_data(15, 3, 7, false);
  const Vector x = Vector::LinSpaced(3, 0.2, 0.8);
  d.b = d.A * x;
  const auto p = robust_regression_objective(d);
  EXPECT_NEAR(p->value(x), 0.0, 1e-15);
  EXPECT_EQ(p->lower_bound(), 0.0);
}

TEST(Robust, InflectionAtSqrtTwo) {
  Matrix a(1, 1);
  a << 1.0;
  Vector b(1);
  b << 0.0;
  const auto p = robust_regression_objective(dense_data(a, b));
  Vector x(1);
  x << std::sqrt(2.0);
  EXPECT_NEAR(p->hessian(x)(0, 0), 0.0, 1e-15);
  x << 2.0;
  EXPECT_LT(p->hessian(x)(0, 0), 0.0);
}

TEST(Robust, DerivativesMatchFiniteDifferences) {
  expect_derivatives_consistent(*robust_regression_objective(random_data(25, 6, 8, false)), 8);
  expect_derivatives_consistent(
      *robust_regression_objective(random_data(25, 6, 9, false), NonconvexRegularizer{0.001, 1.0}), 9);
}

TEST(Quartic, PlantedMinimizer) {
  QuarticOptions o;
  o.q_min = 0.1;
  const auto p = synthetic_quartic(6, 10, o);
  EXPECT_EQ(p->value(p->x_star()), 0.0);
  EXPECT_EQ(p->gradient(p->x_star()).norm(), 0.0);
  EXPECT_NEAR(min_eigenvalue(p->hessian(p->x_star())), min_eigenvalue(p->q()), 1e-12);
  EXPECT_GE(min_eigenvalue(p->q()), 0.1 - 1e-12);
}

TEST(Quartic, ZeroQUnitOffset) {
  const Eigen::Index n = 4;
  Vector xs = Vector::Zero(n);
  SyntheticQuartic p(xs, SymMatrix(n), 2.0);
  Vector x = Vector::Zero(n);
  x(0) = 1.0;
  EXPECT_DOUBLE_EQ(p.value(x), 0.25);
  EXPECT_EQ(p.gradient(x), x);
  Vector diag = Vector::Ones(n);
  diag(0) = 3.0;
  EXPECT_EQ(p.hessian(x).dense(), Matrix(diag.asDiagonal()));
  EXPECT_LE((finite_difference_hessian_vector(p, x, Vector::Unit(n, 0)) - 3.0 * Vector::Unit(n, 0)).norm(), 1e-6);
}

TEST(Quartic, NonnegativeEverywhere) {
  const auto p = synthetic_quartic(5, 11);
  RngStream rng(11, StreamId::test, 0);
  for (int i = 0; i < 100; ++i) EXPECT_GE(p->value(random_point(5, rng, 3.0)), 0.0);
  expect_derivatives_consistent(*p, 11);
}

TEST(Quartic, LipschitzHintsHoldInRegion) {
  QuarticOptions o;
  o.region_radius = 1.0;
  const auto p = synthetic_quartic(5, 12, o);
  const auto hints = p->lipschitz_hints();
  ASSERT_TRUE(hints);
  RngStream rng(12, StreamId::test, 0);
  for (int t = 0; t < 200; ++t) {
    Vector u = random_point(5, rng), v = random_point(5, rng);
    u *= rng.uniform() / u.norm();
    v *= rng.uniform() / v.norm();
    const Vector x = p->x_star() + u, y = p->x_star() + v;
    const SymMatrix d = p->hessian(y) - p->hessian(x);
    EXPECT_LE(spectral_norm(d), hints->L * (y - x).norm() + 1e-12);
    EXPECT_LE(frobenius_norm(d), hints->L_F * (y - x).norm() + 1e-12);
  }
}

TEST(Regularizer, Bounded) {
  NonconvexRegularizer r{0.3, 5.0};
  RngStream rng(13, StreamId::test, 0);
  for (int t = 0; t < 100; ++t) {
    const double v = r.value(random_point(7, rng, 10.0));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 0.3 * 7);
  }
}

TEST(SubsetOracles, FullIndexSetIsExact) {
  const auto p = logistic_objective(random_data(12, 4, 14, true));
  std::vector<std::size_t> all(12);
  for (std::size_t i = 0; i < 12; ++i) all[i] = i;
  const Vector x = Vector::Constant(4, 0.2);
  EXPECT_LE((p->gradient_subset(x, all) - p->gradient(x)).norm(), 1e-12);
  EXPECT_LE(frobenius_norm(p->hessian_subset(x, all) - p->hessian(x)), 1e-12);
  EXPECT_THROW(synthetic_quartic(3, 1)->gradient_subset(Vector::Zero(3), all), InvalidInput);
}

}  // namespace
