#include "scrn/cubic_subproblem.hpp"
#include "scrn/rng.hpp"
#include "scrn/verify/reference.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace scrn;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

CubicModel random_model(Eigen::Index n, RngStream& rng, double lo, double hi) {
  CubicModel m;
  m.M = SymMatrix::symmetrized(verify::random_symmetric(n, lo, hi, rng));
  m.g = Vector(n);
  for (Eigen::Index i = 0; i < n; ++i) m.g(i) = rng.normal();
  m.eta = 0.1 + rng.uniform();
  return m;
}

TEST(ModelValue, ZeroStep) {
  CubicModel m{vec({1.0, 2.0}), SymMatrix::identity(2), 0.3};
  EXPECT_EQ(model_value(m, Vector::Zero(2)), 0.0);
}

TEST(ModelValue, HandArithmetic) {
  CubicModel m{vec({1.0, 0.0}), SymMatrix(2), 0.5};
  EXPECT_NEAR(model_value(m, vec({-1.0, 0.0})), -2.0 / 3.0, 1e-15);
}

TEST(ModelValue, MatchesScalarRecomputation) {
  RngStream rng(21, StreamId::test, 0);
  const CubicModel m = random_model(6, rng, -1.0, 1.0);
  Vector s(6);
  for (int i = 0; i < 6; ++i) s(i) = rng.normal();
  double lin = 0.0, quad = 0.0, nrm = 0.0;
  for (int i = 0; i < 6; ++i) {
    lin += m.g(i) * s(i);
    nrm += s(i) * s(i);
    for (int j = 0; j < 6; ++j) quad += s(i) * m.M(i, j) * s(j);
  }
  const double ref = lin + 0.5 * quad + std::pow(std::sqrt(nrm), 3) / (6.0 * m.eta);
  EXPECT_NEAR(model_value(m, s), ref, 1e-12 * (1.0 + std::abs(ref)));
}

TEST(SolveExact, ZeroGradientPsd) {
  CubicModel m{Vector::Zero(3), SymMatrix::identity(3), 1.0};
  const auto sol = solve_exact(m);
  EXPECT_EQ(sol.radius, 0.0);
  EXPECT_EQ(sol.step.norm(), 0.0);
}

TEST(SolveExact, ZeroCurvatureClosedForm) {
  CubicModel m{vec({1.0, 0.0}), SymMatrix(2), 0.5};
  const auto sol = solve_exact(m);
  EXPECT_NEAR(sol.radius, 1.0, 1e-10);
  EXPECT_NEAR(sol.step(0), -1.0, 1e-10);
  EXPECT_NEAR(sol.step(1), 0.0, 1e-12);
}

TEST(SolveExact, HardCaseTwoByTwo) {
  CubicModel m{vec({0.0, 1.0}), SymMatrix::diagonal(vec({-1.0, 1.0})), 1.0};
  const auto sol = solve_exact(m);
  EXPECT_EQ(sol.kind, SolverKind::exact_hard_case);
  EXPECT_NEAR(sol.radius, 2.0, 1e-9);
  EXPECT_NEAR(sol.step.norm(), 2.0, 1e-9);
  EXPECT_NEAR(std::abs(sol.step(0)), std::sqrt(4.0 - 0.25), 1e-8);
  EXPECT_NEAR(sol.step(1), -0.5, 1e-9);
}

TEST(SolveExact, IndefiniteMatchesDualOracle) {
  RngStream rng(22, StreamId::test, 0);
  for (int t = 0; t < 50; ++t) {
    const CubicModel m = random_model(5, rng, -2.0, 1.0);
    const auto sol = solve_exact(m);
    const double ref = static_cast<double>(verify::cubic_model_optimum(m));
    EXPECT_NEAR(model_value(m, sol.step), ref, 1e-6 * (1.0 + std::abs(ref)));
    EXPECT_LE(sol.stationarity_residual, 1e-9 * (1.0 + m.g.norm()));
    EXPECT_GE(sol.curvature_margin, -1e-9 * (1.0 + spectral_norm(m.M)));
    EXPECT_NEAR(sol.radius, sol.step.norm(), 1e-12 * (1.0 + sol.radius));
    EXPECT_LE(model_value(m, sol.step), 0.0);
  }
}

TEST(SolveExact, NoBetterPointFoundByDescent) {
  RngStream rng(23, StreamId::test, 0);
  const CubicModel m = random_model(5, rng, -1.0, 2.0);
  const auto sol = solve_exact(m);
  EXPECT_LE(model_value(m, sol.step), verify::cubic_model_multistart(m, 10, 5) + 1e-9);
}

TEST(SolveExact, RejectsMalformed) {
  CubicModel m{vec({1.0, 0.0}), SymMatrix(3), 1.0};
  EXPECT_THROW(solve_exact(m), InvalidInput);
  CubicModel bad_eta{vec({1.0}), SymMatrix(1), 0.0};
  EXPECT_THROW(solve_exact(bad_eta), InvalidInput);
  CubicModel nan_g{vec({std::nan("")}), SymMatrix(1), 1.0};
  EXPECT_THROW(solve_exact(nan_g), InvalidInput);
}

TEST(SolveLanczos, FullSubspaceMatchesExact) {
  RngStream rng(24, StreamId::test, 0);
  for (int t = 0; t < 10; ++t) {
    const CubicModel m = random_model(12, rng, -1.0, 1.0);
    const auto ex = solve_exact(m);
    const auto lz = solve_lanczos(m, 12, 1e-10);
    EXPECT_LE((lz.step - ex.step).norm(), 1e-8 * (1.0 + ex.step.norm()));
  }
}

TEST(SolveLanczos, ZeroGradientPsd) {
  CubicModel m{Vector::Zero(4), SymMatrix::identity(4), 1.0};
  EXPECT_EQ(solve_lanczos(m, 4).step.norm(), 0.0);
}

TEST(SolveLanczos, ZeroGradientIndefiniteMovesAlongNegativeCurvature) {
  CubicModel m{Vector::Zero(3), SymMatrix::diagonal(vec({1.0, -2.0, 3.0})), 0.5};
  const auto sol = solve_lanczos(m, 3, 1e-8);
  EXPECT_NEAR(sol.radius, 2.0, 1e-6);
  EXPECT_NEAR(std::abs(sol.step(1)), 2.0, 1e-6);
}

TEST(SolveLanczos, LargeModelBeatsCauchyPoint) {
  RngStream rng(25, StreamId::test, 0);
  const Eigen::Index n = 200;
  Matrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = rng.normal();
  CubicModel m;
  m.M = SymMatrix::symmetrized(a / std::sqrt(2.0 * n));
  m.g = Vector(n);
  for (Eigen::Index i = 0; i < n; ++i) m.g(i) = rng.normal();
  m.eta = 0.5;
  const auto sol = solve_lanczos(m, 30, 1e-6);
  EXPECT_LE(sol.stationarity_residual, 1e-6);

  // Cauchy point: minimize the model along −g (a cubic in the step length).
  const Vector d = -m.g / m.g.norm();
  const double a1 = m.g.dot(d), a2 = d.dot(m.M * d);
  // d/dt: a1 + a2 t + t²/(2η) = 0
  const double disc = a2 * a2 - 4.0 * a1 / (2.0 * m.eta);
  const double t = (-a2 + std::sqrt(disc)) * m.eta;
  EXPECT_LE(model_value(m, sol.step), model_value(m, t * d) + 1e-12);
}

TEST(SolveSubproblem, FallsBackToExact) {
  CubicModel m{vec({0.0, 1.0}), SymMatrix::diagonal(vec({-1.0, 1.0})), 1.0};
  SubproblemOptions opts;
  opts.solver = SubproblemSolver::lanczos;
  opts.krylov_dim = 2;
  const auto sol = solve_subproblem(m, opts);
  EXPECT_NEAR(sol.radius, 2.0, 1e-8);
  EXPECT_LE(sol.stationarity_residual, 1e-6);
}

}  // namespace
