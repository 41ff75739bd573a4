#include "scrn/algorithms.hpp"
#include "scrn/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace scrn;

// ½ xᵀA x − bᵀx with A ≻ 0.
class Quadratic final : public ProblemInstance {
 public:
  Quadratic(SymMatrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {}
  const std::string& name() const override { return name_; }
  Eigen::Index dim() const override { return b_.size(); }
  double value(const Vector& x) const override { return 0.5 * x.dot(a_ * x) - b_.dot(x); }
  Vector gradient(const Vector& x) const override { return a_ * x - b_; }
  SymMatrix hessian(const Vector&) const override { return a_; }
  double lower_bound() const override { return -1e300; }
  std::optional<LipschitzHints> lipschitz_hints() const override { return LipschitzHints{0.0, 0.0}; }

 private:
  std::string name_ = "quadratic";
  SymMatrix a_;
  Vector b_;
};

Quadratic make_quadratic() {
  Vector d(4);
  d << 1.0, 2.0, 3.0, 4.0;
  Vector b(4);
  b << 1.0, -1.0, 0.5, 2.0;
  return Quadratic(SymMatrix::diagonal(d), b);
}

ProblemPtr desk_logistic(std::size_t m = 200, Eigen::Index n = 20) {
  return logistic_objective(synthetic_classification(m, n, 1));
}

TEST(Stationarity, ExactSosp) { EXPECT_EQ(stationarity_measure_value(0.0, 0.5, 1.0), 0.0); }
TEST(Stationarity, GradientBranch) { EXPECT_DOUBLE_EQ(stationarity_measure_value(1.0, 0.0, 7.0), 1.0 / 3.0); }
TEST(Stationarity, CurvatureBranch) { EXPECT_DOUBLE_EQ(stationarity_measure_value(0.0, -1.0, 1.0), 0.25); }

TEST(Stationarity, FromProblem) {
  const auto q = make_quadratic();
  const auto s = stationarity_measure(q, Vector::Zero(4), 1.0);
  EXPECT_NEAR(s.grad_norm, std::sqrt(1.0 + 1.0 + 0.25 + 4.0), 1e-14);
  EXPECT_NEAR(s.min_eig, 1.0, 1e-14);
}

TEST(Potential, ZeroErrorOrWeight) {
  const SymMatrix h = SymMatrix::identity(3);
  EXPECT_EQ(potential_value(2.5, h, h, 0.7), 2.5);
  EXPECT_EQ(potential_value(2.5, 2.0 * h, h, 0.0), 2.5);
  EXPECT_NEAR(potential_value(1.0, 2.0 * h, h, 0.5), 1.0 + 0.5 * std::pow(std::sqrt(3.0), 3), 1e-14);
}

TEST(Momentum, FirstEstimateIsFirstSample) {
  const auto p = desk_logistic(40, 5);
  OracleConfig oracles;
  oracles.hessian = {HessianOracleKind::element_subsample, 0.5, 0.5, 0.0, 3};
  const auto sched = fixed_schedule(10, 0.5, 0.2, 0.0);
  RunOptions opts;
  opts.seed = 9;
  for (auto kind : {MomentumKind::polyak, MomentumKind::recursive}) {
    SolverState s = initial_state(Vector::Constant(5, 0.5));
    s.M = 5.0 * SymMatrix::identity(5);  // ignored at k = 0
    const StepInfo info = kind == MomentumKind::polyak ? scrn_pm_step(s, *p, oracles, sched, opts)
                                                       : scrn_rm_step(s, *p, oracles, sched, opts);
    RngStream hs(mix64(9) ^ mix64(3 + 0x5bd1e995ULL), StreamId::hessian, 0);
    EXPECT_EQ(info.M, sample_hessian(*p, Vector::Constant(5, 0.5), oracles.hessian, hs));
  }
}

TEST(Momentum, RecursiveAtFixedPointBlends) {
  const auto p = desk_logistic(40, 5);
  const Vector x = Vector::Constant(5, 0.1);
  OracleConfig exact;
  const auto sched = fixed_schedule(10, 0.5, 0.3, 0.0);
  SolverState s = initial_state(x);
  s.k = 3;
  s.theta_prev = 0.3;
  s.M = 2.0 * SymMatrix::identity(5);
  const SymMatrix m_prev = s.M;
  const StepInfo info = scrn_rm_step(s, *p, exact, sched, RunOptions{});
  const SymMatrix expected = 0.7 * m_prev + 0.3 * p->hessian(x);
  EXPECT_LE(frobenius_norm(info.M - expected), 1e-13);
}

TEST(Collapse, PolyakWithThetaOneIsCrn) {
  const auto p = desk_logistic();
  const Vector x0 = Vector::Constant(20, 0.5);
  RunOptions opts;
  opts.store_iterates = true;
  const auto crn = crn_run(*p, x0, 0.5, 50, opts);
  const auto pm = scrn_run(*p, x0, MomentumKind::polyak, fixed_schedule(50, 0.5, 1.0, 0.0), {}, opts);
  ASSERT_EQ(crn.iterates.size(), pm.iterates.size());
  for (std::size_t k = 0; k < crn.iterates.size(); ++k) EXPECT_EQ(crn.iterates[k], pm.iterates[k]) << k;
}

TEST(Collapse, RecursiveWithExactOraclesIsCrn) {
  const auto p = desk_logistic();
  const Vector x0 = Vector::Constant(20, 0.5);
  RunOptions opts;
  opts.store_iterates = true;
  const auto crn = crn_run(*p, x0, 0.5, 50, opts);
  const auto rm = scrn_run(*p, x0, MomentumKind::recursive, fixed_schedule(50, 0.5, 0.2, 0.0), {}, opts);
  ASSERT_EQ(crn.iterates.size(), rm.iterates.size());
  for (std::size_t k = 0; k < crn.iterates.size(); ++k) {
    EXPECT_LE((crn.iterates[k] - rm.iterates[k]).norm(), 1e-12 * (1.0 + crn.iterates[k].norm())) << k;
  }
}

TEST(ScrnPm, QuarticConvergesWithExactOracles) {
  QuarticOptions o;
  o.q_min = 0.1;
  const auto p = synthetic_quartic(10, 3, o);
  const auto t = scrn_run(*p, Vector::Constant(10, 0.5), MomentumKind::polyak,
                          fixed_schedule(200, 0.01, 0.5, 0.0), {});
  EXPECT_LE(t.records.back().grad_norm, 1e-6);
  EXPECT_GE(t.records.back().min_eig, -1e-6);
}

TEST(Crn, MonotoneOnStronglyConvexQuadratic) {
  const auto q = make_quadratic();
  const auto t = crn_run(q, Vector::Constant(4, 3.0), 0.1, 60);
  // Nonincreasing up to the roundoff of evaluating f near the minimizer.
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    EXPECT_LE(t.records[k].f, t.records[k - 1].f + 1e-14 * std::abs(t.records[k - 1].f));
  }
}

TEST(Crn, StopsAtSecondOrderPoint) {
  QuarticOptions o;
  o.q_min = 0.1;
  const auto p = synthetic_quartic(4, 5, o);
  const auto t = crn_run(*p, p->x_star(), 0.5, 10);
  EXPECT_TRUE(t.converged);
  EXPECT_LT(t.records.size(), 11u);
}

TEST(Acrn, LogisticConvergence) {
  const auto p = desk_logistic(100, 10);
  const auto t = adaptive_crn_run(*p, Vector::Constant(10, 0.5), 100);
  EXPECT_LE(t.records.back().grad_norm, 1e-6);
}

TEST(SgdMomentum, GradientDescentOnQuadratic) {
  const auto q = make_quadratic();
  const auto t = sgd_momentum_run(q, Vector::Zero(4), 0.2, 0.0, {}, 500);
  EXPECT_LE(t.records.back().grad_norm, 1e-8);
}

TEST(SgdMomentum, ZeroStepKeepsX) {
  const auto q = make_quadratic();
  const Vector x0 = Vector::Constant(4, 0.3);
  RunOptions opts;
  opts.store_iterates = true;
  const auto t = sgd_momentum_run(q, x0, 0.0, 0.9, {}, 20, opts);
  for (const auto& x : t.iterates) EXPECT_EQ(x, x0);
}

TEST(SgdMomentum, SlowerThanCrnOnNls) {
  const auto p = nls_objective(synthetic_classification(200, 20, 2));
  const Vector x0 = Vector::Constant(20, 0.5);
  const auto crn = crn_run(*p, x0, 10.0, 100);
  const auto sgd = sgd_momentum_run(*p, x0, 1.0, 0.9, {}, 100);
  const double f_star = std::min(crn.records.back().f, sgd.records.back().f);
  EXPECT_LT(crn.records.back().f - f_star, sgd.records.back().f - f_star);
}

TEST(Certificates, QuarticExactOraclesNoViolations) {
  const auto p = synthetic_quartic(10, 4);
  const double L = p->lipschitz_hints()->L;
  RunOptions opts;
  opts.debug_certificates = true;
  const auto t = crn_run(*p, p->x_star() + Vector::Constant(10, 0.3), 0.9 / (2.0 * L), 200, opts);
  EXPECT_GT(t.certificates_checked, 0u);
  EXPECT_TRUE(t.violations.empty());
}

TEST(Trace, SampledIndexInRange) {
  const auto p = synthetic_quartic(5, 6);
  RunOptions opts;
  opts.seed = 17;
  const auto t = scrn_run(*p, Vector::Constant(5, 0.5), MomentumKind::polyak, pm_schedule(50, 1.0, 1.0), {}, opts);
  EXPECT_GE(t.sampled_index, 1u);
  EXPECT_LE(t.sampled_index, 50u);
  EXPECT_EQ(t.records.size(), 51u);
  EXPECT_TRUE(std::isnan(t.records.back().step_norm));
}

TEST(Determinism, IdenticalTraces) {
  const auto p = desk_logistic(60, 8);
  OracleConfig o;
  o.gradient = {GradientOracleKind::minibatch, 0.0, 0.5, 1};
  o.hessian = {HessianOracleKind::element_subsample, 0.5, 0.5, 0.0, 2};
  RunOptions opts;
  opts.seed = 5;
  const auto sched = fixed_schedule(40, 0.5, 0.3, 0.0);
  const auto a = scrn_run(*p, Vector::Constant(8, 0.5), MomentumKind::recursive, sched, o, opts);
  const auto b = scrn_run(*p, Vector::Constant(8, 0.5), MomentumKind::recursive, sched, o, opts);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].f, b.records[k].f);
    const double ha = a.records[k].hessian_err_frob, hb = b.records[k].hessian_err_frob;
    EXPECT_TRUE(ha == hb || (std::isnan(ha) && std::isnan(hb)));
  }
  EXPECT_EQ(a.sampled_index, b.sampled_index);
}

TEST(Ssosp, ExactSospPasses) {
  const auto p = synthetic_quartic(4, 7);
  const std::vector<Vector> its(5, p->x_star());
  EXPECT_TRUE(ssosp_check(*p, its, 1e-8, 1e-8).pass());
}

TEST(Ssosp, BoundaryEquality) {
  const auto q = make_quadratic();
  const Vector x = Vector::Zero(4);
  const double gn = q.gradient(x).norm();
  EXPECT_TRUE(ssosp_check(q, {x, x, x}, gn, 0.1).pass());
  EXPECT_FALSE(ssosp_check(q, {x, x, x}, 0.99 * gn, 0.1).pass());
}

TEST(Ssosp, NoisyPmOnQuartic) {
  QuarticOptions o;
  o.q_min = 0.5;
  o.q_max = 2.0;
  const auto p = synthetic_quartic(10, 7, o);
  OracleConfig oracles;
  oracles.gradient.kind = GradientOracleKind::gaussian_noise;
  oracles.hessian = {HessianOracleKind::gaussian_noise, 0.5, 0.5, 0.1, 0};
  const auto sched = pm_schedule(200, 12.0, 1.0);
  std::vector<Vector> sampled;
  for (std::uint64_t s = 1; s <= 30; ++s) {
    RunOptions opts;
    opts.seed = s;
    sampled.push_back(scrn_run(*p, Vector::Constant(10, 0.5), MomentumKind::polyak, sched, oracles, opts)
                          .sampled_iterate);
  }
  EXPECT_TRUE(ssosp_check(*p, sampled, 1e-2, 1e-1).pass());
}

TEST(Runs, RejectBadStart) {
  const auto q = make_quadratic();
  EXPECT_THROW(crn_run(q, Vector::Zero(3), 0.1, 5), InvalidInput);
  EXPECT_THROW(crn_run(q, Vector::Zero(4), 0.1, 0), InvalidInput);
}

}  // namespace
