#include "scrn/verify/suites.hpp"

#include "scrn/algorithms.hpp"
#include "scrn/cubic_subproblem.hpp"
#include "scrn/errors.hpp"
#include "scrn/linalg.hpp"
#include "scrn/oracles.hpp"
#include "scrn/problems.hpp"
#include "scrn/rng.hpp"
#include "scrn/schedules.hpp"
#include "scrn/verify/reference.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace scrn::verify {

namespace {

CheckResult timed(std::string name, const std::function<bool(std::ostringstream&)>& body) {
  CheckResult r;
  r.name = std::move(name);
  std::ostringstream detail;
  detail.precision(6);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.passed = body(detail);
  } catch (const std::exception& e) {
    r.passed = false;
    detail << "exception: " << e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.detail = detail.str();
  return r;
}

double log_uniform(RngStream& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
}

Vector normal_vector(Eigen::Index n, RngStream& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

bool SuiteReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

CheckResult check_cubed_norm_bounds(int trials, std::uint64_t seed) {
  return timed("cubed_norm_bounds", [&](std::ostringstream& out) {
    RngStream rng(seed, StreamId::test, 1);
    int violations = 0;
    int mismatches = 0;
    long double worst_slack = std::numeric_limits<long double>::infinity();
    for (int t = 0; t < trials; ++t) {
      Matrix u(3, 3), v(3, 3);
      for (Eigen::Index j = 0; j < 3; ++j) {
        for (Eigen::Index i = 0; i < 3; ++i) {
          u(i, j) = 2.0 * rng.uniform() - 1.0;
          v(i, j) = 2.0 * rng.uniform() - 1.0;
        }
      }
      const double c = log_uniform(rng, 1e-3, 1e3);
      const CubedNormReference ref = cubed_norm_reference(u, v, c);
      const long double slack = std::min(ref.rhs1 - ref.lhs, ref.rhs2 - ref.lhs);
      worst_slack = std::min(worst_slack, slack);
      if (slack < -1e-12L) ++violations;

      const CubedNormBounds lib = cubed_norm_expansion_bounds(u, v, c);
      auto close = [](double a, long double b) {
        return std::fabs(static_cast<long double>(a) - b) <= 1e-12L * (1.0L + std::fabs(b));
      };
      if (!close(lib.lhs, ref.lhs) || !close(lib.rhs1, ref.rhs1) || !close(lib.rhs2, ref.rhs2)) {
        ++mismatches;
      }
    }
    out << trials << " triples, violations=" << violations << ", library mismatches=" << mismatches
        << ", min slack=" << static_cast<double>(worst_slack);
    return violations == 0 && mismatches == 0;
  });
}

CheckResult check_subproblem_exactness(int models, int hard_cases, std::uint64_t seed) {
  return timed("subproblem_exactness", [&](std::ostringstream& out) {
    RngStream rng(seed, StreamId::test, 2);
    int bad_residual = 0, bad_curvature = 0, bad_value = 0, hard_seen = 0;
    double worst_value_gap = 0.0;
    for (int t = 0; t < models; ++t) {
      CubicModel model;
      const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.uniform() * 20.0);
      if (t < hard_cases) {
        model = random_hard_case_model(std::max<Eigen::Index>(n, 2), rng);
      } else {
        const double spread = log_uniform(rng, 1e-2, 1e2);
        model.M = SymMatrix::symmetrized(random_symmetric(n, -spread, spread, rng));
        model.g = log_uniform(rng, 1e-4, 1e2) * normal_vector(n, rng);
        model.eta = log_uniform(rng, 1e-2, 1e2);
      }
      const CubicSolution sol = solve_exact(model);
      if (sol.kind == SolverKind::exact_hard_case) ++hard_seen;
      const double gnorm = model.g.norm();
      const double mnorm = spectral_norm(model.M);
      if (!(sol.stationarity_residual <= 1e-9 * (1.0 + gnorm))) ++bad_residual;
      const double margin = jacobi_min_eigenvalue(model.M.dense()) + sol.radius / (2.0 * model.eta);
      if (!(margin >= -1e-9 * (1.0 + mnorm))) ++bad_curvature;
      const long double opt = cubic_model_optimum(model);
      const double gap = std::fabs(model_value(model, sol.step) - static_cast<double>(opt));
      worst_value_gap = std::max(worst_value_gap, gap / (1.0 + std::fabs(static_cast<double>(opt))));
      if (!(gap <= 1e-6 * (1.0 + std::fabs(static_cast<double>(opt))))) ++bad_value;
    }
    out << models << " models (" << hard_seen << " solved via hard-case branch), residual failures="
        << bad_residual << ", curvature failures=" << bad_curvature << ", value failures=" << bad_value
        << ", worst relative value gap=" << worst_value_gap;
    return bad_residual == 0 && bad_curvature == 0 && bad_value == 0 && hard_seen >= hard_cases;
  });
}

CheckResult check_lanczos_equivalence(int models, int n, std::uint64_t seed) {
  return timed("lanczos_equivalence", [&](std::ostringstream& out) {
    RngStream rng(seed, StreamId::test, 3);
    int bad_full = 0, bad_short = 0;
    double worst_rel = 0.0, worst_short = 0.0;
    for (int t = 0; t < models; ++t) {
      // Symmetric Gaussian matrix scaled to spectrum ≈ [−1, 1].
      Matrix g(n, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rng.normal();
      CubicModel model;
      model.M = SymMatrix::symmetrized(g / std::sqrt(2.0 * n));
      model.g = normal_vector(n, rng);
      model.eta = log_uniform(rng, 0.1, 1.0);

      const CubicSolution exact = solve_exact(model, 1e-12);
      const CubicSolution full = solve_lanczos(model, n, 1e-10);
      const double rel = (full.step - exact.step).norm() / std::max(exact.step.norm(), 1e-300);
      worst_rel = std::max(worst_rel, rel);
      if (!(rel <= 1e-6)) ++bad_full;

      const CubicSolution short_run = solve_lanczos(model, 30, 1e-6);
      worst_short = std::max(worst_short, short_run.stationarity_residual);
      if (!(short_run.stationarity_residual <= 1e-6)) ++bad_short;
    }
    out << models << " models n=" << n << ", full-dim step mismatches=" << bad_full
        << " (worst rel " << worst_rel << "), krylov_dim=30 residual failures=" << bad_short
        << " (worst " << worst_short << ")";
    return bad_full == 0 && bad_short == 0;
  });
}

CheckResult check_hard_case_2d() {
  return timed("hard_case_2d", [&](std::ostringstream& out) {
    // M = diag(−1, 1), g = (0, 1), η = 1: r_min = 2. The orthogonal part is
    // s₂ = −1/(1 + 1) = −1/2 and s₁ = ±√(4 − 1/4).
    CubicModel model;
    model.M = SymMatrix::diagonal((Vector(2) << -1.0, 1.0).finished());
    model.g = (Vector(2) << 0.0, 1.0).finished();
    model.eta = 1.0;
    const CubicSolution sol = solve_exact(model);
    const double s1 = std::sqrt(4.0 - 0.25);
    const bool ok = sol.kind == SolverKind::exact_hard_case &&
                    std::fabs(std::fabs(sol.step(0)) - s1) <= 1e-12 &&
                    std::fabs(sol.step(1) + 0.5) <= 1e-12 && std::fabs(sol.radius - 2.0) <= 1e-12;
    out << "step=(" << sol.step(0) << ", " << sol.step(1) << "), kind=" << to_string(sol.kind);
    return ok;
  });
}

CheckResult check_gradient_moment(std::size_t samples, std::uint64_t seed) {
  return timed("gradient_moment", [&](std::ostringstream& out) {
    const auto problem = synthetic_quartic(10, seed);
    const Vector x = problem->x_star() + Vector::Constant(10, 0.3);
    const Vector exact = problem->gradient(x);
    GradientOracleSpec spec;
    spec.kind = GradientOracleKind::gaussian_noise;
    const double delta = 0.1;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      RngStream stream(seed, StreamId::gradient, k);
      const double e = std::pow((sample_gradient(*problem, x, spec, delta, stream) - exact).norm(), 1.5);
      sum += e;
      sum_sq += e * e;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) / n);
    const double bound = std::pow(delta, 1.5);
    out << "mean |z|^1.5=" << mean << " (SE " << se << "), bound=" << bound;
    return mean <= bound + 3.0 * se;
  });
}

CheckResult check_hessian_unbiased(std::size_t samples, std::uint64_t seed) {
  return timed("hessian_unbiased", [&](std::ostringstream& out) {
    RngStream rng(seed, StreamId::test, 5);
    auto data = synthetic_classification(40, 5, seed);
    const auto problem = logistic_objective(std::move(data));
    const Vector x = normal_vector(5, rng);
    const Matrix h = problem->hessian(x).dense();
    HessianOracleSpec spec;
    spec.kind = HessianOracleKind::element_subsample;
    spec.keep_probability = 0.5;
    Matrix sum = Matrix::Zero(5, 5), sum_sq = Matrix::Zero(5, 5);
    std::size_t asymmetric = 0;
    for (std::size_t k = 0; k < samples; ++k) {
      RngStream stream(seed, StreamId::hessian, k);
      const Matrix s = sample_hessian(*problem, x, spec, stream).dense();
      if (!(s == s.transpose())) ++asymmetric;
      sum += s;
      sum_sq += s.cwiseProduct(s);
    }
    const double n = static_cast<double>(samples);
    int outside = 0;
    double worst_z = 0.0;
    for (Eigen::Index j = 0; j < 5; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        const double mean = sum(i, j) / n;
        const double var = std::max(0.0, (sum_sq(i, j) - n * mean * mean) / (n - 1.0));
        const double se = std::sqrt(var / n);
        const double z = se > 0.0 ? std::fabs(mean - h(i, j)) / se : (mean == h(i, j) ? 0.0 : INFINITY);
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ++outside;
      }
    }
    out << samples << " samples, entries outside 3 SE=" << outside << " (worst z " << worst_z
        << "), asymmetric samples=" << asymmetric;
    return outside == 0 && asymmetric == 0;
  });
}

CheckResult check_coupling_identity(std::uint64_t seed) {
  return timed("coupling_identity", [&](std::ostringstream& out) {
    auto data = synthetic_classification(30, 6, seed);
    const auto problem = logistic_objective(std::move(data));
    RngStream rng(seed, StreamId::test, 6);
    const Vector x = normal_vector(6, rng);
    int failures = 0;
    for (HessianOracleKind kind : {HessianOracleKind::exact, HessianOracleKind::element_subsample,
                                   HessianOracleKind::minibatch, HessianOracleKind::gaussian_noise}) {
      HessianOracleSpec spec;
      spec.kind = kind;
      spec.sigma = 0.3;
      for (std::uint64_t k = 0; k < 20; ++k) {
        RngStream stream(seed, StreamId::hessian, k);
        const auto [a, b] = paired_hessian_samples(*problem, x, x, spec, stream);
        if (!(a == b)) ++failures;
      }
    }
    out << "mismatched pairs=" << failures;
    return failures == 0;
  });
}

CheckResult check_hessian_noise_moment(std::size_t samples, std::uint64_t seed) {
  return timed("hessian_noise_moment", [&](std::ostringstream& out) {
    const auto problem = synthetic_quartic(8, seed);
    HessianOracleSpec spec;
    spec.kind = HessianOracleKind::gaussian_noise;
    spec.sigma = 0.5;
    const MomentEstimate m = hessian_error_moment(*problem, problem->x_star(), spec, samples, seed);
    const double bound = spec.sigma * spec.sigma * spec.sigma;
    out << "mean |E|_F^3=" << m.mean << " (SE " << m.std_error << "), bound=" << bound;
    return m.mean <= bound + 3.0 * m.std_error;
  });
}

CheckResult check_schedule_identities() {
  return timed("schedule_identities", [&](std::ostringstream& out) {
    int failures = 0;
    double worst = 0.0;
    for (std::uint64_t K : {1ULL, 10ULL, 1000ULL, 1000000ULL}) {
      const ScheduleParams pm = pm_schedule(K, 1.0, 1.0);
      const ScheduleParams rm = rm_schedule(K, 1.0, 1.0, 0.5);
      const double e_pm = std::fabs(pm.delta - 9.0 * pm.eta * pm.eta) / pm.delta;
      const double e_rm = std::fabs(rm.delta - 289.0 * rm.eta * rm.eta * rm.eta) / rm.delta;
      worst = std::max({worst, e_pm, e_rm});
      if (e_pm > 1e-15 || e_rm > 1e-15) ++failures;
    }

    // Validity thresholds against an independent evaluation.
    int flag_mismatches = 0;
    RngStream rng(11, StreamId::test, 10);
    for (int t = 0; t < 200; ++t) {
      const long double L = log_uniform(rng, 0.1, 100.0);
      const long double LF = log_uniform(rng, 0.01, 3.0);
      const long double LH = log_uniform(rng, 0.01, 3.0);
      const std::uint64_t K = 1 + static_cast<std::uint64_t>(log_uniform(rng, 1.0, 1e7));
      const long double kk = static_cast<long double>(K);
      const bool pm_ref = kk >= std::pow(2.0L * L / 9.0L, 3.5L) &&
                          kk >= std::pow(7.0L * LF / 3.0L, 3.5L) && kk >= 1.0L;
      const long double S = LF * LF * LF + LH * LH * LH;
      const bool rm_ref = kk >= std::pow(2.0L * L / 17.0L, 5.0L) &&
                          kk >= 7.0L * std::pow(S, 5.0L / 3.0L) && kk >= 1.0L;
      if (pm_schedule(K, static_cast<double>(L), static_cast<double>(LF)).valid != pm_ref) ++flag_mismatches;
      if (rm_schedule(K, static_cast<double>(L), static_cast<double>(LF), static_cast<double>(LH)).valid != rm_ref) {
        ++flag_mismatches;
      }
    }
    out << "identity failures=" << failures << " (worst rel " << worst
        << "), validity mismatches=" << flag_mismatches << "/400";
    return failures == 0 && flag_mismatches == 0;
  });
}

CheckResult check_schedule_examples() {
  return timed("schedule_examples", [&](std::ostringstream& out) {
    auto near = [](double a, double b) { return std::fabs(a - b) <= 1e-14 * std::fabs(b); };
    bool ok = true;
    const ScheduleParams pm = pm_schedule(128, 1.0, 1.0);
    ok &= near(pm.eta, 1.0 / 36.0) && near(pm.theta, 7.0 / 12.0) && near(pm.delta, 1.0 / 144.0);
    const ScheduleParams rm = rm_schedule(32, 1.0, 1.0, 0.0);
    ok &= near(rm.eta, 1.0 / 34.0) && near(rm.theta, 625.0 / 1156.0) && near(rm.delta, 1.0 / 136.0);
    const ScheduleParams one = pm_schedule(1, 4.5, 3.0 / 7.0);
    ok &= near(one.eta, 1.0 / 9.0) && near(one.delta, 1.0 / 9.0) && one.valid;
    ok &= !pm_schedule(1, 4.6, 3.0 / 7.0).valid && !pm_schedule(1, 4.5, 0.43).valid;

    ProblemConstants c;
    c.L = 1.0;
    c.L_F = 1.0;
    c.eps_g = 0.1;
    c.eps_H = 0.1;
    ok &= near(complexity_constants(c, ScheduleMethod::pm).M, 54.0);
    ok &= near(complexity_constants(c, ScheduleMethod::rm).M, 75.0);
    ok &= near(pm_potential_weight(1.0 / 36.0, 1.0), 7.0 / 216.0);

    // Generic constants against a direct evaluation.
    c = {3.0, -1.0, 0.7, 2.0, 1.3, 0.4, 0.05, 0.2};
    const long double Mpm = 54.0L * (4.0L + std::pow(0.7L, 3) / (1.3L * 1.3L) +
                                     std::pow(1.3L, 1.5L) * std::pow(0.7L, 3) + 1.0L);
    const long double Kpm = std::max({std::pow(std::pow(3.0L * Mpm, 2.0L / 3.0L) / 0.05L, 1.75L),
                                      std::pow(std::cbrt(108.0L * Mpm) / 0.2L, 7.0L),
                                      std::pow(4.0L / 9.0L, 3.5L), std::pow(7.0L * 1.3L / 3.0L, 3.5L),
                                      1.0L});
    const ComplexityConstants cpm = complexity_constants(c, ScheduleMethod::pm);
    ok &= near(cpm.M, static_cast<double>(Mpm)) && near(cpm.K_min_real, static_cast<double>(Kpm));
    const long double S = std::pow(1.3L, 3) + std::pow(0.4L, 3);
    const long double Mrm = 75.0L * (4.0L + std::pow(0.7L, 3) * std::pow(S, -2.0L / 3.0L) +
                                     S * std::pow(0.7L, 3) + 1.0L);
    const long double Krm = std::max({std::pow(std::pow(3.0L * Mrm, 2.0L / 3.0L) / 0.05L, 5.0L / 3.0L),
                                      std::pow(std::cbrt(281.0L * Mrm) / 0.2L, 5.0L),
                                      std::pow(4.0L / 17.0L, 5.0L), 7.0L * std::pow(S, 5.0L / 3.0L),
                                      1.0L});
    const ComplexityConstants crm = complexity_constants(c, ScheduleMethod::rm);
    ok &= near(crm.M, static_cast<double>(Mrm)) && near(crm.K_min_real, static_cast<double>(Krm));
    out << "pm(128): eta=" << pm.eta << " theta=" << pm.theta << " delta=" << pm.delta
        << "; rm(32): theta=" << rm.theta << "; M_pm=" << cpm.M << " K_min=" << cpm.K_min_real;
    return ok;
  });
}

CheckResult check_step_inequalities(int trials, std::uint64_t seed) {
  return timed("step_inequalities", [&](std::ostringstream& out) {
    RngStream rng(seed, StreamId::test, 8);
    int checked = 0, descent_viol = 0, mu_viol = 0, skipped = 0;
    for (int t = 0; t < trials; ++t) {
      const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform() * 6.0);
      QuarticOptions qo;
      qo.region_radius = 2.0;
      const auto problem = synthetic_quartic(n, seed + static_cast<std::uint64_t>(t), qo);
      const double L = problem->lipschitz_hints()->L;
      Vector dir = normal_vector(n, rng);
      const Vector x = problem->x_star() + 0.5 * rng.uniform() * dir / dir.norm();

      const Vector grad = problem->gradient(x);
      const SymMatrix hess = problem->hessian(x);
      const Vector eg = 0.1 * rng.uniform() * normal_vector(n, rng);
      const SymMatrix eh = SymMatrix::symmetrized(0.3 * rng.uniform() *
                                                  random_symmetric(n, -1.0, 1.0, rng));
      const double eta = (0.1 + 0.8 * rng.uniform()) / (2.0 * L);
      const CubicModel model{grad + eg, hess + eh, eta};
      const CubicSolution sol = solve_exact(model);
      const Vector xp = x + sol.step;
      if ((xp - problem->x_star()).norm() > qo.region_radius) {
        ++skipped;
        continue;
      }
      ++checked;
      const double s3 = std::pow(sol.radius, 3);
      const double h3 = std::pow(frobenius_norm(eh), 3);
      const double g32 = std::pow(eg.norm(), 1.5);
      const double f = problem->value(x);
      const double rhs = f - s3 / (9.0 * eta) + 24.0 * eta * eta * h3 + 3.0 * std::sqrt(eta) * g32;
      if (problem->value(xp) > rhs + 1e-10 * (1.0 + std::fabs(f))) ++descent_viol;
      const Stationarity st = stationarity_measure(*problem, xp, eta);
      const double mu_rhs = s3 / std::pow(eta, 1.5) + std::pow(eta, 1.5) * h3 + g32;
      if (st.mu > mu_rhs + 1e-10 * (1.0 + mu_rhs)) ++mu_viol;
    }
    out << checked << " steps checked (" << skipped << " left the Lipschitz region), descent violations="
        << descent_viol << ", stationarity violations=" << mu_viol;
    return descent_viol == 0 && mu_viol == 0 && checked > trials / 2;
  });
}

SuiteReport run_lemma_suite() {
  return {"lemmas", {check_cubed_norm_bounds(), check_step_inequalities()}};
}

SuiteReport run_oracle_suite() {
  return {"oracles", {check_gradient_moment(), check_hessian_unbiased(), check_coupling_identity(),
                      check_hessian_noise_moment()}};
}

SuiteReport run_subproblem_suite() {
  return {"subproblem", {check_hard_case_2d(), check_subproblem_exactness(), check_lanczos_equivalence()}};
}

SuiteReport run_schedule_suite() {
  return {"schedules", {check_schedule_identities(), check_schedule_examples()}};
}

std::vector<SuiteReport> run_suites(std::string_view which) {
  if (which == "lemmas") return {run_lemma_suite()};
  if (which == "oracles") return {run_oracle_suite()};
  if (which == "subproblem") return {run_subproblem_suite()};
  if (which == "schedules") return {run_schedule_suite()};
  if (which == "all") {
    return {run_lemma_suite(), run_oracle_suite(), run_subproblem_suite(), run_schedule_suite()};
  }
  throw InvalidInput("unknown check suite '" + std::string(which) + "'");
}

}  // namespace scrn::verify
