#include "scrn/algorithms.hpp"

#include "scrn/errors.hpp"
#include "scrn/rng.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace scrn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDivergenceLimit = 1e12;
constexpr Eigen::Index kCertifyEveryStepDim = 100;

struct PointEval {
  double f = 0.0;
  Vector grad;
  SymMatrix hess;
  double min_eig = 0.0;
};

struct StepOutcome {
  Vector x_next;
  std::optional<SymMatrix> M;
  Vector g;
  double kkt = kNaN;
  double eta = kNaN;
  bool certify = false;
  bool converged = false;
};

struct PendingCertificate {
  std::uint64_t k = 0;
  double f = 0.0;
  double step = 0.0;
  double hess_err = 0.0;
  double grad_err = 0.0;
  double eta = 0.0;
};

using StepFn = std::function<StepOutcome(std::uint64_t, const Vector&, const PointEval&)>;

std::uint64_t stream_seed(std::uint64_t run_seed, std::uint64_t oracle_seed) {
  return mix64(run_seed) ^ mix64(oracle_seed + 0x5bd1e995ULL);
}

void check_start(const ProblemInstance& problem, const Vector& x0, std::uint64_t K) {
  if (x0.size() != problem.dim()) throw InvalidInput("run: x0 has the wrong dimension");
  if (!x0.allFinite()) throw InvalidInput("run: x0 must be finite");
  if (K < 1) throw InvalidInput("run: K must be >= 1");
}

double cube(double v) { return v * v * v; }

void check_certificates(const PendingCertificate& c, const PointEval& next, RunTrace& trace) {
  const double eta = c.eta;
  const double s3 = cube(c.step);
  const double eh3 = cube(c.hess_err);
  const double eg32 = std::pow(c.grad_err, 1.5);

  const double descent_rhs =
      c.f - s3 / (9.0 * eta) + 24.0 * eta * eta * eh3 + 3.0 * std::sqrt(eta) * eg32;
  if (next.f > descent_rhs + 1e-10 * (1.0 + std::abs(c.f))) {
    trace.violations.push_back({c.k, "descent", next.f, descent_rhs});
  }

  const double mu = stationarity_measure_value(next.grad.norm(), next.min_eig, eta);
  const double mu_rhs = s3 / std::pow(eta, 1.5) + std::pow(eta, 1.5) * eh3 + eg32;
  if (mu > mu_rhs + 1e-10 * (1.0 + mu_rhs)) {
    trace.violations.push_back({c.k, "stationarity", mu, mu_rhs});
  }
  ++trace.certificates_checked;
}

// Shared outer loop. Evaluates exact diagnostics at every iterate, calls
// `step` for k = 0..K−1, and assembles the trace.
RunTrace run_loop(const ProblemInstance& problem, const Vector& x0, std::uint64_t K,
                  const RunOptions& opts, std::string name, double potential_weight,
                  const StepFn& step) {
  check_start(problem, x0, K);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  RunTrace trace;
  trace.algorithm = std::move(name);
  trace.records.reserve(K + 1);
  {
    RngStream pick(opts.seed, StreamId::iterate_sampling, 0);
    trace.sampled_index = std::uniform_int_distribution<std::uint64_t>(1, K)(pick.engine());
  }
  const double cert_L = opts.certificate_L.value_or(
      problem.lipschitz_hints() ? problem.lipschitz_hints()->L : kNaN);

  Vector x = x0;
  double last_eta = opts.diagnostic_eta;
  bool stop_next = false;
  std::optional<PendingCertificate> pending;

  for (std::uint64_t k = 0; k <= K; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.f_gap = kNaN;
    rec.step_norm = rec.hessian_err_frob = rec.grad_err = rec.kkt_residual = kNaN;

    PointEval pe;
    pe.f = problem.value(x);
    rec.f = pe.f;
    if (!std::isfinite(pe.f) || pe.f > kDivergenceLimit) {
      rec.grad_norm = rec.min_eig = rec.mu_eta = rec.potential = kNaN;
      rec.wallclock_s = elapsed();
      trace.records.push_back(rec);
      trace.aborted = true;
      trace.abort_reason = "diverged: f = " + std::to_string(pe.f);
      break;
    }
    pe.grad = problem.gradient(x);
    pe.hess = problem.hessian(x);
    pe.min_eig = min_eigenvalue(pe.hess);
    rec.grad_norm = pe.grad.norm();
    rec.min_eig = pe.min_eig;
    rec.potential = pe.f;

    if (pending) {
      check_certificates(*pending, pe, trace);
      pending.reset();
    }
    if (k == trace.sampled_index) trace.sampled_iterate = x;
    if (opts.store_iterates) trace.iterates.push_back(x);

    const bool early = opts.early_stop_grad_tol && rec.grad_norm <= *opts.early_stop_grad_tol;
    if (k == K || stop_next || early) {
      rec.mu_eta = stationarity_measure_value(rec.grad_norm, rec.min_eig, last_eta);
      rec.wallclock_s = elapsed();
      trace.records.push_back(rec);
      if (early && k < K) trace.early_stopped = true;
      break;
    }

    StepOutcome out;
    try {
      out = step(k, x, pe);
    } catch (const NumericFailure& e) {
      rec.mu_eta = stationarity_measure_value(rec.grad_norm, rec.min_eig, last_eta);
      rec.wallclock_s = elapsed();
      trace.records.push_back(rec);
      trace.aborted = true;
      trace.abort_reason = e.what();
      break;
    }

    const double eta = std::isnan(out.eta) ? opts.diagnostic_eta : out.eta;
    last_eta = eta;
    rec.mu_eta = stationarity_measure_value(rec.grad_norm, rec.min_eig, eta);
    rec.step_norm = (out.x_next - x).norm();
    if (out.M) {
      rec.hessian_err_frob = frobenius_norm(*out.M - pe.hess);
      rec.potential = pe.f + potential_weight * cube(rec.hessian_err_frob);
    }
    if (out.g.size() == x.size()) rec.grad_err = (out.g - pe.grad).norm();
    rec.kkt_residual = out.kkt;
    rec.wallclock_s = elapsed();
    trace.records.push_back(rec);

    if (opts.debug_certificates && out.certify && out.M && std::isfinite(cert_L) &&
        eta < 1.0 / (2.0 * cert_L) &&
        (problem.dim() <= kCertifyEveryStepDim || k % 10 == 0)) {
      pending = PendingCertificate{k, pe.f, rec.step_norm, rec.hessian_err_frob,
                                   std::isnan(rec.grad_err) ? 0.0 : rec.grad_err, eta};
    }

    if (!out.x_next.allFinite()) {
      trace.aborted = true;
      trace.abort_reason = "non-finite iterate";
      break;
    }
    x = std::move(out.x_next);
    if (out.converged) {
      trace.converged = true;
      stop_next = true;
    }
  }
  trace.x_final = x;
  if (trace.sampled_iterate.size() == 0) trace.sampled_iterate = x;
  return trace;
}

void take_step(SolverState& state, const ProblemInstance& problem, const ScheduleParams& schedule,
               const RunOptions& opts, StepInfo& info) {
  const CubicModel model{state.g, state.M, schedule.eta_at(state.k)};
  info.solution = solve_subproblem(model, opts.subproblem);
  info.M = state.M;
  info.g = state.g;
  state.prev_x = state.x;
  state.x = state.x + info.solution.step;
  state.theta_prev = schedule.theta_at(state.k);
  ++state.k;
  (void)problem;
}

double default_potential_weight(const ScheduleParams& s, const RunOptions& opts) {
  if (opts.potential_weight) return *opts.potential_weight;
  if (s.method == ScheduleMethod::pm && s.L_F > 0.0) return pm_potential_weight(s.eta, s.L_F);
  if (s.method == ScheduleMethod::rm && s.L_F > 0.0) return rm_potential_weight(s.L_F, s.L_H);
  return 0.0;
}

void sample_state_gradient(SolverState& state, const ProblemInstance& problem,
                           const OracleConfig& oracles, const ScheduleParams& schedule,
                           const RunOptions& opts) {
  RngStream gs(stream_seed(opts.seed, oracles.gradient.seed), StreamId::gradient, state.k);
  const double delta = opts.scheduled_delta ? schedule.delta_at(state.k) : oracles.gradient.delta;
  state.g = sample_gradient(problem, state.x, oracles.gradient, delta, gs);
}

}  // namespace

double stationarity_measure_value(double grad_norm, double min_eig, double eta) {
  const double first = std::pow(grad_norm, 1.5) / 3.0;
  const double second = -std::pow(eta, 1.5) / 4.0 * cube(min_eig);
  return std::max({first, second, 0.0});
}

Stationarity stationarity_measure(const ProblemInstance& problem, const Vector& x, double eta) {
  if (!(eta > 0.0)) throw InvalidInput("stationarity_measure: eta must be positive");
  Stationarity s;
  s.grad_norm = problem.gradient(x).norm();
  s.min_eig = min_eigenvalue(problem.hessian(x));
  s.mu = stationarity_measure_value(s.grad_norm, s.min_eig, eta);
  return s;
}

double potential_value(double f_val, const SymMatrix& M, const SymMatrix& true_hessian, double p_k) {
  if (!(p_k >= 0.0)) throw InvalidInput("potential_value: p_k must be nonnegative");
  if (p_k == 0.0) return f_val;
  return f_val + p_k * cube(frobenius_norm(M - true_hessian));
}

SolverState initial_state(const Vector& x0) {
  SolverState s;
  s.x = x0;
  s.prev_x = x0;
  s.M = SymMatrix(x0.size());
  s.theta_prev = 1.0;
  return s;
}

StepInfo scrn_pm_step(SolverState& state, const ProblemInstance& problem,
                      const OracleConfig& oracles, const ScheduleParams& schedule,
                      const RunOptions& opts) {
  sample_state_gradient(state, problem, oracles, schedule, opts);
  RngStream hs(stream_seed(opts.seed, oracles.hessian.seed), StreamId::hessian, state.k);
  const SymMatrix h = sample_hessian(problem, state.x, oracles.hessian, hs);
  const double theta = state.k == 0 ? 1.0 : state.theta_prev;
  if (state.k == 0) state.M = SymMatrix(problem.dim());
  state.M = (1.0 - theta) * state.M + theta * h;

  StepInfo info;
  take_step(state, problem, schedule, opts, info);
  return info;
}

StepInfo scrn_rm_step(SolverState& state, const ProblemInstance& problem,
                      const OracleConfig& oracles, const ScheduleParams& schedule,
                      const RunOptions& opts) {
  sample_state_gradient(state, problem, oracles, schedule, opts);
  RngStream hs(stream_seed(opts.seed, oracles.hessian.seed), StreamId::hessian, state.k);
  if (state.k == 0) {
    state.M = sample_hessian(problem, state.x, oracles.hessian, hs);
  } else {
    auto [h_prev, h_curr] =
        paired_hessian_samples(problem, state.prev_x, state.x, oracles.hessian, hs);
    state.M = h_curr + (1.0 - state.theta_prev) * (state.M - h_prev);
  }

  StepInfo info;
  take_step(state, problem, schedule, opts, info);
  return info;
}

RunTrace scrn_run(const ProblemInstance& problem, const Vector& x0, MomentumKind kind,
                  const ScheduleParams& schedule, const OracleConfig& oracles,
                  const RunOptions& opts) {
  validate(oracles.gradient);
  validate(oracles.hessian);
  SolverState state = initial_state(x0);
  const bool pm = kind == MomentumKind::polyak;
  StepFn step = [&](std::uint64_t, const Vector&, const PointEval&) {
    StepInfo info = pm ? scrn_pm_step(state, problem, oracles, schedule, opts)
                       : scrn_rm_step(state, problem, oracles, schedule, opts);
    StepOutcome out;
    out.x_next = state.x;
    out.M = std::move(info.M);
    out.g = std::move(info.g);
    out.kkt = info.solution.stationarity_residual;
    out.eta = schedule.eta_at(state.k - 1);
    out.certify = true;
    return out;
  };
  RunTrace trace = run_loop(problem, x0, schedule.K, opts, pm ? "scrn_pm" : "scrn_rm",
                            default_potential_weight(schedule, opts), step);
  trace.schedule = schedule;
  trace.schedule_invalid = !schedule.valid;
  return trace;
}

RunTrace crn_run(const ProblemInstance& problem, const Vector& x0, double eta, std::uint64_t K,
                 const RunOptions& opts) {
  if (!(eta > 0.0)) throw InvalidInput("crn_run: eta must be positive");
  StepFn step = [&](std::uint64_t, const Vector& x, const PointEval& pe) {
    const CubicModel model{pe.grad, pe.hess, eta};
    const CubicSolution sol = solve_subproblem(model, opts.subproblem);
    StepOutcome out;
    out.x_next = x + sol.step;
    out.M = pe.hess;
    out.g = pe.grad;
    out.kkt = sol.stationarity_residual;
    out.eta = eta;
    out.certify = true;
    out.converged = sol.radius == 0.0;
    return out;
  };
  RunTrace trace = run_loop(problem, x0, K, opts, "crn", opts.potential_weight.value_or(0.0), step);
  trace.schedule = fixed_schedule(K, eta, 1.0, 0.0);
  return trace;
}

RunTrace adaptive_crn_run(const ProblemInstance& problem, const Vector& x0, std::uint64_t K,
                          const AdaptiveCrnOptions& acrn, const RunOptions& opts) {
  if (!(acrn.sigma0 > 0.0) || !(acrn.sigma_floor > 0.0) || !(acrn.increase > 1.0) ||
      !(acrn.decrease > 0.0 && acrn.decrease < 1.0)) {
    throw InvalidInput("adaptive_crn_run: invalid regularization update parameters");
  }
  double sigma = acrn.sigma0;
  StepFn step = [&](std::uint64_t, const Vector& x, const PointEval& pe) {
    const double eta = 1.0 / (2.0 * sigma);
    const CubicModel model{pe.grad, pe.hess, eta};
    const CubicSolution sol = solve_subproblem(model, opts.subproblem);
    StepOutcome out;
    out.M = pe.hess;
    out.g = pe.grad;
    out.kkt = sol.stationarity_residual;
    out.eta = eta;
    if (sol.radius == 0.0) {
      out.x_next = x;
      out.converged = true;
      return out;
    }
    const Vector trial = x + sol.step;
    const double predicted = -model_value(model, sol.step);
    const double rho = predicted > 0.0 ? (pe.f - problem.value(trial)) / predicted : -1.0;
    if (rho >= acrn.accept_ratio) {
      out.x_next = trial;
      sigma = std::max(sigma * acrn.decrease, acrn.sigma_floor);
    } else {
      out.x_next = x;
      sigma *= acrn.increase;
    }
    return out;
  };
  return run_loop(problem, x0, K, opts, "acrn", opts.potential_weight.value_or(0.0), step);
}

RunTrace sgd_momentum_run(const ProblemInstance& problem, const Vector& x0, double step_size,
                          double momentum_beta, const GradientOracleSpec& oracle,
                          std::uint64_t K, const RunOptions& opts) {
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw InvalidInput("sgd_momentum_run: step_size must be nonnegative");
  }
  if (!(momentum_beta >= 0.0 && momentum_beta < 1.0)) {
    throw InvalidInput("sgd_momentum_run: momentum_beta must lie in [0, 1)");
  }
  validate(oracle);
  Vector velocity = Vector::Zero(x0.size());
  StepFn step = [&](std::uint64_t k, const Vector& x, const PointEval&) {
    RngStream gs(stream_seed(opts.seed, oracle.seed), StreamId::gradient, k);
    StepOutcome out;
    out.g = sample_gradient(problem, x, oracle, oracle.delta, gs);
    velocity = momentum_beta * velocity + out.g;
    out.x_next = x - step_size * velocity;
    return out;
  };
  return run_loop(problem, x0, K, opts, "sgd_momentum", 0.0, step);
}

SsospReport ssosp_check(const ProblemInstance& problem, const std::vector<Vector>& iterates,
                        double eps_g, double eps_H) {
  if (iterates.size() < 2) throw InvalidInput("ssosp_check: need at least 2 runs");
  if (!(eps_g > 0.0) || !(eps_H > 0.0)) throw InvalidInput("ssosp_check: tolerances must be positive");
  const double n = static_cast<double>(iterates.size());
  double sg = 0.0, sg2 = 0.0, se = 0.0, se2 = 0.0;
  for (const Vector& x : iterates) {
    const double a = std::pow(problem.gradient(x).norm(), 1.5);
    const double b = cube(min_eigenvalue(problem.hessian(x)));
    sg += a;
    sg2 += a * a;
    se += b;
    se2 += b * b;
  }
  auto stderr_of = [n](double sum, double sum_sq) {
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) / n);
  };
  SsospReport r;
  r.runs = iterates.size();
  r.grad_moment = sg / n;
  r.grad_moment_se = stderr_of(sg, sg2);
  r.eig_moment = se / n;
  r.eig_moment_se = stderr_of(se, se2);
  r.grad_pass = r.grad_moment - 2.0 * r.grad_moment_se <= std::pow(eps_g, 1.5);
  r.eig_pass = r.eig_moment + 2.0 * r.eig_moment_se >= -cube(eps_H);
  return r;
}

}  // namespace scrn
