#pragma once

#include "scrn/cubic_subproblem.hpp"
#include "scrn/linalg.hpp"
#include "scrn/oracles.hpp"
#include "scrn/problems.hpp"
#include "scrn/schedules.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scrn {

struct OracleConfig {
  GradientOracleSpec gradient;
  HessianOracleSpec hessian;
};

/// Diagnostics for iterate x^k. Fields that do not apply are NaN: on the
/// last record the step and estimator fields, for first-order methods the
/// Hessian-estimator fields.
struct IterationRecord {
  std::uint64_t k = 0;
  double f = 0.0;
  double f_gap = 0.0;  // filled by the harness once f* is known
  double grad_norm = 0.0;
  double min_eig = 0.0;
  double mu_eta = 0.0;
  double step_norm = 0.0;
  double hessian_err_frob = 0.0;
  double grad_err = 0.0;
  double potential = 0.0;
  double kkt_residual = 0.0;
  double wallclock_s = 0.0;
};

struct CertificateViolation {
  std::uint64_t k = 0;
  std::string which;  // "descent" or "stationarity"
  double lhs = 0.0;
  double rhs = 0.0;
};

struct RunTrace {
  std::string algorithm;
  std::vector<IterationRecord> records;
  std::optional<ScheduleParams> schedule;
  bool schedule_invalid = false;
  bool converged = false;      // zero step at an exact second-order point
  bool early_stopped = false;  // ‖∇f‖ ≤ early-stop tolerance
  bool aborted = false;
  std::string abort_reason;
  /// ι_K, uniform on {1,…,K}, and the corresponding iterate.
  std::uint64_t sampled_index = 0;
  Vector sampled_iterate;
  Vector x_final;
  std::vector<Vector> iterates;  // only with RunOptions::store_iterates
  std::uint64_t certificates_checked = 0;
  std::vector<CertificateViolation> violations;
};

struct RunOptions {
  SubproblemOptions subproblem;
  std::uint64_t seed = 0;
  /// Use the schedule's δ_k for the gradient oracle (otherwise spec.delta).
  bool scheduled_delta = true;
  /// Potential weight p_k; defaults to the proof preset for theorem
  /// schedules and 0 otherwise.
  std::optional<double> potential_weight;
  /// Verify the descent and stationarity inequalities after each step.
  /// Dimensions above 100 are checked every 10th iteration.
  bool debug_certificates = false;
  /// Spectral Hessian Lipschitz constant for the certificates; defaults to
  /// the problem hint.
  std::optional<double> certificate_L;
  /// Stop once the exact gradient norm drops to this value. Verification
  /// runs only; flagged in the trace.
  std::optional<double> early_stop_grad_tol;
  bool store_iterates = false;
  /// η used for μ_η on methods without a step-size parameter.
  double diagnostic_eta = 1.0;
};

/// μ_η(x) = max{⅓‖∇f(x)‖^{3/2}, −(η^{3/2}/4)λ_min(∇²f(x))³}.
struct Stationarity {
  double mu = 0.0;
  double grad_norm = 0.0;
  double min_eig = 0.0;
};

Stationarity stationarity_measure(const ProblemInstance& problem, const Vector& x, double eta);
double stationarity_measure_value(double grad_norm, double min_eig, double eta);

/// f + p‖M − ∇²f‖_F³.
double potential_value(double f_val, const SymMatrix& M, const SymMatrix& true_hessian, double p_k);

enum class MomentumKind { polyak, recursive };

/// State of the SCRN outer loop before iteration k. At k = 0 the
/// initialization M_{−1} = 0, θ_{−1} = 1 makes M_0 the first Hessian sample.
struct SolverState {
  std::uint64_t k = 0;
  Vector x;
  Vector prev_x;
  SymMatrix M;
  Vector g;
  double theta_prev = 1.0;
};

SolverState initial_state(const Vector& x0);

/// Outcome of one step; `state` has advanced to k+1 with x = x^{k+1}.
struct StepInfo {
  CubicSolution solution;
  SymMatrix M;  // M_k used in the model
  Vector g;     // g^k
};

/// x^{k+1} = x^k + argmin of the cubic model with (g^k, M_k, η_k), where
/// M_k = (1−θ_{k−1})M_{k−1} + θ_{k−1}H(x^k; ξ^k).
StepInfo scrn_pm_step(SolverState& state, const ProblemInstance& problem,
                      const OracleConfig& oracles, const ScheduleParams& schedule,
                      const RunOptions& opts);

/// As scrn_pm_step with
/// M_k = H(x^k; ξ^k) + (1−θ_{k−1})(M_{k−1} − H(x^{k−1}; ξ^k)),
/// both samples sharing ξ^k.
StepInfo scrn_rm_step(SolverState& state, const ProblemInstance& problem,
                      const OracleConfig& oracles, const ScheduleParams& schedule,
                      const RunOptions& opts);

/// K iterations of SCRN with the chosen momentum. Trace has K+1 records
/// unless the run stops early.
RunTrace scrn_run(const ProblemInstance& problem, const Vector& x0, MomentumKind kind,
                  const ScheduleParams& schedule, const OracleConfig& oracles,
                  const RunOptions& opts = {});

/// Deterministic cubic regularized Newton with a fixed η.
RunTrace crn_run(const ProblemInstance& problem, const Vector& x0, double eta, std::uint64_t K,
                 const RunOptions& opts = {});

struct AdaptiveCrnOptions {
  double sigma0 = 1.0;  // initial weight σ in gᵀs + ½sᵀHs + (σ/3)‖s‖³
  double accept_ratio = 0.1;
  double decrease = 0.5;
  double increase = 2.0;
  double sigma_floor = 1e-8;
};

/// Adaptive CRN. Each iteration is one trial step; rejected trials leave x
/// unchanged and double σ.
RunTrace adaptive_crn_run(const ProblemInstance& problem, const Vector& x0, std::uint64_t K,
                          const AdaptiveCrnOptions& acrn = {}, const RunOptions& opts = {});

/// Heavy ball: v ← βv + g, x ← x − αv. Aborts once f exceeds 1e12.
RunTrace sgd_momentum_run(const ProblemInstance& problem, const Vector& x0, double step_size,
                          double momentum_beta, const GradientOracleSpec& oracle,
                          std::uint64_t K, const RunOptions& opts = {});

struct SsospReport {
  std::size_t runs = 0;
  double grad_moment = 0.0;  // mean of ‖∇f‖^{3/2}
  double grad_moment_se = 0.0;
  double eig_moment = 0.0;  // mean of λ_min³
  double eig_moment_se = 0.0;
  bool grad_pass = false;
  bool eig_pass = false;
  bool pass() const { return grad_pass && eig_pass; }
};

/// Passes iff E‖∇f‖^{3/2} ≤ ε_g^{3/2} and E[λ_min³] ≥ −ε_H³, each within
/// two standard errors.
SsospReport ssosp_check(const ProblemInstance& problem, const std::vector<Vector>& iterates,
                        double eps_g, double eps_H);

}  // namespace scrn
