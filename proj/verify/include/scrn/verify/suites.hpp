#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scrn::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
};

// Individual checks. Tolerances are fixed inside each function.

/// 10³ random (U, V, c): both cubed-norm expansion bounds hold with slack
/// ≥ −1e−12, and the library values agree with a long-double recomputation.
CheckResult check_cubed_norm_bounds(int trials = 1000, std::uint64_t seed = 1);

/// Random models (n ≤ 20, mixed spectra, some hard cases) solved exactly:
/// residual ≤ 1e−9(1+‖g‖), curvature margin ≥ −1e−9(1+‖M‖), value within
/// 1e−6(1+|m*|) of the dual optimum.
CheckResult check_subproblem_exactness(int models = 500, int hard_cases = 20, std::uint64_t seed = 2);

/// n = 200 models: full-dimension Lanczos matches the exact step to 1e−6
/// relative, and 30 Krylov vectors reach a lifted residual ≤ 1e−6.
CheckResult check_lanczos_equivalence(int models = 100, int n = 200, std::uint64_t seed = 3);

/// Small hand-built hard case with a known step.
CheckResult check_hard_case_2d();

/// Gaussian gradient noise: mean ‖z‖^{3/2} ≤ δ^{3/2} + 3 SE (δ = 0.1, n = 10).
CheckResult check_gradient_moment(std::size_t samples = 100000, std::uint64_t seed = 4);

/// Element subsampling (p = 0.5, 5×5): entrywise unbiased within 3 SE and
/// every sample exactly symmetric.
CheckResult check_hessian_unbiased(std::size_t samples = 100000, std::uint64_t seed = 5);

/// Coupled Hessian samples at equal points coincide bitwise, for every
/// stochastic kind.
CheckResult check_coupling_identity(std::uint64_t seed = 6);

/// Gaussian Hessian noise: mean ‖E‖_F³ ≤ σ³ + 3 SE.
CheckResult check_hessian_noise_moment(std::size_t samples = 20000, std::uint64_t seed = 7);

/// δ = 9η² (pm), δ = 289η³ (rm) to 1e−15 relative for K ∈ {1, 10, 10³, 10⁶};
/// validity flags agree with an independent recomputation of the thresholds.
CheckResult check_schedule_identities();

/// Hand-evaluated schedule and complexity-constant examples.
CheckResult check_schedule_examples();

/// Descent and stationarity inequalities after exact cubic steps with
/// perturbed (g, M) on random quartics.
CheckResult check_step_inequalities(int trials = 200, std::uint64_t seed = 8);

SuiteReport run_lemma_suite();
SuiteReport run_oracle_suite();
SuiteReport run_subproblem_suite();
SuiteReport run_schedule_suite();

/// "lemmas", "oracles", "subproblem", "schedules" or "all".
std::vector<SuiteReport> run_suites(std::string_view which);

}  // namespace scrn::verify
