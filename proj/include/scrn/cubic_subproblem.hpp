#pragma once

#include "scrn/errors.hpp"
#include "scrn/linalg.hpp"

#include <string_view>

namespace scrn {

/// min_s  gᵀs + ½ sᵀM s + ‖s‖³/(6η)
struct CubicModel {
  Vector g;
  SymMatrix M;
  double eta = 1.0;

  Eigen::Index dim() const { return g.size(); }
};

enum class SolverKind { exact_easy, exact_hard_case, lanczos };

std::string_view to_string(SolverKind kind);

/// A step together with its KKT certificate:
///   stationarity_residual = ‖g + M s + (r/(2η)) s‖,
///   curvature_margin      = λ_min(M) + r/(2η),
/// where r = ‖s‖.
struct CubicSolution {
  Vector step;
  double radius = 0.0;
  double stationarity_residual = 0.0;
  double curvature_margin = 0.0;
  SolverKind kind = SolverKind::exact_easy;
  int iterations = 0;  // secular iterations (exact) or Krylov dimension (lanczos)
};

/// Thrown by solve_lanczos when the Krylov space becomes invariant before
/// the residual tolerance is met. Carries the best lifted solution.
class SubproblemFailure : public NumericFailure {
 public:
  SubproblemFailure(const std::string& what, CubicSolution best)
      : NumericFailure(what, best.stationarity_residual), best_(std::move(best)) {}

  const CubicSolution& best() const noexcept { return best_; }

 private:
  CubicSolution best_;
};

double model_value(const CubicModel& model, const Vector& s);

/// ‖g + M s + (‖s‖/(2η)) s‖
double stationarity_residual(const CubicModel& model, const Vector& s);

/// Global minimizer via eigendecomposition and the secular equation in the
/// step radius, including the hard case. The returned solution satisfies
///   stationarity_residual ≤ kkt_tol·(1 + ‖g‖)
/// and curvature_margin ≥ −kkt_tol·(1 + ‖M‖).
/// Throws InvalidInput for a malformed model and NumericFailure if the root
/// finder runs out of iterations.
CubicSolution solve_exact(const CubicModel& model, double kkt_tol = 1e-9);

/// Krylov approximation: builds a Lanczos basis from g (or from an
/// approximate minimum eigenvector of M when g = 0), solves the projected
/// model exactly, and grows the basis until the lifted residual is at most
/// kkt_tol or krylov_dim vectors are used.
CubicSolution solve_lanczos(const CubicModel& model, int krylov_dim,
                            double kkt_tol = 1e-6);

enum class SubproblemSolver { automatic, exact, lanczos };

struct SubproblemOptions {
  SubproblemSolver solver = SubproblemSolver::automatic;
  Eigen::Index dense_cutoff = 500;
  int krylov_dim = 100;
  double exact_tol = 1e-9;
  double lanczos_tol = 1e-6;
};

/// Dispatches per `opts`; a Lanczos failure or an unconverged Lanczos
/// residual is retried with the exact solver.
CubicSolution solve_subproblem(const CubicModel& model, const SubproblemOptions& opts);

}  // namespace scrn
