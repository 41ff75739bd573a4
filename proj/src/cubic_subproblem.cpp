#include "scrn/cubic_subproblem.hpp"

#include "scrn/lanczos.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace scrn {

namespace {

constexpr int kMaxSecularIter = 200;
constexpr double kHardCaseRelTol = 1e-10;

void validate(const CubicModel& m) {
  if (m.g.size() != m.M.dim()) throw InvalidInput("CubicModel: dim(g) != dim(M)");
  if (!(m.eta > 0.0) || !std::isfinite(m.eta)) throw InvalidInput("CubicModel: eta must be positive");
  if (!m.g.allFinite() || !m.M.all_finite()) throw InvalidInput("CubicModel: non-finite entries");
}

// Result of the secular solve in the eigenbasis of M.
struct Secular {
  Vector coeffs;  // step in the eigenbasis
  bool hard_case = false;
  bool converged = false;
  int iterations = 0;
  double lo = 0.0;  // final bracket on t = r - r_min
  double hi = 0.0;
};

// `lam` ascending eigenvalues, `gh` = Qᵀg. Solves
//   ‖(Λ + r/(2η))⁻¹ ĝ‖ = r,  r > r_min = max(0, −2ηλ_min),
// or takes the hard-case branch. Stops once |ψ| ≤ psi_tol·(1+r) and the
// implied stationarity residual |ψ|·‖s‖/(2η) ≤ target.
Secular solve_secular(const Vector& lam, const Vector& gh, double eta,
                      double psi_tol, double target) {
  const Eigen::Index n = lam.size();
  const double lam_min = lam(0);
  const double gnorm = gh.norm();
  const double r_min = std::max(0.0, -2.0 * eta * lam_min);
  const bool shifted = r_min > 0.0;

  // Work with t = r − r_min and denominators base_i + t/(2η), where
  // base_i = λ_i − λ_min when shifted. This keeps the pole at t = 0 free of
  // cancellation.
  Vector base = shifted ? Vector(lam.array() - lam_min) : lam;

  Secular out;
  out.coeffs = Vector::Zero(n);

  if (gnorm == 0.0) {
    out.converged = true;
    if (shifted) {
      out.coeffs(0) = r_min;
      out.hard_case = true;
    }
    return out;
  }

  if (shifted) {
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    const double eig_tol = 1e-12 * scale;
    double g_min_space = 0.0;
    Eigen::Index first_outside = 0;
    while (first_outside < n && base(first_outside) <= eig_tol) {
      g_min_space += gh(first_outside) * gh(first_outside);
      ++first_outside;
    }
    if (std::sqrt(g_min_space) <= kHardCaseRelTol * gnorm) {
      Vector perp = Vector::Zero(n);
      for (Eigen::Index i = first_outside; i < n; ++i) perp(i) = -gh(i) / base(i);
      const double pn = perp.norm();
      if (pn <= r_min) {
        out.coeffs = perp;
        out.coeffs(0) = std::sqrt(r_min * r_min - pn * pn);
        out.hard_case = true;
        out.converged = true;
        return out;
      }
    }
  }

  const double inv2eta = 0.5 / eta;
  double s_norm = 0.0;
  auto eval = [&](double t, double& psi, double& dpsi) {
    double ss = 0.0;
    double d3 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (gh(i) == 0.0) continue;
      const double d = base(i) + t * inv2eta;
      const double q = gh(i) / d;
      ss += q * q;
      d3 += q * q / d;
    }
    s_norm = std::sqrt(ss);
    psi = s_norm - (r_min + t);
    dpsi = (s_norm > 0.0 ? -(d3 * inv2eta) / s_norm : 0.0) - 1.0;
  };

  // ψ(t_hi) ≤ 0 at t_hi = sqrt(2η‖g‖), since every denominator is at least
  // t/(2η); doubled defensively against roundoff.
  double lo = 0.0;
  double hi = std::sqrt(2.0 * eta * gnorm);
  double psi = 0.0;
  double dpsi = 0.0;
  for (int guard = 0; guard < 64; ++guard) {
    eval(hi, psi, dpsi);
    if (psi <= 0.0) break;
    lo = hi;
    hi *= 2.0;
  }

  double t = hi;
  for (int it = 1; it <= kMaxSecularIter; ++it) {
    eval(t, psi, dpsi);
    out.iterations = it;
    if (psi > 0.0) lo = t; else hi = t;
    const double r = r_min + t;
    if (std::abs(psi) <= psi_tol * (1.0 + r) && std::abs(psi) * s_norm * inv2eta <= target) {
      out.converged = true;
      break;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) {
      out.converged = true;  // bracket at roundoff level
      break;
    }
    double next = t - psi / dpsi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  out.lo = lo;
  out.hi = hi;

  for (Eigen::Index i = 0; i < n; ++i) {
    if (gh(i) != 0.0) out.coeffs(i) = -gh(i) / (base(i) + t * inv2eta);
  }
  return out;
}

CubicSolution finish(const CubicModel& model, Vector step, double lam_min,
                     SolverKind kind, int iterations) {
  CubicSolution sol;
  sol.radius = step.norm();
  sol.step = std::move(step);
  sol.stationarity_residual = stationarity_residual(model, sol.step);
  sol.curvature_margin = lam_min + sol.radius / (2.0 * model.eta);
  sol.kind = kind;
  sol.iterations = iterations;
  return sol;
}

Vector generic_vector(Eigen::Index n) {
  std::mt19937_64 gen(0xc0b1c5eedULL);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

}  // namespace

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::exact_easy: return "exact_easy";
    case SolverKind::exact_hard_case: return "exact_hard_case";
    case SolverKind::lanczos: return "lanczos";
  }
  return "unknown";
}

double model_value(const CubicModel& model, const Vector& s) {
  if (s.size() != model.g.size() || model.M.dim() != s.size()) {
    throw InvalidInput("model_value: dimension mismatch");
  }
  const double r = s.norm();
  return model.g.dot(s) + 0.5 * s.dot(model.M.dense() * s) + r * r * r / (6.0 * model.eta);
}

double stationarity_residual(const CubicModel& model, const Vector& s) {
  if (s.size() != model.g.size()) throw InvalidInput("stationarity_residual: dimension mismatch");
  const double r = s.norm();
  return (model.g + model.M.dense() * s + (r / (2.0 * model.eta)) * s).norm();
}

CubicSolution solve_exact(const CubicModel& model, double kkt_tol) {
  validate(model);
  if (!(kkt_tol > 0.0)) throw InvalidInput("solve_exact: kkt_tol must be positive");

  Eigen::SelfAdjointEigenSolver<Matrix> es(model.M.dense());
  if (es.info() != Eigen::Success) {
    throw NumericFailure("solve_exact: eigendecomposition failed",
                         std::numeric_limits<double>::infinity());
  }
  const Vector& lam = es.eigenvalues();
  const Matrix& q = es.eigenvectors();
  const Vector gh = q.transpose() * model.g;
  const double gnorm = model.g.norm();

  const Secular sec = solve_secular(lam, gh, model.eta, kkt_tol, 0.5 * kkt_tol * (1.0 + gnorm));
  if (!sec.converged) {
    std::ostringstream msg;
    msg << "solve_exact: secular equation not solved in " << kMaxSecularIter
        << " iterations; bracket on r - r_min = [" << sec.lo << ", " << sec.hi << "]";
    throw NumericFailure(msg.str(), stationarity_residual(model, q * sec.coeffs));
  }
  return finish(model, q * sec.coeffs, lam(0),
                sec.hard_case ? SolverKind::exact_hard_case : SolverKind::exact_easy,
                sec.iterations);
}

CubicSolution solve_lanczos(const CubicModel& model, int krylov_dim, double kkt_tol) {
  validate(model);
  if (krylov_dim < 2) throw InvalidInput("solve_lanczos: krylov_dim must be >= 2");
  if (!(kkt_tol > 0.0)) throw InvalidInput("solve_lanczos: kkt_tol must be positive");

  const Eigen::Index n = model.dim();
  const int budget = static_cast<int>(std::min<Eigen::Index>(krylov_dim, n));
  const double gnorm = model.g.norm();
  const double lam_min = min_eigenvalue(model.M);

  Vector start;
  if (gnorm == 0.0) {
    if (lam_min >= 0.0) return finish(model, Vector::Zero(n), lam_min, SolverKind::lanczos, 0);
    start = lanczos_min_eigen(model.M, generic_vector(n), 1e-10, static_cast<int>(2 * n + 50)).vector;
  } else {
    start = model.g;
  }

  LanczosBasis basis(model.M, start);
  CubicSolution best;
  best.stationarity_residual = std::numeric_limits<double>::infinity();
  const double margin_tol = -kkt_tol * (1.0 + frobenius_norm(model.M));

  bool grew = basis.expand();
  while (true) {
    const int k = basis.size();
    const bool last = !grew || k >= budget;
    if (!last && k > 10 && k % 5 != 0) {
      grew = basis.expand();
      continue;
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.computeFromTridiagonal(Eigen::Map<const Vector>(basis.alpha().data(), k),
                              Eigen::Map<const Vector>(basis.beta().data(), k - 1),
                              Eigen::ComputeEigenvectors);
    Vector gp = Vector::Zero(k);
    if (gnorm > 0.0) gp(0) = gnorm;
    const Vector gh = es.eigenvectors().transpose() * gp;
    const Secular sec = solve_secular(es.eigenvalues(), gh, model.eta, 0.1 * kkt_tol, 0.1 * kkt_tol);
    const Vector y = es.eigenvectors() * sec.coeffs;
    CubicSolution sol = finish(model, basis.lift(y), lam_min, SolverKind::lanczos, k);
    if (sol.stationarity_residual < best.stationarity_residual) best = sol;

    if (sol.stationarity_residual <= kkt_tol && sol.curvature_margin >= margin_tol) return sol;
    if (k >= budget) return best;
    if (!grew) {
      // Invariant subspace that misses the negative curvature (hard case):
      // continue from a fresh direction.
      if (basis.restart_with(generic_vector(n))) continue;
      throw SubproblemFailure("solve_lanczos: Krylov space became invariant above tolerance",
                              best);
    }
    grew = basis.expand();
  }
}

CubicSolution solve_subproblem(const CubicModel& model, const SubproblemOptions& opts) {
  const bool use_lanczos =
      opts.solver == SubproblemSolver::lanczos ||
      (opts.solver == SubproblemSolver::automatic && model.dim() > opts.dense_cutoff);
  if (!use_lanczos) return solve_exact(model, opts.exact_tol);
  try {
    CubicSolution sol = solve_lanczos(model, opts.krylov_dim, opts.lanczos_tol);
    if (sol.stationarity_residual <= opts.lanczos_tol &&
        sol.curvature_margin >= -opts.lanczos_tol * (1.0 + frobenius_norm(model.M))) {
      return sol;
    }
  } catch (const NumericFailure&) {
  }
  return solve_exact(model, opts.exact_tol);
}

}  // namespace scrn
