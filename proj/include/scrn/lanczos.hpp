#pragma once

#include "scrn/linalg.hpp"

#include <vector>

namespace scrn {

/// Lanczos process with full reorthogonalization against every stored
/// basis vector. The basis columns Q and tridiagonal coefficients satisfy
///   A Q_k = Q_k T_k + beta_k q_{k+1} e_kᵀ
/// to roundoff.
class LanczosBasis {
 public:
  /// `start` must be nonzero; it is normalized internally.
  LanczosBasis(const SymMatrix& a, const Vector& start);

  /// Adds one basis vector. Returns false on breakdown (the Krylov space is
  /// invariant), in which case the basis is left unchanged.
  bool expand();

  /// After a breakdown, continues the basis from `v` orthogonalized against
  /// the current basis (coupling coefficient 0). Returns false if `v` lies
  /// in the span of the basis.
  bool restart_with(const Vector& v);

  int size() const { return static_cast<int>(alpha_.size()); }
  /// Residual coupling beta_k of the last step (0 after breakdown).
  double last_beta() const { return next_beta_; }
  bool exhausted() const { return exhausted_; }

  const std::vector<double>& alpha() const { return alpha_; }
  /// Off-diagonal entries beta_1 … beta_{k-1}.
  const std::vector<double>& beta() const { return beta_; }

  /// Dense k×k tridiagonal projection.
  SymMatrix tridiagonal() const;
  /// Q_k y.
  Vector lift(const Vector& y) const;

 private:
  const SymMatrix* a_;
  Matrix q_;  // columns: basis vectors, capacity grows geometrically
  std::vector<double> alpha_;
  std::vector<double> beta_;
  Vector next_;  // unnormalized next direction
  double next_beta_ = 0.0;
  bool exhausted_ = false;
};

struct LanczosEigResult {
  double value;
  Vector vector;
  double residual;  // ‖A v − value·v‖
  int iterations;
};

/// Smallest eigenpair by Lanczos with full reorthogonalization. Throws
/// NumericFailure (carrying the residual) if `tol`·max(1,‖A‖) is not reached.
LanczosEigResult lanczos_min_eigen(const SymMatrix& a, const Vector& start,
                                   double tol, int max_iter);

}  // namespace scrn
