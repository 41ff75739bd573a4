#include "scrn/lanczos.hpp"

#include "scrn/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace scrn {

namespace {

// Relative size below which a new Lanczos direction counts as zero.
constexpr double kBreakdownTol = 1e-13;

}  // namespace

LanczosBasis::LanczosBasis(const SymMatrix& a, const Vector& start) : a_(&a) {
  if (start.size() != a.dim()) throw InvalidInput("LanczosBasis: start dimension mismatch");
  const double nrm = start.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw InvalidInput("LanczosBasis: start vector must be nonzero and finite");
  }
  next_ = start / nrm;
  next_beta_ = 1.0;
  q_.resize(a.dim(), 0);
}

bool LanczosBasis::expand() {
  const Eigen::Index n = a_->dim();
  const int k = size();
  if (exhausted_) return false;
  if (k >= n) {
    exhausted_ = true;
    return false;
  }
  const double scale = std::max(1.0, a_->dense().cwiseAbs().maxCoeff());
  if (k > 0 && next_beta_ <= kBreakdownTol * scale) {
    exhausted_ = true;
    return false;
  }

  Vector q = (k == 0) ? next_ : Vector(next_ / next_beta_);
  if (q_.cols() <= k) q_.conservativeResize(n, std::max<Eigen::Index>(2 * q_.cols(), 8));
  q_.col(k) = q;
  if (k > 0) beta_.push_back(next_beta_);

  Vector w = a_->dense() * q;
  const double alpha = q.dot(w);
  w -= alpha * q;
  if (k > 0) w -= next_beta_ * q_.col(k - 1);
  // Full reorthogonalization, two passes of classical Gram-Schmidt.
  auto basis = q_.leftCols(k + 1);
  for (int pass = 0; pass < 2; ++pass) w -= basis * (basis.transpose() * w);

  alpha_.push_back(alpha);
  next_ = std::move(w);
  next_beta_ = next_.norm();
  if (k + 1 >= n) exhausted_ = true;
  return true;
}

bool LanczosBasis::restart_with(const Vector& v) {
  const int k = size();
  if (k >= a_->dim()) return false;
  Vector w = v;
  auto basis = q_.leftCols(k);
  for (int pass = 0; pass < 2; ++pass) w -= basis * (basis.transpose() * w);
  const double nrm = w.norm();
  if (!(nrm > kBreakdownTol * std::max(1.0, v.norm()))) return false;

  // Append as if the coupling were exactly zero.
  const Eigen::Index n = a_->dim();
  if (q_.cols() <= k) q_.conservativeResize(n, std::max<Eigen::Index>(2 * q_.cols(), 8));
  Vector q = w / nrm;
  q_.col(k) = q;
  beta_.push_back(0.0);
  Vector aq = a_->dense() * q;
  const double alpha = q.dot(aq);
  aq -= alpha * q;
  auto full = q_.leftCols(k + 1);
  for (int pass = 0; pass < 2; ++pass) aq -= full * (full.transpose() * aq);
  alpha_.push_back(alpha);
  next_ = std::move(aq);
  next_beta_ = next_.norm();
  exhausted_ = (k + 1 >= n);
  return true;
}

SymMatrix LanczosBasis::tridiagonal() const {
  const int k = size();
  if (k == 0) throw InvalidInput("LanczosBasis::tridiagonal: empty basis");
  SymMatrix t(k);
  for (int i = 0; i < k; ++i) t.set(i, i, alpha_[i]);
  for (int i = 0; i + 1 < k; ++i) t.set(i, i + 1, beta_[i]);
  return t;
}

Vector LanczosBasis::lift(const Vector& y) const {
  if (y.size() != size()) throw InvalidInput("LanczosBasis::lift: dimension mismatch");
  return q_.leftCols(size()) * y;
}

LanczosEigResult lanczos_min_eigen(const SymMatrix& a, const Vector& start,
                                   double tol, int max_iter) {
  LanczosBasis basis(a, start);
  const double scale = std::max(1.0, a.dense().cwiseAbs().maxCoeff());
  double best_residual = std::numeric_limits<double>::infinity();

  for (int it = 0; it < max_iter; ++it) {
    if (!basis.expand()) {
      // Invariant subspace found; keep going from a fresh direction so a
      // start vector deficient in the wanted eigenvector is not fatal.
      Vector fresh = Vector::Zero(a.dim());
      fresh(it % a.dim()) = 1.0;
      fresh += 0.5 * Vector::LinSpaced(a.dim(), -1.0, 1.0);
      if (!basis.restart_with(fresh)) break;
    }
    const int k = basis.size();
    if (k < 2 && k < a.dim()) continue;
    if (k > 20 && k % 5 != 0 && !basis.exhausted()) continue;

    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.computeFromTridiagonal(
        Eigen::Map<const Vector>(basis.alpha().data(), k),
        Eigen::Map<const Vector>(basis.beta().data(), k - 1), Eigen::ComputeEigenvectors);
    const double ritz = es.eigenvalues()(0);
    const Vector y = es.eigenvectors().col(0);
    const double est = std::abs(basis.last_beta() * y(k - 1));
    if (est <= tol * scale || basis.exhausted()) {
      Vector v = basis.lift(y);
      v.normalize();
      const double res = (a.dense() * v - ritz * v).norm();
      best_residual = std::min(best_residual, res);
      if (res <= 10.0 * tol * scale) return {ritz, v, res, k};
      if (k == a.dim()) break;
    }
  }
  throw NumericFailure("lanczos_min_eigen: no convergence", best_residual);
}

}  // namespace scrn
