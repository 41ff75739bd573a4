#include "scrn/linalg.hpp"

#include "scrn/errors.hpp"
#include "scrn/lanczos.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace scrn {

namespace {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw InvalidInput(std::string(what) + ": matrix has non-finite entries");
  }
}

Vector default_start(Eigen::Index n) {
  // Fixed-seed generic start so results never depend on global state.
  std::mt19937_64 gen(0x5eed'1a2c'0505ULL);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

int lanczos_iters(const EigenOptions& opts, Eigen::Index n) {
  return opts.lanczos_max_iter > 0 ? opts.lanczos_max_iter
                                   : static_cast<int>(2 * n + 50);
}

}  // namespace

SymMatrix::SymMatrix(Eigen::Index dim) {
  if (dim < 1) throw InvalidInput("SymMatrix: dimension must be >= 1");
  a_ = Matrix::Zero(dim, dim);
}

SymMatrix::SymMatrix(Matrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() < 1) {
    throw InvalidInput("SymMatrix: matrix must be square with dim >= 1");
  }
  for (Eigen::Index j = 0; j < a_.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < a_.rows(); ++i) {
      // Bitwise comparison; NaN entries are caught by all_finite() checks.
      if (a_(i, j) != a_(j, i) && !(std::isnan(a_(i, j)) && std::isnan(a_(j, i)))) {
        throw InvalidInput("SymMatrix: matrix is not exactly symmetric");
      }
    }
  }
}

SymMatrix SymMatrix::from_upper(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw InvalidInput("SymMatrix::from_upper: matrix must be square");
  }
  Matrix m = a.triangularView<Eigen::Upper>();
  m.triangularView<Eigen::StrictlyLower>() = m.transpose();
  return SymMatrix(std::move(m));
}

SymMatrix SymMatrix::symmetrized(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw InvalidInput("SymMatrix::symmetrized: matrix must be square");
  }
  Matrix m = 0.5 * (a + a.transpose());
  // Round-off can differ between (i,j) and (j,i); mirror to be exact.
  m.triangularView<Eigen::StrictlyLower>() = m.transpose();
  return SymMatrix(std::move(m));
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  SymMatrix s(dim);
  s.a_.setIdentity();
  return s;
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  SymMatrix s(d.size());
  s.a_.diagonal() = d;
  return s;
}

void SymMatrix::add(Eigen::Index i, Eigen::Index j, double v) {
  a_(i, j) += v;
  if (i != j) a_(j, i) += v;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.dim() != dim()) throw InvalidInput("SymMatrix: dimension mismatch");
  a_ += o.a_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.dim() != dim()) throw InvalidInput("SymMatrix: dimension mismatch");
  a_ -= o.a_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  a_ *= s;
  return *this;
}

Vector operator*(const SymMatrix& a, const Vector& v) {
  if (a.dim() != v.size()) throw InvalidInput("SymMatrix*Vector: dimension mismatch");
  return a.dense() * v;
}

double frobenius_norm(const Matrix& a) {
  require_finite(a, "frobenius_norm");
  return a.norm();
}

double frobenius_norm(const SymMatrix& a) { return frobenius_norm(a.dense()); }

double spectral_norm(const Matrix& a) {
  require_finite(a, "spectral_norm");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double spectral_norm(const SymMatrix& a, const EigenOptions& opts) {
  require_finite(a.dense(), "spectral_norm");
  if (a.dim() <= opts.dense_cutoff) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.dense(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw NumericFailure("spectral_norm: dense eigensolver did not converge",
                           std::numeric_limits<double>::infinity());
    }
    const Vector& ev = es.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  const double lo = min_eigenvalue(a, opts);
  const double hi = -min_eigenvalue(-1.0 * a, opts);
  return std::max(std::abs(lo), std::abs(hi));
}

double min_eigenvalue(const SymMatrix& a, const EigenOptions& opts) {
  require_finite(a.dense(), "min_eigenvalue");
  if (a.dim() <= opts.dense_cutoff) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.dense(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw NumericFailure("min_eigenvalue: dense eigensolver did not converge",
                           std::numeric_limits<double>::infinity());
    }
    return es.eigenvalues()(0);
  }
  return lanczos_min_eigen(a, default_start(a.dim()), opts.lanczos_tol,
                           lanczos_iters(opts, a.dim()))
      .value;
}

CubedNormBounds cubed_norm_expansion_bounds(const Matrix& u, const Matrix& v,
                                            double c) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw InvalidInput("cubed_norm_expansion_bounds: shape mismatch");
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidInput("cubed_norm_expansion_bounds: c must be positive");
  }
  require_finite(u, "cubed_norm_expansion_bounds");
  require_finite(v, "cubed_norm_expansion_bounds");

  const double nu = u.norm();
  const double nv = v.norm();
  const double nsum = (u + v).norm();
  const double trace_uv = (u.array() * v.array()).sum();  // Tr(UᵀV)
  const double nu3 = nu * nu * nu;
  const double nv3 = nv * nv * nv;
  const double inv_sqrt_c = 1.0 / std::sqrt(c);

  CubedNormBounds b;
  b.lhs = nsum * nsum * nsum;
  b.rhs1 = (1.0 + c) * nu3 + 3.0 * nu * trace_uv + 2.0 * (1.0 + inv_sqrt_c) * nv3;
  b.rhs2 = (1.0 + 2.0 * c) * nu3 + 2.0 * (1.0 + inv_sqrt_c + 2.0 / (c * c)) * nv3;
  return b;
}

}  // namespace scrn
