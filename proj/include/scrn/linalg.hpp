#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace scrn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense symmetric matrix. Every write goes to (i,j) and (j,i), so the
/// stored entries are always exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;

  /// Zero matrix of the given dimension (dim >= 1).
  explicit SymMatrix(Eigen::Index dim);

  /// Adopts `a`, which must be square and exactly symmetric.
  explicit SymMatrix(Matrix a);

  /// Mirrors the upper triangle of `a` into the lower triangle.
  static SymMatrix from_upper(const Matrix& a);
  /// (a + aᵀ)/2.
  static SymMatrix symmetrized(const Matrix& a);
  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix diagonal(const Vector& d);

  Eigen::Index dim() const { return a_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }
  void set(Eigen::Index i, Eigen::Index j, double v) {
    a_(i, j) = v;
    a_(j, i) = v;
  }
  void add(Eigen::Index i, Eigen::Index j, double v);

  const Matrix& dense() const { return a_; }

  bool all_finite() const { return a_.allFinite(); }

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.a_.rows() == b.a_.rows() && a.a_ == b.a_;
  }

 private:
  Matrix a_;
};

Vector operator*(const SymMatrix& a, const Vector& v);

struct EigenOptions {
  /// Matrices up to this dimension use a full dense eigendecomposition;
  /// larger ones use Lanczos.
  Eigen::Index dense_cutoff = 500;
  double lanczos_tol = 1e-10;
  int lanczos_max_iter = 0;  // 0: 2*dim + 50
};

double frobenius_norm(const Matrix& a);
double frobenius_norm(const SymMatrix& a);

double spectral_norm(const Matrix& a);
double spectral_norm(const SymMatrix& a, const EigenOptions& opts = {});

double min_eigenvalue(const SymMatrix& a, const EigenOptions& opts = {});

/// ‖U+V‖_F³ together with the two upper bounds
///   rhs1 = (1+c)‖U‖³ + 3‖U‖·Tr(UᵀV) + 2(1+c^{-1/2})‖V‖³
///   rhs2 = (1+2c)‖U‖³ + 2(1+c^{-1/2}+2c^{-2})‖V‖³
/// (all norms Frobenius). Both bounds hold for every U, V and c > 0.
struct CubedNormBounds {
  double lhs;
  double rhs1;
  double rhs2;
};

CubedNormBounds cubed_norm_expansion_bounds(const Matrix& u, const Matrix& v,
                                            double c);

}  // namespace scrn
