#include "scrn/errors.hpp"
#include "scrn/linalg.hpp"
#include "scrn/rng.hpp"
#include "scrn/verify/reference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace {

using namespace scrn;

Matrix random_matrix(Eigen::Index r, Eigen::Index c, RngStream& rng) {
  Matrix a(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) a(i, j) = 2.0 * rng.uniform() - 1.0;
  return a;
}

TEST(Frobenius, ZeroMatrix) { EXPECT_EQ(frobenius_norm(Matrix::Zero(3, 4)), 0.0); }

TEST(Frobenius, IdentityDim3) { EXPECT_DOUBLE_EQ(frobenius_norm(SymMatrix::identity(3)), std::sqrt(3.0)); }

TEST(Frobenius, MatchesTraceDoubleLoop) {
  RngStream rng(11, StreamId::test, 0);
  const Matrix a = random_matrix(4, 4, rng);
  double trace = 0.0;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) trace += a(i, j) * a(i, j);
  EXPECT_NEAR(frobenius_norm(a), std::sqrt(trace), 1e-15);
}

TEST(Frobenius, RejectsNonFinite) {
  Matrix a = Matrix::Zero(2, 2);
  a(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(frobenius_norm(a), InvalidInput);
}

TEST(Spectral, DiagonalCase) {
  const SymMatrix d = SymMatrix::diagonal(Vector::Map(std::vector<double>{3.0, -1.0}.data(), 2));
  EXPECT_NEAR(spectral_norm(d), 3.0, 1e-14);
  EXPECT_NEAR(min_eigenvalue(d), -1.0, 1e-14);
}

TEST(Spectral, Identity) {
  EXPECT_NEAR(spectral_norm(SymMatrix::identity(5)), 1.0, 1e-14);
  EXPECT_NEAR(min_eigenvalue(SymMatrix::identity(5)), 1.0, 1e-14);
}

TEST(MinEigenvalue, MatchesJacobiOracle) {
  RngStream rng(12, StreamId::test, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 49;
    const SymMatrix a = SymMatrix::symmetrized(random_matrix(n, n, rng));
    const double ref = verify::jacobi_min_eigenvalue(a.dense());
    EXPECT_NEAR(min_eigenvalue(a), ref, 1e-10 * std::max(1.0, std::abs(ref))) << "n=" << n;
  }
}

TEST(MinEigenvalue, LanczosPathAgreesWithDense) {
  RngStream rng(13, StreamId::test, 0);
  const SymMatrix a = SymMatrix::symmetrized(random_matrix(60, 60, rng));
  EigenOptions lanczos;
  lanczos.dense_cutoff = 10;
  EXPECT_NEAR(min_eigenvalue(a, lanczos), min_eigenvalue(a), 1e-8);
  EXPECT_NEAR(spectral_norm(a, lanczos), spectral_norm(a), 1e-8);
}

TEST(Spectral, BoundedByFrobenius) {
  RngStream rng(14, StreamId::test, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = random_matrix(1 + trial % 7, 1 + (trial / 7) % 5, rng);
    EXPECT_LE(spectral_norm(a), frobenius_norm(a) * (1.0 + 1e-14));
  }
}

TEST(SymMatrixStorage, WritesAreMirrored) {
  SymMatrix a(3);
  a.set(0, 2, 4.0);
  a.add(2, 0, 1.0);
  EXPECT_EQ(a(0, 2), 5.0);
  EXPECT_EQ(a(2, 0), 5.0);
  EXPECT_THROW(SymMatrix(Matrix{{1.0, 2.0}, {3.0, 1.0}}), InvalidInput);
}

TEST(CubedNorm, ZeroU) {
  RngStream rng(15, StreamId::test, 0);
  const Matrix v = random_matrix(3, 3, rng);
  const auto b = cubed_norm_expansion_bounds(Matrix::Zero(3, 3), v, 1.0);
  const double nv3 = std::pow(frobenius_norm(v), 3);
  EXPECT_NEAR(b.lhs, nv3, 1e-14);
  EXPECT_NEAR(b.rhs1, 4.0 * nv3, 1e-13);
  EXPECT_LE(b.lhs, b.rhs1);
}

TEST(CubedNorm, ZeroV) {
  RngStream rng(16, StreamId::test, 0);
  const Matrix u = random_matrix(3, 3, rng);
  const double c = 0.7;
  const auto b = cubed_norm_expansion_bounds(u, Matrix::Zero(3, 3), c);
  EXPECT_NEAR(b.lhs, std::pow(frobenius_norm(u), 3), 1e-14);
  EXPECT_LE(b.lhs, (1.0 + c) * b.lhs);
  EXPECT_NEAR(b.rhs1, (1.0 + c) * b.lhs, 1e-13);
}

TEST(CubedNorm, RandomTriplesHold) {
  RngStream rng(17, StreamId::test, 0);
  for (int t = 0; t < 1000; ++t) {
    const Matrix u = random_matrix(3, 3, rng);
    const Matrix v = random_matrix(3, 3, rng);
    const double c = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
    const auto b = cubed_norm_expansion_bounds(u, v, c);
    const auto r = verify::cubed_norm_reference(u, v, c);
    ASSERT_GE(b.rhs1 - b.lhs, -1e-12);
    ASSERT_GE(b.rhs2 - b.lhs, -1e-12);
    ASSERT_NEAR(b.lhs, static_cast<double>(r.lhs), 1e-12 * (1.0 + b.lhs));
    ASSERT_NEAR(b.rhs1, static_cast<double>(r.rhs1), 1e-10 * (1.0 + std::abs(b.rhs1)));
    ASSERT_NEAR(b.rhs2, static_cast<double>(r.rhs2), 1e-10 * (1.0 + std::abs(b.rhs2)));
  }
}

TEST(CubedNorm, ShapeMismatch) {
  EXPECT_THROW(cubed_norm_expansion_bounds(Matrix::Zero(2, 2), Matrix::Zero(2, 3), 1.0), InvalidInput);
  EXPECT_THROW(cubed_norm_expansion_bounds(Matrix::Zero(2, 2), Matrix::Zero(2, 2), 0.0), InvalidInput);
}

}  // namespace
