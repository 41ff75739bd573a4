#pragma once

#include "scrn/cubic_subproblem.hpp"
#include "scrn/linalg.hpp"
#include "scrn/rng.hpp"

#include <vector>

// Reference computations used only to check the library. Everything here
// is written from scratch in long double and shares no code path with the
// solvers under test.
namespace scrn::verify {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

struct JacobiEigen {
  LVector values;   // ascending
  LMatrix vectors;  // columns
};

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
JacobiEigen jacobi_eigen(const Matrix& a);
double jacobi_min_eigenvalue(const Matrix& a);

/// Global minimum value of gᵀs + ½sᵀMs + ‖s‖³/(6η) from the concave dual
///   sup_{r > r_min} −½ ĝᵀ(Λ + r/(2η))⁻¹ĝ − r³/(12η),
/// maximized by golden-section search in long double.
long double cubic_model_optimum(const CubicModel& model);

/// Best model value over several descent runs (Barzilai–Borwein steps with
/// an Armijo safeguard) from random and eigenvector-based starts.
double cubic_model_multistart(const CubicModel& model, int starts, std::uint64_t seed);

/// Independent evaluations of the cubed Frobenius-norm expansion.
struct CubedNormReference {
  long double lhs;
  long double rhs1;
  long double rhs2;
};
CubedNormReference cubed_norm_reference(const Matrix& u, const Matrix& v, double c);

/// Random symmetric matrix with eigenvalues drawn uniformly from [lo, hi].
Matrix random_symmetric(Eigen::Index n, double lo, double hi, RngStream& rng);
Matrix random_orthogonal(Eigen::Index n, RngStream& rng);

/// A model in the hard case: λ_min(M) < 0, g ⟂ its eigenvector, and the
/// step orthogonal to it shorter than −2ηλ_min.
CubicModel random_hard_case_model(Eigen::Index n, RngStream& rng);

}  // namespace scrn::verify
