#pragma once

#include "scrn/linalg.hpp"
#include "scrn/problems.hpp"
#include "scrn/rng.hpp"

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace scrn {

enum class GradientOracleKind { exact, gaussian_noise, minibatch };
enum class HessianOracleKind { exact, element_subsample, minibatch, gaussian_noise };

std::string_view to_string(GradientOracleKind kind);
std::string_view to_string(HessianOracleKind kind);

struct GradientOracleSpec {
  GradientOracleKind kind = GradientOracleKind::exact;
  /// Fixed error level. Algorithms pass the scheduled δ_k instead when a
  /// schedule prescribes one.
  double delta = 0.0;
  double batch_fraction = 1.0;  // minibatch only
  std::uint64_t seed = 0;
};

struct HessianOracleSpec {
  HessianOracleKind kind = HessianOracleKind::exact;
  double keep_probability = 0.5;  // element_subsample
  double batch_fraction = 0.5;    // minibatch
  double sigma = 0.0;             // gaussian_noise: target E‖E‖_F³ ≤ σ³
  std::uint64_t seed = 0;
};

void validate(const GradientOracleSpec& spec);
void validate(const HessianOracleSpec& spec);

/// Draws one gradient estimate at x with error level delta_k.
///   exact          ∇f(x)
///   gaussian_noise ∇f(x) + z, z_i ~ N(0, δ_k²/n), so E‖z‖² = δ_k² and
///                  E‖z‖^{3/2} ≤ δ_k^{3/2}
///   minibatch      subset gradient over ⌈batch_fraction·m⌉ indices drawn
///                  without replacement
Vector sample_gradient(const ProblemInstance& problem, const Vector& x,
                       const GradientOracleSpec& spec, double delta_k, RngStream& stream);

/// One realization ξ of the Hessian randomness. It can be applied at any
/// number of points, which is how coupled pairs share ξ.
struct HessianDraw {
  HessianOracleKind kind = HessianOracleKind::exact;
  Matrix scale;                      // element_subsample: 1/p or 0 per entry
  std::vector<std::size_t> indices;  // minibatch
  SymMatrix noise;                   // gaussian_noise
};

HessianDraw draw_hessian_randomness(const ProblemInstance& problem, const HessianOracleSpec& spec,
                                    RngStream& stream);
SymMatrix apply_hessian_draw(const ProblemInstance& problem, const Vector& x,
                             const HessianDraw& draw);

SymMatrix sample_hessian(const ProblemInstance& problem, const Vector& x,
                         const HessianOracleSpec& spec, RngStream& stream);

/// (H(x_prev; ξ), H(x_curr; ξ)) with a single ξ.
std::pair<SymMatrix, SymMatrix> paired_hessian_samples(const ProblemInstance& problem,
                                                       const Vector& x_prev, const Vector& x_curr,
                                                       const HessianOracleSpec& spec,
                                                       RngStream& stream);

/// Per-entry variance of the upper-triangle Gaussian Hessian noise. With
/// X = ‖E‖_F², E X = n²v and E X² = v²(n⁴ + 2n(2n−1)); Cauchy–Schwarz gives
/// E X^{3/2} ≤ (E X · E X²)^{1/2}, which this variance sets equal to σ³.
double gaussian_hessian_entry_variance(Eigen::Index n, double sigma);

/// Sample mean and standard error of a scalar.
struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte-Carlo estimate of E‖H(x;ξ) − ∇²f(x)‖_F³.
MomentEstimate hessian_error_moment(const ProblemInstance& problem, const Vector& x,
                                    const HessianOracleSpec& spec, std::size_t samples,
                                    std::uint64_t seed);

/// Uniform subset of {0..m-1} of the given size, in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t m, std::size_t count,
                                                    RngStream& stream);

}  // namespace scrn
