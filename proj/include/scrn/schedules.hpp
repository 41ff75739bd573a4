#pragma once

#include "scrn/problems.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace scrn {

enum class ScheduleMethod { pm, rm, fixed };

std::string_view to_string(ScheduleMethod method);

/// Step size η, momentum θ and gradient error level δ for a fixed horizon
/// K. The theorem schedules are constant in k.
struct ScheduleParams {
  ScheduleMethod method = ScheduleMethod::fixed;
  std::uint64_t K = 1;
  double L = 0.0;
  double L_F = 0.0;
  double L_H = 0.0;
  double eta = 0.0;
  double theta = 1.0;
  double delta = 0.0;
  /// Smallest K for which η < 1/(2L) and θ ∈ (0,1) are guaranteed.
  double validity_threshold = 1.0;
  bool valid = true;

  double eta_at(std::uint64_t) const { return eta; }
  double theta_at(std::uint64_t) const { return theta; }
  double delta_at(std::uint64_t) const { return delta; }
};

/// η = 1/(9K^{2/7}), θ = 7L_F/(3K^{2/7}), δ = 1/(9K^{4/7});
/// valid iff K ≥ max{(2L/9)^{7/2}, (7L_F/3)^{7/2}, 1}.
ScheduleParams pm_schedule(std::uint64_t K, double L, double L_F);

/// η = 1/(17K^{1/5}), θ = 625(L_F³+L_H³)^{2/3}/(289K^{2/5}), δ = 1/(17K^{3/5});
/// valid iff K ≥ max{(2L/17)⁵, 7(L_F³+L_H³)^{5/3}, 1}.
ScheduleParams rm_schedule(std::uint64_t K, double L, double L_F, double L_H);

/// User-chosen constants. Valid iff η > 0, θ ∈ (0,1], δ ≥ 0, and
/// η < 1/(2L) when L > 0 is given.
ScheduleParams fixed_schedule(std::uint64_t K, double eta, double theta, double delta,
                              double L = 0.0);

struct ProblemConstants {
  double f0 = 0.0;
  double f_low = 0.0;
  double sigma = 0.0;
  double L = 0.0;
  double L_F = 0.0;
  double L_H = 0.0;  // rm only
  double eps_g = 0.0;
  double eps_H = 0.0;
};

struct ComplexityConstants {
  double M = 0.0;
  /// The K lower bound as a real number and rounded up (saturating).
  double K_min_real = 0.0;
  std::uint64_t K_min = 0;
};

/// M_pm = 54(f0 − f_low + σ³L_F^{−2} + L_F^{3/2}σ³ + 1) or
/// M_rm = 75(f0 − f_low + σ³S^{−2/3} + Sσ³ + 1), S = L_F³ + L_H³, and the
/// horizon beyond which the sampled iterate is an (ε_g, ε_H)-SSOSP.
ComplexityConstants complexity_constants(const ProblemConstants& c, ScheduleMethod method);

/// Preset potential weights used in the convergence proofs:
/// pm: 7η/(6L_F); rm: 25/(648 S^{2/3}).
double pm_potential_weight(double eta, double L_F);
double rm_potential_weight(double L_F, double L_H);

/// Next potential weight from the recursions
/// pm: θ²/(378 L_F³ η); rm: θ^{1/2}/(648 S η).
double pm_next_potential_weight(double theta, double eta, double L_F);
double rm_next_potential_weight(double theta, double eta, double L_F, double L_H);

struct LipschitzEstimate {
  double L = 0.0;
  double L_F = 0.0;
};

/// Empirical Hessian Lipschitz constants: max over random segments
/// [x, x + d] (x uniform in the box of half-width `radius` around `center`,
/// ‖d‖ = `step`) of ‖∇²f(x+d) − ∇²f(x)‖/‖d‖, times `safety`.
LipschitzEstimate estimate_lipschitz(const ProblemInstance& problem, const Vector& center,
                                     double radius, std::uint64_t seed, int segments = 100,
                                     double step = 1e-2, double safety = 1.5);

}  // namespace scrn
