#include "scrn/schedules.hpp"

#include "scrn/errors.hpp"
#include "scrn/linalg.hpp"
#include "scrn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scrn {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be positive");
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be nonnegative");
}

std::uint64_t saturating_ceil(double v) {
  constexpr double kMax = 1.8e19;
  if (!(v < kMax)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::ceil(std::max(v, 0.0)));
}

}  // namespace

std::string_view to_string(ScheduleMethod method) {
  switch (method) {
    case ScheduleMethod::pm: return "pm";
    case ScheduleMethod::rm: return "rm";
    case ScheduleMethod::fixed: return "fixed";
  }
  return "unknown";
}

ScheduleParams pm_schedule(std::uint64_t K, double L, double L_F) {
  if (K < 1) throw InvalidInput("pm_schedule: K must be >= 1");
  require_positive(L, "pm_schedule: L");
  require_positive(L_F, "pm_schedule: L_F");
  const double k27 = std::pow(static_cast<double>(K), 2.0 / 7.0);
  ScheduleParams s;
  s.method = ScheduleMethod::pm;
  s.K = K;
  s.L = L;
  s.L_F = L_F;
  s.eta = 1.0 / (9.0 * k27);
  s.theta = 7.0 * L_F / (3.0 * k27);
  s.delta = 1.0 / (9.0 * std::pow(static_cast<double>(K), 4.0 / 7.0));
  s.validity_threshold = std::max({std::pow(2.0 * L / 9.0, 3.5), std::pow(7.0 * L_F / 3.0, 3.5), 1.0});
  s.valid = static_cast<double>(K) >= s.validity_threshold;
  return s;
}

ScheduleParams rm_schedule(std::uint64_t K, double L, double L_F, double L_H) {
  if (K < 1) throw InvalidInput("rm_schedule: K must be >= 1");
  require_positive(L, "rm_schedule: L");
  require_positive(L_F, "rm_schedule: L_F");
  require_nonnegative(L_H, "rm_schedule: L_H");
  const double kd = static_cast<double>(K);
  const double S = L_F * L_F * L_F + L_H * L_H * L_H;
  ScheduleParams s;
  s.method = ScheduleMethod::rm;
  s.K = K;
  s.L = L;
  s.L_F = L_F;
  s.L_H = L_H;
  s.eta = 1.0 / (17.0 * std::pow(kd, 0.2));
  s.theta = 625.0 * std::pow(S, 2.0 / 3.0) / (289.0 * std::pow(kd, 0.4));
  s.delta = 1.0 / (17.0 * std::pow(kd, 0.6));
  s.validity_threshold = std::max({std::pow(2.0 * L / 17.0, 5.0), 7.0 * std::pow(S, 5.0 / 3.0), 1.0});
  s.valid = kd >= s.validity_threshold;
  return s;
}

ScheduleParams fixed_schedule(std::uint64_t K, double eta, double theta, double delta, double L) {
  if (K < 1) throw InvalidInput("fixed_schedule: K must be >= 1");
  require_positive(eta, "fixed_schedule: eta");
  require_nonnegative(delta, "fixed_schedule: delta");
  require_nonnegative(L, "fixed_schedule: L");
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidInput("fixed_schedule: theta must lie in (0, 1]");
  ScheduleParams s;
  s.method = ScheduleMethod::fixed;
  s.K = K;
  s.L = L;
  s.eta = eta;
  s.theta = theta;
  s.delta = delta;
  s.valid = L == 0.0 || eta < 1.0 / (2.0 * L);
  return s;
}

ComplexityConstants complexity_constants(const ProblemConstants& c, ScheduleMethod method) {
  if (!std::isfinite(c.f0) || !std::isfinite(c.f_low)) {
    throw InvalidInput("complexity_constants: f0 and f_low must be finite");
  }
  require_nonnegative(c.sigma, "complexity_constants: sigma");
  require_positive(c.L, "complexity_constants: L");
  require_positive(c.L_F, "complexity_constants: L_F");
  require_positive(c.eps_g, "complexity_constants: eps_g");
  require_positive(c.eps_H, "complexity_constants: eps_H");
  const double s3 = c.sigma * c.sigma * c.sigma;
  const double gap = c.f0 - c.f_low;
  ComplexityConstants out;
  switch (method) {
    case ScheduleMethod::pm: {
      out.M = 54.0 * (gap + s3 / (c.L_F * c.L_F) + std::pow(c.L_F, 1.5) * s3 + 1.0);
      out.K_min_real = std::max({std::pow(std::pow(3.0 * out.M, 2.0 / 3.0) / c.eps_g, 1.75),
                                 std::pow(std::cbrt(108.0 * out.M) / c.eps_H, 7.0),
                                 std::pow(2.0 * c.L / 9.0, 3.5),
                                 std::pow(7.0 * c.L_F / 3.0, 3.5), 1.0});
      break;
    }
    case ScheduleMethod::rm: {
      require_nonnegative(c.L_H, "complexity_constants: L_H");
      const double S = c.L_F * c.L_F * c.L_F + c.L_H * c.L_H * c.L_H;
      out.M = 75.0 * (gap + s3 * std::pow(S, -2.0 / 3.0) + S * s3 + 1.0);
      out.K_min_real = std::max({std::pow(std::pow(3.0 * out.M, 2.0 / 3.0) / c.eps_g, 5.0 / 3.0),
                                 std::pow(std::cbrt(281.0 * out.M) / c.eps_H, 5.0),
                                 std::pow(2.0 * c.L / 17.0, 5.0),
                                 7.0 * std::pow(S, 5.0 / 3.0), 1.0});
      break;
    }
    case ScheduleMethod::fixed:
      throw InvalidInput("complexity_constants: no complexity bound for a fixed schedule");
  }
  out.K_min = saturating_ceil(out.K_min_real);
  return out;
}

double pm_potential_weight(double eta, double L_F) {
  require_positive(eta, "pm_potential_weight: eta");
  require_positive(L_F, "pm_potential_weight: L_F");
  return 7.0 * eta / (6.0 * L_F);
}

double rm_potential_weight(double L_F, double L_H) {
  const double S = L_F * L_F * L_F + L_H * L_H * L_H;
  require_positive(S, "rm_potential_weight: L_F^3 + L_H^3");
  return 25.0 / (648.0 * std::pow(S, 2.0 / 3.0));
}

double pm_next_potential_weight(double theta, double eta, double L_F) {
  require_positive(eta, "pm_next_potential_weight: eta");
  require_positive(L_F, "pm_next_potential_weight: L_F");
  return theta * theta / (378.0 * L_F * L_F * L_F * eta);
}

double rm_next_potential_weight(double theta, double eta, double L_F, double L_H) {
  require_positive(eta, "rm_next_potential_weight: eta");
  const double S = L_F * L_F * L_F + L_H * L_H * L_H;
  require_positive(S, "rm_next_potential_weight: L_F^3 + L_H^3");
  return std::sqrt(theta) / (648.0 * S * eta);
}

LipschitzEstimate estimate_lipschitz(const ProblemInstance& problem, const Vector& center,
                                     double radius, std::uint64_t seed, int segments,
                                     double step, double safety) {
  if (center.size() != problem.dim()) throw InvalidInput("estimate_lipschitz: dimension mismatch");
  require_positive(radius, "estimate_lipschitz: radius");
  require_positive(step, "estimate_lipschitz: step");
  require_positive(safety, "estimate_lipschitz: safety");
  if (segments < 1) throw InvalidInput("estimate_lipschitz: segments must be >= 1");

  RngStream rng(seed, StreamId::test, 0x11);
  LipschitzEstimate est;
  const Eigen::Index n = problem.dim();
  for (int s = 0; s < segments; ++s) {
    Vector x(n);
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = center(i) + radius * (2.0 * rng.uniform() - 1.0);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = rng.normal();
    d *= step / d.norm();
    const SymMatrix diff = problem.hessian(x + d) - problem.hessian(x);
    est.L = std::max(est.L, spectral_norm(diff) / step);
    est.L_F = std::max(est.L_F, frobenius_norm(diff) / step);
  }
  est.L *= safety;
  est.L_F *= safety;
  return est;
}

}  // namespace scrn
