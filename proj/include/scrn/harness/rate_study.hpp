#pragma once

#include "scrn/schedules.hpp"

#include <cstdint>
#include <vector>

namespace scrn::harness {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Two-sided confidence interval on the slope (Student t).
  double ci_low = 0.0;
  double ci_high = 0.0;
  double confidence = 0.95;
};

/// Least-squares fit of log y against log x. Needs at least 3 points, all
/// positive.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                     double confidence = 0.95);

struct RateStudyOptions {
  ScheduleMethod method = ScheduleMethod::pm;
  std::vector<std::uint64_t> K_values{64, 128, 256, 512, 1024};
  int seeds = 20;
  std::uint64_t base_seed = 1;
  /// Quartic test problem.
  Eigen::Index n = 10;
  std::uint64_t problem_seed = 7;
  double q_min = 0.5;
  double q_max = 2.0;
  /// Schedule constants. θ depends on L_F (pm) or L_F³+L_H³ (rm); L only
  /// enters the validity check.
  double L = 12.0;
  double L_F = 1.0;
  double L_H = 0.0;
  /// Gaussian oracle noise: gradient error follows the scheduled δ_K, the
  /// Hessian noise has E‖E‖_F³ ≤ hessian_sigma³.
  bool noisy = true;
  double hessian_sigma = 0.1;
  double x0_value = 0.5;
  int jobs = 1;
};

struct RatePoint {
  std::uint64_t K = 0;
  double mean_mu = 0.0;  // estimate of E[μ_η(x^{ι_K})]
  double std_error = 0.0;
  int runs = 0;
  bool schedule_valid = true;
};

struct RateStudyResult {
  std::vector<RatePoint> points;
  LogLogFit fit;
};

/// For each K and seed, runs the theorem schedule for K iterations and
/// averages μ_η over x^1..x^K, which is E[μ_η(x^{ι_K}) | trajectory] for ι_K
/// uniform on {1,…,K}. Throws InvalidInput unless there are ≥ 4 values of
/// K spanning a decade and ≥ 20 seeds.
RateStudyResult rate_study(const RateStudyOptions& opts);

}  // namespace scrn::harness
