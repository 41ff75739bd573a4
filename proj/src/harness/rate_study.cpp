#include "scrn/harness/rate_study.hpp"

#include "scrn/algorithms.hpp"
#include "scrn/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace scrn::harness {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double confidence) {
  if (x.size() != y.size() || x.size() < 3) throw InvalidInput("fit_loglog: need at least 3 paired points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidInput("fit_loglog: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw InvalidInput("fit_loglog: x values must not all coincide");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    sse += r * r;
  }
  const double dof = static_cast<double>(n - 2);
  const double se = std::sqrt(sse / dof / sxx);
  const boost::math::students_t dist(dof);
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
  fit.ci_low = fit.slope - t * se;
  fit.ci_high = fit.slope + t * se;
  fit.confidence = confidence;
  return fit;
}

RateStudyResult rate_study(const RateStudyOptions& opts) {
  if (opts.K_values.size() < 4) throw InvalidInput("rate_study: need at least 4 values of K");
  const auto [kmin, kmax] = std::minmax_element(opts.K_values.begin(), opts.K_values.end());
  if (*kmin < 1 || static_cast<double>(*kmax) < 10.0 * static_cast<double>(*kmin)) {
    throw InvalidInput("rate_study: K values must span at least one decade");
  }
  if (opts.seeds < 20) throw InvalidInput("rate_study: need at least 20 seeds");
  if (opts.method == ScheduleMethod::fixed) throw InvalidInput("rate_study: needs a theorem schedule");

  QuarticOptions q;
  q.q_min = opts.q_min;
  q.q_max = opts.q_max;
  const auto problem = synthetic_quartic(opts.n, opts.problem_seed, q);
  const Vector x0 = Vector::Constant(opts.n, opts.x0_value);

  OracleConfig oracles;
  if (opts.noisy) {
    oracles.gradient.kind = GradientOracleKind::gaussian_noise;
    oracles.hessian.kind = HessianOracleKind::gaussian_noise;
    oracles.hessian.sigma = opts.hessian_sigma;
  }

  const std::size_t nk = opts.K_values.size();
  const auto seeds = static_cast<std::size_t>(opts.seeds);
  std::vector<double> avg(nk * seeds, 0.0);
  std::vector<ScheduleParams> schedules;
  for (std::uint64_t K : opts.K_values) {
    schedules.push_back(opts.method == ScheduleMethod::pm ? pm_schedule(K, opts.L, opts.L_F)
                                                          : rm_schedule(K, opts.L, opts.L_F, opts.L_H));
  }

  auto job = [&](std::size_t i) {
    const std::size_t ki = i / seeds;
    const std::size_t s = i % seeds;
    const std::uint64_t K = opts.K_values[ki];
    const ScheduleParams& sched = schedules[ki];
    RunOptions ro;
    ro.seed = opts.base_seed + s;
    const RunTrace t = scrn_run(*problem, x0,
                                opts.method == ScheduleMethod::pm ? MomentumKind::polyak
                                                                  : MomentumKind::recursive,
                                sched, oracles, ro);
    if (t.aborted || t.records.size() != K + 1) {
      avg[i] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    double sum = 0.0;
    for (std::uint64_t k = 1; k <= K; ++k) sum += t.records[k].mu_eta;
    avg[i] = sum / static_cast<double>(K);
  };

  const std::size_t total = nk * seeds;
  const int workers = std::max(1, opts.jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < total; ++i) job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) job(i);
      });
    for (auto& t : pool) t.join();
  }

  RateStudyResult result;
  std::vector<double> xs, ys;
  for (std::size_t ki = 0; ki < nk; ++ki) {
    RatePoint p;
    p.K = opts.K_values[ki];
    p.schedule_valid = schedules[ki].valid;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const double v = avg[ki * seeds + s];
      if (!std::isfinite(v)) continue;
      sum += v;
      sum_sq += v * v;
      ++p.runs;
    }
    if (p.runs < 2) throw NumericFailure("rate_study: too many aborted runs", 0.0);
    p.mean_mu = sum / p.runs;
    const double var = std::max(0.0, (sum_sq - p.runs * p.mean_mu * p.mean_mu) / (p.runs - 1));
    p.std_error = std::sqrt(var / p.runs);
    result.points.push_back(p);
    xs.push_back(static_cast<double>(p.K));
    ys.push_back(p.mean_mu);
  }
  result.fit = fit_loglog(xs, ys);
  return result;
}

}  // namespace scrn::harness
