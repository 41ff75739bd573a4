#include "scrn/oracles.hpp"

#include "scrn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace scrn {

namespace {

std::size_t batch_size(double fraction, std::size_t m) {
  const auto c = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m)));
  return std::clamp<std::size_t>(c, 1, m);
}

void check_point(const Vector& x, std::size_t dim) {
  if (static_cast<std::size_t>(x.size()) != dim) throw InvalidInput("oracle: dimension mismatch");
  if (!x.allFinite()) throw InvalidInput("oracle: non-finite point");
}

}  // namespace

std::string_view to_string(GradientOracleKind kind) {
  switch (kind) {
    case GradientOracleKind::exact: return "exact";
    case GradientOracleKind::gaussian_noise: return "gaussian_noise";
    case GradientOracleKind::minibatch: return "minibatch";
  }
  return "unknown";
}

std::string_view to_string(HessianOracleKind kind) {
  switch (kind) {
    case HessianOracleKind::exact: return "exact";
    case HessianOracleKind::element_subsample: return "element_subsample";
    case HessianOracleKind::minibatch: return "minibatch";
    case HessianOracleKind::gaussian_noise: return "gaussian_noise";
  }
  return "unknown";
}

void validate(const GradientOracleSpec& spec) {
  if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta)) {
    throw InvalidInput("gradient oracle: delta must be a nonnegative number");
  }
  if (spec.kind == GradientOracleKind::minibatch &&
      !(spec.batch_fraction > 0.0 && spec.batch_fraction <= 1.0)) {
    throw InvalidInput("gradient oracle: batch_fraction must lie in (0, 1]");
  }
}

void validate(const HessianOracleSpec& spec) {
  if (spec.kind == HessianOracleKind::element_subsample &&
      !(spec.keep_probability > 0.0 && spec.keep_probability <= 1.0)) {
    throw InvalidInput("hessian oracle: keep_probability must lie in (0, 1]");
  }
  if (spec.kind == HessianOracleKind::minibatch &&
      !(spec.batch_fraction > 0.0 && spec.batch_fraction <= 1.0)) {
    throw InvalidInput("hessian oracle: batch_fraction must lie in (0, 1]");
  }
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw InvalidInput("hessian oracle: sigma must be a nonnegative number");
  }
}

std::vector<std::size_t> sample_without_replacement(std::size_t m, std::size_t count,
                                                    RngStream& stream) {
  if (count > m) throw InvalidInput("sample_without_replacement: count exceeds population");
  std::vector<std::size_t> pool(m);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(pool[i], pool[pick(stream.engine())]);
  }
  pool.resize(count);
  return pool;
}

Vector sample_gradient(const ProblemInstance& problem, const Vector& x,
                       const GradientOracleSpec& spec, double delta_k, RngStream& stream) {
  validate(spec);
  check_point(x, static_cast<std::size_t>(problem.dim()));
  if (!(delta_k >= 0.0) || !std::isfinite(delta_k)) {
    throw InvalidInput("sample_gradient: delta_k must be a nonnegative number");
  }
  switch (spec.kind) {
    case GradientOracleKind::exact:
      return problem.gradient(x);
    case GradientOracleKind::gaussian_noise: {
      Vector g = problem.gradient(x);
      if (delta_k == 0.0) return g;
      const double sd = delta_k / std::sqrt(static_cast<double>(x.size()));
      for (Eigen::Index i = 0; i < g.size(); ++i) g(i) += sd * stream.normal();
      return g;
    }
    case GradientOracleKind::minibatch: {
      const std::size_t m = problem.sample_count();
      if (m == 0) throw InvalidInput("sample_gradient: minibatch needs a finite-sum problem");
      const auto idx = sample_without_replacement(m, batch_size(spec.batch_fraction, m), stream);
      return problem.gradient_subset(x, idx);
    }
  }
  throw InvalidInput("sample_gradient: unknown oracle kind");
}

double gaussian_hessian_entry_variance(Eigen::Index n, double sigma) {
  const double d = static_cast<double>(n);
  const double second = d * d * d * d + 2.0 * d * (2.0 * d - 1.0);
  return std::pow(sigma * sigma * sigma / (d * std::sqrt(second)), 2.0 / 3.0);
}

HessianDraw draw_hessian_randomness(const ProblemInstance& problem, const HessianOracleSpec& spec,
                                    RngStream& stream) {
  validate(spec);
  const Eigen::Index n = problem.dim();
  HessianDraw draw;
  draw.kind = spec.kind;
  switch (spec.kind) {
    case HessianOracleKind::exact:
      break;
    case HessianOracleKind::element_subsample: {
      const double p = spec.keep_probability;
      draw.scale = Matrix::Zero(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
          // One coin per unordered pair keeps the sample symmetric.
          const double v = (p == 1.0 || stream.uniform() < p) ? 1.0 / p : 0.0;
          draw.scale(i, j) = v;
          draw.scale(j, i) = v;
        }
      }
      break;
    }
    case HessianOracleKind::minibatch: {
      const std::size_t m = problem.sample_count();
      if (m == 0) throw InvalidInput("sample_hessian: minibatch needs a finite-sum problem");
      draw.indices = sample_without_replacement(m, batch_size(spec.batch_fraction, m), stream);
      break;
    }
    case HessianOracleKind::gaussian_noise: {
      draw.noise = SymMatrix(n);
      if (spec.sigma == 0.0) break;
      const double sd = std::sqrt(gaussian_hessian_entry_variance(n, spec.sigma));
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) draw.noise.set(i, j, sd * stream.normal());
      break;
    }
  }
  return draw;
}

SymMatrix apply_hessian_draw(const ProblemInstance& problem, const Vector& x,
                             const HessianDraw& draw) {
  check_point(x, static_cast<std::size_t>(problem.dim()));
  switch (draw.kind) {
    case HessianOracleKind::exact:
      return problem.hessian(x);
    case HessianOracleKind::element_subsample:
      return SymMatrix(problem.hessian(x).dense().cwiseProduct(draw.scale));
    case HessianOracleKind::minibatch:
      return problem.hessian_subset(x, draw.indices);
    case HessianOracleKind::gaussian_noise:
      return problem.hessian(x) + draw.noise;
  }
  throw InvalidInput("apply_hessian_draw: unknown oracle kind");
}

SymMatrix sample_hessian(const ProblemInstance& problem, const Vector& x,
                         const HessianOracleSpec& spec, RngStream& stream) {
  check_point(x, static_cast<std::size_t>(problem.dim()));
  return apply_hessian_draw(problem, x, draw_hessian_randomness(problem, spec, stream));
}

std::pair<SymMatrix, SymMatrix> paired_hessian_samples(const ProblemInstance& problem,
                                                       const Vector& x_prev, const Vector& x_curr,
                                                       const HessianOracleSpec& spec,
                                                       RngStream& stream) {
  check_point(x_prev, static_cast<std::size_t>(problem.dim()));
  check_point(x_curr, static_cast<std::size_t>(problem.dim()));
  const HessianDraw draw = draw_hessian_randomness(problem, spec, stream);
  return {apply_hessian_draw(problem, x_prev, draw), apply_hessian_draw(problem, x_curr, draw)};
}

MomentEstimate hessian_error_moment(const ProblemInstance& problem, const Vector& x,
                                    const HessianOracleSpec& spec, std::size_t samples,
                                    std::uint64_t seed) {
  if (samples < 2) throw InvalidInput("hessian_error_moment: need at least 2 samples");
  const SymMatrix h = problem.hessian(x);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    RngStream stream(seed, StreamId::hessian, k);
    const double e = frobenius_norm(sample_hessian(problem, x, spec, stream) - h);
    const double e3 = e * e * e;
    sum += e3;
    sum_sq += e3 * e3;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), samples};
}

}  // namespace scrn
