#include "scrn/problems.hpp"

#include "scrn/errors.hpp"
#include "scrn/rng.hpp"

#include <Eigen/QR>

#include <cmath>
#include <vector>

namespace scrn {

namespace {

// Suprema over the real line, evaluated on a fine grid and rounded up.
constexpr double kSupRegThird = 4.6686;         // |d³/dy³ y²/(1+y²)|
constexpr double kSupSigmoidThird = 0.125;      // |φ'''|
constexpr double kSupSigmoidD1D2 = 0.017889;    // |φ'φ''|
constexpr double kSupRobustThird = 1.0304;      // |ρ'''|, ρ(t) = ln(t²/2+1)

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

void check_dim(const ProblemInstance& p, const Vector& x) {
  if (x.size() != p.dim()) throw InvalidInput(p.name() + ": dimension mismatch");
  if (!x.allFinite()) throw InvalidInput(p.name() + ": non-finite point");
}

enum class Loss { logistic_nll, logistic_as_written, nls, robust };

struct Derivs {
  double v;
  double d1;
  double d2;
};

Derivs eval_loss(Loss loss, double t, double b) {
  switch (loss) {
    case Loss::logistic_nll:
    case Loss::logistic_as_written: {
      const double p = sigmoid(t);
      // −[b ln φ(t) + (1−b) ln(1−φ(t))] = softplus(t) − b t
      Derivs d{softplus(t) - b * t, p - b, p * (1.0 - p)};
      if (loss == Loss::logistic_as_written) d = {-d.v, -d.d1, -d.d2};
      return d;
    }
    case Loss::nls: {
      const double p = sigmoid(t);
      const double p1 = p * (1.0 - p);
      const double p2 = p1 * (1.0 - 2.0 * p);
      const double res = b - p;
      return {res * res, -2.0 * res * p1, 2.0 * (p1 * p1 - res * p2)};
    }
    case Loss::robust: {
      // ρ(b − t); dℓ/dt = −ρ'(r), d²ℓ/dt² = ρ''(r)
      const double r = b - t;
      const double u = 0.5 * r * r;
      return {std::log1p(u), -r / (u + 1.0), (1.0 - u) / ((u + 1.0) * (u + 1.0))};
    }
  }
  return {0.0, 0.0, 0.0};
}

class GlmProblem final : public ProblemInstance {
 public:
  GlmProblem(std::string name, GlmData data, Loss loss, double scale,
             std::optional<NonconvexRegularizer> reg)
      : name_(std::move(name)), data_(std::move(data)), loss_(loss), scale_(scale), reg_(reg) {
    data_.A.makeCompressed();
  }

  const std::string& name() const override { return name_; }
  Eigen::Index dim() const override { return data_.A.cols(); }
  std::size_t sample_count() const override { return static_cast<std::size_t>(data_.A.rows()); }

  double value(const Vector& x) const override {
    check_dim(*this, x);
    const Vector t = data_.A * x;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) acc += eval_loss(loss_, t(i), data_.b(i)).v;
    return scale_ * acc + (reg_ ? reg_->value(x) : 0.0);
  }

  Vector gradient(const Vector& x) const override {
    check_dim(*this, x);
    const Vector t = data_.A * x;
    Vector w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) w(i) = scale_ * eval_loss(loss_, t(i), data_.b(i)).d1;
    Vector g = data_.A.transpose() * w;
    if (reg_) g += reg_->gradient(x);
    return g;
  }

  SymMatrix hessian(const Vector& x) const override {
    check_dim(*this, x);
    Matrix upper = Matrix::Zero(dim(), dim());
    for (Eigen::Index i = 0; i < data_.A.rows(); ++i) accumulate_row(upper, x, i, scale_);
    return finish_hessian(upper, x);
  }

  Vector gradient_subset(const Vector& x, std::span<const std::size_t> idx) const override {
    check_dim(*this, x);
    check_subset(idx);
    const double factor = scale_ * static_cast<double>(sample_count()) / static_cast<double>(idx.size());
    Vector g = Vector::Zero(dim());
    for (std::size_t i : idx) {
      const auto row = static_cast<Eigen::Index>(i);
      const double t = data_.A.row(row).dot(x);
      const double w = factor * eval_loss(loss_, t, data_.b(row)).d1;
      for (SparseRows::InnerIterator it(data_.A, row); it; ++it) g(it.col()) += w * it.value();
    }
    if (reg_) g += reg_->gradient(x);
    return g;
  }

  SymMatrix hessian_subset(const Vector& x, std::span<const std::size_t> idx) const override {
    check_dim(*this, x);
    check_subset(idx);
    const double factor = scale_ * static_cast<double>(sample_count()) / static_cast<double>(idx.size());
    Matrix upper = Matrix::Zero(dim(), dim());
    for (std::size_t i : idx) accumulate_row(upper, x, static_cast<Eigen::Index>(i), factor);
    return finish_hessian(upper, x);
  }

  double lower_bound() const override {
    return loss_ == Loss::logistic_as_written ? -std::numeric_limits<double>::infinity() : 0.0;
  }

  std::optional<LipschitzHints> lipschitz_hints() const override {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < data_.A.rows(); ++i) {
      const double a = data_.A.row(i).norm();
      double c3 = 0.0;
      switch (loss_) {
        case Loss::logistic_nll:
        case Loss::logistic_as_written: c3 = kSupSigmoidThird; break;
        case Loss::nls: c3 = 6.0 * kSupSigmoidD1D2 + 2.0 * (std::abs(data_.b(i)) + 1.0) * kSupSigmoidThird; break;
        case Loss::robust: c3 = kSupRobustThird; break;
      }
      acc += c3 * a * a * a;
    }
    const double bound = scale_ * acc + (reg_ ? reg_->third_derivative_bound() : 0.0);
    return LipschitzHints{bound, bound};
  }

 private:
  void check_subset(std::span<const std::size_t> idx) const {
    if (idx.empty()) throw InvalidInput(name_ + ": empty sample subset");
    for (std::size_t i : idx) {
      if (i >= sample_count()) throw InvalidInput(name_ + ": sample index out of range");
    }
  }

  // Adds weight·ℓ''(a_iᵀx)·a_i a_iᵀ into the upper triangle.
  void accumulate_row(Matrix& upper, const Vector& x, Eigen::Index row, double weight) const {
    const double t = data_.A.row(row).dot(x);
    const double w = weight * eval_loss(loss_, t, data_.b(row)).d2;
    if (w == 0.0) return;
    for (SparseRows::InnerIterator p(data_.A, row); p; ++p) {
      const double wp = w * p.value();
      for (SparseRows::InnerIterator q = p; q; ++q) upper(p.col(), q.col()) += wp * q.value();
    }
  }

  SymMatrix finish_hessian(Matrix& upper, const Vector& x) const {
    if (reg_) upper.diagonal() += reg_->hessian_diagonal(x);
    return SymMatrix::from_upper(upper);
  }

  std::string name_;
  GlmData data_;
  Loss loss_;
  double scale_;
  std::optional<NonconvexRegularizer> reg_;
};

void validate_data(const GlmData& d, const char* who) {
  if (d.A.rows() != d.b.size()) throw InvalidInput(std::string(who) + ": rows(A) != len(b)");
  if (d.A.cols() < 1) throw InvalidInput(std::string(who) + ": need at least one feature");
  if (!d.b.allFinite()) throw InvalidInput(std::string(who) + ": non-finite labels");
}

void validate_reg(double lambda, double gamma, const char* who) {
  if (!(lambda >= 0.0) || !(gamma >= 0.0) || !std::isfinite(lambda) || !std::isfinite(gamma)) {
    throw InvalidInput(std::string(who) + ": lambda and gamma must be nonnegative");
  }
}

}  // namespace

Vector ProblemInstance::gradient_subset(const Vector&, std::span<const std::size_t>) const {
  throw InvalidInput(name() + ": problem has no finite-sum structure");
}

SymMatrix ProblemInstance::hessian_subset(const Vector&, std::span<const std::size_t>) const {
  throw InvalidInput(name() + ": problem has no finite-sum structure");
}

double NonconvexRegularizer::value(const Vector& x) const {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double u = gamma * gamma * x(j) * x(j);
    acc += u / (1.0 + u);
  }
  return lambda * acc;
}

Vector NonconvexRegularizer::gradient(const Vector& x) const {
  Vector g(x.size());
  const double g2 = gamma * gamma;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double u = g2 * x(j) * x(j);
    g(j) = lambda * 2.0 * g2 * x(j) / ((1.0 + u) * (1.0 + u));
  }
  return g;
}

Vector NonconvexRegularizer::hessian_diagonal(const Vector& x) const {
  Vector h(x.size());
  const double g2 = gamma * gamma;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double u = g2 * x(j) * x(j);
    h(j) = lambda * 2.0 * g2 * (1.0 - 3.0 * u) / ((1.0 + u) * (1.0 + u) * (1.0 + u));
  }
  return h;
}

double NonconvexRegularizer::third_derivative_bound() const {
  return lambda * gamma * gamma * gamma * kSupRegThird;
}

ProblemPtr logistic_objective(GlmData data, const LogisticOptions& opts) {
  validate_data(data, "logistic_objective");
  validate_reg(opts.lambda, opts.gamma, "logistic_objective");
  for (Eigen::Index i = 0; i < data.b.size(); ++i) {
    if (data.b(i) != 0.0 && data.b(i) != 1.0) {
      throw InvalidInput("logistic_objective: labels must be in {0,1}");
    }
  }
  return std::make_shared<GlmProblem>(
      "logistic", std::move(data),
      opts.negate_data_term ? Loss::logistic_nll : Loss::logistic_as_written, 1.0,
      NonconvexRegularizer{opts.lambda, opts.gamma});
}

ProblemPtr nls_objective(GlmData data, double lambda, double gamma) {
  validate_data(data, "nls_objective");
  validate_reg(lambda, gamma, "nls_objective");
  if (data.A.rows() == 0) throw InvalidInput("nls_objective: need at least one sample");
  const double scale = 1.0 / static_cast<double>(data.A.rows());
  return std::make_shared<GlmProblem>("nls", std::move(data), Loss::nls, scale,
                                      NonconvexRegularizer{lambda, gamma});
}

ProblemPtr robust_regression_objective(GlmData data, std::optional<NonconvexRegularizer> reg) {
  validate_data(data, "robust_regression_objective");
  if (data.A.rows() == 0) throw InvalidInput("robust_regression_objective: need at least one sample");
  if (reg) validate_reg(reg->lambda, reg->gamma, "robust_regression_objective");
  const double scale = 1.0 / static_cast<double>(data.A.rows());
  return std::make_shared<GlmProblem>("robust", std::move(data), Loss::robust, scale, reg);
}

SyntheticQuartic::SyntheticQuartic(Vector x_star, SymMatrix q, double region_radius)
    : x_star_(std::move(x_star)), q_(std::move(q)), region_radius_(region_radius) {
  if (q_.dim() != x_star_.size()) throw InvalidInput("SyntheticQuartic: dimension mismatch");
  if (!(region_radius_ > 0.0)) throw InvalidInput("SyntheticQuartic: region radius must be positive");
}

double SyntheticQuartic::value(const Vector& x) const {
  check_dim(*this, x);
  const Vector d = x - x_star_;
  const double r2 = d.squaredNorm();
  return 0.25 * r2 * r2 + 0.5 * d.dot(q_.dense() * d);
}

Vector SyntheticQuartic::gradient(const Vector& x) const {
  check_dim(*this, x);
  const Vector d = x - x_star_;
  return d.squaredNorm() * d + q_.dense() * d;
}

SymMatrix SyntheticQuartic::hessian(const Vector& x) const {
  check_dim(*this, x);
  const Vector d = x - x_star_;
  Matrix h = 2.0 * d * d.transpose();
  h.diagonal().array() += d.squaredNorm();
  h += q_.dense();
  return SymMatrix::from_upper(h);
}

std::optional<LipschitzHints> SyntheticQuartic::lipschitz_hints() const {
  // Third derivative along h: 2(dᵀh)I + 2(hdᵀ + dhᵀ), with ‖d‖ ≤ R.
  const double n = static_cast<double>(dim());
  return LipschitzHints{6.0 * region_radius_, (2.0 * std::sqrt(n) + 4.0) * region_radius_};
}

std::shared_ptr<const SyntheticQuartic> synthetic_quartic(Eigen::Index n, std::uint64_t seed,
                                                          const QuarticOptions& opts) {
  if (n < 1) throw InvalidInput("synthetic_quartic: n must be >= 1");
  if (!(opts.q_min >= 0.0) || !(opts.q_max >= opts.q_min)) {
    throw InvalidInput("synthetic_quartic: need 0 <= q_min <= q_max");
  }
  RngStream rng(seed, StreamId::problem_data, 0);
  Vector x_star(n);
  for (Eigen::Index i = 0; i < n; ++i) x_star(i) = opts.x_star_scale * (2.0 * rng.uniform() - 1.0);

  Matrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  const Matrix u = Eigen::HouseholderQR<Matrix>(g).householderQ();
  Vector lam(n);
  for (Eigen::Index i = 0; i < n; ++i) lam(i) = opts.q_min + (opts.q_max - opts.q_min) * rng.uniform();
  const SymMatrix q = SymMatrix::symmetrized(u * lam.asDiagonal() * u.transpose());
  return std::make_shared<SyntheticQuartic>(std::move(x_star), q, opts.region_radius);
}

GlmData synthetic_classification(std::size_t m, Eigen::Index n, std::uint64_t seed) {
  if (m == 0 || n < 1) throw InvalidInput("synthetic_classification: need m >= 1 and n >= 1");
  RngStream rng(seed, StreamId::problem_data, 1);
  Vector w(n);
  for (Eigen::Index j = 0; j < n; ++j) w(j) = 2.0 * rng.normal();
  const double s = 1.0 / std::sqrt(static_cast<double>(n));

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m * static_cast<std::size_t>(n));
  GlmData d;
  d.b.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    double t = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = s * rng.normal();
      trips.emplace_back(static_cast<Eigen::Index>(i), j, a);
      t += a * w(j);
    }
    d.b(static_cast<Eigen::Index>(i)) = rng.uniform() < sigmoid(t) ? 1.0 : 0.0;
  }
  d.A.resize(static_cast<Eigen::Index>(m), n);
  d.A.setFromTriplets(trips.begin(), trips.end());
  d.A.makeCompressed();
  return d;
}

Vector finite_difference_gradient(const ProblemInstance& p, const Vector& x, double h) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const double fp = p.value(xp);
    xp(i) = x(i) - h;
    const double fm = p.value(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Vector finite_difference_hessian_vector(const ProblemInstance& p, const Vector& x,
                                        const Vector& v, double h) {
  return (p.gradient(x + h * v) - p.gradient(x - h * v)) / (2.0 * h);
}

}  // namespace scrn
