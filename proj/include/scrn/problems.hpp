#pragma once

#include "scrn/linalg.hpp"

#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

namespace scrn {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Hessian Lipschitz constants in the spectral norm (L) and the Frobenius
/// norm (L_F).
struct LipschitzHints {
  double L = 0.0;
  double L_F = 0.0;
};

/// Smooth objective with exact value/gradient/Hessian. Instances are
/// immutable once built and safe to share across threads.
class ProblemInstance {
 public:
  virtual ~ProblemInstance() = default;

  virtual const std::string& name() const = 0;
  virtual Eigen::Index dim() const = 0;
  /// Number of data samples m (0 for synthetic objectives).
  virtual std::size_t sample_count() const { return 0; }

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual SymMatrix hessian(const Vector& x) const = 0;

  /// Unbiased gradient/Hessian estimates from a subset of the samples.
  /// Throws InvalidInput for problems without a finite-sum structure.
  virtual Vector gradient_subset(const Vector& x, std::span<const std::size_t> idx) const;
  virtual SymMatrix hessian_subset(const Vector& x, std::span<const std::size_t> idx) const;

  /// Known lower bound f_low; -inf when the objective is unbounded below.
  virtual double lower_bound() const = 0;
  virtual std::optional<LipschitzHints> lipschitz_hints() const { return std::nullopt; }
};

using ProblemPtr = std::shared_ptr<const ProblemInstance>;

/// λ Σ_j (γx_j)²/(1+(γx_j)²). Bounded in [0, λn].
struct NonconvexRegularizer {
  double lambda = 0.0;
  double gamma = 0.0;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Vector hessian_diagonal(const Vector& x) const;
  /// sup |third derivative| per coordinate.
  double third_derivative_bound() const;
};

/// Σ_i c·ℓ(a_iᵀx, b_i) + regularizer, with A stored as sparse rows.
struct GlmData {
  SparseRows A;  // m × n
  Vector b;      // length m
};

struct LogisticOptions {
  double lambda = 0.001;
  double gamma = 10.0;
  /// true: standard negative log-likelihood (minimized by fitting the
  /// labels). false: the log-likelihood with its sign as written, which is
  /// unbounded below.
  bool negate_data_term = true;
};

/// Σ_i [b_i ln φ(a_iᵀx) + (1−b_i) ln(1−φ(a_iᵀx))] (optionally negated)
/// + λ Σ_j (γx_j)²/(1+(γx_j)²), φ the logistic sigmoid. Labels in {0,1}.
ProblemPtr logistic_objective(GlmData data, const LogisticOptions& opts = {});

/// (1/m) Σ_i (b_i − φ(a_iᵀx))² + λ Σ_j (γx_j)²/(1+(γx_j)²).
ProblemPtr nls_objective(GlmData data, double lambda = 0.001, double gamma = 1.0);

/// (1/m) Σ_i ρ(b_i − a_iᵀx), ρ(t) = ln(t²/2 + 1). The regularizer is off
/// unless `reg` is given.
ProblemPtr robust_regression_objective(GlmData data,
                                       std::optional<NonconvexRegularizer> reg = std::nullopt);

struct QuarticOptions {
  /// Eigenvalues of Q are drawn uniformly from [q_min, q_max].
  double q_min = 0.0;
  double q_max = 1.0;
  /// Planted minimizer entries drawn uniformly from [-x_star_scale, x_star_scale].
  double x_star_scale = 1.0;
  /// Lipschitz hints are valid on the ball of this radius around x*.
  double region_radius = 2.0;
};

/// ¼‖x − x*‖⁴ + ½ (x − x*)ᵀQ(x − x*), Q ⪰ 0 random, x* planted.
class SyntheticQuartic final : public ProblemInstance {
 public:
  SyntheticQuartic(Vector x_star, SymMatrix q, double region_radius);

  const std::string& name() const override { return name_; }
  Eigen::Index dim() const override { return x_star_.size(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  SymMatrix hessian(const Vector& x) const override;
  double lower_bound() const override { return 0.0; }
  std::optional<LipschitzHints> lipschitz_hints() const override;

  const Vector& x_star() const { return x_star_; }
  const SymMatrix& q() const { return q_; }

 private:
  std::string name_ = "quartic";
  Vector x_star_;
  SymMatrix q_;
  double region_radius_;
};

std::shared_ptr<const SyntheticQuartic> synthetic_quartic(Eigen::Index n, std::uint64_t seed,
                                                          const QuarticOptions& opts = {});

/// Random binary-classification data: rows with i.i.d. N(0,1)/√n features
/// (dense), labels from a planted logistic model, in {0,1}.
GlmData synthetic_classification(std::size_t m, Eigen::Index n, std::uint64_t seed);

/// Central finite-difference gradient with step h.
Vector finite_difference_gradient(const ProblemInstance& p, const Vector& x, double h = 1e-6);
/// Central finite-difference Hessian-vector product from gradients.
Vector finite_difference_hessian_vector(const ProblemInstance& p, const Vector& x,
                                        const Vector& v, double h = 1e-6);

}  // namespace scrn
