#include "scrn/errors.hpp"
#include "scrn/oracles.hpp"
#include "scrn/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace scrn;

ProblemPtr small_logistic(std::size_t m = 40, Eigen::Index n = 5) {
  return logistic_objective(synthetic_classification(m, n, 3));
}

TEST(Gradient, ExactIsBitwiseEvaluator) {
  const auto p = small_logistic();
  const Vector x = Vector::Constant(5, 0.3);
  RngStream rng(1, StreamId::gradient, 0);
  GradientOracleSpec spec;
  EXPECT_EQ(sample_gradient(*p, x, spec, 0.5, rng), p->gradient(x));
}

TEST(Gradient, GaussianWithZeroDeltaIsExact) {
  const auto p = small_logistic();
  const Vector x = Vector::Constant(5, -0.2);
  RngStream rng(1, StreamId::gradient, 0);
  GradientOracleSpec spec{GradientOracleKind::gaussian_noise, 0.0, 1.0, 0};
  EXPECT_EQ(sample_gradient(*p, x, spec, 0.0, rng), p->gradient(x));
}

TEST(Gradient, GaussianMomentBound) {
  const auto p = synthetic_quartic(10, 2);
  const Vector x = Vector::Constant(10, 0.1);
  const Vector g = p->gradient(x);
  GradientOracleSpec spec{GradientOracleKind::gaussian_noise, 0.1, 1.0, 0};
  RngStream rng(4, StreamId::gradient, 0);
  const int N = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < N; ++i) {
    const double e = std::pow((sample_gradient(*p, x, spec, 0.1, rng) - g).norm(), 1.5);
    sum += e;
    sum_sq += e * e;
  }
  const double mean = sum / N;
  const double se = std::sqrt((sum_sq / N - mean * mean) / (N - 1));
  EXPECT_LE(mean, std::pow(0.1, 1.5) + 3.0 * se);
}

TEST(Gradient, MinibatchFullFractionIsExact) {
  const auto p = small_logistic();
  const Vector x = Vector::Constant(5, 0.4);
  RngStream rng(1, StreamId::gradient, 0);
  GradientOracleSpec spec{GradientOracleKind::minibatch, 0.0, 1.0, 0};
  EXPECT_LE((sample_gradient(*p, x, spec, 0.0, rng) - p->gradient(x)).norm(), 1e-12);
}

TEST(Gradient, RejectsBadInput) {
  const auto p = small_logistic();
  RngStream rng(1, StreamId::gradient, 0);
  GradientOracleSpec spec{GradientOracleKind::gaussian_noise, 0.1, 1.0, 0};
  EXPECT_THROW(sample_gradient(*p, Vector::Constant(5, std::nan("")), spec, 0.1, rng), InvalidInput);
  EXPECT_THROW(sample_gradient(*p, Vector::Zero(5), spec, -1.0, rng), InvalidInput);
  spec.kind = GradientOracleKind::minibatch;
  spec.batch_fraction = 0.0;
  EXPECT_THROW(validate(spec), InvalidInput);
}

TEST(Hessian, ExactKind) {
  const auto p = small_logistic();
  const Vector x = Vector::Constant(5, 0.1);
  RngStream rng(1, StreamId::hessian, 0);
  EXPECT_EQ(sample_hessian(*p, x, HessianOracleSpec{}, rng), p->hessian(x));
}

TEST(Hessian, KeepProbabilityOneIsExact) {
  const auto p = small_logistic();
  const Vector x = Vector::Constant(5, 0.1);
  RngStream rng(1, StreamId::hessian, 0);
  HessianOracleSpec spec{HessianOracleKind::element_subsample, 1.0, 0.5, 0.0, 0};
  EXPECT_EQ(sample_hessian(*p, x, spec, rng).dense(), p->hessian(x).dense());
}

TEST(Hessian, ElementSubsampleUnbiasedAndSymmetric) {
  const auto p = small_logistic();
  const Vector x = Vector::Constant(5, 0.2);
  const Matrix h = p->hessian(x).dense();
  HessianOracleSpec spec{HessianOracleKind::element_subsample, 0.5, 0.5, 0.0, 0};
  const int N = 100000;
  Matrix sum = Matrix::Zero(5, 5), sum_sq = Matrix::Zero(5, 5);
  RngStream rng(5, StreamId::hessian, 0);
  for (int i = 0; i < N; ++i) {
    const Matrix s = sample_hessian(*p, x, spec, rng).dense();
    ASSERT_EQ(s, s.transpose());
    sum += s;
    sum_sq += s.cwiseProduct(s);
  }
  const Matrix mean = sum / N;
  for (int j = 0; j < 5; ++j) {
    for (int i = 0; i < 5; ++i) {
      const double var = sum_sq(i, j) / N - mean(i, j) * mean(i, j);
      const double se = std::sqrt(std::max(var, 0.0) / (N - 1));
      EXPECT_LE(std::abs(mean(i, j) - h(i, j)), 3.0 * se + 1e-15) << i << "," << j;
    }
  }
}

TEST(Hessian, MinibatchFullFractionIsExact) {
  const auto p = small_logistic();
  const Vector x = Vector::Constant(5, 0.2);
  RngStream rng(1, StreamId::hessian, 0);
  HessianOracleSpec spec{HessianOracleKind::minibatch, 0.5, 1.0, 0.0, 0};
  EXPECT_LE(frobenius_norm(sample_hessian(*p, x, spec, rng) - p->hessian(x)), 1e-10);
}

TEST(Hessian, GaussianNoiseVarianceFormula) {
  // n = 1: E|E|³ = 2√(2/π) v^{3/2} ≤ σ³ and the Cauchy–Schwarz bound gives
  // v = (σ³/√3)^{2/3}.
  EXPECT_NEAR(gaussian_hessian_entry_variance(1, 1.0), std::pow(1.0 / std::sqrt(3.0), 2.0 / 3.0), 1e-15);
  EXPECT_EQ(gaussian_hessian_entry_variance(4, 0.0), 0.0);
}

TEST(Paired, SamePointIdentical) {
  const auto p = small_logistic();
  const Vector x = Vector::Constant(5, 0.3);
  for (auto kind : {HessianOracleKind::element_subsample, HessianOracleKind::minibatch,
                    HessianOracleKind::gaussian_noise}) {
    HessianOracleSpec spec{kind, 0.5, 0.5, 0.2, 0};
    RngStream rng(9, StreamId::hessian, 3);
    const auto [a, b] = paired_hessian_samples(*p, x, x, spec, rng);
    EXPECT_EQ(a, b);
  }
}

TEST(Paired, ExactKindGivesTrueHessians) {
  const auto p = small_logistic();
  const Vector x0 = Vector::Constant(5, 0.3), x1 = Vector::Constant(5, -0.1);
  RngStream rng(9, StreamId::hessian, 3);
  const auto [a, b] = paired_hessian_samples(*p, x0, x1, HessianOracleSpec{}, rng);
  EXPECT_EQ(a, p->hessian(x0));
  EXPECT_EQ(b, p->hessian(x1));
}

TEST(Paired, MeanCubedSmoothness) {
  // Every draw keeps a subset of the entries of the exact difference,
  // scaled by 1/p, so L_H = L_F/p on this segment.
  const auto p = small_logistic();
  const Vector x0 = Vector::Constant(5, 0.3);
  Vector dir = Vector::LinSpaced(5, -1.0, 1.0);
  const Vector x1 = x0 + 0.1 * dir / dir.norm();
  const double step = (x1 - x0).norm();
  HessianOracleSpec spec{HessianOracleKind::element_subsample, 0.5, 0.5, 0.0, 0};
  const double lf = frobenius_norm(p->hessian(x1) - p->hessian(x0)) / step;
  const double lh = lf / spec.keep_probability;
  const int N = 10000;
  double sum = 0.0;
  for (int i = 0; i < N; ++i) {
    RngStream rng(8, StreamId::hessian, static_cast<std::uint64_t>(i));
    const auto [a, b] = paired_hessian_samples(*p, x0, x1, spec, rng);
    sum += std::pow(frobenius_norm(b - a), 3);
  }
  EXPECT_LE(sum / N, std::pow(lh * step, 3));
}

TEST(Determinism, SameStreamSameSamples) {
  const auto p = small_logistic();
  const Vector x = Vector::Constant(5, 0.3);
  HessianOracleSpec spec{HessianOracleKind::element_subsample, 0.5, 0.5, 0.0, 0};
  RngStream a(42, StreamId::hessian, 7), b(42, StreamId::hessian, 7);
  EXPECT_EQ(sample_hessian(*p, x, spec, a), sample_hessian(*p, x, spec, b));
}

TEST(MomentEstimate, ReportsFiniteErrorForStochasticKinds) {
  const auto p = small_logistic();
  const Vector x = Vector::Constant(5, 0.3);
  for (auto kind : {HessianOracleKind::element_subsample, HessianOracleKind::minibatch,
                    HessianOracleKind::gaussian_noise}) {
    HessianOracleSpec spec{kind, 0.5, 0.5, 0.2, 0};
    const auto est = hessian_error_moment(*p, x, spec, 2000, 1);
    EXPECT_TRUE(std::isfinite(est.mean));
    EXPECT_GT(est.mean, 0.0);
  }
  HessianOracleSpec g{HessianOracleKind::gaussian_noise, 0.5, 0.5, 0.2, 0};
  const auto est = hessian_error_moment(*p, x, g, 20000, 2);
  EXPECT_LE(est.mean, std::pow(0.2, 3) + 3.0 * est.std_error);
}

TEST(Sampling, WithoutReplacement) {
  RngStream rng(3, StreamId::test, 0);
  auto idx = sample_without_replacement(10, 10, rng);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(idx[i], i);
  EXPECT_THROW(sample_without_replacement(3, 4, rng), InvalidInput);
}

}  // namespace
