#include "scrn/verify/reference.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace scrn::verify {

JacobiEigen jacobi_eigen(const Matrix& a_in) {
  const Eigen::Index n = a_in.rows();
  LMatrix a = a_in.cast<long double>();
  LMatrix v = LMatrix::Identity(n, n);

  for (int sweep = 0; sweep < 100; ++sweep) {
    long double off = 0.0L;
    long double total = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    }
    if (off <= 1e-36L * total || off == 0.0L) break;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0L) continue;
        const long double theta = (a(q, q) - a(p, p)) / (2.0L * a(p, q));
        const long double t = (theta >= 0.0L ? 1.0L : -1.0L) /
                              (std::fabs(theta) + std::sqrt(theta * theta + 1.0L));
        const long double c = 1.0L / std::sqrt(t * t + 1.0L);
        const long double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const long double akp = a(k, p);
          const long double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const long double apk = a(p, k);
          const long double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const long double vkp = v(k, p);
          const long double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });
  JacobiEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

double jacobi_min_eigenvalue(const Matrix& a) {
  return static_cast<double>(jacobi_eigen(a).values(0));
}

long double cubic_model_optimum(const CubicModel& model) {
  const JacobiEigen es = jacobi_eigen(model.M.dense());
  const LVector gh = es.vectors.transpose() * model.g.cast<long double>();
  const long double eta = model.eta;
  const long double lam_min = es.values(0);
  const long double r_min = std::max(0.0L, -2.0L * eta * lam_min);

  auto dual = [&](long double r) {
    long double q = 0.0L;
    for (Eigen::Index i = 0; i < gh.size(); ++i) {
      if (gh(i) == 0.0L) continue;
      const long double d = es.values(i) + r / (2.0L * eta);
      if (d <= 0.0L) return -std::numeric_limits<long double>::infinity();
      q += gh(i) * gh(i) / d;
    }
    return -0.5L * q - r * r * r / (12.0L * eta);
  };

  // Any maximizer satisfies r ≤ r_min + sqrt(2η‖g‖) + 1; padded generously.
  const long double gnorm = gh.norm();
  long double lo = r_min;
  long double hi = r_min + 2.0L * std::sqrt(2.0L * eta * gnorm) + 2.0L;
  const long double phi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double a = hi - phi * (hi - lo);
  long double b = lo + phi * (hi - lo);
  long double fa = dual(a);
  long double fb = dual(b);
  for (int it = 0; it < 400 && hi - lo > 1e-17L * (1.0L + hi); ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = dual(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = dual(a);
    }
  }
  long double best = std::max(fa, fb);
  // The supremum can sit at the left end (hard case); approach it.
  for (long double eps = 1e-6L; eps > 1e-18L; eps *= 0.1L) {
    best = std::max(best, dual(r_min + eps * (1.0L + r_min)));
  }
  return best;
}

namespace {

double model_value_plain(const CubicModel& m, const Vector& s) {
  const double r = s.norm();
  return m.g.dot(s) + 0.5 * s.dot(m.M.dense() * s) + r * r * r / (6.0 * m.eta);
}

Vector model_gradient(const CubicModel& m, const Vector& s) {
  return m.g + m.M.dense() * s + (s.norm() / (2.0 * m.eta)) * s;
}

double descend(const CubicModel& m, Vector s) {
  double f = model_value_plain(m, s);
  Vector grad = model_gradient(m, s);
  double step = 1e-2;
  for (int it = 0; it < 20000 && grad.norm() > 1e-13; ++it) {
    double t = step;
    Vector trial;
    double ft = 0.0;
    for (int bt = 0; bt < 80; ++bt) {
      trial = s - t * grad;
      ft = model_value_plain(m, trial);
      if (ft <= f - 1e-4 * t * grad.squaredNorm()) break;
      t *= 0.5;
    }
    if (!(ft < f)) break;
    const Vector grad_new = model_gradient(m, trial);
    const Vector ds = trial - s;
    const Vector dg = grad_new - grad;
    const double sy = ds.dot(dg);
    step = sy > 0.0 ? ds.squaredNorm() / sy : 1e-2;
    s = trial;
    f = ft;
    grad = grad_new;
  }
  return f;
}

}  // namespace

double cubic_model_multistart(const CubicModel& model, int starts, std::uint64_t seed) {
  RngStream rng(seed, StreamId::test, 0x6d);
  const Eigen::Index n = model.dim();
  const JacobiEigen es = jacobi_eigen(model.M.dense());
  const Vector vmin = es.vectors.col(0).cast<double>();
  const double scale = std::sqrt(2.0 * model.eta * model.g.norm()) +
                       2.0 * model.eta * std::max(0.0, -static_cast<double>(es.values(0))) + 1e-3;

  double best = 0.0;  // s = 0
  best = std::min(best, descend(model, scale * vmin));
  best = std::min(best, descend(model, -scale * vmin));
  best = std::min(best, descend(model, -model.eta * model.g));
  for (int k = 0; k < starts; ++k) {
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = rng.normal();
    best = std::min(best, descend(model, scale * s / s.norm()));
  }
  return best;
}

CubedNormReference cubed_norm_reference(const Matrix& u, const Matrix& v, double c_in) {
  long double uu = 0.0L, vv = 0.0L, ww = 0.0L, uv = 0.0L;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const long double a = u(i, j);
      const long double b = v(i, j);
      uu += a * a;
      vv += b * b;
      ww += (a + b) * (a + b);
      uv += a * b;
    }
  }
  const long double c = c_in;
  const long double nu = std::sqrt(uu);
  const long double nv = std::sqrt(vv);
  const long double nw = std::sqrt(ww);
  CubedNormReference r;
  r.lhs = nw * nw * nw;
  r.rhs1 = (1.0L + c) * nu * nu * nu + 3.0L * nu * uv + 2.0L * (1.0L + 1.0L / std::sqrt(c)) * nv * nv * nv;
  r.rhs2 = (1.0L + 2.0L * c) * nu * nu * nu + 2.0L * (1.0L + 1.0L / std::sqrt(c) + 2.0L / (c * c)) * nv * nv * nv;
  return r;
}

Matrix random_orthogonal(Eigen::Index n, RngStream& rng) {
  Matrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  return Eigen::HouseholderQR<Matrix>(g).householderQ();
}

Matrix random_symmetric(Eigen::Index n, double lo, double hi, RngStream& rng) {
  const Matrix q = random_orthogonal(n, rng);
  Vector lam(n);
  for (Eigen::Index i = 0; i < n; ++i) lam(i) = lo + (hi - lo) * rng.uniform();
  const Matrix a = q * lam.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

CubicModel random_hard_case_model(Eigen::Index n, RngStream& rng) {
  const Matrix q = random_orthogonal(n, rng);
  Vector lam(n);
  lam(0) = -0.5 - rng.uniform();
  for (Eigen::Index i = 1; i < n; ++i) lam(i) = lam(0) + 0.5 + 2.0 * rng.uniform();
  const double eta = 0.2 + rng.uniform();
  const double r_min = -2.0 * eta * lam(0);

  // ĝ has no component on the λ_min direction, and the orthogonal part of
  // the step, (λ_i − λ_min)⁻¹ĝ_i, has norm r_min/2.
  Vector gh = Vector::Zero(n);
  for (Eigen::Index i = 1; i < n; ++i) gh(i) = rng.normal();
  if (n > 1) {
    double perp = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) perp += std::pow(gh(i) / (lam(i) - lam(0)), 2.0);
    gh *= 0.5 * r_min / std::sqrt(perp);
  }
  const Matrix m = q * lam.asDiagonal() * q.transpose();
  CubicModel model;
  model.g = q * gh;
  model.M = SymMatrix::symmetrized(m);
  model.eta = eta;
  return model;
}

}  // namespace scrn::verify
