#pragma once
// Brute-force references used by the tests. None of them goes through the
// closed forms of the library.

#include <cmath>
#include <random>

#include "epsbai/model.hpp"

namespace oracle {

using epsbai::Matrix;
using epsbai::Vector;

// min over s of q(s) = (mu - p(s))^T V (mu - p(s)) on the line <lambda, y> = c,
// p(s) = p0 + s * u with u orthogonal to y (d = 2). Dense scan, then golden
// refinement on the best bracket.
inline double line_min_2d(const Vector& mu, const Matrix& V, const Vector& y, double c) {
  const Vector p0 = c / y.squaredNorm() * y;
  Vector u(2);
  u << -y(1), y(0);
  u.normalize();
  const auto q = [&](double s) {
    const Vector r = mu - (p0 + s * u);
    return r.dot(V * r);
  };
  const double S = 20.0 + 2.0 * mu.norm();
  const int n = 40001;
  double best = q(-S);
  int bi = 0;
  for (int i = 1; i < n; ++i) {
    const double v = q(-S + 2.0 * S * i / (n - 1));
    if (v < best) best = v, bi = i;
  }
  double a = -S + 2.0 * S * std::max(bi - 1, 0) / (n - 1);
  double b = -S + 2.0 * S * std::min(bi + 1, n - 1) / (n - 1);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double x1 = b - g * (b - a), x2 = a + g * (b - a);
    if (q(x1) < q(x2)) b = x2; else a = x1;
  }
  return std::min(best, q(0.5 * (a + b)));
}

// inf over the alternative of z, d = 2, as a min over the half-spaces. The
// half-space is entered directly when theta already lies in it.
inline double alternative_grid_2d(const epsbai::ProblemInstance& inst, const Vector& theta,
                                  const Matrix& V, int z) {
  double best = INFINITY;
  for (int x = 0; x < inst.num_answers(); ++x) {
    if (x == z) continue;
    const Vector zz = inst.answers.row(z).transpose(), xx = inst.answers.row(x).transpose();
    Vector y;
    double c;
    if (inst.mode == epsbai::OptimalityMode::kAdditive) {
      y = zz - xx;
      c = -inst.epsilon;
    } else {
      y = zz - (1.0 - inst.epsilon) * xx;
      c = 0.0;
    }
    if (y.norm() < 1e-14) continue;
    if (theta.dot(y) <= c) return 0.0;
    best = std::min(best, line_min_2d(theta, V, y, c));
  }
  return best;
}

// d = 2, K = Z answers on the unit circle plus a random mu in the unit disk
inline epsbai::ProblemInstance random_small(std::mt19937_64& g, int k, epsbai::OptimalityMode mode,
                                            double eps) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI), rad(0.3, 1.0);
  for (;;) {
    epsbai::ProblemInstance inst;
    inst.answers = Matrix(k, 2);
    for (int i = 0; i < k; ++i) {
      const double a = ang(g);
      inst.answers(i, 0) = std::cos(a);
      inst.answers(i, 1) = std::sin(a);
    }
    inst.arms = inst.answers;
    const double a = ang(g), r = rad(g);
    inst.mu = Vector(2);
    inst.mu << r * std::cos(a), r * std::sin(a);
    inst.mode = mode;
    inst.epsilon = eps;
    inst.bound_m = 1.0;
    try {
      inst.validate();
    } catch (...) {
      continue;
    }
    if ((inst.answers * inst.mu).maxCoeff() <= 0.05) continue;
    return inst;
  }
}

inline Vector random_simplex(std::mt19937_64& g, int k) {
  std::exponential_distribution<double> e(1.0);
  Vector w(k);
  for (int i = 0; i < k; ++i) w(i) = e(g) + 1e-3;
  return w / w.sum();
}

}  // namespace oracle
