#include <doctest.h>

#include <random>

#include "epsbai/linalg.hpp"

using namespace epsbai;

TEST_CASE("weighted norm") {
  Vector x(2);
  x << 3, 4;
  CHECK(weighted_norm_sq(Matrix::Identity(2, 2), x) == doctest::Approx(25.0));
  CHECK(weighted_norm_sq(Matrix::Identity(2, 2), Vector::Zero(2)) == 0.0);
  Matrix V = Matrix::Zero(2, 2);
  V(0, 0) = 2.0;
  V(1, 1) = 0.5;
  x << 1, 2;
  CHECK(weighted_norm_sq(V, x) == doctest::Approx(4.0));
}

TEST_CASE("design matrix is linear in w") {
  std::mt19937_64 g(3);
  std::normal_distribution<double> n;
  Matrix arms(5, 3);
  for (int i = 0; i < arms.size(); ++i) arms.data()[i] = n(g);
  Vector w1 = Vector::Random(5).cwiseAbs(), w2 = Vector::Random(5).cwiseAbs();
  const Matrix lhs = design_matrix(arms, w1 + w2);
  const Matrix rhs = design_matrix(arms, w1) + design_matrix(arms, w2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(is_design_matrix(lhs));
}

TEST_CASE("pseudo-inverse Penrose identities on random PSD matrices") {
  std::mt19937_64 g(11);
  std::normal_distribution<double> n;
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 120; ++trial) {
    const int d = dim(g);
    const int r = std::uniform_int_distribution<int>(1, d)(g);  // rank
    Matrix B(d, r);
    for (int i = 0; i < B.size(); ++i) B.data()[i] = n(g);
    const Matrix V = B * B.transpose();
    const Matrix P = pseudo_inverse(V);
    const double s = std::max(1.0, V.cwiseAbs().maxCoeff());
    CHECK((V * P * V - V).cwiseAbs().maxCoeff() < 1e-8 * s);
    CHECK((pseudo_inverse(P) - V).cwiseAbs().maxCoeff() < 1e-8 * s);
  }
}

TEST_CASE("pseudo-inverse image and kernel") {
  Matrix V = Matrix::Zero(2, 2);
  V(0, 0) = 1.0;  // w = (1, 0) on {e1, e2}
  const PseudoInverse p(V);
  CHECK(p.rank() == 1);
  Vector y(2);
  y << 1, -1;
  CHECK_FALSE(p.in_image(y));
  CHECK(p.in_image(Vector::Unit(2, 0)));
  const Vector k = p.kernel_direction(y);
  CHECK((V * k).norm() < 1e-12);
  CHECK(k.dot(y) == doctest::Approx(1.0));
}

TEST_CASE("OLS estimate") {
  SUBCASE("orthonormal arms") {
    EstimatorState s(Matrix::Identity(2, 2));
    s.observe(0, 0.7);
    s.observe(1, 0.0);
    const Vector m = ols_estimate(s);
    CHECK(m(0) == doctest::Approx(0.7));
    CHECK(m(1) == doctest::Approx(0.0));
  }
  SUBCASE("zero rewards") {
    EstimatorState s(Matrix::Identity(3, 3));
    for (int a = 0; a < 3; ++a) s.observe(a, 0.0);
    CHECK(ols_estimate(s).norm() == 0.0);
  }
  SUBCASE("two non-orthogonal arms") {
    Matrix arms(2, 2);
    arms << 1, 0, 1, 1;
    EstimatorState s(arms);
    s.observe(0, 1.0);
    s.observe(1, 3.0);
    const Vector m = ols_estimate(s);
    // solved by hand: m0 = 1, m0 + m1 = 3
    CHECK(m(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m(1) == doctest::Approx(2.0).epsilon(1e-12));
    const EstimatorSnapshot snap = snapshot(s);
    CHECK((snap.design * snap.mu_hat - s.cumulant()).norm() < 1e-10);
    CHECK(snap.t == 2);
  }
  SUBCASE("singular design") {
    EstimatorState s(Matrix::Identity(2, 2));
    s.observe(0, 1.0);
    CHECK_THROWS_AS(ols_estimate(s), SingularDesignError);
  }
}

TEST_CASE("noiseless observations recover mu") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 5, k = d + 3;
    Matrix arms(k, d);
    for (int i = 0; i < arms.size(); ++i) arms.data()[i] = n(g);
    Vector mu(d);
    for (int i = 0; i < d; ++i) mu(i) = n(g);
    EstimatorState s(arms);
    for (int r = 0; r < 3 * k; ++r) s.observe(r % k, arms.row(r % k).dot(mu));
    CHECK((ols_estimate(s) - mu).norm() < 1e-8);
    CHECK((s.design() - s.recomputed_design()).cwiseAbs().maxCoeff() < 1e-10);
  }
}
