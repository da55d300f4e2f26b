#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "epsbai/learner.hpp"

using namespace epsbai;

TEST_CASE("fresh learner is uniform") {
  AdaHedge h(4);
  CHECK((h.predict().array() == 0.25).all());
  CHECK(h.mixability_gap() == 0.0);
  CHECK(std::isinf(h.learning_rate()));
}

TEST_CASE("repeated gain on one arm") {
  AdaHedge h(3);
  Vector g = Vector::Zero(3);
  g(0) = 1.0;
  double prev = h.predict()(0);
  for (int i = 0; i < 1000; ++i) {
    h.update(g);
    const double p = h.predict()(0);
    CHECK(p >= prev - 1e-15);
    prev = p;
  }
  CHECK(prev > 0.999);
}

TEST_CASE("symmetries") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0, 2);
  AdaHedge a(3), b(3), c(3);
  for (int i = 0; i < 200; ++i) {
    Vector g(3);
    g << u(gen), u(gen), u(gen);
    a.update(g);
    Vector p(3);  // permutation (2, 0, 1)
    p << g(2), g(0), g(1);
    b.update(p);
    c.update(g.array() + 5.0 * u(gen));  // shifted by a per-round constant
  }
  const Vector pa = a.predict(), pb = b.predict(), pc = c.predict();
  CHECK(pb(0) == doctest::Approx(pa(2)).epsilon(1e-12));
  CHECK(pb(1) == doctest::Approx(pa(0)).epsilon(1e-12));
  CHECK(pb(2) == doctest::Approx(pa(1)).epsilon(1e-12));
  CHECK((pa - pc).cwiseAbs().maxCoeff() < 1e-12);

  AdaHedge eq(4);
  for (int i = 0; i < 50; ++i) eq.update(Vector::Constant(4, 1.0 + i));
  CHECK((eq.predict().array() - 0.25).abs().maxCoeff() < 1e-15);
  const Vector before = a.predict();
  a.update(Vector::Zero(3));
  CHECK(a.predict() == before);
}

TEST_CASE("simplex and gap invariants, bad input") {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n(0, 3);
  AdaHedge h(5);
  double gap = 0.0;
  for (int i = 0; i < 500; ++i) {
    Vector g(5);
    for (int k = 0; k < 5; ++k) g(k) = n(gen);
    h.update(g);
    const Vector p = h.predict();
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(h.mixability_gap() >= gap);
    gap = h.mixability_gap();
  }
  CHECK_THROWS(h.update(Vector::Constant(5, NAN)));
  CHECK_THROWS(h.update(Vector::Zero(4)));
}

TEST_CASE("regret bound on random gain sequences") {
  std::mt19937_64 gen(3);
  for (int seq = 0; seq < 100; ++seq) {
    const int k = 2 + seq % 7;
    const int t_max = 100 + (seq * 49) % 4900;
    const double sigma = std::pow(10.0, (seq % 5) - 2);
    std::uniform_real_distribution<double> u(0.0, sigma);
    std::uniform_real_distribution<double> bias(0.0, 1.0);
    Vector drift(k);  // some sequences favour one arm
    for (int a = 0; a < k; ++a) drift(a) = bias(gen) * (seq % 2);
    AdaHedge h(k);
    Vector total = Vector::Zero(k);
    double earned = 0.0;
    for (int t = 0; t < t_max; ++t) {
      Vector g(k);
      for (int a = 0; a < k; ++a) g(a) = std::min(sigma, u(gen) * (0.5 + 0.5 * drift(a)) + 0.5 * sigma * drift(a));
      earned += h.predict().dot(g);
      total += g;
      h.update(g);
    }
    const double regret = total.maxCoeff() - earned;
    const double lk = std::log(static_cast<double>(k));
    const double bound = (std::sqrt(t_max * lk) + 4.0 / 3.0 * lk + 2.0) * sigma;
    CHECK(regret <= bound);
  }
}
