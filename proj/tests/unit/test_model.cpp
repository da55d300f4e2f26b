#include <doctest.h>

#include <random>

#include "epsbai/instances.hpp"
#include "epsbai/model.hpp"
#include "oracles.hpp"

using namespace epsbai;

namespace {

ProblemInstance two_answers(OptimalityMode mode, double eps) {
  ProblemInstance inst;
  inst.arms = Matrix::Identity(2, 2);
  inst.answers = Matrix::Identity(2, 2);
  inst.mu = Vector::Unit(2, 0);
  inst.mode = mode;
  inst.epsilon = eps;
  return inst;
}

}  // namespace

TEST_CASE("instance validation") {
  ProblemInstance inst = two_answers(OptimalityMode::kAdditive, 0.1);
  CHECK_NOTHROW(inst.validate());
  inst.mu *= 2.0;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);  // |mu| > M
  inst = two_answers(OptimalityMode::kMultiplicative, 0.1);
  inst.mu = -inst.mu * 0.5;
  inst.answers.row(1) *= 0.0;
  inst.answers(1, 0) = 1.0;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);  // max <mu,z> <= 0
  inst = two_answers(OptimalityMode::kAdditive, 0.1);
  inst.arms = Matrix(1, 2);
  inst.arms << 1, 0;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);  // arms do not span
  CHECK(parse_mode("mul") == OptimalityMode::kMultiplicative);
  CHECK(parse_mode("additive") == OptimalityMode::kAdditive);
  CHECK_THROWS(parse_mode("x"));
}

TEST_CASE("eps-optimal sets") {
  SUBCASE("eps = 0 is the argmax set") {
    ProblemInstance inst = two_answers(OptimalityMode::kAdditive, 0.0);
    inst.answers = Matrix(3, 2);
    inst.answers << 1, 0, 0.99, 0.1, 1, 0.5;
    Vector th(2);
    th << 1, 0;
    CHECK(eps_optimal_set(inst, th) == std::vector<int>{0, 2});
    CHECK(greedy_set(inst, th) == std::vector<int>{0, 2});
  }
  SUBCASE("hard instance") {
    for (auto mode : {OptimalityMode::kAdditive, OptimalityMode::kMultiplicative}) {
      const ProblemInstance inst = gen_hard_instance(2, 0.05, mode);
      CHECK(eps_optimal_set(inst, inst.mu) == std::vector<int>{0, 2});
      const ProblemInstance inst4 = gen_hard_instance(4, 0.05, mode);
      CHECK(eps_optimal_set(inst4, inst4.mu) == std::vector<int>{0, 4});
    }
  }
  SUBCASE("unit answer at an angle, both modes") {
    const double eps = 0.1, th_eps = std::acos(1 - eps);
    for (auto mode : {OptimalityMode::kAdditive, OptimalityMode::kMultiplicative}) {
      for (double a : {0.5 * th_eps, 0.999 * th_eps, 1.001 * th_eps, 2.0 * th_eps}) {
        ProblemInstance inst = two_answers(mode, eps);
        inst.answers(1, 0) = std::cos(a);
        inst.answers(1, 1) = std::sin(a);
        CHECK(is_eps_optimal(inst, inst.mu, 1) == (a <= th_eps));
      }
    }
  }
  SUBCASE("multiplicative non-positive maximum") {
    ProblemInstance inst = two_answers(OptimalityMode::kMultiplicative, 0.1);
    Vector th(2);
    th << -1, -1;
    CHECK_THROWS_AS(eps_optimal_set(inst, th), NonPositiveMaximumError);
    CHECK(eps_optimal_set_or_greedy(inst, th) == std::vector<int>{0, 1});
  }
}

TEST_CASE("half-space projection worked example") {
  Matrix V = 0.5 * Matrix::Identity(2, 2);
  Vector y(2), mu(2);
  y << 1, -1;
  mu << 1, 0;
  const HalfspaceProjection p = project_halfspace(mu, V, y, -0.05);
  CHECK(p.distance_sq == doctest::Approx(0.275625).epsilon(1e-12));
  CHECK(p.lambda(0) == doctest::Approx(0.475));
  CHECK(p.lambda(1) == doctest::Approx(0.525));
  CHECK(p.lambda.dot(y) == doctest::Approx(-0.05));
  CHECK(oracle::line_min_2d(mu, V, y, -0.05) == doctest::Approx(0.275625).epsilon(1e-9));

  SUBCASE("already inside") {
    const HalfspaceProjection q = project_halfspace(mu, V, -y, -0.05);
    CHECK(q.distance_sq == 0.0);
    CHECK(q.lambda == mu);
  }
  SUBCASE("direction outside the image") {
    Matrix V1 = Matrix::Zero(2, 2);
    V1(0, 0) = 1.0;
    const HalfspaceProjection q = project_halfspace(mu, V1, y, -0.05);
    CHECK(q.degenerate);
    CHECK(q.distance_sq == 0.0);
    CHECK(q.lambda.dot(y) <= -0.05 + 1e-12);
    CHECK(weighted_norm_sq(V1, mu - q.lambda) < 1e-12);
  }
}

TEST_CASE("alternative distance") {
  const ProblemInstance inst = two_answers(OptimalityMode::kAdditive, 0.05);
  Vector w(2);
  w << 0.5, 0.5;
  const AlternativeProjection p = alternative_distance(inst, inst.mu, w, 0);
  CHECK(p.distance_sq == doctest::Approx(0.275625));
  CHECK(p.witness == 1);
  // z not eps-optimal
  const AlternativeProjection q = alternative_distance(inst, inst.mu, w, 1);
  CHECK(q.distance_sq == 0.0);
  CHECK(q.lambda == inst.mu);
  // alternative shrinks with eps
  const ProblemInstance inst0 = two_answers(OptimalityMode::kAdditive, 0.0);
  CHECK(alternative_distance(inst0, inst.mu, w, 0).distance_sq <= p.distance_sq);
  // single answer
  ProblemInstance one = inst;
  one.answers = Matrix(1, 2);
  one.answers << 1, 0;
  CHECK_THROWS(alternative_distance(one, one.mu, w, 0));
}

TEST_CASE("alternative distance against the grid oracle") {
  std::mt19937_64 g(2024);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto mode = trial % 2 ? OptimalityMode::kAdditive : OptimalityMode::kMultiplicative;
    const int k = 2 + trial % 3;
    const ProblemInstance inst = oracle::random_small(g, k, mode, 0.05 + 0.1 * (trial % 4));
    const Vector w = oracle::random_simplex(g, k);
    const Matrix V = design_matrix(inst.arms, w);
    for (int z : eps_optimal_set(inst, inst.mu)) {
      const AlternativeProjection p = alternative_distance(inst, inst.mu, w, z);
      const double ref = oracle::alternative_grid_2d(inst, inst.mu, V, z);
      CHECK(p.distance_sq == doctest::Approx(ref).epsilon(0.02).scale(1e-12));
      if (p.distance_sq > 0 && !p.degenerate) {
        Vector y;
        double c;
        halfspace_of(inst, z, p.witness, y, c);
        CHECK(std::abs(p.lambda.dot(y) - c) < 1e-8);
        CHECK(weighted_norm_sq(V, inst.mu - p.lambda) == doctest::Approx(p.distance_sq));
      }
      ++checked;
    }
  }
  CHECK(checked >= 50);
}

TEST_CASE("instantaneous furthest") {
  SUBCASE("hard instance picks the larger of the two exhaustive values") {
    for (auto mode : {OptimalityMode::kAdditive, OptimalityMode::kMultiplicative}) {
      const ProblemInstance inst = gen_hard_instance(2, 0.05, mode);
      const Vector w = Vector::Constant(4, 0.25);
      const Matrix V = design_matrix(inst.arms, w);
      const double d0 = oracle::alternative_grid_2d(inst, inst.mu, V, 0);
      const double d2 = oracle::alternative_grid_2d(inst, inst.mu, V, 2);
      const FurthestChoice f = instantaneous_furthest(inst, inst.mu, w);
      CHECK(f.answer == (d2 > d0 ? 2 : 0));
      CHECK(f.projection.distance_sq == doctest::Approx(std::max(d0, d2)).epsilon(1e-6));
    }
  }
  SUBCASE("singleton eps-optimal set") {
    const ProblemInstance inst = two_answers(OptimalityMode::kAdditive, 0.05);
    CHECK(instantaneous_furthest(inst, inst.mu, Vector::Constant(2, 0.5)).answer == 0);
  }
  SUBCASE("symmetric tie goes to the lower index") {
    ProblemInstance inst = two_answers(OptimalityMode::kAdditive, 0.5);
    inst.answers = Matrix(3, 2);
    inst.answers << 1, 0.1, 1, -0.1, -1, 0;
    CHECK(instantaneous_furthest(inst, inst.mu, Vector::Constant(2, 0.5)).answer == 0);
  }
  SUBCASE("member of the eps-optimal set and dominates every z") {
    std::mt19937_64 g(77);
    for (int trial = 0; trial < 50; ++trial) {
      const ProblemInstance inst = oracle::random_small(g, 4, OptimalityMode::kMultiplicative, 0.2);
      const Vector w = oracle::random_simplex(g, 4);
      const FurthestChoice f = instantaneous_furthest(inst, inst.mu, w);
      CHECK(is_eps_optimal(inst, inst.mu, f.answer));
      for (int z = 0; z < 4; ++z)
        CHECK(f.projection.distance_sq >= alternative_distance(inst, inst.mu, w, z).distance_sq - 1e-12);
    }
  }
}
