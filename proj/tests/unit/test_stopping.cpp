#include <doctest.h>

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>

#include "epsbai/instances.hpp"
#include "epsbai/sim.hpp"
#include "epsbai/stopping.hpp"

using namespace epsbai;

namespace {

// frozen from an independent 30-digit evaluation (dense scan + Newton on the
// derivative, zeta from mpmath)
constexpr double kCG1 = 2.5070945465805812;
constexpr double kCGLn100Half = 3.9062759594344321;

EstimatorSnapshot two_arm_snapshot(double n1, double n2) {
  EstimatorSnapshot s;
  s.mu_hat = Vector::Unit(2, 0);
  s.design = Matrix::Zero(2, 2);
  s.design(0, 0) = n1;
  s.design(1, 1) = n2;
  s.design_inv = s.design.inverse();
  s.counts = Vector(2);
  s.counts << n1, n2;
  s.t = static_cast<std::int64_t>(n1 + n2);
  return s;
}

ProblemInstance two_answers() {
  ProblemInstance inst;
  inst.arms = Matrix::Identity(2, 2);
  inst.answers = Matrix::Identity(2, 2);
  inst.mu = Vector::Unit(2, 0);
  inst.mode = OptimalityMode::kAdditive;
  inst.epsilon = 0.05;
  return inst;
}

}  // namespace

TEST_CASE("zeta") {
  CHECK(std::abs(riemann_zeta(2.0) - M_PI * M_PI / 6.0) < 1e-9);
  CHECK(riemann_zeta(1.5) == doctest::Approx(2.6123753486854883).epsilon(1e-13));
  for (double s = 1.001; s <= 2.0; s += 0.037)
    CHECK(riemann_zeta(s) == doctest::Approx(boost::math::zeta(s)).epsilon(1e-12));
  CHECK_THROWS(riemann_zeta(1.0));
}

TEST_CASE("C_G") {
  CHECK(cal_c_g(1.0) == doctest::Approx(kCG1).epsilon(1e-9));
  CHECK(cal_c_g(std::log(100.0) / 2) == doctest::Approx(kCGLn100Half).epsilon(1e-9));
  const double r = cal_c_g(100.0) / 100.0;
  CHECK((r >= 1.0 && r <= 1.1));
  CHECK(cal_c_g(2.0) < cal_c_g(4.0));
  CHECK_THROWS(cal_c_g(0.0));
  CHECK_THROWS(cal_c_g(-1.0));
}

TEST_CASE("thresholds") {
  const Threshold heur{ThresholdKind::kHeuristic, 2};
  const Threshold theo{ThresholdKind::kTheoretical, 2};
  CHECK(threshold(2, 0.01, heur) == doctest::Approx(23.965858188431928).epsilon(1e-14));
  CHECK(threshold(10, 0.01, heur) < threshold(1000, 0.01, heur));
  CHECK(threshold(2, 0.01, theo) == doctest::Approx(4 * std::log(4.0) + 2 * kCGLn100Half).epsilon(1e-9));
  CHECK(threshold(2, 0.01, theo) == doctest::Approx(13.357729363348427).epsilon(1e-9));
  CHECK_THROWS(threshold(2, 0.0, heur));
  CHECK_THROWS(threshold(2, 1.0, heur));
  for (auto kind : {heur, theo, Threshold{ThresholdKind::kTheoretical, 5}}) {
    for (double delta : {0.5, 0.1, 0.01, 1e-4}) {
      double prev = 0.0;
      for (double t = 1; t < 1e7; t *= 1.7) {
        const double b = threshold(t, delta, kind);
        CHECK(b > 0.0);
        CHECK(b >= prev);
        prev = b;
      }
      CHECK(threshold(100, delta / 10, kind) >= threshold(100, delta, kind));
    }
  }
  CHECK(stopping_level(50, 0.01, theo) == doctest::Approx(2 * threshold(50, 0.01, theo)));
  CHECK(stopping_level(50, 0.01, heur) == doctest::Approx(threshold(50, 0.01, heur)));
  const StoppingThreshold cached(theo, 0.01);
  CHECK(cached.level(77) == doctest::Approx(stopping_level(77, 0.01, theo)).epsilon(1e-12));
  CHECK(parse_threshold_kind("theoretical") == ThresholdKind::kTheoretical);
  CHECK(parse_threshold_kind("heuristic") == ThresholdKind::kHeuristic);
}

TEST_CASE("exploration bonus") {
  // f(t) = 2 beta(t, t^-1/3)
  const double t = 400.0;
  const double manual = 2.0 * (4.0 * std::log(4.0 + std::log(t / 2)) + 2.0 * cal_c_g(std::log(t) / 3.0 / 2.0));
  CHECK(exploration_bonus(t, 2) == doctest::Approx(manual).epsilon(1e-9));
}

TEST_CASE("GLR statistic") {
  const ProblemInstance inst = two_answers();
  CHECK(glr_statistic(inst, two_arm_snapshot(5, 5), 0) == doctest::Approx(2.75625).epsilon(1e-12));
  CHECK(glr_statistic(inst, two_arm_snapshot(10, 10), 0) == doctest::Approx(5.5125).epsilon(1e-12));
  CHECK(glr_statistic(inst, two_arm_snapshot(10, 4), 0) > glr_statistic(inst, two_arm_snapshot(5, 2), 0));
  CHECK_THROWS(glr_statistic(inst, two_arm_snapshot(5, 5), 1));
  // estimate on the boundary
  EstimatorSnapshot s = two_arm_snapshot(5, 5);
  s.mu_hat << 0.475, 0.525;
  CHECK(glr_statistic(inst, s, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("stop decision") {
  const StoppingThreshold th(Threshold{ThresholdKind::kTheoretical, 2}, 0.01);
  const double level = th.level(99);
  CHECK(level == doctest::Approx(2 * threshold(99, 0.01, Threshold{ThresholdKind::kTheoretical, 2})));
  CHECK(should_stop(level + 1, 100, th));
  CHECK_FALSE(should_stop(level - 1e-6, 100, th));
}

TEST_CASE("grids") {
  GridClock geo(GeometricGrid{10, 0.2}, 0);
  std::vector<std::int64_t> hits;
  for (std::int64_t t = 1; t <= 30; ++t)
    if (geo.contains(t)) hits.push_back(t);
  CHECK(hits == std::vector<std::int64_t>{10, 12, 15, 18, 22, 27});
  GridClock c(ConstantGrid{100}, 0);
  CHECK(c.next_at_or_after(1) == 100);
  CHECK(c.next_at_or_after(101) == 200);
  GridClock dec(GeometricDecreasingGrid{10, 0.5}, 0);
  std::int64_t prev = 0;
  for (int i = 0; i < 50; ++i) {
    const std::int64_t n = dec.next_at_or_after(prev + 1);
    CHECK(n > prev);
    prev = n;
  }
  GridClock b1(BernoulliGrid{0.3, 4}, 11), b2(BernoulliGrid{0.3, 4}, 11);
  int on = 0;
  for (std::int64_t t = 1; t <= 10000; ++t) {
    const bool x = b1.contains(t);
    CHECK(x == b2.contains(t));
    on += x;
  }
  CHECK(std::abs(on / 10000.0 - 0.3) < 0.03);
  CHECK_THROWS(validate_schedule(Schedule{ScheduleKind::kLazy, GeometricGrid{10, 0.0}}));
  CHECK_THROWS(validate_schedule(Schedule{ScheduleKind::kLazy, BernoulliGrid{0.0, 0}}));
  CHECK(schedule_tag(Schedule{}) == "every");
}

TEST_CASE("stopping rule plans") {
  StoppingRule every(Schedule{ScheduleKind::kEveryStep, ConstantGrid{5}}, 0);
  StoppingRule lazy(Schedule{ScheduleKind::kLazy, ConstantGrid{5}}, 0);
  StoppingRule sticky(Schedule{ScheduleKind::kSticky, ConstantGrid{5}}, 0);
  for (std::int64_t t = 2; t <= 21; ++t) {
    const bool grid = (t - 1) % 5 == 0;  // sample count t - 1 on the grid
    const StopPlan e = every.plan(t, true), l = lazy.plan(t, true), s = sticky.plan(t, true);
    CHECK(e.evaluate);
    CHECK(e.refresh_candidate);
    CHECK(l.evaluate == grid);
    CHECK(l.refresh_candidate == grid);
    CHECK(s.evaluate);
    CHECK(s.refresh_candidate == grid);
  }
  CHECK(sticky.plan(23, false).refresh_candidate);
}

TEST_CASE("sticky never stops after lazy on the same stream") {
  const ProblemInstance inst = gen_hard_instance(2, 0.05, OptimalityMode::kMultiplicative);
  RunConfig lazy;
  lazy.schedule = Schedule{ScheduleKind::kLazy, GeometricGrid{10, 0.2}};
  RunConfig sticky = lazy;
  sticky.schedule.kind = ScheduleKind::kSticky;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RunRecord l = run_one(lazy, inst, seed), s = run_one(sticky, inst, seed);
    CHECK(s.tau <= l.tau);
  }
}
