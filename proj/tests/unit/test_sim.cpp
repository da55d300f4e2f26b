#include <doctest.h>

#include <sstream>

#include "epsbai/instances.hpp"
#include "epsbai/sim.hpp"

using namespace epsbai;

TEST_CASE("reward moments") {
  Rng rng(derive_seed(42, 1));
  Vector mu(2), arm(2);
  mu << 0.3, -0.7;
  arm << 1.0, 0.5;
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_reward(mu, arm, rng);
    s += x;
    s2 += x * x;
  }
  const double m = s / n, v = s2 / n - m * m;
  CHECK(std::abs(m - mu.dot(arm)) < 0.02);
  CHECK(std::abs(v - 1.0) < 0.03);
}

TEST_CASE("trivially separated instance stops right after initialization") {
  ProblemInstance inst;
  inst.arms = Matrix::Identity(2, 2);
  inst.answers = Matrix(2, 2);
  inst.answers << 1, 0, -1, 0;
  inst.mu = Vector::Unit(2, 0) * 10.0;
  inst.bound_m = 10.0;
  inst.mode = OptimalityMode::kAdditive;
  inst.epsilon = 0.05;
  RunConfig cfg;
  cfg.delta = 0.99;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RunRecord r = run_one(cfg, inst, seed);
    CHECK(r.tau <= 4);
    CHECK(r.correct);
  }
}

TEST_CASE("replay and worker determinism") {
  const ProblemInstance inst = gen_hard_instance(2, 0.05, OptimalityMode::kMultiplicative);
  RunConfig cfg;
  const RunRecord a = run_one(cfg, inst, 17), b = run_one(cfg, inst, 17);
  CHECK(a.same_outcome(b));
  const BatchResult one = run_batch(cfg, inst, 40, 5, 1), eight = run_batch(cfg, inst, 40, 5, 8);
  REQUIRE(one.records.size() == eight.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(one.records[i].same_outcome(eight.records[i]));
    CHECK(one.records[i].seed == 5 + i);
  }
  CHECK(run_batch(cfg, inst, 1, 17, 1).records[0].same_outcome(a));
  // the schedule stream does not move the noise stream
  RunConfig bern = cfg;
  bern.schedule = Schedule{ScheduleKind::kSticky, BernoulliGrid{0.5, 1}};
  RunConfig bern2 = bern;
  std::get<BernoulliGrid>(bern2.schedule.grid).seed = 2;
  CHECK(run_one(bern, inst, 3).tau > 0);
  CHECK(run_one(bern2, inst, 3).tau > 0);
}

TEST_CASE("censoring") {
  const ProblemInstance inst = gen_hard_instance(2, 0.05, OptimalityMode::kMultiplicative);
  RunConfig cfg;
  cfg.max_rounds = 20;
  const RunRecord r = run_one(cfg, inst, 0);
  CHECK(r.censored);
  CHECK(r.tau == 20);
}

TEST_CASE("quantiles and summary") {
  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({4, 1, 3, 2}, 0.75) == doctest::Approx(3.25));
  CHECK(quantile({7}, 0.3) == 7);
  std::vector<RunRecord> recs(300);
  for (int i = 0; i < 300; ++i) {
    recs[i].tau = i < 100 ? 10 : i < 200 ? 20 : 30;
    recs[i].correct = i != 0;
    recs[i].counts = {recs[i].tau};
  }
  const BatchSummary s = summarize(recs);
  CHECK(s.n_runs == 300);
  CHECK(s.mean_tau == doctest::Approx(20));
  CHECK(s.std_of_subsample_means == doctest::Approx(10.0));  // sd of {10, 20, 30}, ddof 1
  CHECK(s.q1 <= s.median);
  CHECK(s.median <= s.q3);
  CHECK(s.error_rate == doctest::Approx(1.0 / 300));
}

TEST_CASE("results CSV") {
  const ProblemInstance inst = gen_hard_instance(2, 0.05, OptimalityMode::kMultiplicative);
  const BatchResult b = run_batch(RunConfig{}, inst, 5, 0, 1);
  std::stringstream ss;
  write_results_csv(ss, b.records);
  const std::string text = ss.str();
  CHECK(text.rfind("algo_tag,candidate_tag,schedule_tag,threshold_kind,mode,epsilon,delta,seed,tau,"
                   "recommended_index,correct,censored,n0,n1,n2,n3\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  std::stringstream in(text);
  const auto back = read_results_csv(in);
  REQUIRE(back.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(back[i].same_outcome(b.records[i]));
  std::stringstream bad("tau,seed\n1,2\n");
  CHECK_THROWS(read_results_csv(bad));
}
