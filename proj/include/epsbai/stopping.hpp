#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "epsbai/linalg.hpp"
#include "epsbai/model.hpp"
#include "epsbai/random.hpp"

namespace epsbai {

// Riemann zeta for real s > 1 (Euler-Maclaurin, ~1e-15 relative)
double riemann_zeta(double s);

// g_G(lambda) = 2l - 2l ln(4l) + ln zeta(2l) - ln(1-l)/2, lambda in (1/2, 1)
double g_gaussian(double lambda);
// C_G(x) = min over lambda in (1/2,1] of (g_G(lambda) + x) / lambda
double cal_c_g(double x);

enum class ThresholdKind { kTheoretical, kHeuristic };

std::string to_string(ThresholdKind k);
ThresholdKind parse_threshold_kind(const std::string& s);

struct Threshold {
  ThresholdKind kind = ThresholdKind::kHeuristic;
  int num_arms = 2;  // K, used by the theoretical form

  bool operator==(const Threshold&) const = default;
};

// beta(t, delta)
//   theoretical: 2K ln(4 + ln(t/K)) + K C_G(ln(1/delta)/K)
//   heuristic:   4 ln((4 + ln(t/2)) / delta)
double threshold(double t, double delta, const Threshold& kind);

// Level that the squared-norm GLR statistic inf ||mu_hat - lambda||^2_{V_N}
// must exceed. 2 beta for the theoretical threshold, beta itself for the
// heuristic one (that is how the heuristic was calibrated).
double stopping_level(double t, double delta, const Threshold& kind);

// Same as stopping_level with C_G(ln(1/delta)/K) computed once.
class StoppingThreshold {
 public:
  StoppingThreshold(Threshold kind, double delta);
  double level(double t) const;
  double beta(double t) const;
  const Threshold& kind() const { return kind_; }
  double delta() const { return delta_; }

 private:
  Threshold kind_;
  double delta_;
  double c_g_term_ = 0.0;
};

// f(t) = 2 beta(t, t^(-1/alpha)) with the theoretical beta, alpha = 3
double exploration_bonus(double t, int num_arms, double alpha = 3.0);

// inf over the alternative of z of ||mu_hat - lambda||^2_{V_N}
double glr_statistic(const ProblemInstance& inst, const EstimatorSnapshot& s, int z);

// statistic compared with the level at t - 1
bool should_stop(double statistic, std::int64_t t, const StoppingThreshold& th);

// ---- evaluation schedules ----

struct ConstantGrid {
  std::int64_t t0 = 100;

  bool operator==(const ConstantGrid&) const = default;
};
struct GeometricGrid {
  std::int64_t t0 = 10;
  double gamma = 0.2;

  bool operator==(const GeometricGrid&) const = default;
};
// expansion gamma / sqrt(i) at step i
struct GeometricDecreasingGrid {
  std::int64_t t0 = 10;
  double gamma = 0.5;

  bool operator==(const GeometricDecreasingGrid&) const = default;
};
struct BernoulliGrid {
  double p = 0.1;
  std::uint64_t seed = 0;

  bool operator==(const BernoulliGrid&) const = default;
};
using Grid = std::variant<ConstantGrid, GeometricGrid, GeometricDecreasingGrid, BernoulliGrid>;

enum class ScheduleKind { kEveryStep, kLazy, kSticky };

struct Schedule {
  ScheduleKind kind = ScheduleKind::kEveryStep;
  Grid grid = GeometricGrid{};

  bool operator==(const Schedule&) const = default;
};

std::string schedule_tag(const Schedule& s);
void validate_schedule(const Schedule& s);

// Answers "is t on the grid" for nondecreasing t.
class GridClock {
 public:
  GridClock(const Grid& grid, std::uint64_t run_seed);
  bool contains(std::int64_t t);
  // deterministic grids only: the next grid time >= t
  std::int64_t next_at_or_after(std::int64_t t);

 private:
  Grid grid_;
  std::int64_t next_ = 0;
  std::int64_t step_ = 0;
  std::int64_t last_query_ = 0;
  bool last_answer_ = false;
  Rng rng_;
  void advance();
};

struct StopPlan {
  bool refresh_candidate = true;
  bool evaluate = true;
};

// Per-run schedule state. The candidate is refreshed on grid times, or
// whenever the stuck one stopped being eps-optimal at the current estimate.
// Lazy compares the statistic only on grid times, sticky every round.
class StoppingRule {
 public:
  StoppingRule(const Schedule& s, std::uint64_t run_seed);
  StopPlan plan(std::int64_t t, bool candidate_valid);
  const Schedule& schedule() const { return schedule_; }

 private:
  Schedule schedule_;
  GridClock clock_;
};

}  // namespace epsbai
