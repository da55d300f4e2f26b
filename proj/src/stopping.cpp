#include "epsbai/stopping.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace epsbai {

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw std::domain_error("riemann_zeta: needs s > 1");
  constexpr int N = 10;
  // B_2k / (2k)!
  static constexpr std::array<double, 7> kB = {
      1.0 / 12.0,          -1.0 / 720.0,          1.0 / 30240.0,         -1.0 / 1209600.0,
      1.0 / 47900160.0,    -691.0 / 1307674368000.0, 1.0 / 74724249600.0};
  double sum = 0.0;
  for (int n = 1; n < N; ++n) sum += std::pow(n, -s);
  const double Ns = std::pow(N, -s);
  sum += N * Ns / (s - 1.0) + 0.5 * Ns;
  // rising factorial s (s+1) ... (s+2k-2), times N^(-s-2k+1)
  double rising = s;
  double npow = Ns / N;
  for (std::size_t k = 0; k < kB.size(); ++k) {
    sum += kB[k] * rising * npow;
    rising *= (s + 2.0 * k + 1.0) * (s + 2.0 * k + 2.0);
    npow /= N * N;
  }
  return sum;
}

double g_gaussian(double lambda) {
  if (!(lambda > 0.5 && lambda < 1.0)) throw std::domain_error("g_G: lambda outside (1/2, 1)");
  return 2.0 * lambda - 2.0 * lambda * std::log(4.0 * lambda) + std::log(riemann_zeta(2.0 * lambda)) -
         0.5 * std::log(1.0 - lambda);
}

namespace {

constexpr int kGridPoints = 2000;
constexpr double kLo = 0.5 + 1e-6;
constexpr double kHi = 1.0 - 1e-9;

struct GTable {
  std::vector<double> lambda;
  std::vector<double> g;
  GTable() : lambda(kGridPoints), g(kGridPoints) {
    for (int i = 0; i < kGridPoints; ++i) {
      lambda[i] = kLo + (kHi - kLo) * i / (kGridPoints - 1);
      g[i] = g_gaussian(lambda[i]);
    }
  }
};

const GTable& table() {
  static const GTable t;
  return t;
}

}  // namespace

double cal_c_g(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("C_G: needs x > 0");
  const GTable& t = table();
  int arg = 0;
  double best = (t.g[0] + x) / t.lambda[0];
  for (int i = 1; i < kGridPoints; ++i) {
    const double v = (t.g[i] + x) / t.lambda[i];
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  // the objective is convex in lambda; refine inside the neighbouring cells
  double a = t.lambda[std::max(arg - 1, 0)];
  double b = t.lambda[std::min(arg + 1, kGridPoints - 1)];
  const auto f = [x](double l) { return (g_gaussian(l) + x) / l; };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
    if (f1 > f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return std::min({best, f1, f2});
}

std::string to_string(ThresholdKind k) {
  return k == ThresholdKind::kTheoretical ? "theoretical" : "heuristic";
}

ThresholdKind parse_threshold_kind(const std::string& s) {
  if (s == "theoretical" || s == "theory") return ThresholdKind::kTheoretical;
  if (s == "heuristic") return ThresholdKind::kHeuristic;
  throw std::invalid_argument("unknown threshold kind '" + s + "'");
}

namespace {

void check_args(double t, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("threshold: delta must be in (0,1)");
  if (!(t >= 1.0)) throw std::invalid_argument("threshold: t must be >= 1");
}

double theoretical_time_term(double t, int K) {
  // 4 + ln(t/K) drops below 1 only for K > 20 at t = 1; keep the log positive
  const double inner = std::max(4.0 + std::log(t / K), 1.0);
  return 2.0 * K * std::log(inner);
}

}  // namespace

double threshold(double t, double delta, const Threshold& kind) {
  check_args(t, delta);
  if (kind.kind == ThresholdKind::kHeuristic) {
    return 4.0 * std::log((4.0 + std::log(t / 2.0)) / delta);
  }
  const int K = kind.num_arms;
  if (K < 1) throw std::invalid_argument("threshold: K must be positive");
  return theoretical_time_term(t, K) + K * cal_c_g(std::log(1.0 / delta) / K);
}

double stopping_level(double t, double delta, const Threshold& kind) {
  const double b = threshold(t, delta, kind);
  return kind.kind == ThresholdKind::kTheoretical ? 2.0 * b : b;
}

StoppingThreshold::StoppingThreshold(Threshold kind, double delta) : kind_(kind), delta_(delta) {
  check_args(1.0, delta);
  if (kind_.kind == ThresholdKind::kTheoretical) {
    if (kind_.num_arms < 1) throw std::invalid_argument("threshold: K must be positive");
    c_g_term_ = kind_.num_arms * cal_c_g(std::log(1.0 / delta) / kind_.num_arms);
  }
}

double StoppingThreshold::beta(double t) const {
  if (kind_.kind == ThresholdKind::kHeuristic) {
    return 4.0 * std::log((4.0 + std::log(std::max(t, 1.0) / 2.0)) / delta_);
  }
  return theoretical_time_term(std::max(t, 1.0), kind_.num_arms) + c_g_term_;
}

double StoppingThreshold::level(double t) const {
  const double b = beta(t);
  return kind_.kind == ThresholdKind::kTheoretical ? 2.0 * b : b;
}

double exploration_bonus(double t, int num_arms, double alpha) {
  if (!(t > 1.0)) throw std::invalid_argument("exploration_bonus: needs t > 1");
  // delta = t^(-1/alpha), so ln(1/delta) = ln(t) / alpha
  const double x = std::log(t) / alpha / num_arms;
  return 2.0 * (theoretical_time_term(t, num_arms) + num_arms * cal_c_g(x));
}

double glr_statistic(const ProblemInstance& inst, const EstimatorSnapshot& s, int z) {
  bool ok = false;
  for (int i : eps_optimal_set_or_greedy(inst, s.mu_hat)) ok = ok || i == z;
  if (!ok) throw std::invalid_argument("glr_statistic: answer is not eps-optimal at the estimate");
  return alternative_value_inv(inst, s.mu_hat, s.design_inv, z);
}

bool should_stop(double statistic, std::int64_t t, const StoppingThreshold& th) {
  return statistic > th.level(static_cast<double>(std::max<std::int64_t>(t - 1, 1)));
}

// ---- schedules ----

std::string schedule_tag(const Schedule& s) {
  if (s.kind == ScheduleKind::kEveryStep) return "every";
  std::ostringstream os;
  os << (s.kind == ScheduleKind::kLazy ? "lazy" : "sticky") << "-";
  std::visit(
      [&os](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, ConstantGrid>) {
          os << "C" << g.t0;
        } else if constexpr (std::is_same_v<G, GeometricGrid>) {
          os << "G" << g.t0 << "x" << g.gamma;
        } else if constexpr (std::is_same_v<G, GeometricDecreasingGrid>) {
          os << "GD" << g.t0 << "x" << g.gamma;
        } else {
          os << "B" << g.p;
        }
      },
      s.grid);
  return os.str();
}

void validate_schedule(const Schedule& s) {
  std::visit(
      [](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, BernoulliGrid>) {
          if (!(g.p > 0.0 && g.p <= 1.0)) throw std::invalid_argument("bernoulli grid needs p in (0,1]");
        } else {
          if (g.t0 < 1) throw std::invalid_argument("grid needs T0 >= 1");
          if constexpr (!std::is_same_v<G, ConstantGrid>) {
            if (!(g.gamma > 0.0)) throw std::invalid_argument("geometric grid needs gamma > 0");
          }
        }
      },
      s.grid);
}

GridClock::GridClock(const Grid& grid, std::uint64_t run_seed)
    : grid_(grid), rng_(derive_seed(run_seed, 0xB0)) {
  if (const auto* b = std::get_if<BernoulliGrid>(&grid_)) {
    rng_ = Rng(derive_seed(run_seed ^ derive_seed(b->seed, 7), 0xB0));
    return;
  }
  std::visit(
      [this](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (!std::is_same_v<G, BernoulliGrid>) next_ = g.t0;
      },
      grid_);
}

void GridClock::advance() {
  ++step_;
  const std::int64_t prev = next_;
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, ConstantGrid>) {
          next_ = prev + g.t0;
        } else if constexpr (std::is_same_v<G, GeometricGrid>) {
          next_ = static_cast<std::int64_t>(std::ceil((1.0 + g.gamma) * prev));
        } else if constexpr (std::is_same_v<G, GeometricDecreasingGrid>) {
          next_ = static_cast<std::int64_t>(
              std::ceil((1.0 + g.gamma / std::sqrt(static_cast<double>(step_))) * prev));
        }
      },
      grid_);
  if (next_ <= prev) next_ = prev + 1;
}

std::int64_t GridClock::next_at_or_after(std::int64_t t) {
  if (std::holds_alternative<BernoulliGrid>(grid_)) {
    throw std::logic_error("bernoulli grid has no deterministic times");
  }
  while (next_ < t) advance();
  return next_;
}

bool GridClock::contains(std::int64_t t) {
  if (t == last_query_ && t != 0) return last_answer_;
  if (t < last_query_) throw std::logic_error("GridClock queried backwards");
  last_query_ = t;
  if (const auto* b = std::get_if<BernoulliGrid>(&grid_)) {
    last_answer_ = rng_.uniform() < b->p;
    return last_answer_;
  }
  while (next_ < t) advance();
  last_answer_ = next_ == t;
  return last_answer_;
}

StoppingRule::StoppingRule(const Schedule& s, std::uint64_t run_seed)
    : schedule_(s), clock_(s.grid, run_seed) {
  validate_schedule(s);
}

StopPlan StoppingRule::plan(std::int64_t t, bool candidate_valid) {
  if (schedule_.kind == ScheduleKind::kEveryStep) return {true, true};
  // grid membership refers to the number of samples collected so far
  const bool on_grid = clock_.contains(t - 1);
  StopPlan p;
  p.refresh_candidate = on_grid || !candidate_valid;
  p.evaluate = schedule_.kind == ScheduleKind::kSticky ? true : on_grid;
  return p;
}

}  // namespace epsbai
