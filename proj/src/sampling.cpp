#include "epsbai/sampling.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace epsbai {

std::string to_string(CandidateRule r) {
  switch (r) {
    case CandidateRule::kGreedy: return "greedy";
    case CandidateRule::kFurthest: return "furthest";
    case CandidateRule::kInstantFurthest: return "instant";
  }
  return "?";
}

CandidateRule parse_candidate_rule(const std::string& s) {
  if (s == "greedy") return CandidateRule::kGreedy;
  if (s == "furthest") return CandidateRule::kFurthest;
  if (s == "instant" || s == "instant-furthest" || s == "instantaneous") return CandidateRule::kInstantFurthest;
  throw std::invalid_argument("unknown candidate rule '" + s + "'");
}

std::string algo_tag(const SamplerConfig& c) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LeBAIConfig>) {
          std::string tag = k.per_answer_learners ? "LinGame" : "LeBAI";
          if (k.tracking == Tracking::kD) tag += "-D";
          if (!k.forced_exploration) tag += "-nofe";
          if (k.oracle != CandidateRule::kInstantFurthest) tag += "-" + to_string(k.oracle);
          return tag;
        } else if constexpr (std::is_same_v<K, UniformConfig>) {
          return "Uniform";
        } else if constexpr (std::is_same_v<K, FixedOracleConfig>) {
          return "Fixed";
        } else if constexpr (std::is_same_v<K, XYStaticConfig>) {
          return "XYStatic";
        } else if constexpr (std::is_same_v<K, XYAdaptiveConfig>) {
          return "XYAdaptive";
        } else if constexpr (std::is_same_v<K, LinGapEConfig>) {
          if (k.stop == LinGapEStop::kEpsGap) return "LinGapE-epsgap";
          if (k.stop == LinGapEStop::kOriginal) return "LinGapE-original";
          return "LinGapE";
        } else {
          return "EpsTaS";
        }
      },
      c);
}

void validate_sampler(const SamplerConfig& c, int num_arms) {
  if (const auto* f = std::get_if<FixedOracleConfig>(&c)) {
    if (f->w.size() == 0) return;
    if (f->w.size() != num_arms) throw std::invalid_argument("fixed allocation has wrong length");
    if ((f->w.array() < 0.0).any() || std::fabs(f->w.sum() - 1.0) > 1e-9) {
      throw std::invalid_argument("fixed allocation must lie in the simplex");
    }
  } else if (const auto* x = std::get_if<XYAdaptiveConfig>(&c)) {
    if (!(x->phase_param > 0.0 && x->phase_param < 1.0)) {
      throw std::invalid_argument("XY-Adaptive phase parameter must be in (0,1)");
    }
  } else if (const auto* e = std::get_if<EpsTaSConfig>(&c)) {
    validate_solver(e->solver);
  }
}

// ---- tracking ----

TrackingState TrackingState::after_initialization(int num_arms) {
  TrackingState s;
  s.counts.assign(num_arms, 1);
  s.cum_weights = Vector::Ones(num_arms);
  s.t = num_arms;
  return s;
}

int c_track(TrackingState& s, const Vector& w) {
  s.cum_weights += w;
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int a = 0; a < static_cast<int>(s.counts.size()); ++a) {
    const double v = static_cast<double>(s.counts[a]) - s.cum_weights(a);
    if (v < best_v) {
      best_v = v;
      best = a;
    }
  }
  ++s.counts[best];
  ++s.t;
  return best;
}

int d_track(TrackingState& s, const Vector& w, int n0) {
  const double scale = static_cast<double>(s.t + 1 - n0);
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int a = 0; a < static_cast<int>(s.counts.size()); ++a) {
    const double v = static_cast<double>(s.counts[a]) - scale * w(a);
    if (v < best_v) {
      best_v = v;
      best = a;
    }
  }
  s.cum_weights += w;
  ++s.counts[best];
  ++s.t;
  return best;
}

// ---- optimistic gains ----

OptimisticGain optimistic_gain(const ProblemInstance& inst, const EstimatorSnapshot& s,
                               const Vector& lambda) {
  const int K = inst.num_arms();
  OptimisticGain g;
  const double sd = static_cast<double>(s.t);
  g.bonus = exploration_bonus(std::max(sd * sd, 2.0), K);
  const double L = inst.max_arm_norm();
  const double cap = 4.0 * inst.bound_m * inst.bound_m * L * L;
  g.U.resize(K);
  g.slack.resize(K);
  const Vector diff = s.mu_hat - lambda;
  for (int a = 0; a < K; ++a) {
    const auto arm = inst.arms.row(a).transpose();
    const double n = arm.dot(s.design_inv * arm);
    g.slack(a) = std::min(g.bonus * n, cap);
    const double u = std::fabs(diff.dot(arm)) + std::sqrt(g.slack(a));
    g.U(a) = u * u;
  }
  return g;
}

int pick_candidate(CandidateRule rule, const ProblemInstance& inst, const EstimatorSnapshot& s,
                   const CharTimeEngine* engine) {
  switch (rule) {
    case CandidateRule::kGreedy:
      return greedy_set(inst, s.mu_hat).front();
    case CandidateRule::kInstantFurthest:
      return instantaneous_furthest_inv(inst, s.mu_hat, s.design_inv).answer;
    case CandidateRule::kFurthest:
      if (engine == nullptr) throw std::logic_error("furthest candidate needs a characteristic-time engine");
      return engine->solve(s.mu_hat).z_f;
  }
  throw std::logic_error("unknown candidate rule");
}

namespace {

Vector mix_uniform(const Vector& w, std::int64_t t) {
  const double K = static_cast<double>(w.size());
  const double td = static_cast<double>(t);
  return (Vector::Constant(w.size(), 1.0 / (td * K)) + (1.0 - 1.0 / td) * w).eval();
}

int argmin_count(const Vector& counts) {
  int best = 0;
  for (int a = 1; a < counts.size(); ++a) {
    if (counts(a) < counts(best)) best = a;
  }
  return best;
}

// arm whose single extra pull minimizes max_y ||y||^2_{V^-1}
int greedy_xy_arm(const Matrix& arms, const Matrix& V_inv, const std::vector<Vector>& dirs) {
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int a = 0; a < arms.rows(); ++a) {
    const Vector Va = V_inv * arms.row(a).transpose();
    const double denom = 1.0 + arms.row(a).dot(Va);
    double worst = 0.0;
    for (const auto& y : dirs) {
      const double proj = y.dot(Va);
      worst = std::max(worst, y.dot(V_inv * y) - proj * proj / denom);
    }
    if (worst < best_v) {
      best_v = worst;
      best = a;
    }
  }
  return best;
}

std::vector<Vector> pair_directions(const ProblemInstance& inst, const std::vector<int>& set) {
  std::vector<Vector> dirs;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      Vector y = inst.answers.row(set[i]) - inst.answers.row(set[j]);
      if (y.squaredNorm() > 0.0) dirs.push_back(std::move(y));
    }
  }
  return dirs;
}

class LeBAISampler final : public Sampler {
 public:
  LeBAISampler(const LeBAIConfig& cfg, const ProblemInstance& inst, const SamplerResources& res)
      : cfg_(cfg), res_(res), track_(TrackingState::after_initialization(inst.num_arms())) {
    const int n = cfg.per_answer_learners ? inst.num_answers() : 1;
    learners_.assign(n, AdaHedge(inst.num_arms()));
  }

  SamplerStep step(const RoundContext& ctx) override {
    const auto& inst = ctx.inst;
    const int oracle = cfg_.oracle == ctx.candidate_rule
                           ? ctx.candidate
                           : pick_candidate(cfg_.oracle, inst, ctx.snap, res_.candidate_engine.get());
    AdaHedge& learner = learners_[cfg_.per_answer_learners ? oracle : 0];
    w_ = learner.predict();
    if (cfg_.forced_exploration) w_ = mix_uniform(w_, ctx.t);
    const PseudoInverse pinv(design_matrix(inst.arms, w_));
    const AlternativeProjection proj = alternative_distance(inst, ctx.snap.mu_hat, pinv, oracle);
    const Vector& lambda = std::isfinite(proj.distance_sq) ? proj.lambda : ctx.snap.mu_hat;
    const OptimisticGain g = optimistic_gain(inst, ctx.snap, lambda);
    learner.update((1.0 - 1.0 / static_cast<double>(ctx.t)) * g.U);
    SamplerStep s;
    s.arm = cfg_.tracking == Tracking::kC ? c_track(track_, w_) : d_track(track_, w_, inst.num_arms());
    return s;
  }

  const Vector* last_allocation() const override { return &w_; }

 private:
  LeBAIConfig cfg_;
  SamplerResources res_;
  TrackingState track_;
  std::vector<AdaHedge> learners_;
  Vector w_;
};

class UniformSampler final : public Sampler {
 public:
  SamplerStep step(const RoundContext& ctx) override {
    SamplerStep s;
    s.arm = argmin_count(ctx.snap.counts);
    return s;
  }
};

class FixedSampler final : public Sampler {
 public:
  FixedSampler(const Vector& w, int num_arms)
      : w_(w), track_(TrackingState::after_initialization(num_arms)) {
    if (w_.size() != num_arms) throw std::invalid_argument("fixed sampler: allocation missing");
  }
  SamplerStep step(const RoundContext&) override {
    SamplerStep s;
    s.arm = c_track(track_, w_);
    return s;
  }
  const Vector* last_allocation() const override { return &w_; }

 private:
  Vector w_;
  TrackingState track_;
};

class EpsTaSSampler final : public Sampler {
 public:
  EpsTaSSampler(const SamplerResources& res, int num_arms)
      : res_(res), track_(TrackingState::after_initialization(num_arms)) {
    if (!res_.tas_engine) throw std::logic_error("eps-TaS needs a characteristic-time engine");
  }
  SamplerStep step(const RoundContext& ctx) override {
    const CharTimeResult r = res_.tas_engine->solve(ctx.snap.mu_hat);
    w_ = mix_uniform(r.w_f, ctx.t);
    SamplerStep s;
    s.arm = c_track(track_, w_);
    return s;
  }
  const Vector* last_allocation() const override { return &w_; }

 private:
  SamplerResources res_;
  TrackingState track_;
  Vector w_;
};

class LinGapESampler final : public Sampler {
 public:
  explicit LinGapESampler(const LinGapEConfig& cfg) : cfg_(cfg) {}

  bool uses_glr_stop() const override { return cfg_.stop == LinGapEStop::kGlr; }

  SamplerStep step(const RoundContext& ctx) override {
    const auto& inst = ctx.inst;
    const auto& s = ctx.snap;
    const int z = cfg_.stop == LinGapEStop::kGlr ? ctx.candidate : greedy_set(inst, s.mu_hat).front();
    const double width = std::sqrt(ctx.threshold.level(static_cast<double>(std::max<std::int64_t>(ctx.t - 1, 1))));
    int x_best = -1;
    double b_best = -std::numeric_limits<double>::infinity();
    Vector y_best;
    for (int x = 0; x < inst.num_answers(); ++x) {
      if (x == z) continue;
      Vector y = inst.answers.row(x) - inst.answers.row(z);
      const double b = s.mu_hat.dot(y) + std::sqrt(std::max(0.0, y.dot(s.design_inv * y))) * width;
      if (b > b_best) {
        b_best = b;
        x_best = x;
        y_best = std::move(y);
      }
    }
    SamplerStep out;
    if (cfg_.stop != LinGapEStop::kGlr && gap_test(ctx, z, width)) {
      out.stop = true;
      out.answer = z;
      return out;
    }
    out.arm = x_best < 0 ? argmin_count(s.counts) : greedy_xy_arm(inst.arms, s.design_inv, {y_best});
    return out;
  }

 private:
  // max over x of the optimistic violation of "z is optimal", against eps
  bool gap_test(const RoundContext& ctx, int z, double width) const {
    const auto& inst = ctx.inst;
    const auto& s = ctx.snap;
    const bool eps_aware = cfg_.stop == LinGapEStop::kEpsGap;
    const double eps = eps_aware ? inst.epsilon : 0.0;
    const bool mul = eps_aware && inst.mode == OptimalityMode::kMultiplicative;
    double worst = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < inst.num_answers(); ++x) {
      if (x == z) continue;
      const Vector y = mul ? Vector((1.0 - eps) * inst.answers.row(x) - inst.answers.row(z))
                           : Vector(inst.answers.row(x) - inst.answers.row(z));
      worst = std::max(worst, s.mu_hat.dot(y) + std::sqrt(std::max(0.0, y.dot(s.design_inv * y))) * width);
    }
    return mul ? worst <= 0.0 : worst <= eps;
  }

  LinGapEConfig cfg_;
};

class XYStaticSampler final : public Sampler {
 public:
  explicit XYStaticSampler(const ProblemInstance& inst) {
    std::vector<int> all(inst.num_answers());
    for (int z = 0; z < inst.num_answers(); ++z) all[z] = z;
    dirs_ = pair_directions(inst, all);
  }
  SamplerStep step(const RoundContext& ctx) override {
    SamplerStep s;
    s.arm = dirs_.empty() ? argmin_count(ctx.snap.counts)
                          : greedy_xy_arm(ctx.inst.arms, ctx.snap.design_inv, dirs_);
    return s;
  }

 private:
  std::vector<Vector> dirs_;
};

// Phased XY design on the surviving answers. A phase ends once the largest
// direction variance has shrunk by phase_param; answers that are beaten with
// confidence are then dropped. Samples are not discarded between phases.
class XYAdaptiveSampler final : public Sampler {
 public:
  XYAdaptiveSampler(const XYAdaptiveConfig& cfg, const ProblemInstance& inst) : cfg_(cfg) {
    for (int z = 0; z < inst.num_answers(); ++z) active_.push_back(z);
  }

  SamplerStep step(const RoundContext& ctx) override {
    const auto& inst = ctx.inst;
    const Matrix& Vi = ctx.snap.design_inv;
    if (dirs_.empty() && !started_) {
      rebuild(inst);
      rho0_ = max_variance(Vi);
      started_ = true;
    }
    if (!dirs_.empty() && max_variance(Vi) <= cfg_.phase_param * rho0_) {
      eliminate(ctx);
      rebuild(inst);
      rho0_ = max_variance(Vi);
    }
    SamplerStep s;
    s.arm = dirs_.empty() ? argmin_count(ctx.snap.counts) : greedy_xy_arm(inst.arms, Vi, dirs_);
    return s;
  }

 private:
  double max_variance(const Matrix& Vi) const {
    double m = 0.0;
    for (const auto& y : dirs_) m = std::max(m, y.dot(Vi * y));
    return m;
  }

  void rebuild(const ProblemInstance& inst) {
    if (active_.size() > 1) {
      dirs_ = pair_directions(inst, active_);
      return;
    }
    // a single survivor: keep refining it against everything else
    dirs_.clear();
    for (int x = 0; x < inst.num_answers(); ++x) {
      if (x == active_.front()) continue;
      Vector y = inst.answers.row(active_.front()) - inst.answers.row(x);
      if (y.squaredNorm() > 0.0) dirs_.push_back(std::move(y));
    }
  }

  void eliminate(const RoundContext& ctx) {
    const auto& s = ctx.snap;
    const double width = std::sqrt(ctx.threshold.level(static_cast<double>(std::max<std::int64_t>(ctx.t - 1, 1))));
    std::vector<int> keep;
    for (int x : active_) {
      bool beaten = false;
      for (int z : active_) {
        if (z == x) continue;
        const Vector y = ctx.inst.answers.row(z) - ctx.inst.answers.row(x);
        if (s.mu_hat.dot(y) - std::sqrt(std::max(0.0, y.dot(s.design_inv * y))) * width > 0.0) {
          beaten = true;
          break;
        }
      }
      if (!beaten) keep.push_back(x);
    }
    if (keep.empty()) keep.push_back(greedy_set(ctx.inst, s.mu_hat).front());
    active_ = std::move(keep);
  }

  XYAdaptiveConfig cfg_;
  std::vector<int> active_;
  std::vector<Vector> dirs_;
  double rho0_ = 0.0;
  bool started_ = false;
};

}  // namespace

std::unique_ptr<Sampler> make_sampler(const SamplerConfig& c, const ProblemInstance& inst,
                                      const SamplerResources& res) {
  validate_sampler(c, inst.num_arms());
  return std::visit(
      [&](const auto& k) -> std::unique_ptr<Sampler> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LeBAIConfig>) {
          return std::make_unique<LeBAISampler>(k, inst, res);
        } else if constexpr (std::is_same_v<K, UniformConfig>) {
          return std::make_unique<UniformSampler>();
        } else if constexpr (std::is_same_v<K, FixedOracleConfig>) {
          return std::make_unique<FixedSampler>(k.w.size() ? k.w : res.fixed_w, inst.num_arms());
        } else if constexpr (std::is_same_v<K, XYStaticConfig>) {
          return std::make_unique<XYStaticSampler>(inst);
        } else if constexpr (std::is_same_v<K, XYAdaptiveConfig>) {
          return std::make_unique<XYAdaptiveSampler>(k, inst);
        } else if constexpr (std::is_same_v<K, LinGapEConfig>) {
          return std::make_unique<LinGapESampler>(k);
        } else {
          return std::make_unique<EpsTaSSampler>(res, inst.num_arms());
        }
      },
      c);
}

}  // namespace epsbai
