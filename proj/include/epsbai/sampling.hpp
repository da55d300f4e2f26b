#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "epsbai/chartime.hpp"
#include "epsbai/learner.hpp"
#include "epsbai/linalg.hpp"
#include "epsbai/model.hpp"
#include "epsbai/stopping.hpp"

namespace epsbai {

enum class CandidateRule { kGreedy, kFurthest, kInstantFurthest };

std::string to_string(CandidateRule r);
CandidateRule parse_candidate_rule(const std::string& s);

enum class Tracking { kC, kD };

struct LeBAIConfig {
  CandidateRule oracle = CandidateRule::kInstantFurthest;
  Tracking tracking = Tracking::kC;
  bool forced_exploration = true;
  bool per_answer_learners = false;  // one AdaHedge per answer, LinGame-like

  bool operator==(const LeBAIConfig&) const = default;
};
struct UniformConfig {
  bool operator==(const UniformConfig&) const = default;
};
// empty w: use w_F(mu) computed once per batch with the run's solver
struct FixedOracleConfig {
  Vector w;

  bool operator==(const FixedOracleConfig& o) const {
    return w.size() == o.w.size() && (w.size() == 0 || w == o.w);
  }
};
struct XYStaticConfig {
  bool operator==(const XYStaticConfig&) const = default;
};
struct XYAdaptiveConfig {
  double phase_param = 0.1;

  bool operator==(const XYAdaptiveConfig&) const = default;
};
// kGlr: GLR eps-stop on the run's candidate. kEpsGap: stop when the
// optimistic gap drops below eps. kOriginal: the BAI gap stop (gap <= 0).
enum class LinGapEStop { kGlr, kEpsGap, kOriginal };
struct LinGapEConfig {
  LinGapEStop stop = LinGapEStop::kGlr;

  bool operator==(const LinGapEConfig&) const = default;
};
struct EpsTaSConfig {
  CharTimeSolver solver = DiscretizedSolver{};

  bool operator==(const EpsTaSConfig&) const = default;
};

using SamplerConfig = std::variant<LeBAIConfig, UniformConfig, FixedOracleConfig, XYStaticConfig,
                                   XYAdaptiveConfig, LinGapEConfig, EpsTaSConfig>;

std::string algo_tag(const SamplerConfig& c);
void validate_sampler(const SamplerConfig& c, int num_arms);

// ---- tracking ----

struct TrackingState {
  std::vector<std::int64_t> counts;
  Vector cum_weights;  // W, starts equal to the initialization counts
  std::int64_t t = 0;  // samples so far

  static TrackingState after_initialization(int num_arms);
};

// W += w, pull argmin N - W (lowest index on ties), N += 1
int c_track(TrackingState& s, const Vector& w);
// argmin N - (t - n0) w with t the current round, N += 1
int d_track(TrackingState& s, const Vector& w, int n0);

// ---- optimistic gains ----

struct OptimisticGain {
  Vector U;
  Vector slack;
  double bonus = 0.0;  // f(s^2), s = samples so far
};

// U^a = (|<mu_hat - lambda, a>| + sqrt(c^a))^2 with
// c^a = min(f(s^2) ||a||^2_{V_N^-1}, 4 M^2 L^2)
OptimisticGain optimistic_gain(const ProblemInstance& inst, const EstimatorSnapshot& s,
                               const Vector& lambda);

// ---- samplers ----

// Shared, read-only, built once per batch.
struct SamplerResources {
  std::shared_ptr<const CharTimeEngine> candidate_engine;  // Furthest candidates / oracle
  std::shared_ptr<const CharTimeEngine> tas_engine;        // eps-TaS
  Vector fixed_w;
};

struct RoundContext {
  const ProblemInstance& inst;
  const EstimatorSnapshot& snap;  // after t-1 samples
  std::int64_t t;                 // current round
  int candidate;                  // stopping candidate z_t
  CandidateRule candidate_rule;
  const StoppingThreshold& threshold;
};

struct SamplerStep {
  int arm = -1;
  bool stop = false;  // only from samplers with their own stopping rule
  int answer = -1;
};

class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual SamplerStep step(const RoundContext& ctx) = 0;
  virtual bool uses_glr_stop() const { return true; }
  // last allocation handed to tracking, when the sampler has one
  virtual const Vector* last_allocation() const { return nullptr; }
};

// answer picked by a candidate rule at the current estimate
int pick_candidate(CandidateRule rule, const ProblemInstance& inst, const EstimatorSnapshot& s,
                   const CharTimeEngine* engine);

std::unique_ptr<Sampler> make_sampler(const SamplerConfig& c, const ProblemInstance& inst,
                                      const SamplerResources& res);

}  // namespace epsbai
