#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "epsbai/chartime.hpp"
#include "epsbai/model.hpp"
#include "epsbai/random.hpp"
#include "epsbai/sampling.hpp"
#include "epsbai/stopping.hpp"

namespace epsbai {

// <mu, a> + N(0, 1)
double sample_reward(const Vector& mu, const Vector& arm, Rng& rng);

struct RunConfig {
  SamplerConfig sampler = LeBAIConfig{};
  CandidateRule candidate = CandidateRule::kInstantFurthest;
  ThresholdKind threshold = ThresholdKind::kHeuristic;
  Schedule schedule{};
  double delta = 0.01;
  // used by the Furthest candidate, the Furthest oracle and a Fixed sampler
  // without explicit weights; empty means default_solver(K)
  std::optional<CharTimeSolver> solver;
  bool project_estimates = false;  // clip ||mu_hat|| to bound_M
  std::int64_t max_rounds = 10'000'000;

  bool operator==(const RunConfig&) const = default;
};

struct RunRecord {
  std::int64_t tau = 0;
  int recommended = -1;
  bool correct = false;
  bool censored = false;
  std::vector<std::int64_t> counts;
  std::uint64_t seed = 0;
  std::string algo_tag;
  std::string candidate_tag;
  std::string schedule_tag;
  std::string threshold_tag;
  std::string mode_tag;
  double epsilon = 0.0;
  double delta = 0.0;
  double wall_time = 0.0;

  // every field except wall_time
  bool same_outcome(const RunRecord& o) const;
};

// Optional per-round observer, for property checks. Called after the arm for
// round t has been chosen, before it is pulled.
struct RoundObserver {
  virtual ~RoundObserver() = default;
  virtual void on_round(std::int64_t t, const ProblemInstance& inst, const EstimatorSnapshot& snap,
                        int candidate, int arm, const Sampler& sampler) = 0;
};

// Read-only state shared by every run of a batch.
struct BatchContext {
  ProblemInstance inst;
  RunConfig config;
  SamplerResources resources;
};
BatchContext prepare_batch(const RunConfig& config, const ProblemInstance& inst);

RunRecord run_one(const BatchContext& ctx, std::uint64_t seed, RoundObserver* observer = nullptr);
RunRecord run_one(const RunConfig& config, const ProblemInstance& inst, std::uint64_t seed);

struct BatchSummary {
  std::size_t n_runs = 0;
  double mean_tau = 0.0;
  double std_of_subsample_means = 0.0;  // sub-samples of 100 consecutive runs
  double q1 = 0.0, median = 0.0, q3 = 0.0;
  double error_rate = 0.0;
  std::size_t censored = 0;
  std::vector<double> mean_counts;
};

struct BatchResult {
  std::vector<RunRecord> records;
  BatchSummary summary;
};

// quantile with linear interpolation between order statistics (numpy default)
double quantile(std::vector<double> values, double q);
BatchSummary summarize(const std::vector<RunRecord>& records, std::size_t subsample = 100);

// seeds base_seed + i, results in run order whatever the worker count
BatchResult run_batch(const RunConfig& config, const ProblemInstance& inst, std::size_t n_runs,
                      std::uint64_t base_seed, int workers);

// EPSBANDIT_WORKERS if set, else `requested`; at least 1
int resolve_workers(int requested);

// ---- results CSV ----
void write_results_csv(std::ostream& os, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_results_csv(std::istream& is);

}  // namespace epsbai
