#include "epsbai/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace epsbai {

double sample_reward(const Vector& mu, const Vector& arm, Rng& rng) {
  return mu.dot(arm) + rng.normal();
}

bool RunRecord::same_outcome(const RunRecord& o) const {
  return tau == o.tau && recommended == o.recommended && correct == o.correct &&
         censored == o.censored && counts == o.counts && seed == o.seed && algo_tag == o.algo_tag &&
         candidate_tag == o.candidate_tag && schedule_tag == o.schedule_tag &&
         threshold_tag == o.threshold_tag && mode_tag == o.mode_tag && epsilon == o.epsilon &&
         delta == o.delta;
}

namespace {

bool needs_candidate_engine(const RunConfig& c) {
  if (c.candidate == CandidateRule::kFurthest) return true;
  if (const auto* l = std::get_if<LeBAIConfig>(&c.sampler)) return l->oracle == CandidateRule::kFurthest;
  if (const auto* f = std::get_if<FixedOracleConfig>(&c.sampler)) return f->w.size() == 0;
  return false;
}

}  // namespace

BatchContext prepare_batch(const RunConfig& config, const ProblemInstance& inst) {
  inst.validate();
  validate_sampler(config.sampler, inst.num_arms());
  validate_schedule(config.schedule);
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  BatchContext ctx;
  ctx.inst = inst;
  ctx.config = config;
  if (needs_candidate_engine(config)) {
    const CharTimeSolver s = config.solver.value_or(default_solver(inst.num_arms()));
    ctx.resources.candidate_engine = std::make_shared<const CharTimeEngine>(inst, s);
    if (const auto* f = std::get_if<FixedOracleConfig>(&config.sampler); f && f->w.size() == 0) {
      ctx.resources.fixed_w = ctx.resources.candidate_engine->solve(inst.mu).w_f;
    }
  }
  if (const auto* e = std::get_if<EpsTaSConfig>(&config.sampler)) {
    ctx.resources.tas_engine = std::make_shared<const CharTimeEngine>(inst, e->solver);
  }
  return ctx;
}

RunRecord run_one(const BatchContext& bctx, std::uint64_t seed, RoundObserver* observer) {
  const auto start = std::chrono::steady_clock::now();
  const ProblemInstance& inst = bctx.inst;
  const RunConfig& cfg = bctx.config;
  const int K = inst.num_arms();

  RunRecord rec;
  rec.seed = seed;
  rec.algo_tag = algo_tag(cfg.sampler);
  rec.candidate_tag = to_string(cfg.candidate);
  rec.schedule_tag = schedule_tag(cfg.schedule);
  rec.threshold_tag = to_string(cfg.threshold);
  rec.mode_tag = to_string(inst.mode);
  rec.epsilon = inst.epsilon;
  rec.delta = cfg.delta;

  Rng noise(derive_seed(seed, 1));
  StoppingRule rule(cfg.schedule, derive_seed(seed, 2));
  const StoppingThreshold th({cfg.threshold, K}, cfg.delta);
  auto sampler = make_sampler(cfg.sampler, inst, bctx.resources);
  const CharTimeEngine* engine = bctx.resources.candidate_engine.get();

  EstimatorState est(inst.arms);
  for (int a = 0; a < K; ++a) est.observe(a, sample_reward(inst.mu, inst.arms.row(a).transpose(), noise));

  int candidate = -1;
  std::int64_t t = K + 1;
  for (;; ++t) {
    EstimatorSnapshot snap = snapshot(est);
    if (cfg.project_estimates) {
      const double n = snap.mu_hat.norm();
      if (n > inst.bound_m) snap.mu_hat *= inst.bound_m / n;
    }
    if (sampler->uses_glr_stop()) {
      bool valid = false;
      if (candidate >= 0) {
        for (int z : eps_optimal_set_or_greedy(inst, snap.mu_hat)) valid = valid || z == candidate;
      }
      const StopPlan plan = rule.plan(t, valid);
      if (plan.refresh_candidate) candidate = pick_candidate(cfg.candidate, inst, snap, engine);
      if (plan.evaluate) {
        const double stat = alternative_value_inv(inst, snap.mu_hat, snap.design_inv, candidate);
        if (should_stop(stat, t, th)) {
          rec.recommended = candidate;
          break;
        }
      }
    }
    if (t - 1 >= cfg.max_rounds) {
      rec.censored = true;
      rec.recommended = candidate >= 0 ? candidate : greedy_set(inst, snap.mu_hat).front();
      break;
    }
    const RoundContext rctx{inst, snap, t, candidate, cfg.candidate, th};
    const SamplerStep step = sampler->step(rctx);
    if (step.stop) {
      rec.recommended = step.answer;
      break;
    }
    if (observer != nullptr) observer->on_round(t, inst, snap, candidate, step.arm, *sampler);
    est.observe(step.arm, sample_reward(inst.mu, inst.arms.row(step.arm).transpose(), noise));
  }

  rec.tau = est.rounds();
  rec.counts = est.counts();
  rec.correct = is_eps_optimal(inst, inst.mu, rec.recommended);
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

RunRecord run_one(const RunConfig& config, const ProblemInstance& inst, std::uint64_t seed) {
  return run_one(prepare_batch(config, inst), seed);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

BatchSummary summarize(const std::vector<RunRecord>& records, std::size_t subsample) {
  BatchSummary s;
  s.n_runs = records.size();
  if (records.empty()) return s;
  std::vector<double> taus;
  taus.reserve(records.size());
  std::size_t errors = 0;
  s.mean_counts.assign(records.front().counts.size(), 0.0);
  for (const auto& r : records) {
    taus.push_back(static_cast<double>(r.tau));
    errors += r.correct ? 0 : 1;
    s.censored += r.censored ? 1 : 0;
    for (std::size_t a = 0; a < r.counts.size() && a < s.mean_counts.size(); ++a) {
      s.mean_counts[a] += static_cast<double>(r.counts[a]);
    }
  }
  const double n = static_cast<double>(records.size());
  for (auto& c : s.mean_counts) c /= n;
  double total = 0.0;
  for (double x : taus) total += x;
  s.mean_tau = total / n;
  s.error_rate = static_cast<double>(errors) / n;
  s.q1 = quantile(taus, 0.25);
  s.median = quantile(taus, 0.5);
  s.q3 = quantile(taus, 0.75);

  const std::size_t groups = subsample ? taus.size() / subsample : 0;
  if (groups >= 2) {
    std::vector<double> means(groups, 0.0);
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t i = 0; i < subsample; ++i) means[g] += taus[g * subsample + i];
      means[g] /= static_cast<double>(subsample);
    }
    double m = 0.0;
    for (double x : means) m += x;
    m /= static_cast<double>(groups);
    double var = 0.0;
    for (double x : means) var += (x - m) * (x - m);
    s.std_of_subsample_means = std::sqrt(var / static_cast<double>(groups - 1));
  }
  return s;
}

int resolve_workers(int requested) {
  if (const char* env = std::getenv("EPSBANDIT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  return std::max(requested, 1);
}

BatchResult run_batch(const RunConfig& config, const ProblemInstance& inst, std::size_t n_runs,
                      std::uint64_t base_seed, int workers) {
  if (n_runs < 1) throw std::invalid_argument("run_batch: n_runs must be >= 1");
  const BatchContext ctx = prepare_batch(config, inst);
  BatchResult out;
  out.records.resize(n_runs);
  const int n_workers = static_cast<int>(std::min<std::size_t>(std::max(workers, 1), n_runs));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_runs) return;
      try {
        out.records[i] = run_one(ctx, base_seed + i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(n_runs);
        return;
      }
    }
  };
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  out.summary = summarize(out.records);
  return out;
}

// ---- CSV ----

namespace {

const char* const kFixedColumns[] = {"algo_tag", "candidate_tag", "schedule_tag", "threshold_kind",
                                     "mode",     "epsilon",       "delta",        "seed",
                                     "tau",      "recommended_index", "correct",  "censored"};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_results_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  const std::size_t K = records.empty() ? 0 : records.front().counts.size();
  for (const char* c : kFixedColumns) os << c << ',';
  for (std::size_t a = 0; a < K; ++a) os << 'n' << a << (a + 1 < K ? "," : "");
  os << '\n';
  std::ostringstream num;
  num << std::setprecision(17);
  for (const auto& r : records) {
    num.str("");
    num << r.epsilon << ',' << r.delta;
    os << r.algo_tag << ',' << r.candidate_tag << ',' << r.schedule_tag << ',' << r.threshold_tag << ','
       << r.mode_tag << ',' << num.str() << ',' << r.seed << ',' << r.tau << ',' << r.recommended << ','
       << (r.correct ? 1 : 0) << ',' << (r.censored ? 1 : 0) << ',';
    for (std::size_t a = 0; a < r.counts.size(); ++a) os << r.counts[a] << (a + 1 < r.counts.size() ? "," : "");
    os << '\n';
  }
}

std::vector<RunRecord> read_results_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("results CSV: missing header");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* c : kFixedColumns) {
    if (!col.count(c)) throw std::runtime_error(std::string("results CSV: missing column ") + c);
  }
  std::vector<std::size_t> count_cols;
  for (std::size_t a = 0;; ++a) {
    auto it = col.find("n" + std::to_string(a));
    if (it == col.end()) break;
    count_cols.push_back(it->second);
  }
  std::vector<RunRecord> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw std::runtime_error("results CSV: line " + std::to_string(line_no) + " has " +
                               std::to_string(f.size()) + " fields, expected " + std::to_string(header.size()));
    }
    try {
      RunRecord r;
      r.algo_tag = f[col["algo_tag"]];
      r.candidate_tag = f[col["candidate_tag"]];
      r.schedule_tag = f[col["schedule_tag"]];
      r.threshold_tag = f[col["threshold_kind"]];
      r.mode_tag = f[col["mode"]];
      r.epsilon = std::stod(f[col["epsilon"]]);
      r.delta = std::stod(f[col["delta"]]);
      r.seed = std::stoull(f[col["seed"]]);
      r.tau = std::stoll(f[col["tau"]]);
      r.recommended = std::stoi(f[col["recommended_index"]]);
      r.correct = std::stoi(f[col["correct"]]) != 0;
      r.censored = std::stoi(f[col["censored"]]) != 0;
      for (auto c : count_cols) r.counts.push_back(std::stoll(f[c]));
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("results CSV: malformed value on line " + std::to_string(line_no));
    }
  }
  return out;
}

}  // namespace epsbai
