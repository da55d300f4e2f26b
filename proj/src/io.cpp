#include "epsbai/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "epsbai/instances.hpp"

namespace epsbai {

using nlohmann::json;

namespace {

std::string real(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in instance");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string row_json(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + real(v(i));
  return s + "]";
}

std::string matrix_json(const Matrix& m) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) s += std::string(r ? ",\n    " : "\n    ") + row_json(m.row(r).transpose());
  return s + "\n  ]";
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

Vector to_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": expected numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

Matrix to_matrix(const json& j, int d, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of rows");
  Matrix m(j.size(), d);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = to_vector(j[r], where);
    if (row.size() != d) throw ConfigError(where + ": row length differs from d");
    m.row(r) = row.transpose();
  }
  return m;
}

// rethrow parse helpers' invalid_argument as ConfigError
template <class F>
auto wrap(F&& f, const std::string& where) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

// ---- small enums without a parser elsewhere ----

std::string tracking_name(Tracking t) { return t == Tracking::kC ? "C" : "D"; }
Tracking parse_tracking(const std::string& s) {
  if (s == "C" || s == "c") return Tracking::kC;
  if (s == "D" || s == "d") return Tracking::kD;
  throw ConfigError("unknown tracking: " + s);
}

std::string stop_name(LinGapEStop s) {
  switch (s) {
    case LinGapEStop::kGlr: return "glr";
    case LinGapEStop::kEpsGap: return "epsgap";
    case LinGapEStop::kOriginal: return "original";
  }
  return "glr";
}
LinGapEStop parse_stop(const std::string& s) {
  if (s == "glr") return LinGapEStop::kGlr;
  if (s == "epsgap") return LinGapEStop::kEpsGap;
  if (s == "original") return LinGapEStop::kOriginal;
  throw ConfigError("unknown LinGapE stop: " + s);
}

std::string schedule_kind_name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::kEveryStep: return "every";
    case ScheduleKind::kLazy: return "lazy";
    case ScheduleKind::kSticky: return "sticky";
  }
  return "every";
}
ScheduleKind parse_schedule_kind(const std::string& s) {
  if (s == "every" || s == "every-step") return ScheduleKind::kEveryStep;
  if (s == "lazy") return ScheduleKind::kLazy;
  if (s == "sticky") return ScheduleKind::kSticky;
  throw ConfigError("unknown schedule kind: " + s);
}

// ---- solver ----

json solver_json(const CharTimeSolver& s) {
  if (const auto* d = std::get_if<DiscretizedSolver>(&s))
    return {{"kind", "discretized"}, {"n_points", d->n_points}, {"seed", d->seed}};
  const auto& b = std::get<BinarySearchSolver>(s);
  return {{"kind", "binary"}, {"tolerance", b.tolerance}, {"max_iters", b.max_iters}};
}

CharTimeSolver solver_from(const json& j) {
  const std::string w = "solver";
  const auto kind = get<std::string>(j, "kind", w);
  if (kind == "discretized") {
    check_keys(j, {"kind", "n_points", "seed"}, w);
    DiscretizedSolver s;
    s.n_points = get_or<int>(j, "n_points", s.n_points, w);
    s.seed = get_or<std::uint64_t>(j, "seed", s.seed, w);
    return s;
  }
  if (kind == "binary") {
    check_keys(j, {"kind", "tolerance", "max_iters"}, w);
    BinarySearchSolver s;
    s.tolerance = get_or<double>(j, "tolerance", s.tolerance, w);
    s.max_iters = get_or<int>(j, "max_iters", s.max_iters, w);
    return s;
  }
  throw ConfigError("unknown solver kind: " + kind);
}

// ---- sampler ----

json sampler_json(const SamplerConfig& c) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LeBAIConfig>) {
          return {{"kind", "lebai"},
                  {"oracle", to_string(s.oracle)},
                  {"tracking", tracking_name(s.tracking)},
                  {"forced_exploration", s.forced_exploration},
                  {"per_answer_learners", s.per_answer_learners}};
        } else if constexpr (std::is_same_v<T, UniformConfig>) {
          return {{"kind", "uniform"}};
        } else if constexpr (std::is_same_v<T, FixedOracleConfig>) {
          json w = json::array();
          for (Eigen::Index i = 0; i < s.w.size(); ++i) w.push_back(s.w(i));
          return {{"kind", "fixed"}, {"w", w}};
        } else if constexpr (std::is_same_v<T, XYStaticConfig>) {
          return {{"kind", "xy-static"}};
        } else if constexpr (std::is_same_v<T, XYAdaptiveConfig>) {
          return {{"kind", "xy-adaptive"}, {"phase_param", s.phase_param}};
        } else if constexpr (std::is_same_v<T, LinGapEConfig>) {
          return {{"kind", "lingape"}, {"stop", stop_name(s.stop)}};
        } else {
          return {{"kind", "eps-tas"}, {"solver", solver_json(s.solver)}};
        }
      },
      c);
}

SamplerConfig sampler_from(const json& j) {
  const std::string w = "sampler";
  const auto kind = get<std::string>(j, "kind", w);
  if (kind == "lebai") {
    check_keys(j, {"kind", "oracle", "tracking", "forced_exploration", "per_answer_learners"}, w);
    LeBAIConfig s;
    if (j.contains("oracle"))
      s.oracle = wrap([&] { return parse_candidate_rule(get<std::string>(j, "oracle", w)); }, w);
    if (j.contains("tracking")) s.tracking = parse_tracking(get<std::string>(j, "tracking", w));
    s.forced_exploration = get_or<bool>(j, "forced_exploration", s.forced_exploration, w);
    s.per_answer_learners = get_or<bool>(j, "per_answer_learners", s.per_answer_learners, w);
    return s;
  }
  if (kind == "uniform") {
    check_keys(j, {"kind"}, w);
    return UniformConfig{};
  }
  if (kind == "fixed") {
    check_keys(j, {"kind", "w"}, w);
    FixedOracleConfig s;
    if (j.contains("w")) s.w = to_vector(j.at("w"), w + ".w");
    return s;
  }
  if (kind == "xy-static") {
    check_keys(j, {"kind"}, w);
    return XYStaticConfig{};
  }
  if (kind == "xy-adaptive") {
    check_keys(j, {"kind", "phase_param"}, w);
    XYAdaptiveConfig s;
    s.phase_param = get_or<double>(j, "phase_param", s.phase_param, w);
    return s;
  }
  if (kind == "lingape") {
    check_keys(j, {"kind", "stop"}, w);
    LinGapEConfig s;
    if (j.contains("stop")) s.stop = parse_stop(get<std::string>(j, "stop", w));
    return s;
  }
  if (kind == "eps-tas") {
    check_keys(j, {"kind", "solver"}, w);
    EpsTaSConfig s;
    if (j.contains("solver")) s.solver = solver_from(j.at("solver"));
    return s;
  }
  throw ConfigError("unknown sampler kind: " + kind);
}

// ---- schedule ----

json grid_json(const Grid& g) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantGrid>) {
          return {{"kind", "constant"}, {"t0", s.t0}};
        } else if constexpr (std::is_same_v<T, GeometricGrid>) {
          return {{"kind", "geometric"}, {"t0", s.t0}, {"gamma", s.gamma}};
        } else if constexpr (std::is_same_v<T, GeometricDecreasingGrid>) {
          return {{"kind", "geometric-decreasing"}, {"t0", s.t0}, {"gamma", s.gamma}};
        } else {
          return {{"kind", "bernoulli"}, {"p", s.p}, {"seed", s.seed}};
        }
      },
      g);
}

Grid grid_from(const json& j) {
  const std::string w = "schedule.grid";
  const auto kind = get<std::string>(j, "kind", w);
  if (kind == "constant") {
    check_keys(j, {"kind", "t0"}, w);
    ConstantGrid g;
    g.t0 = get_or<std::int64_t>(j, "t0", g.t0, w);
    return g;
  }
  if (kind == "geometric") {
    check_keys(j, {"kind", "t0", "gamma"}, w);
    GeometricGrid g;
    g.t0 = get_or<std::int64_t>(j, "t0", g.t0, w);
    g.gamma = get_or<double>(j, "gamma", g.gamma, w);
    return g;
  }
  if (kind == "geometric-decreasing") {
    check_keys(j, {"kind", "t0", "gamma"}, w);
    GeometricDecreasingGrid g;
    g.t0 = get_or<std::int64_t>(j, "t0", g.t0, w);
    g.gamma = get_or<double>(j, "gamma", g.gamma, w);
    return g;
  }
  if (kind == "bernoulli") {
    check_keys(j, {"kind", "p", "seed"}, w);
    BernoulliGrid g;
    g.p = get_or<double>(j, "p", g.p, w);
    g.seed = get_or<std::uint64_t>(j, "seed", g.seed, w);
    return g;
  }
  throw ConfigError("unknown grid kind: " + kind);
}

}  // namespace

// ---- instance JSON ----

std::string instance_to_json(const ProblemInstance& inst) {
  std::string s = "{\n";
  s += "  \"d\": " + std::to_string(inst.dim()) + ",\n";
  s += "  \"arms\": " + matrix_json(inst.arms) + ",\n";
  s += "  \"answers\": " + matrix_json(inst.answers) + ",\n";
  s += "  \"mu\": " + row_json(inst.mu) + ",\n";
  s += "  \"mode\": \"" + to_string(inst.mode) + "\",\n";
  s += "  \"epsilon\": " + real(inst.epsilon) + ",\n";
  s += "  \"bound_M\": " + real(inst.bound_m) + "\n}\n";
  return s;
}

ProblemInstance instance_from_json(const std::string& text) {
  const json j = parse(text);
  const std::string w = "instance";
  check_keys(j, {"d", "arms", "answers", "mu", "mode", "epsilon", "bound_M"}, w);
  const int d = get<int>(j, "d", w);
  if (d < 1) throw ConfigError("instance: d must be positive");
  ProblemInstance inst;
  inst.arms = to_matrix(j.at("arms"), d, "instance.arms");
  inst.answers = to_matrix(j.at("answers"), d, "instance.answers");
  inst.mu = to_vector(j.at("mu"), "instance.mu");
  if (inst.mu.size() != d) throw ConfigError("instance.mu: length differs from d");
  inst.mode = wrap([&] { return parse_mode(get<std::string>(j, "mode", w)); }, w);
  inst.epsilon = get<double>(j, "epsilon", w);
  inst.bound_m = get<double>(j, "bound_M", w);
  wrap([&] { inst.validate(); return 0; }, w);
  return inst;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void save_instance(const std::string& path, const ProblemInstance& inst) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << instance_to_json(inst);
}

ProblemInstance load_instance(const std::string& path) { return instance_from_json(read_file(path)); }

// ---- experiment config ----

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (const auto* p = std::get_if<std::string>(&cfg.instance)) {
    j["instance"] = *p;
  } else {
    const auto& g = std::get<InstanceGenerator>(cfg.instance);
    j["generator"] = {{"kind", g.kind == GeneratorKind::kHard ? "hard" : "random"},
                      {"d", g.d},
                      {"r_eps", g.r_eps},
                      {"two_arm", g.two_arm},
                      {"seed", g.seed}};
  }
  if (cfg.epsilon) j["epsilon"] = *cfg.epsilon;
  if (cfg.mode) j["mode"] = to_string(*cfg.mode);
  const RunConfig& r = cfg.run;
  j["sampler"] = sampler_json(r.sampler);
  j["candidate"] = to_string(r.candidate);
  j["threshold"] = to_string(r.threshold);
  j["schedule"] = {{"kind", schedule_kind_name(r.schedule.kind)}, {"grid", grid_json(r.schedule.grid)}};
  j["delta"] = r.delta;
  if (r.solver) j["solver"] = solver_json(*r.solver);
  j["project_estimates"] = r.project_estimates;
  j["max_rounds"] = r.max_rounds;
  j["n_runs"] = cfg.n_runs;
  j["base_seed"] = cfg.base_seed;
  j["workers"] = cfg.workers;
  j["output"] = cfg.output;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = parse(text);
  const std::string w = "config";
  check_keys(j,
             {"instance", "generator", "epsilon", "mode", "sampler", "candidate", "threshold", "schedule",
              "delta", "solver", "project_estimates", "max_rounds", "n_runs", "base_seed", "workers",
              "output"},
             w);
  ExperimentConfig cfg;
  if (j.contains("instance") && j.contains("generator"))
    throw ConfigError("config: give either 'instance' or 'generator', not both");
  if (j.contains("instance")) {
    cfg.instance = get<std::string>(j, "instance", w);
  } else if (j.contains("generator")) {
    const json& g = j.at("generator");
    check_keys(g, {"kind", "d", "r_eps", "two_arm", "seed"}, "generator");
    InstanceGenerator gen;
    const auto kind = get_or<std::string>(g, "kind", "hard", "generator");
    if (kind == "hard") {
      gen.kind = GeneratorKind::kHard;
    } else if (kind == "random") {
      gen.kind = GeneratorKind::kRandom;
    } else {
      throw ConfigError("generator: unknown kind " + kind);
    }
    gen.d = get_or<int>(g, "d", gen.d, "generator");
    gen.r_eps = get_or<double>(g, "r_eps", gen.r_eps, "generator");
    gen.two_arm = get_or<bool>(g, "two_arm", gen.two_arm, "generator");
    gen.seed = get_or<std::uint64_t>(g, "seed", gen.seed, "generator");
    cfg.instance = gen;
  }
  if (j.contains("epsilon")) cfg.epsilon = get<double>(j, "epsilon", w);
  if (j.contains("mode")) cfg.mode = wrap([&] { return parse_mode(get<std::string>(j, "mode", w)); }, w);
  RunConfig& r = cfg.run;
  if (j.contains("sampler")) r.sampler = sampler_from(j.at("sampler"));
  if (j.contains("candidate"))
    r.candidate = wrap([&] { return parse_candidate_rule(get<std::string>(j, "candidate", w)); }, w);
  if (j.contains("threshold"))
    r.threshold = wrap([&] { return parse_threshold_kind(get<std::string>(j, "threshold", w)); }, w);
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    check_keys(s, {"kind", "grid"}, "schedule");
    r.schedule.kind = parse_schedule_kind(get_or<std::string>(s, "kind", "every", "schedule"));
    if (s.contains("grid")) r.schedule.grid = grid_from(s.at("grid"));
  }
  r.delta = get_or<double>(j, "delta", r.delta, w);
  if (j.contains("solver") && !j.at("solver").is_null()) r.solver = solver_from(j.at("solver"));
  r.project_estimates = get_or<bool>(j, "project_estimates", r.project_estimates, w);
  r.max_rounds = get_or<std::int64_t>(j, "max_rounds", r.max_rounds, w);
  cfg.n_runs = get_or<std::int64_t>(j, "n_runs", cfg.n_runs, w);
  cfg.base_seed = get_or<std::uint64_t>(j, "base_seed", cfg.base_seed, w);
  cfg.workers = get_or<int>(j, "workers", cfg.workers, w);
  cfg.output = get_or<std::string>(j, "output", cfg.output, w);

  if (!(r.delta > 0.0 && r.delta < 1.0)) throw ConfigError("config: delta must be in (0,1)");
  if (cfg.n_runs < 1) throw ConfigError("config: n_runs must be >= 1");
  if (r.max_rounds < 1) throw ConfigError("config: max_rounds must be >= 1");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw ConfigError("config: epsilon must be > 0");
  wrap([&] { validate_schedule(r.schedule); return 0; }, "schedule");
  if (r.solver) wrap([&] { validate_solver(*r.solver); return 0; }, "solver");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_file(path)); }

ProblemInstance resolve_instance(const ExperimentConfig& cfg) {
  if (const auto* p = std::get_if<std::string>(&cfg.instance)) {
    ProblemInstance inst = load_instance(*p);
    if (cfg.epsilon) inst.epsilon = *cfg.epsilon;
    if (cfg.mode) inst.mode = *cfg.mode;
    wrap([&] { inst.validate(); return 0; }, "instance");
    return inst;
  }
  const auto& g = std::get<InstanceGenerator>(cfg.instance);
  const double eps = cfg.epsilon.value_or(0.05);
  const OptimalityMode mode = cfg.mode.value_or(OptimalityMode::kMultiplicative);
  return wrap(
      [&] {
        return g.kind == GeneratorKind::kHard ? gen_hard_instance(g.d, eps, mode, g.r_eps, g.two_arm)
                                              : gen_random_instance(g.d, eps, g.seed, mode, g.r_eps);
      },
      "generator");
}

}  // namespace epsbai
