#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "epsbai/model.hpp"
#include "epsbai/sim.hpp"

namespace epsbai {

// malformed JSON or config (CLI exit code 2)
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---- instance JSON ----
// {d, arms, answers, mu, mode, epsilon, bound_M}, reals written with %.17g
std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const std::string& text);
void save_instance(const std::string& path, const ProblemInstance& inst);
ProblemInstance load_instance(const std::string& path);

// ---- experiment config ----

enum class GeneratorKind { kHard, kRandom };

struct InstanceGenerator {
  GeneratorKind kind = GeneratorKind::kHard;
  int d = 2;
  double r_eps = 0.1;
  bool two_arm = false;
  std::uint64_t seed = 0;  // random instances only

  bool operator==(const InstanceGenerator&) const = default;
};

using InstanceSource = std::variant<std::string, InstanceGenerator>;

struct ExperimentConfig {
  InstanceSource instance = InstanceGenerator{};
  // generator parameters; for a file they override what the file says
  std::optional<double> epsilon;
  std::optional<OptimalityMode> mode;
  RunConfig run{};
  std::int64_t n_runs = 500;
  std::uint64_t base_seed = 0;
  int workers = 1;
  std::string output = "results.csv";

  bool operator==(const ExperimentConfig&) const = default;
};

std::string config_to_json(const ExperimentConfig& cfg);
// rejects unknown keys and bad values with ConfigError
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// eps 0.05 and multiplicative when a generator has no explicit values
ProblemInstance resolve_instance(const ExperimentConfig& cfg);

std::string read_file(const std::string& path);

}  // namespace epsbai
