// epsbai command line: instance | chartime | run | study-answers | summarize
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <tuple>

#include <CLI11.hpp>
#include <json.hpp>

#include "epsbai/chartime.hpp"
#include "epsbai/instances.hpp"
#include "epsbai/io.hpp"
#include "epsbai/sim.hpp"

using namespace epsbai;

namespace {

std::vector<double> default_eps_grid() {
  // 10 log-spaced values on [0.01, 0.5]
  std::vector<double> g;
  for (int i = 0; i < 10; ++i) g.push_back(0.01 * std::pow(50.0, i / 9.0));
  return g;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

void print_summary(std::ostream& os, const std::string& label, const BatchSummary& s) {
  os << std::left << std::setw(40) << label << std::right << std::fixed << std::setprecision(1)
     << " n=" << s.n_runs << "  mean=" << s.mean_tau << " (+-";
  // spread needs at least two blocks of 100 runs
  if (s.n_runs >= 200)
    os << s.std_of_subsample_means;
  else
    os << "n/a";
  os << ")"
     << "  q1=" << s.q1 << "  median=" << s.median << "  q3=" << s.q3 << std::setprecision(4)
     << "  error=" << s.error_rate << "  censored=" << s.censored << "\n";
  os << std::defaultfloat;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epsilon-best-answer identification in transductive linear bandits"};
  app.require_subcommand(1);

  // instance
  auto* inst_cmd = app.add_subcommand("instance", "write an instance JSON");
  std::string kind = "hard", mode_s = "mul", inst_out;
  int d = 2;
  double eps = 0.05, r_eps = 0.1;
  bool two_arm = false;
  std::uint64_t inst_seed = 0;
  inst_cmd->add_option("--kind", kind, "hard or random")->check(CLI::IsMember({"hard", "random"}));
  inst_cmd->add_option("--d", d, "dimension")->check(CLI::PositiveNumber);
  inst_cmd->add_option("--eps", eps, "epsilon");
  inst_cmd->add_option("--mode", mode_s, "add or mul");
  inst_cmd->add_option("--r-eps", r_eps, "offset ratio of the near answers");
  inst_cmd->add_flag("--two-arm", two_arm, "arms {e1, e2} (hard, d = 2)");
  inst_cmd->add_option("--seed", inst_seed, "seed for random instances");
  inst_cmd->add_option("-o,--out", inst_out, "output file (stdout if absent)");

  // chartime
  auto* ct_cmd = app.add_subcommand("chartime", "characteristic time at mu");
  std::string ct_instance, solver_s = "discretized";
  int points = 10000, max_iters = 200;
  std::uint64_t ct_seed = 0;
  double tolerance = 1e-6;
  bool greedy = false;
  ct_cmd->add_option("--instance", ct_instance, "instance JSON")->required();
  ct_cmd->add_option("--solver", solver_s, "discretized or binary")
      ->check(CLI::IsMember({"discretized", "binary"}));
  ct_cmd->add_option("--points", points, "simplex points (discretized)");
  ct_cmd->add_option("--seed", ct_seed, "simplex seed (discretized)");
  ct_cmd->add_option("--tolerance", tolerance, "search tolerance (binary)");
  ct_cmd->add_option("--max-iters", max_iters, "iterations per search (binary)");
  ct_cmd->add_flag("--greedy", greedy, "restrict to the argmax answers");

  // run
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  std::string config_path, run_out;
  int run_workers = 0;
  run_cmd->add_option("--config", config_path, "experiment config JSON")->required();
  run_cmd->add_option("--workers", run_workers, "worker threads (overrides the config)");
  run_cmd->add_option("-o,--output", run_out, "results CSV (overrides the config)");

  // study-answers
  auto* st_cmd = app.add_subcommand("study-answers", "furthest vs greedy answer study");
  std::vector<double> eps_grid;
  int draws = 2500, st_points = 10000, st_workers = 1;
  std::string st_mode = "mul", st_out;
  std::uint64_t st_seed = 0;
  st_cmd->add_option("--eps", eps_grid, "epsilon grid (default: 10 log-spaced in [0.01, 0.5])")
      ->delimiter(',');
  st_cmd->add_option("--draws", draws, "draws per epsilon")->check(CLI::PositiveNumber);
  st_cmd->add_option("--mode", st_mode, "add or mul");
  st_cmd->add_option("--points", st_points, "simplex points")->check(CLI::PositiveNumber);
  st_cmd->add_option("--seed", st_seed, "seed");
  st_cmd->add_option("--workers", st_workers, "worker threads");
  st_cmd->add_option("-o,--out", st_out, "study CSV (stdout if absent)");

  // summarize
  auto* sum_cmd = app.add_subcommand("summarize", "summary table of a results or study CSV");
  std::string sum_in;
  sum_cmd->add_option("file", sum_in, "results CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*inst_cmd) {
      const OptimalityMode mode = parse_mode(mode_s);
      const ProblemInstance inst = kind == "hard" ? gen_hard_instance(d, eps, mode, r_eps, two_arm)
                                                  : gen_random_instance(d, eps, inst_seed, mode, r_eps);
      write_text(inst_out, instance_to_json(inst));
    } else if (*ct_cmd) {
      const ProblemInstance inst = load_instance(ct_instance);
      CharTimeSolver solver;
      if (solver_s == "discretized") {
        solver = DiscretizedSolver{points, ct_seed};
      } else {
        solver = BinarySearchSolver{tolerance, max_iters};
      }
      validate_solver(solver);
      const CharTimeResult r = greedy ? greedy_char_time(inst, inst.mu, solver) : char_time(inst, inst.mu, solver);
      nlohmann::json j;
      j["t_eps"] = r.infinite ? nlohmann::json(nullptr) : nlohmann::json(r.t_eps);
      j["infinite"] = r.infinite;
      j["z_f_index"] = r.z_f;
      j["w_f"] = std::vector<double>(r.w_f.data(), r.w_f.data() + r.w_f.size());
      j["solver"] = solver_s;
      if (solver_s == "discretized") {
        j["n_points"] = points;
        j["seed"] = ct_seed;
      } else {
        j["tolerance"] = tolerance;
      }
      std::cout << j.dump(2) << "\n";
    } else if (*run_cmd) {
      ExperimentConfig cfg = load_config(config_path);
      if (run_workers > 0) cfg.workers = run_workers;
      if (!run_out.empty()) cfg.output = run_out;
      const ProblemInstance inst = resolve_instance(cfg);
      const BatchResult res = run_batch(cfg.run, inst, static_cast<std::size_t>(cfg.n_runs), cfg.base_seed,
                                        resolve_workers(cfg.workers));
      {
        std::ofstream f(cfg.output, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + cfg.output);
        write_results_csv(f, res.records);
      }
      print_summary(std::cout, algo_tag(cfg.run.sampler) + "/" + to_string(cfg.run.candidate), res.summary);
    } else if (*st_cmd) {
      if (eps_grid.empty()) eps_grid = default_eps_grid();
      const StudyResult r = study_answers(eps_grid, draws, parse_mode(st_mode), DiscretizedSolver{st_points, st_seed},
                                          st_seed, resolve_workers(st_workers));
      std::ostringstream os;
      write_study_csv(os, r);
      write_text(st_out, os.str());
      std::fprintf(stderr, "proportion z_F outside z*: %.4f   ratio median %.4f  mean %.4f\n", r.proportion,
                   r.ratio_median, r.ratio_mean);
    } else if (*sum_cmd) {
      std::ifstream f(sum_in, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open " + sum_in);
      std::string header;
      std::getline(f, header);
      f.clear();
      f.seekg(0);
      if (header.rfind("epsilon,", 0) == 0) {  // study-answers output
        std::printf("%-10s %-15s %7s %9s %10s %8s %8s %8s %8s\n", "epsilon", "mode", "draws", "disagree",
                    "proportion", "q1", "median", "q3", "mean");
        for (const StudyRow& r : read_study_csv(f))
          std::printf("%-10.4g %-15s %7lld %9lld %10.4f %8.4f %8.4f %8.4f %8.4f\n", r.epsilon,
                      to_string(r.mode).c_str(), static_cast<long long>(r.n_draws),
                      static_cast<long long>(r.n_disagree), r.proportion, r.ratio_q1, r.ratio_median, r.ratio_q3,
                      r.ratio_mean);
        return 0;
      }
      const std::vector<RunRecord> records = read_results_csv(f);
      // group by configuration, in order of first appearance
      std::vector<std::string> order;
      std::map<std::string, std::vector<RunRecord>> groups;
      for (const auto& r : records) {
        std::ostringstream key;
        key << r.algo_tag << '/' << r.candidate_tag << '/' << r.schedule_tag << '/' << r.threshold_tag << '/'
            << r.mode_tag << "/eps=" << r.epsilon << "/delta=" << r.delta;
        auto [it, fresh] = groups.try_emplace(key.str());
        if (fresh) order.push_back(key.str());
        it->second.push_back(r);
      }
      for (const auto& k : order) print_summary(std::cout, k, summarize(groups[k]));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
