#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "epsbai/model.hpp"

namespace epsbai {

struct DiscretizedSolver {
  int n_points = 10000;
  std::uint64_t seed = 0;

  bool operator==(const DiscretizedSolver&) const = default;
};

// nested golden-section over stick-breaking coordinates of the simplex
struct BinarySearchSolver {
  double tolerance = 1e-6;
  int max_iters = 200;

  bool operator==(const BinarySearchSolver&) const = default;
};

using CharTimeSolver = std::variant<DiscretizedSolver, BinarySearchSolver>;

// 500 points for K=2, 10000 otherwise
CharTimeSolver default_solver(int num_arms);
std::string solver_tag(const CharTimeSolver& s);
void validate_solver(const CharTimeSolver& s);

struct CharTimeResult {
  double t_eps = 0.0;
  bool infinite = false;  // every alternative distance is 0
  double inverse = 0.0;   // max_z max_w (1/2) inf ||theta - lambda||^2_{V_w}
  int z_f = -1;
  Vector w_f;
  std::string solver_tag;
};

// Candidate allocations: row 0 is uniform, rows 1..n are Dirichlet(1/K) draws.
// The first m+1 rows for seed s are the same for every n >= m.
Matrix simplex_candidates(int num_arms, int n_points, std::uint64_t seed);

// Solver bound to one instance. For the discretized solver the pseudo-inverse
// norms of every (candidate, half-space) pair are precomputed, so a solve at a
// new theta costs O(n_points * Z^2). Immutable after construction; safe to
// share across threads.
class CharTimeEngine {
 public:
  CharTimeEngine(const ProblemInstance& inst, CharTimeSolver solver);
  ~CharTimeEngine();
  CharTimeEngine(CharTimeEngine&&) noexcept;
  CharTimeEngine& operator=(CharTimeEngine&&) noexcept;

  const ProblemInstance& instance() const;
  const CharTimeSolver& solver() const;

  // max over the eps-optimal answers at theta (argmax set if that is undefined)
  CharTimeResult solve(const Vector& theta) const;
  // max over the argmax set only
  CharTimeResult solve_greedy(const Vector& theta) const;
  CharTimeResult solve_over(const Vector& theta, const std::vector<int>& answers) const;

  struct AnswerValue {
    int z = -1;
    double inverse = 0.0;
    Vector w;
  };
  // per-answer inner max over w, for the listed answers
  std::vector<AnswerValue> per_answer(const Vector& theta, const std::vector<int>& answers) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

CharTimeResult char_time(const ProblemInstance& inst, const Vector& theta, const CharTimeSolver& solver);
CharTimeResult greedy_char_time(const ProblemInstance& inst, const Vector& theta,
                                const CharTimeSolver& solver);

// (z_F, w_F, T) at theta
struct FurthestAnswer {
  int answer = -1;
  Vector allocation;
  double t_eps = 0.0;
  bool infinite = false;
};
FurthestAnswer furthest_answer(const ProblemInstance& inst, const Vector& theta,
                               const CharTimeSolver& solver);

// Closed-form limit of T on the hard family (answers e_1, e_1 rotated by
// theta_t -> 0 towards e_{d-1}, and the remaining basis vectors).
struct HardLimit {
  double t_limit = 0.0;
  double w_star = 0.0;
};
double hard_w_star(double a);
HardLimit hard_bai_limit(int d, double eps, OptimalityMode mode);

}  // namespace epsbai
