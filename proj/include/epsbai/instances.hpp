#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "epsbai/chartime.hpp"
#include "epsbai/model.hpp"

namespace epsbai {

// mu = e1; answers e1..ed, then two unit vectors in the (e1, e2) plane at
// angles r*theta_eps and (1+r)*theta_eps, theta_eps = arccos(1 - eps).
// Arms are the answers, or {e1, e2} with two_arm (d = 2 only).
ProblemInstance gen_hard_instance(int d, double eps, OptimalityMode mode, double r_eps = 0.1,
                                  bool two_arm = false);

// 19 uniform unit vectors, mu = a1, a20 = a1 except at i0 = argmin_i mu_i where
// a20[i0] = (1 - |mu|^2 + mu[i0]^2 - r eps) / mu[i0]. Arms are the answers.
// Redraws (next sub-seed) while |mu[i0]| < 1e-6, at most 100 times.
ProblemInstance gen_random_instance(int d, double eps, std::uint64_t seed,
                                    OptimalityMode mode = OptimalityMode::kMultiplicative,
                                    double r_eps = 0.1);

// d = 2 family whose T_0 blows up as theta -> 0: answers {e1, e1 rotated by
// theta, e2}, arms {e1, e2}, mu = e1.
ProblemInstance hard_limit_family(double eps, OptimalityMode mode, double theta);

// ---- answer-comparison study ----

// One draw: mu = z1 = (1, 0), z2 at an angle uniform in [-theta_eps, theta_eps],
// z3 and z4 at angles uniform outside that cone. Arms are the answers.
ProblemInstance study_instance(double eps, OptimalityMode mode, std::uint64_t seed);

struct StudyRow {
  double epsilon = 0.0;
  OptimalityMode mode = OptimalityMode::kMultiplicative;
  int n_draws = 0;
  int n_disagree = 0;  // z_F outside the argmax set
  double proportion = 0.0;
  // T_eps / T_g,eps over the disagreement draws; NaN when there are none
  double ratio_q1 = 0.0, ratio_median = 0.0, ratio_q3 = 0.0, ratio_mean = 0.0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  double proportion = 0.0;    // over all draws of every eps
  double ratio_median = 0.0;  // over all disagreement draws
  double ratio_mean = 0.0;
  std::vector<double> ratios;  // pooled, in draw order
};

// draw i of grid point e uses seed derive_seed(derive_seed(seed, e), i)
StudyResult study_answers(const std::vector<double>& eps_grid, int n_draws, OptimalityMode mode,
                          const CharTimeSolver& solver, std::uint64_t seed, int workers = 1);

void write_study_csv(std::ostream& os, const StudyResult& r);
std::vector<StudyRow> read_study_csv(std::istream& is);

}  // namespace epsbai
