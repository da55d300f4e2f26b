#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "epsbai/linalg.hpp"

namespace epsbai {

enum class OptimalityMode { kAdditive, kMultiplicative };

std::string to_string(OptimalityMode m);
// accepts "additive"/"add" and "multiplicative"/"mul"
OptimalityMode parse_mode(const std::string& s);

struct ProblemInstance {
  Matrix arms;     // K x d
  Matrix answers;  // Z x d
  Vector mu;
  OptimalityMode mode = OptimalityMode::kMultiplicative;
  double epsilon = 0.0;
  double bound_m = 1.0;

  int dim() const { return static_cast<int>(arms.cols()); }
  int num_arms() const { return static_cast<int>(arms.rows()); }
  int num_answers() const { return static_cast<int>(answers.rows()); }
  // L_K
  double max_arm_norm() const { return arms.rowwise().norm().maxCoeff(); }

  // throws std::invalid_argument describing the first violated invariant
  void validate() const;
};

// Raised by eps_optimal_set in multiplicative mode when max_z <theta, z> <= 0.
class NonPositiveMaximumError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

std::vector<int> greedy_set(const ProblemInstance& inst, const Vector& theta);
std::vector<int> eps_optimal_set(const ProblemInstance& inst, const Vector& theta);
// eps_optimal_set, or the argmax set when the multiplicative max is not positive
std::vector<int> eps_optimal_set_or_greedy(const ProblemInstance& inst, const Vector& theta);
bool is_eps_optimal(const ProblemInstance& inst, const Vector& theta, int z);

// distance to {lambda : <lambda, y> <= c} in the V semi-norm
struct HalfspaceProjection {
  double distance_sq = 0.0;
  Vector lambda;
  bool degenerate = false;  // y outside Im(V)
};

HalfspaceProjection project_halfspace(const Vector& mu_hat, const PseudoInverse& V_pinv,
                                      const Vector& y, double c);
HalfspaceProjection project_halfspace(const Vector& mu_hat, const Matrix& V, const Vector& y,
                                      double c);

struct AlternativeProjection {
  double distance_sq = 0.0;
  Vector lambda;
  int witness = -1;
  bool degenerate = false;
};

// inf over the alternative of z, as a min over the Z-1 half-spaces
AlternativeProjection alternative_distance(const ProblemInstance& inst, const Vector& theta,
                                           const PseudoInverse& V_pinv, int z);
AlternativeProjection alternative_distance(const ProblemInstance& inst, const Vector& theta,
                                           const Vector& w, int z);
// value only; same number as alternative_distance(...).distance_sq
double alternative_value(const ProblemInstance& inst, const Vector& theta,
                         const PseudoInverse& V_pinv, int z);
// V invertible, its inverse given directly (GLR statistics on counts)
double alternative_value_inv(const ProblemInstance& inst, const Vector& theta,
                             const Matrix& V_inv, int z);
AlternativeProjection alternative_distance_inv(const ProblemInstance& inst, const Vector& theta,
                                               const Matrix& V_inv, int z);

// half-space normal and offset for the pair (z, x)
void halfspace_of(const ProblemInstance& inst, int z, int x, Vector& y, double& c);

struct FurthestChoice {
  int answer = -1;
  AlternativeProjection projection;
};

FurthestChoice instantaneous_furthest(const ProblemInstance& inst, const Vector& theta,
                                      const Vector& weights);
FurthestChoice instantaneous_furthest_inv(const ProblemInstance& inst, const Vector& theta,
                                          const Matrix& V_inv);

}  // namespace epsbai
