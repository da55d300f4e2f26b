#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace epsbai {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Arms and answers are stored row-wise: row i of a K x d matrix is arm i.

class SingularDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// sum_a w_a a a^T
Matrix design_matrix(const Matrix& arms, const Vector& w);

// checks symmetry (1e-10) and eigenvalues >= -1e-9
bool is_design_matrix(const Matrix& V);

double weighted_norm_sq(const Matrix& V, const Vector& x);

// Moore-Penrose pseudo-inverse of a symmetric PSD matrix. Eigenvalues below
// 1e-10 * lambda_max are treated as zero.
class PseudoInverse {
 public:
  PseudoInverse() = default;
  explicit PseudoInverse(const Matrix& V);

  const Matrix& matrix() const { return pinv_; }
  int rank() const { return rank_; }
  int dim() const { return static_cast<int>(pinv_.rows()); }

  // y^T V^+ y
  double norm_sq(const Vector& y) const { return y.dot(pinv_ * y); }
  // ||V V^+ y - y|| <= 1e-8 ||y||
  bool in_image(const Vector& y) const;
  // a vector k with V k = 0 and <k, y> = 1, when y has a kernel component
  Vector kernel_direction(const Vector& y) const;

 private:
  Matrix pinv_;
  Matrix projector_;  // onto Im(V)
  int rank_ = 0;
};

Matrix pseudo_inverse(const Matrix& V);

// Sufficient statistics for the OLS estimate. The design is kept up to date by
// rank-one updates; solves refactorize every time.
class EstimatorState {
 public:
  explicit EstimatorState(const Matrix& arms);

  void observe(int arm, double reward);

  int dim() const { return static_cast<int>(arms_.cols()); }
  int num_arms() const { return static_cast<int>(arms_.rows()); }
  std::int64_t rounds() const { return rounds_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  const Matrix& design() const { return design_; }
  const Vector& cumulant() const { return cumulant_; }
  const Matrix& arms() const { return arms_; }

  // design rebuilt from the counts, for drift checks
  Matrix recomputed_design() const;

 private:
  Matrix arms_;
  Matrix design_;
  Vector cumulant_;
  std::vector<std::int64_t> counts_;
  std::int64_t rounds_ = 0;
};

// Everything a round needs from the estimator, factorized once.
struct EstimatorSnapshot {
  Vector mu_hat;
  Matrix design;
  Matrix design_inv;
  Vector counts;  // as reals, usable as weights
  std::int64_t t = 0;
};

// throws SingularDesignError when V_N is not positive definite
Vector ols_estimate(const EstimatorState& state);
EstimatorSnapshot snapshot(const EstimatorState& state);

}  // namespace epsbai
