#include "epsbai/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epsbai {

Matrix design_matrix(const Matrix& arms, const Vector& w) {
  if (w.size() != arms.rows()) {
    throw std::invalid_argument("design_matrix: " + std::to_string(w.size()) + " weights for " +
                                std::to_string(arms.rows()) + " arms");
  }
  if ((w.array() < 0.0).any()) throw std::invalid_argument("design_matrix: negative weight");
  return arms.transpose() * w.asDiagonal() * arms;
}

bool is_design_matrix(const Matrix& V) {
  if (V.rows() != V.cols()) return false;
  if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-10) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(V, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-9;
}

double weighted_norm_sq(const Matrix& V, const Vector& x) {
  if (V.rows() != x.size() || V.cols() != x.size()) {
    throw std::invalid_argument("weighted_norm_sq: dimension mismatch");
  }
  return std::max(0.0, x.dot(V * x));
}

PseudoInverse::PseudoInverse(const Matrix& V) {
  const Eigen::Index d = V.rows();
  pinv_ = Matrix::Zero(d, d);
  projector_ = Matrix::Zero(d, d);
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  if (d == 2) {
    es.computeDirect(V);
  } else {
    es.compute(V);
  }
  const Vector& ev = es.eigenvalues();
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  if (top <= 0.0) return;
  const double cutoff = 1e-10 * top;
  const Matrix& U = es.eigenvectors();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (ev(i) > cutoff) {
      pinv_.noalias() += (1.0 / ev(i)) * U.col(i) * U.col(i).transpose();
      projector_.noalias() += U.col(i) * U.col(i).transpose();
      ++rank_;
    }
  }
}

bool PseudoInverse::in_image(const Vector& y) const {
  return (projector_ * y - y).norm() <= 1e-8 * y.norm();
}

Vector PseudoInverse::kernel_direction(const Vector& y) const {
  Vector k = y - projector_ * y;
  const double n2 = k.squaredNorm();
  if (n2 == 0.0) return Vector::Zero(y.size());
  return k / n2;
}

Matrix pseudo_inverse(const Matrix& V) { return PseudoInverse(V).matrix(); }

EstimatorState::EstimatorState(const Matrix& arms)
    : arms_(arms),
      design_(Matrix::Zero(arms.cols(), arms.cols())),
      cumulant_(Vector::Zero(arms.cols())),
      counts_(arms.rows(), 0) {}

void EstimatorState::observe(int arm, double reward) {
  if (arm < 0 || arm >= num_arms()) throw std::out_of_range("observe: arm index");
  const auto a = arms_.row(arm).transpose();
  design_.noalias() += a * a.transpose();
  cumulant_ += reward * a;
  ++counts_[arm];
  ++rounds_;
}

Matrix EstimatorState::recomputed_design() const {
  Vector w(num_arms());
  for (int a = 0; a < num_arms(); ++a) w(a) = static_cast<double>(counts_[a]);
  return design_matrix(arms_, w);
}

namespace {

Eigen::LLT<Matrix> factor(const Matrix& V) {
  Eigen::LLT<Matrix> llt(V);
  if (llt.info() != Eigen::Success) {
    throw SingularDesignError("design matrix is singular (arms pulled so far do not span R^d)");
  }
  // LLT happily factors matrices that are singular up to rounding
  const double diag_min = llt.matrixL().toDenseMatrix().diagonal().minCoeff();
  const double diag_max = llt.matrixL().toDenseMatrix().diagonal().maxCoeff();
  if (!(diag_min > 1e-7 * diag_max)) {
    throw SingularDesignError("design matrix is numerically singular");
  }
  return llt;
}

}  // namespace

Vector ols_estimate(const EstimatorState& state) {
  return factor(state.design()).solve(state.cumulant());
}

EstimatorSnapshot snapshot(const EstimatorState& state) {
  EstimatorSnapshot s;
  const auto llt = factor(state.design());
  s.design = state.design();
  s.design_inv = llt.solve(Matrix::Identity(state.dim(), state.dim()));
  s.mu_hat = llt.solve(state.cumulant());
  s.counts.resize(state.num_arms());
  for (int a = 0; a < state.num_arms(); ++a) s.counts(a) = static_cast<double>(state.counts()[a]);
  s.t = state.rounds();
  return s;
}

}  // namespace epsbai
