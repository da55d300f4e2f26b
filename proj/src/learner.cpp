#include "epsbai/learner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace epsbai {

namespace {

struct Mix {
  Vector w;
  double loss;  // mix loss of the cumulative losses
};

Mix mix(double eta, const Vector& L) {
  const double mn = L.minCoeff();
  Vector w(L.size());
  if (std::isinf(eta)) {
    for (Eigen::Index i = 0; i < L.size(); ++i) w(i) = L(i) == mn ? 1.0 : 0.0;
  } else {
    w = (-eta * (L.array() - mn)).exp().matrix();
  }
  const double s = w.sum();
  Mix m;
  m.w = w / s;
  m.loss = std::isinf(eta) ? mn : mn - std::log(s / static_cast<double>(L.size())) / eta;
  return m;
}

}  // namespace

AdaHedge::AdaHedge(int num_arms) : cum_loss_(Vector::Zero(num_arms)) {
  if (num_arms < 1) throw std::invalid_argument("AdaHedge needs at least one arm");
}

double AdaHedge::learning_rate() const {
  if (gap_ <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(arity())) / gap_;
}

Vector AdaHedge::predict() const { return mix(learning_rate(), cum_loss_).w; }

void AdaHedge::update(const Vector& gains) {
  if (gains.size() != cum_loss_.size()) throw std::invalid_argument("AdaHedge::update: wrong arity");
  if (!gains.allFinite()) throw std::invalid_argument("AdaHedge::update: non-finite gain");
  const Vector loss = (gains.maxCoeff() - gains.array()).matrix();
  scale_ = std::max(scale_, loss.maxCoeff());
  if (arity() == 1) return;
  const double eta = learning_rate();
  const Mix before = mix(eta, cum_loss_);
  const double h = before.w.dot(loss);
  cum_loss_ += loss;
  const Mix after = mix(eta, cum_loss_);
  gap_ += std::max(0.0, h - (after.loss - before.loss));
}

}  // namespace epsbai
