#pragma once

#include "epsbai/linalg.hpp"

namespace epsbai {

// AdaHedge (de Rooij, van Erven, Grunwald, Koolen 2014) on the simplex.
// Gains are turned into losses max(g) - g each round. The algorithm is
// invariant to a global rescaling of the losses, so no per-round scaling
// is applied; scale() only reports the largest range seen.
class AdaHedge {
 public:
  explicit AdaHedge(int num_arms);

  int arity() const { return static_cast<int>(cum_loss_.size()); }
  Vector predict() const;
  void update(const Vector& gains);

  double mixability_gap() const { return gap_; }
  double learning_rate() const;  // +inf while the gap is 0
  double scale() const { return scale_; }
  const Vector& cumulative_loss() const { return cum_loss_; }

 private:
  Vector cum_loss_;
  double gap_ = 0.0;
  double scale_ = 0.0;
};

}  // namespace epsbai
