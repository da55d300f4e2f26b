#include "epsbai/model.hpp"

#include <cmath>
#include <limits>

namespace epsbai {

std::string to_string(OptimalityMode m) {
  return m == OptimalityMode::kAdditive ? "additive" : "multiplicative";
}

OptimalityMode parse_mode(const std::string& s) {
  if (s == "additive" || s == "add") return OptimalityMode::kAdditive;
  if (s == "multiplicative" || s == "mul") return OptimalityMode::kMultiplicative;
  throw std::invalid_argument("unknown optimality mode '" + s + "'");
}

void ProblemInstance::validate() const {
  const int d = dim();
  if (d < 1) throw std::invalid_argument("instance: dimension must be positive");
  if (num_arms() < 1 || num_answers() < 1) throw std::invalid_argument("instance: empty arm or answer set");
  if (answers.cols() != d || mu.size() != d) throw std::invalid_argument("instance: dimension mismatch");
  if (!arms.allFinite() || !answers.allFinite() || !mu.allFinite()) {
    throw std::invalid_argument("instance: non-finite entries");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("instance: epsilon must be >= 0");
  if (mode == OptimalityMode::kMultiplicative && epsilon > 1.0) {
    throw std::invalid_argument("instance: multiplicative epsilon must be <= 1");
  }
  if (!(bound_m > 0.0)) throw std::invalid_argument("instance: bound_M must be positive");
  if (mu.norm() > bound_m * (1.0 + 1e-12)) throw std::invalid_argument("instance: ||mu|| exceeds bound_M");
  Eigen::FullPivLU<Matrix> lu(arms);
  lu.setThreshold(1e-10);
  if (lu.rank() < d) throw std::invalid_argument("instance: arms do not span R^d");
  if (mode == OptimalityMode::kMultiplicative && (answers * mu).maxCoeff() <= 0.0) {
    throw std::invalid_argument("instance: multiplicative mode needs max_z <mu, z> > 0");
  }
}

namespace {

double tie_slack(double scale) { return 1e-12 * (1.0 + std::fabs(scale)); }

}  // namespace

std::vector<int> greedy_set(const ProblemInstance& inst, const Vector& theta) {
  const Vector v = inst.answers * theta;
  const double top = v.maxCoeff();
  std::vector<int> out;
  for (int z = 0; z < v.size(); ++z) {
    if (v(z) >= top - tie_slack(top)) out.push_back(z);
  }
  return out;
}

std::vector<int> eps_optimal_set(const ProblemInstance& inst, const Vector& theta) {
  const Vector v = inst.answers * theta;
  const double top = v.maxCoeff();
  double level;
  if (inst.mode == OptimalityMode::kAdditive) {
    level = top - inst.epsilon;
  } else {
    if (!(top > 0.0)) {
      throw NonPositiveMaximumError("multiplicative optimality undefined: max_z <theta, z> <= 0");
    }
    level = (1.0 - inst.epsilon) * top;
  }
  level -= tie_slack(top);
  std::vector<int> out;
  for (int z = 0; z < v.size(); ++z) {
    if (v(z) >= level) out.push_back(z);
  }
  return out;
}

std::vector<int> eps_optimal_set_or_greedy(const ProblemInstance& inst, const Vector& theta) {
  try {
    return eps_optimal_set(inst, theta);
  } catch (const NonPositiveMaximumError&) {
    return greedy_set(inst, theta);
  }
}

bool is_eps_optimal(const ProblemInstance& inst, const Vector& theta, int z) {
  for (int i : eps_optimal_set(inst, theta)) {
    if (i == z) return true;
  }
  return false;
}

void halfspace_of(const ProblemInstance& inst, int z, int x, Vector& y, double& c) {
  if (inst.mode == OptimalityMode::kAdditive) {
    y = inst.answers.row(z) - inst.answers.row(x);
    c = -inst.epsilon;
  } else {
    y = inst.answers.row(z) - (1.0 - inst.epsilon) * inst.answers.row(x);
    c = 0.0;
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared by the pseudo-inverse and the plain-inverse paths. `pinv` is null
// when M is a genuine inverse, in which case every y is in the image.
HalfspaceProjection project_impl(const Vector& mu, const Matrix& M, const PseudoInverse* pinv,
                                 const Vector& y, double c) {
  HalfspaceProjection out;
  const double gap = mu.dot(y) - c;
  if (gap <= 0.0) {
    out.lambda = mu;
    return out;
  }
  if (y.squaredNorm() == 0.0) {
    // {lambda : 0 <= c} with c < 0 is empty
    out.distance_sq = kInf;
    out.lambda = mu;
    return out;
  }
  if (pinv != nullptr && pinv->rank() < y.size() && !pinv->in_image(y)) {
    out.degenerate = true;
    out.lambda = mu - gap * pinv->kernel_direction(y);
    return out;
  }
  const Vector My = M * y;
  const double n = y.dot(My);
  if (!(n > 0.0)) {
    out.degenerate = true;
    out.lambda = mu;
    return out;
  }
  out.distance_sq = gap * gap / n;
  out.lambda = mu - (gap / n) * My;
  return out;
}

double value_impl(const Vector& mu, const Matrix& M, const PseudoInverse* pinv, const Vector& y,
                  double c) {
  const double gap = mu.dot(y) - c;
  if (gap <= 0.0) return 0.0;
  if (y.squaredNorm() == 0.0) return kInf;
  if (pinv != nullptr && pinv->rank() < y.size() && !pinv->in_image(y)) return 0.0;
  const double n = y.dot(M * y);
  if (!(n > 0.0)) return 0.0;
  return gap * gap / n;
}

void require_pair(const ProblemInstance& inst, int z) {
  if (inst.num_answers() < 2) {
    throw std::invalid_argument("alternative_distance: a single answer has no alternative");
  }
  if (z < 0 || z >= inst.num_answers()) throw std::out_of_range("alternative_distance: answer index");
}

AlternativeProjection alternative_impl(const ProblemInstance& inst, const Vector& theta,
                                       const Matrix& M, const PseudoInverse* pinv, int z) {
  require_pair(inst, z);
  AlternativeProjection best;
  best.distance_sq = kInf;
  Vector y;
  double c;
  for (int x = 0; x < inst.num_answers(); ++x) {
    if (x == z) continue;
    halfspace_of(inst, z, x, y, c);
    HalfspaceProjection p = project_impl(theta, M, pinv, y, c);
    if (best.witness < 0 || p.distance_sq < best.distance_sq) {
      best.distance_sq = p.distance_sq;
      best.lambda = std::move(p.lambda);
      best.witness = x;
      best.degenerate = p.degenerate;
      if (best.distance_sq == 0.0) break;
    }
  }
  return best;
}

double alternative_value_impl(const ProblemInstance& inst, const Vector& theta, const Matrix& M,
                              const PseudoInverse* pinv, int z) {
  require_pair(inst, z);
  double best = kInf;
  Vector y;
  double c;
  for (int x = 0; x < inst.num_answers(); ++x) {
    if (x == z) continue;
    halfspace_of(inst, z, x, y, c);
    const double v = value_impl(theta, M, pinv, y, c);
    if (v < best) {
      best = v;
      if (best == 0.0) break;
    }
  }
  return best;
}

}  // namespace

HalfspaceProjection project_halfspace(const Vector& mu_hat, const PseudoInverse& V_pinv,
                                      const Vector& y, double c) {
  return project_impl(mu_hat, V_pinv.matrix(), &V_pinv, y, c);
}

HalfspaceProjection project_halfspace(const Vector& mu_hat, const Matrix& V, const Vector& y,
                                      double c) {
  const PseudoInverse p(V);
  return project_halfspace(mu_hat, p, y, c);
}

AlternativeProjection alternative_distance(const ProblemInstance& inst, const Vector& theta,
                                           const PseudoInverse& V_pinv, int z) {
  return alternative_impl(inst, theta, V_pinv.matrix(), &V_pinv, z);
}

AlternativeProjection alternative_distance(const ProblemInstance& inst, const Vector& theta,
                                           const Vector& w, int z) {
  const PseudoInverse p(design_matrix(inst.arms, w));
  return alternative_distance(inst, theta, p, z);
}

double alternative_value(const ProblemInstance& inst, const Vector& theta,
                         const PseudoInverse& V_pinv, int z) {
  return alternative_value_impl(inst, theta, V_pinv.matrix(), &V_pinv, z);
}

double alternative_value_inv(const ProblemInstance& inst, const Vector& theta,
                             const Matrix& V_inv, int z) {
  return alternative_value_impl(inst, theta, V_inv, nullptr, z);
}

AlternativeProjection alternative_distance_inv(const ProblemInstance& inst, const Vector& theta,
                                               const Matrix& V_inv, int z) {
  return alternative_impl(inst, theta, V_inv, nullptr, z);
}

namespace {

template <class Eval>
FurthestChoice furthest_among(const std::vector<int>& set, Eval eval) {
  FurthestChoice best;
  for (int z : set) {
    AlternativeProjection p = eval(z);
    if (best.answer < 0 || p.distance_sq > best.projection.distance_sq) {
      best.answer = z;
      best.projection = std::move(p);
    }
  }
  return best;
}

}  // namespace

FurthestChoice instantaneous_furthest(const ProblemInstance& inst, const Vector& theta,
                                      const Vector& weights) {
  const PseudoInverse p(design_matrix(inst.arms, weights));
  return furthest_among(eps_optimal_set(inst, theta),
                        [&](int z) { return alternative_distance(inst, theta, p, z); });
}

FurthestChoice instantaneous_furthest_inv(const ProblemInstance& inst, const Vector& theta,
                                          const Matrix& V_inv) {
  return furthest_among(eps_optimal_set_or_greedy(inst, theta),
                        [&](int z) { return alternative_distance_inv(inst, theta, V_inv, z); });
}

}  // namespace epsbai
