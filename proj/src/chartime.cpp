#include "epsbai/chartime.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "epsbai/random.hpp"

namespace epsbai {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// norm markers in the precomputed table
constexpr double kZeroDirection = 0.0;
constexpr double kOutsideImage = -1.0;

inline double term(double gap, double norm) {
  if (gap <= 0.0) return 0.0;
  if (norm == kZeroDirection) return kInf;
  if (norm < 0.0) return 0.0;
  return gap * gap / norm;
}

}  // namespace

CharTimeSolver default_solver(int num_arms) {
  return DiscretizedSolver{num_arms == 2 ? 500 : 10000, 0};
}

std::string solver_tag(const CharTimeSolver& s) {
  if (const auto* d = std::get_if<DiscretizedSolver>(&s)) {
    std::ostringstream os;
    os << "discretized(" << d->n_points << ",seed=" << d->seed << ")";
    return os.str();
  }
  const auto& b = std::get<BinarySearchSolver>(s);
  std::ostringstream os;
  os << "binary_search(tol=" << b.tolerance << ")";
  return os.str();
}

void validate_solver(const CharTimeSolver& s) {
  if (const auto* d = std::get_if<DiscretizedSolver>(&s)) {
    if (d->n_points < 1) throw std::invalid_argument("discretized solver needs n_points >= 1");
  } else {
    const auto& b = std::get<BinarySearchSolver>(s);
    if (!(b.tolerance > 0.0)) throw std::invalid_argument("binary search solver needs tolerance > 0");
    if (b.max_iters < 1) throw std::invalid_argument("binary search solver needs max_iters >= 1");
  }
}

Matrix simplex_candidates(int num_arms, int n_points, std::uint64_t seed) {
  if (num_arms < 1 || n_points < 0) throw std::invalid_argument("simplex_candidates: bad size");
  Matrix out(n_points + 1, num_arms);
  out.row(0).setConstant(1.0 / num_arms);
  Rng rng(derive_seed(seed, 0x51));
  const double alpha = 1.0 / num_arms;
  for (int i = 1; i <= n_points; ++i) {
    double total = 0.0;
    for (int a = 0; a < num_arms; ++a) {
      out(i, a) = rng.gamma(alpha);
      total += out(i, a);
    }
    if (total > 0.0) {
      out.row(i) /= total;
    } else {
      out.row(i).setConstant(1.0 / num_arms);
    }
  }
  return out;
}

struct CharTimeEngine::Impl {
  ProblemInstance inst;
  CharTimeSolver solver;
  int n_answers = 0;
  Matrix Y;  // row z*Z+x holds the half-space normal of the pair (z, x)
  Vector C;
  Matrix cand;
  Matrix norms;  // candidate x pair

  int pair(int z, int x) const { return z * n_answers + x; }

  // closed-form 2x2 inverse; false when V_w is too close to singular, in
  // which case the caller goes through the pseudo-inverse
  bool fill_2d(Eigen::Index i, int P) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (int k = 0; k < inst.num_arms(); ++k) {
      const double w = cand(i, k), u = inst.arms(k, 0), v = inst.arms(k, 1);
      a += w * u * u;
      b += w * u * v;
      c += w * v * v;
    }
    const double det = a * c - b * b;
    const double tr = a + c;
    if (!(det > 1e-10 * tr * tr)) return false;
    for (int p = 0; p < P; ++p) {
      const double y1 = Y(p, 0), y2 = Y(p, 1);
      if (y1 == 0.0 && y2 == 0.0) {
        norms(i, p) = kZeroDirection;
        continue;
      }
      const double n = (c * y1 * y1 - 2.0 * b * y1 * y2 + a * y2 * y2) / det;
      norms(i, p) = n > 0.0 ? n : kOutsideImage;
    }
    return true;
  }

  void precompute_discretized(const DiscretizedSolver& ds) {
    cand = simplex_candidates(inst.num_arms(), ds.n_points, ds.seed);
    const int P = n_answers * n_answers;
    norms.resize(cand.rows(), P);
    for (Eigen::Index i = 0; i < cand.rows(); ++i) {
      if (inst.dim() == 2 && fill_2d(i, P)) continue;
      const PseudoInverse pinv(design_matrix(inst.arms, cand.row(i).transpose()));
      const bool full = pinv.rank() == inst.dim();
      for (int p = 0; p < P; ++p) {
        const Vector y = Y.row(p).transpose();
        if (y.squaredNorm() == 0.0) {
          norms(i, p) = kZeroDirection;
        } else if (!full && !pinv.in_image(y)) {
          norms(i, p) = kOutsideImage;
        } else {
          const double n = pinv.norm_sq(y);
          norms(i, p) = n > 0.0 ? n : kOutsideImage;
        }
      }
    }
  }

  AnswerValue discretized_answer(const Vector& gaps, int z) const {
    AnswerValue out;
    out.z = z;
    out.w = cand.row(0).transpose();
    for (int x = 0; x < n_answers; ++x) {
      if (x != z && gaps(pair(z, x)) <= 0.0) return out;  // z is not eps-optimal
    }
    double best = -1.0;
    Eigen::Index arg = 0;
    for (Eigen::Index i = 0; i < cand.rows(); ++i) {
      double v = kInf;
      for (int x = 0; x < n_answers; ++x) {
        if (x == z) continue;
        const int p = pair(z, x);
        const double t = term(gaps(p), norms(i, p));
        if (t < v) v = t;
      }
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    out.inverse = 0.5 * best;
    out.w = cand.row(arg).transpose();
    return out;
  }

  AnswerValue binary_answer(const BinarySearchSolver& bs, const Vector& theta, int z) const {
    const int K = inst.num_arms();
    AnswerValue out;
    out.z = z;
    out.w = Vector::Constant(K, 1.0 / K);
    double best = -1.0;
    Vector w(K);
    const auto objective = [&](const Vector& ww) {
      const PseudoInverse pinv(design_matrix(inst.arms, ww));
      return 0.5 * alternative_value(inst, theta, pinv, z);
    };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    std::function<double(int, double)> nested = [&](int level, double mass) -> double {
      if (level == K - 1) {
        w(level) = mass;
        const double v = objective(w);
        if (v > best) {
          best = v;
          out.w = w;
        }
        return v;
      }
      const auto eval = [&](double t) {
        w(level) = mass * t;
        return nested(level + 1, mass * (1.0 - t));
      };
      double a = 0.0, b = 1.0;
      double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
      double f1 = eval(x1), f2 = eval(x2);
      for (int it = 0; it < bs.max_iters && (b - a) > bs.tolerance; ++it) {
        if (f1 < f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + phi * (b - a);
          f2 = eval(x2);
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - phi * (b - a);
          f1 = eval(x1);
        }
      }
      return std::max(f1, f2);
    };
    nested(0, 1.0);
    out.inverse = std::max(best, 0.0);
    return out;
  }
};

CharTimeEngine::CharTimeEngine(const ProblemInstance& inst, CharTimeSolver solver)
    : impl_(std::make_unique<Impl>()) {
  validate_solver(solver);
  impl_->inst = inst;
  impl_->solver = solver;
  const int Z = inst.num_answers();
  if (Z < 2) throw std::invalid_argument("characteristic time needs at least two answers");
  impl_->n_answers = Z;
  impl_->Y = Matrix::Zero(Z * Z, inst.dim());
  impl_->C = Vector::Zero(Z * Z);
  Vector y;
  double c;
  for (int z = 0; z < Z; ++z) {
    for (int x = 0; x < Z; ++x) {
      if (x == z) continue;
      halfspace_of(inst, z, x, y, c);
      impl_->Y.row(impl_->pair(z, x)) = y.transpose();
      impl_->C(impl_->pair(z, x)) = c;
    }
  }
  if (const auto* ds = std::get_if<DiscretizedSolver>(&solver)) {
    impl_->precompute_discretized(*ds);
  } else if (inst.num_arms() > 6) {
    // golden-section nesting is exponential in K
    throw std::invalid_argument("binary search solver supports at most 6 arms");
  }
}

CharTimeEngine::~CharTimeEngine() = default;
CharTimeEngine::CharTimeEngine(CharTimeEngine&&) noexcept = default;
CharTimeEngine& CharTimeEngine::operator=(CharTimeEngine&&) noexcept = default;

const ProblemInstance& CharTimeEngine::instance() const { return impl_->inst; }
const CharTimeSolver& CharTimeEngine::solver() const { return impl_->solver; }

std::vector<CharTimeEngine::AnswerValue> CharTimeEngine::per_answer(
    const Vector& theta, const std::vector<int>& answers) const {
  std::vector<AnswerValue> out;
  out.reserve(answers.size());
  if (const auto* bs = std::get_if<BinarySearchSolver>(&impl_->solver)) {
    for (int z : answers) out.push_back(impl_->binary_answer(*bs, theta, z));
    return out;
  }
  const Vector gaps = impl_->Y * theta - impl_->C;
  for (int z : answers) out.push_back(impl_->discretized_answer(gaps, z));
  return out;
}

CharTimeResult CharTimeEngine::solve_over(const Vector& theta, const std::vector<int>& answers) const {
  if (answers.empty()) throw std::invalid_argument("char_time: empty answer set");
  CharTimeResult r;
  r.solver_tag = solver_tag(impl_->solver);
  const auto values = per_answer(theta, answers);
  const AnswerValue* best = &values.front();
  for (const auto& v : values) {
    if (v.inverse > best->inverse) best = &v;
  }
  r.z_f = best->z;
  r.w_f = best->w;
  r.inverse = best->inverse;
  if (r.inverse == kInf) {
    r.t_eps = 0.0;
  } else if (r.inverse <= 0.0) {
    r.infinite = true;
    r.t_eps = kInf;
  } else {
    r.t_eps = 1.0 / r.inverse;
  }
  return r;
}

CharTimeResult CharTimeEngine::solve(const Vector& theta) const {
  return solve_over(theta, eps_optimal_set_or_greedy(impl_->inst, theta));
}

CharTimeResult CharTimeEngine::solve_greedy(const Vector& theta) const {
  return solve_over(theta, greedy_set(impl_->inst, theta));
}

CharTimeResult char_time(const ProblemInstance& inst, const Vector& theta, const CharTimeSolver& solver) {
  eps_optimal_set(inst, theta);  // surfaces the multiplicative precondition
  return CharTimeEngine(inst, solver).solve(theta);
}

CharTimeResult greedy_char_time(const ProblemInstance& inst, const Vector& theta,
                                const CharTimeSolver& solver) {
  return CharTimeEngine(inst, solver).solve_greedy(theta);
}

FurthestAnswer furthest_answer(const ProblemInstance& inst, const Vector& theta,
                               const CharTimeSolver& solver) {
  const auto r = CharTimeEngine(inst, solver).solve_over(theta, eps_optimal_set(inst, theta));
  return {r.z_f, r.w_f, r.t_eps, r.infinite};
}

double hard_w_star(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("hard_w_star: a must be positive");
  if (a > 1.0) return (std::sqrt(a) - 1.0) / (a - 1.0);
  if (a == 1.0) return 0.5;
  return (1.0 - std::sqrt(a)) / (1.0 - a);
}

HardLimit hard_bai_limit(int d, double eps, OptimalityMode mode) {
  if (d < 2) throw std::invalid_argument("hard_bai_limit: d must be >= 2");
  if (!(eps > 0.0)) throw std::invalid_argument("hard_bai_limit: eps must be positive");
  HardLimit out;
  if (mode == OptimalityMode::kAdditive) {
    const double a = d - 1.0;
    out.w_star = hard_w_star(a);
    out.t_limit = (1.0 / out.w_star + a / (1.0 - out.w_star)) / ((1.0 + eps) * (1.0 + eps));
  } else {
    const double a = (1.0 - eps) * (1.0 - eps) * (d - 1.0);
    if (!(a > 0.0)) throw std::invalid_argument("hard_bai_limit: multiplicative eps must be < 1");
    out.w_star = hard_w_star(a);
    out.t_limit = 1.0 / out.w_star + a / (1.0 - out.w_star);
  }
  return out;
}

}  // namespace epsbai
