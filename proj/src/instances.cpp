#include "epsbai/instances.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "epsbai/random.hpp"
#include "epsbai/sim.hpp"

namespace epsbai {

namespace {

constexpr double kPi = 3.14159265358979323846;

double theta_eps(double eps) {
  if (!(eps > 0.0) || eps >= 2.0) throw std::invalid_argument("eps must be in (0, 2)");
  return std::acos(1.0 - eps);
}

Vector planar(int d, double angle) {
  Vector v = Vector::Zero(d);
  v(0) = std::cos(angle);
  v(1) = std::sin(angle);
  return v;
}

Vector unit_sphere(int d, Rng& rng) {
  for (;;) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.normal();
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

}  // namespace

ProblemInstance gen_hard_instance(int d, double eps, OptimalityMode mode, double r_eps,
                                  bool two_arm) {
  if (d < 2) throw std::invalid_argument("gen_hard_instance: d must be >= 2");
  if (!(eps > 0.0)) throw std::invalid_argument("gen_hard_instance: eps must be > 0");
  if (two_arm && d != 2) throw std::invalid_argument("gen_hard_instance: two_arm needs d = 2");
  const double th = theta_eps(eps);
  ProblemInstance inst;
  inst.answers = Matrix::Zero(d + 2, d);
  for (int i = 0; i < d; ++i) inst.answers(i, i) = 1.0;
  inst.answers.row(d) = planar(d, r_eps * th).transpose();
  inst.answers.row(d + 1) = planar(d, (1.0 + r_eps) * th).transpose();
  if (two_arm) {
    inst.arms = Matrix::Identity(2, 2);
  } else {
    inst.arms = inst.answers;
  }
  inst.mu = Vector::Unit(d, 0);
  inst.mode = mode;
  inst.epsilon = eps;
  inst.bound_m = 1.0;
  inst.validate();
  return inst;
}

ProblemInstance gen_random_instance(int d, double eps, std::uint64_t seed, OptimalityMode mode,
                                    double r_eps) {
  if (d < 2) throw std::invalid_argument("gen_random_instance: d must be >= 2");
  if (!(eps > 0.0)) throw std::invalid_argument("gen_random_instance: eps must be > 0");
  constexpr int kAnswers = 20;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    Matrix z(kAnswers, d);
    for (int k = 0; k < kAnswers - 1; ++k) z.row(k) = unit_sphere(d, rng).transpose();
    const Vector mu = z.row(0).transpose();
    Eigen::Index i0 = 0;
    mu.minCoeff(&i0);
    if (std::abs(mu(i0)) < 1e-6) continue;
    z.row(kAnswers - 1) = z.row(0);
    z(kAnswers - 1, i0) = (1.0 - mu.squaredNorm() + mu(i0) * mu(i0) - r_eps * eps) / mu(i0);
    ProblemInstance inst;
    inst.arms = z;
    inst.answers = z;
    inst.mu = mu;
    inst.mode = mode;
    inst.epsilon = eps;
    inst.bound_m = 1.0;
    inst.validate();
    return inst;
  }
  throw std::runtime_error("gen_random_instance: 100 draws with |mu_i0| < 1e-6");
}

ProblemInstance hard_limit_family(double eps, OptimalityMode mode, double theta) {
  ProblemInstance inst;
  inst.answers = Matrix(3, 2);
  inst.answers << 1.0, 0.0, std::cos(theta), std::sin(theta), 0.0, 1.0;
  inst.arms = Matrix::Identity(2, 2);
  inst.mu = Vector::Unit(2, 0);
  inst.mode = mode;
  inst.epsilon = eps;
  inst.bound_m = 1.0;
  inst.validate();
  return inst;
}

ProblemInstance study_instance(double eps, OptimalityMode mode, std::uint64_t seed) {
  const double th = theta_eps(eps);
  Rng rng(seed);
  const auto outside = [&] {
    // uniform on (-pi, -th) u (th, pi)
    const double u = rng.uniform() * 2.0 * (kPi - th);
    return u < kPi - th ? th + u : -th - (u - (kPi - th));
  };
  ProblemInstance inst;
  inst.answers = Matrix(4, 2);
  inst.answers.row(0) = planar(2, 0.0).transpose();
  inst.answers.row(1) = planar(2, (2.0 * rng.uniform() - 1.0) * th).transpose();
  inst.answers.row(2) = planar(2, outside()).transpose();
  inst.answers.row(3) = planar(2, outside()).transpose();
  inst.arms = inst.answers;
  inst.mu = Vector::Unit(2, 0);
  inst.mode = mode;
  inst.epsilon = eps;
  inst.bound_m = 1.0;
  return inst;
}

StudyResult study_answers(const std::vector<double>& eps_grid, int n_draws, OptimalityMode mode,
                          const CharTimeSolver& solver, std::uint64_t seed, int workers) {
  if (n_draws < 1) throw std::invalid_argument("study_answers: n_draws must be >= 1");
  validate_solver(solver);
  const std::size_t n_eps = eps_grid.size();
  const std::size_t total = n_eps * static_cast<std::size_t>(n_draws);
  // per draw: ratio if z_F is outside the argmax set, NaN otherwise
  std::vector<double> ratio(total, std::numeric_limits<double>::quiet_NaN());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= total) return;
      try {
        const std::size_t e = k / n_draws, i = k % n_draws;
        const ProblemInstance inst =
            study_instance(eps_grid[e], mode, derive_seed(derive_seed(seed, e), i));
        const CharTimeEngine engine(inst, solver);
        const CharTimeResult full = engine.solve(inst.mu);
        if (full.z_f != 0) {
          const CharTimeResult g = engine.solve_greedy(inst.mu);
          ratio[k] = full.t_eps / g.t_eps;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
    }
  };
  const int n_workers = static_cast<int>(std::min<std::size_t>(std::max(workers, 1), total));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  StudyResult out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::size_t disagree_total = 0;
  for (std::size_t e = 0; e < n_eps; ++e) {
    std::vector<double> r;
    for (int i = 0; i < n_draws; ++i) {
      const double v = ratio[e * n_draws + i];
      if (!std::isnan(v)) r.push_back(v);
    }
    StudyRow row;
    row.epsilon = eps_grid[e];
    row.mode = mode;
    row.n_draws = n_draws;
    row.n_disagree = static_cast<int>(r.size());
    row.proportion = static_cast<double>(r.size()) / n_draws;
    if (r.empty()) {
      row.ratio_q1 = row.ratio_median = row.ratio_q3 = row.ratio_mean = nan;
    } else {
      row.ratio_q1 = quantile(r, 0.25);
      row.ratio_median = quantile(r, 0.5);
      row.ratio_q3 = quantile(r, 0.75);
      double s = 0.0;
      for (double v : r) s += v;
      row.ratio_mean = s / r.size();
    }
    disagree_total += r.size();
    out.ratios.insert(out.ratios.end(), r.begin(), r.end());
    out.rows.push_back(row);
  }
  out.proportion = total ? static_cast<double>(disagree_total) / total : 0.0;
  if (out.ratios.empty()) {
    out.ratio_median = out.ratio_mean = nan;
  } else {
    out.ratio_median = quantile(out.ratios, 0.5);
    double s = 0.0;
    for (double v : out.ratios) s += v;
    out.ratio_mean = s / out.ratios.size();
  }
  return out;
}

namespace {

const char* const kStudyColumns[] = {"epsilon",  "mode",     "n_draws",      "n_disagree", "proportion",
                                     "ratio_q1", "ratio_median", "ratio_q3", "ratio_mean"};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double parse_real(const std::string& s) {
  if (s == "nan" || s == "NaN" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

}  // namespace

void write_study_csv(std::ostream& os, const StudyResult& r) {
  for (std::size_t i = 0; i < std::size(kStudyColumns); ++i) os << (i ? "," : "") << kStudyColumns[i];
  os << '\n';
  for (const auto& row : r.rows) {
    os << fmt(row.epsilon) << ',' << to_string(row.mode) << ',' << row.n_draws << ','
       << row.n_disagree << ',' << fmt(row.proportion) << ',' << fmt(row.ratio_q1) << ','
       << fmt(row.ratio_median) << ',' << fmt(row.ratio_q3) << ',' << fmt(row.ratio_mean) << '\n';
  }
}

std::vector<StudyRow> read_study_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("study csv: empty input");
  const auto split = [](const std::string& l) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : l) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    f.push_back(cur);
    return f;
  };
  const auto header = split(line);
  if (header.size() != std::size(kStudyColumns))
    throw std::invalid_argument("study csv: unexpected header");
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] != kStudyColumns[i]) throw std::invalid_argument("study csv: unexpected column " + header[i]);
  std::vector<StudyRow> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw std::invalid_argument("study csv: wrong field count");
    StudyRow r;
    r.epsilon = parse_real(f[0]);
    r.mode = parse_mode(f[1]);
    r.n_draws = std::stoi(f[2]);
    r.n_disagree = std::stoi(f[3]);
    r.proportion = parse_real(f[4]);
    r.ratio_q1 = parse_real(f[5]);
    r.ratio_median = parse_real(f[6]);
    r.ratio_q3 = parse_real(f[7]);
    r.ratio_mean = parse_real(f[8]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace epsbai
