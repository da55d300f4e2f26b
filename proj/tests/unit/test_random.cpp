#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "epsbai/random.hpp"

using namespace epsbai;

TEST_CASE("AS241 quantile against boost") {
  const boost::math::normal_distribution<double> nd;
  for (double p : {1e-300, 1e-12, 1e-6, 0.001, 0.025, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.999, 1 - 1e-9}) {
    const double q = boost::math::quantile(nd, p);
    CHECK(normal_quantile(p) == doctest::Approx(q).epsilon(1e-13));
  }
}

TEST_CASE("rng streams") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x > 0.0 && x < 1.0));
  }
}

TEST_CASE("gamma moments") {
  Rng r(9);
  for (double shape : {0.25, 1.0, 3.5}) {
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = r.gamma(shape);
      s += x;
      s2 += x * x;
    }
    const double m = s / n, v = s2 / n - m * m;
    // 5 standard errors
    CHECK(std::abs(m - shape) < 5 * std::sqrt(shape / n));
    CHECK(std::abs(v - shape) < 0.05 * shape + 0.01);
  }
}
