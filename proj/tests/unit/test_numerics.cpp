#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dsgof/error.hpp"
#include "dsgof/lp_basis.hpp"
#include "dsgof/numerics.hpp"

using namespace dsgof;
using namespace dsgof::numerics;

TEST_CASE("log_gamma matches factorials and the half-integer value") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-13));
  CHECK(log_gamma(10.0) == doctest::Approx(std::log(362880.0)).epsilon(1e-13));
  CHECK(log_gamma(3.7) == doctest::Approx(1.42807232666539).epsilon(1e-12));
  CHECK_THROWS_AS(log_gamma(0.0), Error);
  CHECK_THROWS_AS(log_gamma(-1.5), Error);
}

TEST_CASE("regularized incomplete beta") {
  CHECK(reg_incomplete_beta(0.0, 2.0, 3.0) == 0.0);
  CHECK(reg_incomplete_beta(1.0, 2.0, 3.0) == 1.0);
  CHECK(reg_incomplete_beta(0.5, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(reg_incomplete_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  // scipy.special.betainc values
  CHECK(std::fabs(reg_incomplete_beta(0.3, 2.0, 5.0) - 0.579825) < 1e-10);
  CHECK(std::fabs(reg_incomplete_beta(0.9, 0.5, 3.0) - 0.999675025320729) < 1e-10);
  CHECK(std::fabs(reg_incomplete_beta(0.2, 30.0, 70.0) - 0.00969208574900701) < 1e-10);
  double prev = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double v = reg_incomplete_beta(i / 200.0, 2.3, 14.08);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(reg_incomplete_beta(1.5, 1.0, 1.0), Error);
  CHECK_THROWS_AS(reg_incomplete_beta(0.5, 0.0, 1.0), Error);
}

TEST_CASE("regularized incomplete gamma and normal cdf") {
  CHECK(std::fabs(reg_incomplete_gamma(2.5, 1.3) - 0.238634732154986) < 1e-10);
  CHECK(std::fabs(reg_incomplete_gamma(0.104, 5.0) - 0.999848990885806) < 1e-10);
  CHECK(std::fabs(reg_incomplete_gamma(63.0, 70.0) - 0.814032930893858) < 1e-10);
  CHECK(reg_incomplete_gamma(1.0, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(std::fabs(normal_cdf(1.5) - 0.933192798731142) < 1e-12);
  CHECK_THROWS_AS(reg_incomplete_gamma(-1.0, 1.0), Error);
}

TEST_CASE("quantiles invert the cdfs") {
  CHECK(gamma_quantile(0.5, 1.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(beta_quantile(reg_incomplete_beta(0.3, 2.0, 5.0), 2.0, 5.0) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(std::fabs(normal_quantile(0.975) - 1.95996398454005) < 1e-10);
  CHECK(beta_quantile(0.01, 0.5, 5.5) == doctest::Approx(1.49437774860335e-05).epsilon(1e-8));
  CHECK(gamma_quantile(0.9, 0.104, 89.79) == doctest::Approx(25.2456682599033).epsilon(1e-8));
  CHECK(beta_quantile(0.0, 2.0, 2.0) == 0.0);
  CHECK(beta_quantile(1.0, 2.0, 2.0) == 1.0);
  CHECK(std::isinf(gamma_quantile(1.0, 2.0)));
  CHECK(std::isinf(normal_quantile(0.0)));

  struct Case {
    double a, b;
  };
  for (Case c : {Case{0.5, 0.5}, Case{2.3, 14.08}, Case{0.104, 89.79}, Case{30.0, 70.0}}) {
    for (int i = 1; i <= 100; ++i) {
      const double p = i / 101.0;
      const double xb = beta_quantile(p, c.a, c.b);
      CHECK(std::fabs(reg_incomplete_beta(xb, c.a, c.b) - p) < 1e-8);
      const double xg = gamma_quantile(p, c.a, c.b);
      CHECK(std::fabs(reg_incomplete_gamma(c.a, xg / c.b) - p) < 1e-8);
      const double xn = normal_quantile(p, c.a, c.b);
      CHECK(std::fabs(normal_cdf(xn, c.a, c.b) - p) < 1e-8);
    }
  }
  // Interior points: quantile(cdf(x)) = x.
  for (int i = 1; i < 100; ++i) {
    const double x = i / 100.0;
    CHECK(std::fabs(beta_quantile(reg_incomplete_beta(x, 2.0, 5.0), 2.0, 5.0) - x) < 1e-8);
    CHECK(std::fabs(gamma_quantile(reg_incomplete_gamma(3.0, 5.0 * x), 3.0, 1.0) - 5.0 * x) < 1e-8);
    CHECK(std::fabs(normal_quantile(normal_cdf(6.0 * x - 3.0)) - (6.0 * x - 3.0)) < 1e-8);
  }
}

TEST_CASE("Gauss-Legendre rules on the unit interval") {
  const auto& r1 = gauss_legendre(1);
  REQUIRE(r1.size() == 1);
  CHECK(r1.nodes[0] == doctest::Approx(0.5));
  CHECK(r1.weights[0] == doctest::Approx(1.0));
  CHECK(gauss_legendre(2).integrate([](double u) { return u * u; }) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(std::fabs(gauss_legendre(64).integrate([](double u) { return eval_leg(8, u) * eval_leg(8, u); }) - 1.0) < 1e-12);
  for (int n : {1, 2, 7, 64, 128, 333, 512}) {
    const auto& r = gauss_legendre(n);
    CHECK(std::fabs(r.integrate([](double) { return 1.0; }) - 1.0) < 1e-12);
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(r.nodes[i] > 0.0);
      CHECK(r.nodes[i] < 1.0);
      CHECK(r.weights[i] > 0.0);
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
    // Degree 2n - 1 monomial is integrated exactly.
    const int deg = 2 * n - 1;
    CHECK(std::fabs(r.integrate([&](double u) { return std::pow(u, deg); }) - 1.0 / (deg + 1)) < 1e-12);
  }
  CHECK_THROWS_AS(gauss_legendre(0), Error);
  CHECK_THROWS_AS(gauss_legendre(513), Error);
}

TEST_CASE("scalar search helpers") {
  CHECK(golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0) == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
  CHECK_THROWS_AS(bisect_root([](double x) { return x * x + 1.0; }, 0.0, 1.0), Error);
  const auto x = solve_linear({2.0, 1.0, 1.0, 3.0}, {3.0, 5.0});
  CHECK(x[0] == doctest::Approx(0.8));
  CHECK(x[1] == doctest::Approx(1.4));
}
