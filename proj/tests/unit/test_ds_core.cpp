#include <cmath>
#include <random>

#include "doctest.h"
#include "dsgof/datasets.hpp"
#include "dsgof/ds_core.hpp"
#include "dsgof/error.hpp"
#include "dsgof/lp_basis.hpp"
#include "dsgof/numerics.hpp"

using namespace dsgof;

namespace {

StudyTable shipyard() {
  return {Family::BinomialBeta, {{0, 5}, {0, 5}, {0, 5}, {1, 5}, {5, 5}}, "shipyard"};
}

// Integral of f over [lo, hi] by composite Gauss-Legendre on `pieces` panels.
template <typename F>
double integrate(F f, double lo, double hi, int pieces = 200) {
  const auto& rule = numerics::gauss_legendre(16);
  const double h = (hi - lo) / pieces;
  double acc = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double a = lo + p * h;
    acc += h * rule.integrate([&](double t) { return f(a + h * t); });
  }
  return acc;
}

}  // namespace

TEST_CASE("bic_select") {
  SUBCASE("null input") {
    const auto r = bic_select({0, 0, 0}, 50);
    CHECK(r.m_selected == 0);
    for (double c : r.coeffs) CHECK(c == 0.0);
    CHECK(r.trace.size() == 4);
  }
  SUBCASE("two coefficients, k = 100") {
    const auto r = bic_select({0.3, 0.05}, 100);
    CHECK(r.m_selected == 1);
    CHECK(r.coeffs[0] == 0.3);
    CHECK(r.coeffs[1] == 0.0);
    CHECK(r.trace[1].bic == doctest::Approx(0.09 - std::log(100.0) / 100.0));
    CHECK(r.trace[2].bic == doctest::Approx(0.0925 - 2 * std::log(100.0) / 100.0));
  }
  SUBCASE("magnitude order keeps original indices") {
    const auto r = bic_select({0.01, -0.4, 0.0, 0.35}, 100);
    CHECK(r.m_selected == 2);
    CHECK(r.coeffs[0] == 0.0);
    CHECK(r.coeffs[1] == -0.4);
    CHECK(r.coeffs[3] == 0.35);
  }
  SUBCASE("single dominant coefficient") {
    const auto r = bic_select({1e-4, 0.5, -2e-4, 1e-4, 0, 0, 0, 3e-4}, 30);
    CHECK(r.m_selected == 1);
    CHECK(r.coeffs[1] == 0.5);
  }
}

TEST_CASE("u_function and qlp") {
  const ConjugateSpec spec{Family::BinomialBeta, 0.5, 0.5};
  const auto null = make_model(spec, {0, 0, 0});
  CHECK(null.is_null());
  const auto uf = u_function(null, 11);
  REQUIRE(uf.grid.size() == 11);
  CHECK(uf.grid.front() == 0.0);
  CHECK(uf.grid.back() == 1.0);
  for (double v : uf.values) CHECK(v == 1.0);
  CHECK(qlp(null) == 0.0);

  const auto ship = make_model(spec, {-0.67, 0.90});
  CHECK(d_value(ship, 0.5) == doctest::Approx(1.0 - 0.90 * std::sqrt(5.0) / 2.0).epsilon(1e-12));
  CHECK(qlp(ship) == doctest::Approx(0.67 * 0.67 + 0.81));
  CHECK(maxent_recommended(ship));
  CHECK(min_d(ship) < -0.05);
  const auto uf2 = u_function(ship, 2001);
  double trap = 0.0;
  for (std::size_t i = 1; i < uf2.grid.size(); ++i) trap += 0.5 * (uf2.values[i] + uf2.values[i - 1]) / 2000.0;
  CHECK(trap == doctest::Approx(1.0).epsilon(1e-6));

  const auto rat = make_model({Family::BinomialBeta, 2.30, 14.08}, {0, 0, -0.5});
  CHECK(qlp(rat) == doctest::Approx(0.25));
  const double t = 0.1;
  CHECK(prior_density(rat, t) ==
        doctest::Approx(prior_dist(rat.spec).pdf(t) * (1.0 - 0.5 * eval_T(3, t, rat.spec))).epsilon(1e-12));
}

TEST_CASE("zero coefficients reduce exactly to the conjugate formulas") {
  const ConjugateSpec b{Family::BinomialBeta, 2.0, 3.0};
  const auto m = make_model(b, {0, 0, 0, 0});
  const Observation obs{4.0, 10.0};
  CHECK(marginal_lp(m, obs) == marginal_g(b, obs));
  CHECK(posterior_correction(m, obs) == 1.0);
  CHECK(posterior_lp_density(m, obs, 0.3) == posterior_params(b, obs).pdf(0.3));
  const double stein = (10.0 / 15.0) * 0.4 + (5.0 / 15.0) * 0.4;
  CHECK(elastic_bayes_mean(m, obs) == doctest::Approx(stein).epsilon(1e-15));
  CHECK(prior_density(m, 0.2) == prior_dist(b).pdf(0.2));

  const ConjugateSpec p{Family::PoissonGamma, 0.7, 0.31};
  const auto mp = make_model(p, {});
  CHECK(elastic_bayes_mean(mp, {3.0, 1.0}) == doctest::Approx((3.0 + 0.7) / (1.0 / 0.31 + 1.0)).epsilon(1e-15));

  const ConjugateSpec n{Family::NormalNormal, 1.0, 4.0};
  const auto mn = make_model(n, {0, 0});
  const double lambda = 1.0 / (1.0 + 4.0);
  CHECK(elastic_bayes_mean(mn, {3.0, 1.0}) == doctest::Approx(lambda * 1.0 + (1 - lambda) * 3.0).epsilon(1e-15));
}

TEST_CASE("normalization of prior, posterior and marginal") {
  const ConjugateSpec spec{Family::BinomialBeta, 2.3, 14.08};
  const auto m = make_model(spec, {0.05, -0.1, 0.2});
  CHECK(integrate([&](double t) { return prior_density(m, t); }, 0.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-6));
  const Observation obs{4.0, 14.0};
  CHECK(integrate([&](double t) { return posterior_lp_density(m, obs, t); }, 0.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-6));
  double total = 0.0;
  for (int y = 0; y <= 14; ++y) total += marginal_lp(m, {double(y), 14.0});
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  // Posterior mean by direct quadrature agrees with the Elastic-Bayes formula.
  const double direct = integrate([&](double t) { return t * posterior_lp_density(m, obs, t); }, 0.0, 1.0);
  CHECK(elastic_bayes_mean(m, obs) == doctest::Approx(direct).epsilon(1e-8));
  CHECK(elastic_bayes(m, obs, [](double t) { return t; }) == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("negative marginal is flagged") {
  const auto m = make_model({Family::BinomialBeta, 0.5, 0.5}, {0.0, 2.2});
  CHECK_THROWS_AS(marginal_lp(m, {2.0, 4.0}), Error);
}

TEST_CASE("clipped prior integrates to one") {
  const auto ship = make_model({Family::BinomialBeta, 0.5, 0.5}, {-0.67, 0.90});
  const double z = clip_normalizer(ship);
  CHECK(z > 1.0);
  // Clipped d integrated in u-space: the 2000-panel trapezoid oracle.
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc += std::max(d_value(ship, (i + 0.5) / n), 0.0) / n;
  CHECK(z == doctest::Approx(acc).epsilon(1e-7));
  CHECK(clip_normalizer(make_model({Family::BinomialBeta, 2, 3}, {0.1})) == 1.0);
}

TEST_CASE("first MOM-II iterate is the raw moment estimate") {
  const auto panel = shipyard();
  const ConjugateSpec spec{Family::BinomialBeta, 0.5, 0.5};
  FitOptions opt;
  opt.max_iter = 1;
  opt.smooth = false;
  const auto m = fit_mom2(panel, spec, opt);
  for (int j = 1; j <= 8; ++j) {
    double acc = 0.0;
    for (const auto& o : panel.rows) acc += posterior_expect_T(spec, o, j);
    CHECK(m.raw_coeffs[j - 1] == doctest::Approx(acc / 5.0).epsilon(1e-12));
  }
  CHECK(m.iterations == 1);
  CHECK_FALSE(m.converged);
}

TEST_CASE("shipyard fit") {
  const auto m = fit_mom2(shipyard(), {Family::BinomialBeta, 0.5, 0.5});
  REQUIRE(m.coeffs.size() == 8);
  CHECK(m.coeffs[0] == doctest::Approx(-0.67).epsilon(0.05 / 0.67));
  CHECK(m.coeffs[1] == doctest::Approx(0.90).epsilon(0.05 / 0.90));
  for (int j = 1; j <= 8; ++j) CHECK(std::fabs(m.coeffs[j - 1]) <= std::sqrt(2.0 * j + 1));
  double raw_q = 0.0;
  for (double c : m.raw_coeffs) raw_q += c * c;
  CHECK(qlp(m) <= raw_q);
  CHECK(m.bic_trace.size() == 9);
  // Deterministic.
  const auto again = fit_mom2(shipyard(), {Family::BinomialBeta, 0.5, 0.5});
  CHECK(again.coeffs == m.coeffs);
}

TEST_CASE("converged fit is a fixed point") {
  const auto panel = shipyard();
  const ConjugateSpec spec{Family::BinomialBeta, 0.5, 0.5};
  FitOptions opt;
  opt.m_max = 2;
  opt.eps = 1e-12;
  opt.max_iter = 5000;
  const auto m = fit_mom2(panel, spec, opt);
  REQUIRE(m.converged);
  const auto next = mom2_step(panel, spec, m.raw_coeffs);
  for (std::size_t j = 0; j < next.size(); ++j) CHECK(std::fabs(next[j] - m.raw_coeffs[j]) < 1e-6);
}

TEST_CASE("fit_mom2 argument checks") {
  FitOptions bad;
  bad.m_max = 13;
  CHECK_THROWS_AS(fit_mom2(shipyard(), {Family::BinomialBeta, 0.5, 0.5}, bad), Error);
  bad.m_max = 4;
  bad.eps = 0.0;
  CHECK_THROWS_AS(fit_mom2(shipyard(), {Family::BinomialBeta, 0.5, 0.5}, bad), Error);
  CHECK_THROWS_AS(fit_mom2(shipyard(), {Family::PoissonGamma, 0.5, 0.5}), Error);
}
