#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dsgof/error.hpp"
#include "dsgof/families.hpp"
#include "dsgof/lp_basis.hpp"
#include "dsgof/numerics.hpp"

using namespace dsgof;

TEST_CASE("family names round trip") {
  for (Family f : {Family::BinomialBeta, Family::PoissonGamma, Family::NormalNormal,
                   Family::ExponentialGamma}) {
    CHECK(parse_family(family_name(f)) == f);
  }
  CHECK_THROWS_AS(parse_family("gaussian"), Error);
}

TEST_CASE("spec and observation validation") {
  CHECK_THROWS_AS(validate_spec({Family::BinomialBeta, 0.0, 1.0}), Error);
  CHECK_THROWS_AS(validate_spec({Family::NormalNormal, 0.0, -1.0}), Error);
  CHECK_THROWS_AS(validate_spec({Family::PoissonGamma, 1.0, std::nan("")}), Error);
  CHECK_NOTHROW(validate_spec({Family::NormalNormal, -3.0, 0.5}));
  CHECK_THROWS_AS(validate_observation(Family::BinomialBeta, {5.0, 4.0}), Error);
  CHECK_THROWS_AS(validate_observation(Family::BinomialBeta, {1.5, 4.0}), Error);
  CHECK_NOTHROW(validate_observation(Family::BinomialBeta, {0.0, 0.0}));
  CHECK_THROWS_AS(validate_observation(Family::PoissonGamma, {-1.0, 1.0}), Error);
  CHECK_THROWS_AS(validate_observation(Family::PoissonGamma, {2.0, 0.0}), Error);
  CHECK_THROWS_AS(validate_observation(Family::NormalNormal, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(validate_observation(Family::ExponentialGamma, {0.0, 1.0}), Error);
  try {
    validate_observation(Family::BinomialBeta, {5.0, 4.0});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
  }
}

TEST_CASE("conjugate posteriors") {
  const auto pb = posterior_params({Family::BinomialBeta, 2.0, 3.0}, {4.0, 10.0});
  CHECK(pb.kind == DistKind::Beta);
  CHECK(pb.p1 == 6.0);
  CHECK(pb.p2 == 9.0);
  const auto pg = posterior_params({Family::PoissonGamma, 0.7, 0.31}, {3.0, 2.0});
  CHECK(pg.p1 == doctest::Approx(3.7));
  CHECK(pg.p2 == doctest::Approx(0.31 / (1.0 + 2.0 * 0.31)));
  const auto pn = posterior_params({Family::NormalNormal, 0.0, 1.0}, {2.0, 1.0});
  CHECK(pn.p1 == doctest::Approx(1.0));
  CHECK(pn.p2 == doctest::Approx(0.5));
  const auto pe = posterior_params({Family::ExponentialGamma, 2.0, 0.5}, {3.0, 1.0});
  CHECK(pe.p1 == doctest::Approx(3.0));
  CHECK(pe.p2 == doctest::Approx(0.5 / (1.0 + 3.0 * 0.5)));
}

TEST_CASE("marginals against scipy") {
  // scipy.stats.nbinom(0.7, 1 / 1.31).pmf(3)
  CHECK(marginal_g({Family::PoissonGamma, 0.7, 0.31}, {3.0, 1.0}) ==
        doctest::Approx(0.00587409225139051).epsilon(1e-10));
  // scipy.stats.betabinom(10, 2.3, 14.08).pmf(2)
  CHECK(marginal_g({Family::BinomialBeta, 2.3, 14.08}, {2.0, 10.0}) ==
        doctest::Approx(0.203300557879675).epsilon(1e-10));
  // N(y; mu, tau^2 + s^2)
  const double v = 1.0 + 0.25;
  CHECK(marginal_g({Family::NormalNormal, 0.0, 1.0}, {1.0, 0.5}) ==
        doctest::Approx(std::exp(-0.5 / v) / std::sqrt(2 * std::numbers::pi * v)).epsilon(1e-12));
  // Lomax: alpha beta (1 + beta y)^-(alpha + 1)
  CHECK(marginal_g({Family::ExponentialGamma, 2.0, 0.5}, {3.0, 1.0}) ==
        doctest::Approx(2.0 * 0.5 * std::pow(2.5, -3.0)).epsilon(1e-12));
}

TEST_CASE("binomial marginal sums to one and Bayes identity holds") {
  const ConjugateSpec spec{Family::BinomialBeta, 2.3, 14.08};
  double total = 0.0;
  for (int y = 0; y <= 14; ++y) total += marginal_g(spec, {double(y), 14.0});
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  const Observation obs{3.0, 14.0};
  const auto prior = prior_dist(spec);
  const auto post = posterior_params(spec, obs);
  for (double t : {0.05, 0.2, 0.4}) {
    const double lhs = post.log_pdf(t);
    const double rhs = log_likelihood(spec.family, obs, t) + prior.log_pdf(t) - log_marginal_g(spec, obs);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("Dist cdf and quantile are inverse") {
  for (Dist d : {Dist{DistKind::Beta, 0.5, 0.5}, Dist{DistKind::Gamma, 0.104, 89.79},
                 Dist{DistKind::Normal, 3.0, 4.0}}) {
    for (double p : {0.01, 0.3, 0.5, 0.9, 0.999}) CHECK(d.cdf(d.quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
  const Dist n{DistKind::Normal, 3.0, 4.0};
  CHECK(n.mean() == 3.0);
  CHECK(n.variance() == 4.0);
  CHECK(std::isinf(n.lower()));
  const Dist g{DistKind::Gamma, 2.0, 3.0};
  CHECK(g.mean() == doctest::Approx(6.0));
  CHECK(g.variance() == doctest::Approx(18.0));
  CHECK(g.lower() == 0.0);
}

TEST_CASE("posterior expectations of T_j against scipy quadrature") {
  CHECK(posterior_expect_T({Family::NormalNormal, 0.0, 1.0}, {2.0, 1.0}, 1) ==
        doctest::Approx(1.01460734154).epsilon(1e-9));
  CHECK(posterior_expect_T({Family::PoissonGamma, 0.7, 0.31}, {3.0, 1.0}, 2) ==
        doctest::Approx(1.42245591065).epsilon(1e-8));
  const auto all = posterior_expect_T_all({Family::PoissonGamma, 0.7, 0.31}, {3.0, 1.0}, 4);
  REQUIRE(all.size() == 4);
  CHECK(all[1] == doctest::Approx(1.42245591065).epsilon(1e-8));
}

TEST_CASE("marginal averages of E[T_j | y] vanish") {
  // sum_y f_G(y) E[T_j | y] = E_G[T_j] = 0.
  const ConjugateSpec spec{Family::BinomialBeta, 2.3, 14.08};
  for (int j = 1; j <= 6; ++j) {
    double acc = 0.0;
    for (int y = 0; y <= 20; ++y) {
      const Observation obs{double(y), 20.0};
      acc += marginal_g(spec, obs) * posterior_expect_T(spec, obs, j);
    }
    CHECK(std::fabs(acc) < 1e-8);
  }
}

TEST_CASE("posterior_expect_hT with j = 0 is the posterior mean of h") {
  const ConjugateSpec spec{Family::BinomialBeta, 2.0, 3.0};
  const Observation obs{4.0, 10.0};
  CHECK(posterior_expect_hT(spec, obs, [](double t) { return t; }, 0) ==
        doctest::Approx(6.0 / 15.0).epsilon(1e-10));
  const auto nodes = posterior_nodes(spec, obs, 32);
  double wsum = 0.0;
  for (double w : nodes.w) wsum += w;
  CHECK(wsum == doctest::Approx(1.0));
  for (std::size_t i = 0; i < nodes.u.size(); ++i)
    CHECK(nodes.u[i] == doctest::Approx(prior_dist(spec).cdf(nodes.theta[i])).epsilon(1e-12));
}
