#include <cmath>

#include "doctest.h"
#include "dsgof/datasets.hpp"
#include "dsgof/error.hpp"
#include "dsgof/hyperparams.hpp"

using namespace dsgof;

// Reference optima from scipy.optimize on the same log-likelihoods.

TEST_CASE("beta-binomial MLE on the rat panel") {
  const auto r = mle_beta_binomial(load_dataset("rat"));
  CHECK(r.converged);
  CHECK(r.spec.hyper1 == doctest::Approx(2.30478367).epsilon(1e-4));
  CHECK(r.spec.hyper2 == doctest::Approx(14.07981151).epsilon(1e-4));
  CHECK(r.loglik == doctest::Approx(-154.1402496651962).epsilon(1e-9));
}

TEST_CASE("poisson-gamma MLE on the insurance histogram") {
  const auto r = mle_poisson_gamma(load_dataset("insurance"));
  CHECK(r.spec.hyper1 == doctest::Approx(0.70151217).epsilon(1e-4));
  CHECK(r.spec.hyper2 == doctest::Approx(0.30555945).epsilon(1e-4));
  CHECK(r.loglik == doctest::Approx(-5348.039959560618).epsilon(1e-9));
}

TEST_CASE("zero-truncated poisson-gamma MLE") {
  const auto r = mle_poisson_gamma(load_dataset("butterfly"), true);
  CHECK(r.spec.hyper1 == doctest::Approx(0.49064507).epsilon(1e-3));
  CHECK(r.spec.hyper2 == doctest::Approx(9.13134251).epsilon(1e-3));
  CHECK(r.loglik == doctest::Approx(-1394.9858968963542).epsilon(1e-8));
}

TEST_CASE("normal-normal MLE on the arsenic panel") {
  const auto r = mle_normal_normal(load_dataset("arsenic"));
  CHECK_FALSE(r.boundary);
  CHECK(r.spec.hyper1 == doctest::Approx(12.593880870912349).epsilon(1e-5));
  CHECK(std::sqrt(r.spec.hyper2) == doctest::Approx(2.188710343847498).epsilon(1e-5));
  CHECK(r.loglik == doctest::Approx(-20.382017021850835).epsilon(1e-9));
}

TEST_CASE("normal-normal MLE at the tau = 0 boundary") {
  StudyTable t{Family::NormalNormal, {{0.0, 1.0}, {0.1, 1.0}, {-0.1, 1.0}, {0.05, 2.0}}, "tight"};
  const auto r = mle_normal_normal(t);
  CHECK(r.boundary);
  CHECK(r.spec.hyper2 > 0.0);
  CHECK(r.spec.hyper2 < 1e-10);
}

TEST_CASE("exponential-gamma MLE") {
  StudyTable t{Family::ExponentialGamma, {}, "lomax"};
  for (double y : {0.5, 1.2, 30.0, 0.1, 2.2, 0.8, 15.0, 0.3, 0.05, 1.7, 7.5, 0.02}) t.rows.push_back({y, 1.0});
  const auto r = mle_exponential_gamma(t);
  CHECK(r.spec.hyper1 == doctest::Approx(0.64579463).epsilon(1e-4));
  CHECK(r.spec.hyper2 == doctest::Approx(2.44653724).epsilon(1e-4));
  CHECK(r.loglik == doctest::Approx(-25.092959950227975).epsilon(1e-9));
}

TEST_CASE("degenerate panels are rejected") {
  StudyTable zeros{Family::BinomialBeta, {{0.0, 5.0}, {0.0, 7.0}, {0.0, 3.0}}, "zeros"};
  CHECK_THROWS_AS(mle_beta_binomial(zeros), Error);
  StudyTable one{Family::BinomialBeta, {{1.0, 5.0}}, "one"};
  CHECK_THROWS_AS(mle_beta_binomial(one), Error);
}

TEST_CASE("fit_hyperparameters dispatches and marginal_loglik agrees") {
  const auto rat = load_dataset("rat");
  const auto r = fit_hyperparameters(rat);
  CHECK(r.spec.family == Family::BinomialBeta);
  CHECK(marginal_loglik(rat, r.spec) == doctest::Approx(r.loglik).epsilon(1e-12));
}
