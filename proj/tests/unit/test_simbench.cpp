#include <cmath>

#include "doctest.h"
#include "dsgof/simbench.hpp"

using namespace dsgof;

TEST_CASE("Robbins estimates on the insurance histogram") {
  const std::vector<double> counts{7840, 1317, 239, 42, 14, 4, 4, 1};
  CHECK(*robbins_estimate(counts, 0) == doctest::Approx(1317.0 / 7840.0));
  CHECK(*robbins_estimate(counts, 1) == doctest::Approx(2.0 * 239 / 1317));
  CHECK(*robbins_estimate(counts, 5) == doctest::Approx(6.0));
  CHECK(*robbins_estimate(counts, 6) == doctest::Approx(1.75));
  CHECK_FALSE(robbins_estimate(counts, 7).has_value());
  CHECK_FALSE(robbins_estimate({0, 3}, 0).has_value());
}

TEST_CASE("pharma experiment is reproducible and finite") {
  ScenarioConfig cfg = pharma_defaults();
  cfg.etas = {0.0, 0.4};
  cfg.replicates = 4;
  cfg.k = 40;
  cfg.fit.m_max = 4;
  const auto a = pharma_experiment(cfg);
  const auto b = pharma_experiment(cfg);
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mse_fq == b[i].mse_fq);
    CHECK(a[i].mse_ds == b[i].mse_ds);
    CHECK(a[i].used + a[i].failures == 4);
    CHECK(a[i].mse_fq >= 0.0);
    CHECK(a[i].mse_peb >= 0.0);
    CHECK(std::isfinite(a[i].ratio_peb_ds));
  }
}

TEST_CASE("compound decision") {
  ScenarioConfig cfg = compound_defaults();
  cfg.etas = {0.0, 0.5};
  cfg.replicates = 3;
  cfg.k = 200;
  cfg.fit.m_max = 4;
  SUBCASE("risks are in [0, 2]") {
    const auto rows = compound_decision_experiment(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
      CHECK(r.risk_peb >= 0.0);
      CHECK(r.risk_peb <= 2.0);
      CHECK(r.risk_ds >= 0.0);
      CHECK(r.risk_ds <= 2.0);
    }
    // eta = 0: every theta is +1, so the risk is twice the error rate of sign(y)-like rules.
    CHECK(rows[0].risk_ds <= rows[0].risk_peb + 0.02);
  }
  SUBCASE("noiseless data gives zero risk") {
    cfg.noise_sd = 0.0;
    const auto rows = compound_decision_experiment(cfg);
    for (const auto& r : rows) {
      CHECK(r.risk_peb == 0.0);
      CHECK(r.risk_ds == 0.0);
      CHECK(r.ratio == 1.0);
    }
  }
}
