#include "doctest.h"
#include "dsgof/report.hpp"

using namespace dsgof;

TEST_CASE("spec JSON keys") {
  const auto j = spec_to_json({Family::NormalNormal, 1.5, 4.0});
  CHECK(j.at("mu") == 1.5);
  CHECK(j.at("tau2") == 4.0);
  const auto s = spec_from_json(j);
  CHECK(s.family == Family::NormalNormal);
  CHECK(s.hyper2 == 4.0);
  const auto b = spec_to_json({Family::BinomialBeta, 0.5, 0.25});
  CHECK(b.at("alpha") == 0.5);
  CHECK(b.at("beta") == 0.25);
}

TEST_CASE("model JSON round trip is exact") {
  const StudyTable panel{Family::BinomialBeta, {{0, 5}, {0, 5}, {0, 5}, {1, 5}, {5, 5}}, "shipyard"};
  auto m = fit_mom2(panel, {Family::BinomialBeta, 0.5, 0.5});
  m = with_maxent(m, to_maxent(m));
  const auto back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
  CHECK(back.spec.hyper1 == m.spec.hyper1);
  CHECK(back.coeffs == m.coeffs);
  CHECK(back.raw_coeffs == m.raw_coeffs);
  CHECK(back.m_selected == m.m_selected);
  CHECK(back.iterations == m.iterations);
  CHECK(back.converged == m.converged);
  CHECK(back.k == m.k);
  CHECK(back.representation == Representation::MaxEnt);
  CHECK(back.maxent_c0 == m.maxent_c0);
  CHECK(back.maxent_c == m.maxent_c);
  CHECK(back.bic_trace.size() == m.bic_trace.size());
  CHECK(d_value(back, 0.37) == d_value(m, 0.37));
}

TEST_CASE("macro and posterior JSON") {
  MacroReport r;
  r.locations = {0.1, 0.2};
  r.ses = {0.01, 0.02};
  r.cluster_assignments = std::vector<int>{1, 2, 2};
  const auto j = macro_to_json(r);
  CHECK(j.at("locations").size() == 2);
  CHECK(j.at("cluster_assignments").size() == 3);
  PosteriorSummary s{0.1, 0.2, 0.3, {0.0, 1.0}, {1.0, 1.0}};
  CHECK_FALSE(posterior_to_json(s, false).contains("theta"));
  CHECK(posterior_to_json(s, true).at("theta").size() == 2);
}
