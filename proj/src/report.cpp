#include "dsgof/report.hpp"

#include "dsgof/error.hpp"

namespace dsgof {

using nlohmann::json;

json spec_to_json(const ConjugateSpec& spec) {
  json j;
  j["family"] = std::string(family_name(spec.family));
  if (spec.family == Family::NormalNormal) {
    j["mu"] = spec.hyper1;
    j["tau2"] = spec.hyper2;
  } else {
    j["alpha"] = spec.hyper1;
    j["beta"] = spec.hyper2;
  }
  return j;
}

ConjugateSpec spec_from_json(const json& j) {
  try {
    ConjugateSpec spec;
    spec.family = parse_family(j.at("family").get<std::string>());
    if (spec.family == Family::NormalNormal) {
      spec.hyper1 = j.at("mu").get<double>();
      spec.hyper2 = j.at("tau2").get<double>();
    } else {
      spec.hyper1 = j.at("alpha").get<double>();
      spec.hyper2 = j.at("beta").get<double>();
    }
    validate_spec(spec);
    return spec;
  } catch (const json::exception& e) {
    fail_validation("cli", "spec_from_json", e.what());
  }
}

json model_to_json(const DSModel& model) {
  json j;
  j["spec"] = spec_to_json(model.spec);
  j["coefficients"] = model.coeffs;
  j["raw_coefficients"] = model.raw_coeffs;
  j["m_max"] = model.m_max;
  j["m_selected"] = model.m_selected;
  json trace = json::array();
  for (const auto& p : model.bic_trace) trace.push_back({{"m", p.m}, {"bic", p.bic}});
  j["bic_trace"] = trace;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  j["last_step"] = model.last_step;
  j["left_admissible"] = model.left_admissible;
  j["k"] = model.k;
  j["nodes"] = model.nodes;
  j["representation"] = model.representation == Representation::L2 ? "L2" : "MaxEnt";
  if (model.representation == Representation::MaxEnt) {
    j["maxent_c0"] = model.maxent_c0;
    j["maxent_c"] = model.maxent_c;
  }
  return j;
}

DSModel model_from_json(const json& j) {
  try {
    DSModel m;
    m.spec = spec_from_json(j.at("spec"));
    m.coeffs = j.at("coefficients").get<std::vector<double>>();
    m.raw_coeffs = j.at("raw_coefficients").get<std::vector<double>>();
    m.m_max = j.at("m_max").get<int>();
    m.m_selected = j.at("m_selected").get<int>();
    for (const auto& p : j.at("bic_trace")) m.bic_trace.push_back({p.at("m").get<int>(), p.at("bic").get<double>()});
    m.iterations = j.at("iterations").get<int>();
    m.converged = j.at("converged").get<bool>();
    m.last_step = j.at("last_step").get<double>();
    m.left_admissible = j.value("left_admissible", false);
    m.k = j.at("k").get<std::size_t>();
    m.nodes = j.at("nodes").get<int>();
    if (j.at("representation").get<std::string>() == "MaxEnt") {
      m.representation = Representation::MaxEnt;
      m.maxent_c0 = j.at("maxent_c0").get<double>();
      m.maxent_c = j.at("maxent_c").get<std::vector<double>>();
    }
    return m;
  } catch (const json::exception& e) {
    fail_validation("cli", "model_from_json", e.what());
  }
}

json macro_to_json(const MacroReport& r) {
  json j;
  j["summary"] = r.summary_kind == SummaryKind::Mean ? "mean" : "modes";
  j["locations"] = r.locations;
  j["ses"] = r.ses;
  if (r.cluster_assignments) j["cluster_assignments"] = *r.cluster_assignments;
  j["warnings"] = r.warnings;
  j["bootstrap_replicates"] = r.bootstrap_replicates;
  j["bootstrap_failures"] = r.bootstrap_failures;
  return j;
}

json posterior_to_json(const PosteriorSummary& s, bool with_grid) {
  json j;
  j["mean"] = s.mean;
  j["median"] = s.median;
  j["mode"] = s.mode;
  if (with_grid) {
    j["theta"] = s.theta;
    j["density"] = s.density;
  }
  return j;
}

}  // namespace dsgof
