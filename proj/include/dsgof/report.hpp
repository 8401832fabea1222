#pragma once

#include <json.hpp>

#include "dsgof/ds_core.hpp"
#include "dsgof/inference.hpp"
#include "dsgof/maxent.hpp"

namespace dsgof {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

nlohmann::json spec_to_json(const ConjugateSpec& spec);
ConjugateSpec spec_from_json(const nlohmann::json& j);

// Full model state including fit metadata; model_from_json inverts it.
nlohmann::json model_to_json(const DSModel& model);
DSModel model_from_json(const nlohmann::json& j);

nlohmann::json macro_to_json(const MacroReport& report);
nlohmann::json posterior_to_json(const PosteriorSummary& summary, bool with_grid);

}  // namespace dsgof
