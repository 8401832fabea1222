#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsgof/ds_core.hpp"
#include "dsgof/sampler.hpp"
#include "dsgof/study_table.hpp"

namespace dsgof {

enum class SummaryKind { Mean, Modes };

struct MacroReport {
  SummaryKind summary_kind = SummaryKind::Mean;
  std::vector<double> locations;  // ascending
  std::vector<double> ses;        // empty entries are 0 when no bootstrap ran
  std::optional<std::vector<int>> cluster_assignments;
  std::vector<std::string> warnings;
  int bootstrap_replicates = 0;
  int bootstrap_failures = 0;
};

// Mean of the fitted prior: the parametric mean plus sum_j LP[j] E_g[theta T_j].
double prior_mean(const DSModel& model);

// Local maxima of the clipped prior density on a u-grid mapped through G^-1,
// refined by golden-section search; the `num_modes` highest, sorted ascending.
std::vector<double> prior_modes(const DSModel& model, int num_modes, int grid = 250,
                                std::vector<std::string>* warnings = nullptr);

// With config.B == 0 no bootstrap runs and SEs are reported as 0.
MacroReport macro_mean(const DSModel& model, const StudyTable& panel,
                       const BootstrapConfig& config);
MacroReport macro_modes(const DSModel& model, const StudyTable& panel, int num_modes,
                        const BootstrapConfig& config);

struct PosteriorSummary {
  double mean = 0.0;
  double median = 0.0;
  double mode = 0.0;
  std::vector<double> theta;    // density grid abscissae, ascending
  std::vector<double> density;
};

PosteriorSummary micro(const DSModel& model, const Observation& obs, int grid = 250);

// Posterior mode only (grid + golden refinement).
double posterior_mode(const DSModel& model, const Observation& obs, int grid = 250);

// 1-D k-means on the per-study posterior modes. Labels are 1..num_groups in
// ascending order of cluster center.
std::vector<int> cluster_studies(const DSModel& model, const StudyTable& panel, int num_groups,
                                 std::uint64_t seed = 1, int restarts = 20);

// 1-D k-means on raw values (exposed for testing).
std::vector<int> kmeans_1d(const std::vector<double>& values, int num_groups, std::uint64_t seed,
                           int restarts = 20);

}  // namespace dsgof
