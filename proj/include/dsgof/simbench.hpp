#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dsgof/ds_core.hpp"

namespace dsgof {

// Robbins' estimate (y + 1) N(y + 1) / N(y) from a histogram N indexed by y.
// Empty when N(y) = 0 or N(y + 1) = 0.
std::optional<double> robbins_estimate(const std::vector<double>& histogram, int y);

struct ScenarioConfig {
  std::vector<double> etas;
  int replicates = 250;
  int k = 100;
  std::uint64_t seed = 1;
  FitOptions fit;

  // Pharma scenario.
  int trials = 60;       // y_i ~ Bin(trials, theta_i)
  int new_trials = 50;   // y_new ~ Bin(new_trials, new_theta)
  double new_theta = 0.3;

  // Compound-decision scenario.
  double noise_sd = 1.0;
};

ScenarioConfig pharma_defaults();
ScenarioConfig compound_defaults();

struct PharmaRow {
  double eta = 0.0;
  double mse_fq = 0.0;
  double mse_peb = 0.0;
  double mse_ds = 0.0;
  double ratio_peb_fq = 0.0;
  double ratio_peb_ds = 0.0;
  int used = 0;
  int failures = 0;
};

// Prior eta Beta(5, 45) + (1 - eta) Beta(30, 70); estimates of the new
// study's parameter are the MLE, the parametric posterior mode and the DS
// posterior mode.
std::vector<PharmaRow> pharma_experiment(const ScenarioConfig& config);

struct CompoundRow {
  double eta = 0.0;
  double risk_peb = 0.0;
  double risk_ds = 0.0;
  double ratio = 1.0;  // risk_peb / risk_ds; 1 when both risks are 0
  int used = 0;
  int failures = 0;
};

// theta_i = -1 with probability eta and +1 otherwise, Y_i = theta_i + noise;
// decisions are the sign of the posterior mean, loss k^-1 sum |est - theta|.
std::vector<CompoundRow> compound_decision_experiment(const ScenarioConfig& config);

}  // namespace dsgof
