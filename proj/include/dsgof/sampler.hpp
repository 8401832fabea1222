#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "dsgof/ds_core.hpp"
#include "dsgof/study_table.hpp"

namespace dsgof {

using Rng = std::mt19937_64;

// Independent stream for (seed, stream): the pair is mixed through SplitMix64
// before seeding, so nearby seeds give unrelated sequences.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

struct SampleBatch {
  std::vector<double> draws;
  double acceptance_rate = 1.0;
  std::uint64_t seed = 0;
  double envelope = 1.0;  // M used for accept/reject
};

// Accept/reject from the fitted prior: propose Theta = G^-1(U), accept with
// probability max(d(U), 0) / M, M = 1.02 * max of d over a u-grid.
SampleBatch sample_ds(const DSModel& model, std::size_t k, std::uint64_t seed, int grid = 250);
SampleBatch sample_ds(const DSModel& model, std::size_t k, Rng& rng, int grid = 250);

// y ~ f(y | theta) keeping the size/uncertainty/exposure of `like`.
Observation draw_observation(Family family, const Observation& like, double theta, Rng& rng);

struct BootstrapResult {
  std::vector<double> reference;
  std::vector<double> ses;
  std::vector<std::vector<double>> replicates;  // matched to reference order
  int requested = 0;
  int failures = 0;
};

// Runs `replicate(rng, b)` for b = 0..B-1 on streams make_rng(seed, b + 1).
// Each replicate returns locations; they are matched to `reference` by
// nearest location and the across-replicate standard deviation is reported.
// A replicate that throws dsgof::Error or returns nothing counts as a failure;
// more than 10% failures aborts with a numerical error.
BootstrapResult bootstrap_core(const std::vector<double>& reference, int B, std::uint64_t seed,
                               const std::function<std::vector<double>(Rng&, int)>& replicate);

struct BootstrapConfig {
  int B = 1000;
  std::uint64_t seed = 1;
  FitOptions fit;
  bool refit_hyperparameters = true;
  bool zero_truncated = false;
  int grid = 250;
};

using ModelSummary = std::function<std::vector<double>(const DSModel&)>;

// Smooth bootstrap: theta* from the fitted prior, y* from the likelihood with
// the panel's sizes, then hyperparameter MLE, MOM-II and BIC are redone and
// `summary` recomputed.
BootstrapResult bootstrap_se(const StudyTable& panel, const DSModel& model,
                             const ModelSummary& summary, const BootstrapConfig& config);

}  // namespace dsgof
