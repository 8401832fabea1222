#include "dsgof/simbench.hpp"

#include <cmath>
#include <random>

#include "dsgof/error.hpp"
#include "dsgof/hyperparams.hpp"
#include "dsgof/inference.hpp"
#include "dsgof/sampler.hpp"

namespace dsgof {
namespace {

void validate_config(const ScenarioConfig& c, const char* op) {
  if (c.etas.empty()) fail_validation("simbench", op, "eta grid is empty");
  for (double e : c.etas) {
    if (!(e >= 0.0 && e <= 0.5)) fail_validation("simbench", op, "eta values must lie in [0, 0.5]");
  }
  if (c.replicates < 1) fail_validation("simbench", op, "replicate count must be >= 1");
  if (c.k < 2) fail_validation("simbench", op, "panel size must be >= 2");
}

double safe_ratio(double num, double den) {
  if (num == 0.0 && den == 0.0) return 1.0;
  return num / den;
}

std::uint64_t stream_id(std::size_t eta_index, int rep) {
  return (static_cast<std::uint64_t>(eta_index) << 32) | static_cast<std::uint32_t>(rep);
}

}  // namespace

std::optional<double> robbins_estimate(const std::vector<double>& histogram, int y) {
  if (y < 0) return std::nullopt;
  const auto at = [&](int i) { return i < static_cast<int>(histogram.size()) ? histogram[i] : 0.0; };
  if (at(y) == 0.0 || at(y + 1) == 0.0) return std::nullopt;
  return (y + 1.0) * at(y + 1) / at(y);
}

ScenarioConfig pharma_defaults() {
  ScenarioConfig c;
  for (int i = 0; i <= 10; ++i) c.etas.push_back(0.05 * i);
  c.replicates = 250;
  c.k = 100;
  return c;
}

ScenarioConfig compound_defaults() {
  ScenarioConfig c;
  for (int i = 0; i <= 10; ++i) c.etas.push_back(0.05 * i);
  c.replicates = 500;
  c.k = 1000;
  return c;
}

std::vector<PharmaRow> pharma_experiment(const ScenarioConfig& config) {
  validate_config(config, "pharma_experiment");
  std::vector<PharmaRow> rows;
  for (std::size_t e = 0; e < config.etas.size(); ++e) {
    const double eta = config.etas[e];
    PharmaRow row;
    row.eta = eta;
    double se_fq = 0.0, se_peb = 0.0, se_ds = 0.0;
    for (int rep = 0; rep < config.replicates; ++rep) {
      Rng rng = make_rng(config.seed, stream_id(e, rep));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::gamma_distribution<double> g5(5.0), g45(45.0), g30(30.0), g70(70.0);
      StudyTable panel;
      panel.family = Family::BinomialBeta;
      for (int i = 0; i < config.k; ++i) {
        double theta;
        if (unif(rng) < eta) {
          const double a = g5(rng);
          theta = a / (a + g45(rng));
        } else {
          const double a = g30(rng);
          theta = a / (a + g70(rng));
        }
        std::binomial_distribution<int> bin(config.trials, theta);
        panel.rows.push_back({static_cast<double>(bin(rng)), static_cast<double>(config.trials)});
      }
      std::binomial_distribution<int> bin_new(config.new_trials, config.new_theta);
      const Observation obs{static_cast<double>(bin_new(rng)), static_cast<double>(config.new_trials)};
      try {
        const ConjugateSpec spec = mle_beta_binomial(panel).spec;
        const DSModel model = fit_mom2(panel, spec, config.fit);
        const double fq = obs.y / obs.size;
        const DSModel null_model = make_model(spec, {});
        const double peb = posterior_mode(null_model, obs);
        const double ds = posterior_mode(model, obs);
        se_fq += (fq - config.new_theta) * (fq - config.new_theta);
        se_peb += (peb - config.new_theta) * (peb - config.new_theta);
        se_ds += (ds - config.new_theta) * (ds - config.new_theta);
        ++row.used;
      } catch (const Error&) {
        ++row.failures;
      }
    }
    if (row.used > 0) {
      row.mse_fq = se_fq / row.used;
      row.mse_peb = se_peb / row.used;
      row.mse_ds = se_ds / row.used;
      row.ratio_peb_fq = safe_ratio(row.mse_peb, row.mse_fq);
      row.ratio_peb_ds = safe_ratio(row.mse_peb, row.mse_ds);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<CompoundRow> compound_decision_experiment(const ScenarioConfig& config) {
  validate_config(config, "compound_decision_experiment");
  if (!(config.noise_sd >= 0.0)) {
    fail_validation("simbench", "compound_decision_experiment", "noise sd must be >= 0");
  }
  std::vector<CompoundRow> rows;
  for (std::size_t e = 0; e < config.etas.size(); ++e) {
    const double eta = config.etas[e];
    CompoundRow row;
    row.eta = eta;
    double sum_peb = 0.0, sum_ds = 0.0;
    for (int rep = 0; rep < config.replicates; ++rep) {
      Rng rng = make_rng(config.seed, stream_id(e, rep));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::normal_distribution<double> noise(0.0, 1.0);
      std::vector<double> theta(config.k);
      StudyTable panel;
      panel.family = Family::NormalNormal;
      for (int i = 0; i < config.k; ++i) {
        theta[i] = unif(rng) < eta ? -1.0 : 1.0;
        panel.rows.push_back({theta[i] + config.noise_sd * noise(rng), config.noise_sd});
      }
      auto sign = [](double v) { return v < 0.0 ? -1.0 : 1.0; };
      double loss_peb = 0.0, loss_ds = 0.0;
      try {
        if (config.noise_sd == 0.0) {
          // Noiseless data: every rule reduces to reading off the sign.
          for (int i = 0; i < config.k; ++i) {
            const double d = std::fabs(sign(panel.rows[i].y) - theta[i]);
            loss_peb += d;
            loss_ds += d;
          }
        } else {
          const ConjugateSpec spec = mle_normal_normal(panel).spec;
          const DSModel model = fit_mom2(panel, spec, config.fit);
          for (int i = 0; i < config.k; ++i) {
            const Observation& obs = panel.rows[i];
            loss_peb += std::fabs(sign(posterior_params(spec, obs).mean()) - theta[i]);
            loss_ds += std::fabs(sign(elastic_bayes_mean(model, obs)) - theta[i]);
          }
        }
        sum_peb += loss_peb / config.k;
        sum_ds += loss_ds / config.k;
        ++row.used;
      } catch (const Error&) {
        ++row.failures;
      }
    }
    if (row.used > 0) {
      row.risk_peb = sum_peb / row.used;
      row.risk_ds = sum_ds / row.used;
      row.ratio = safe_ratio(row.risk_peb, row.risk_ds);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dsgof
