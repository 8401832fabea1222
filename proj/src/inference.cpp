#include "dsgof/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "dsgof/error.hpp"
#include "dsgof/lp_basis.hpp"
#include "dsgof/maxent.hpp"
#include "dsgof/numerics.hpp"

namespace dsgof {
namespace {

constexpr int kMeanNodes = 256;
// Normal scores spanned by the posterior grid; tail mass outside is ~1e-8.
constexpr double kGridZ = 5.6;

double refine_max(const std::function<double(double)>& f, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return numerics::golden_section_max(f, lo, hi, 1e-12);
}

// Indices of grid local maxima. Endpoints qualify only when the density keeps
// rising over the last three cells toward that end.
std::vector<std::size_t> local_maxima(const std::vector<double>& f) {
  std::vector<std::size_t> out;
  const std::size_t n = f.size();
  if (n < 4) {
    out.push_back(static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin()));
    return out;
  }
  if (f[0] > f[1] && f[1] > f[2] && f[2] > f[3]) out.push_back(0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (f[i] > f[i - 1] && f[i] >= f[i + 1] && f[i] > 0.0) out.push_back(i);
  }
  if (f[n - 1] > f[n - 2] && f[n - 2] > f[n - 3] && f[n - 3] > f[n - 4]) out.push_back(n - 1);
  return out;
}

std::vector<double> posterior_grid_theta(const Dist& post, int grid) {
  std::vector<double> theta(grid);
  for (int i = 0; i < grid; ++i) {
    const double z = -kGridZ + 2.0 * kGridZ * i / (grid - 1);
    theta[i] = post.quantile(numerics::normal_cdf(z));
  }
  return theta;
}

// Bootstrap refits are L2; convert them when the reported model is MaxEnt.
DSModel like_reference(const DSModel& refit, Representation rep) {
  if (rep == Representation::L2) return refit;
  return with_maxent(refit, to_maxent(refit));
}

void apply_bootstrap(MacroReport& report, const BootstrapResult& boot) {
  report.ses = boot.ses;
  report.bootstrap_replicates = boot.requested;
  report.bootstrap_failures = boot.failures;
  if (boot.failures > 0) {
    report.warnings.push_back(std::to_string(boot.failures) + " bootstrap replicates failed and were excluded");
  }
}

}  // namespace

double prior_mean(const DSModel& model) {
  const Dist g = prior_dist(model.spec);
  if (model.is_null() && model.representation == Representation::L2) return g.mean();
  const auto& rule = numerics::tanh_sinh(kMeanNodes);
  if (model.representation == Representation::L2) {
    double corr = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double theta = g.quantile(rule.nodes[i], rule.complements[i]);
      double c = 0.0;
      for (std::size_t j = 0; j < model.coeffs.size(); ++j) {
        if (model.coeffs[j] != 0.0) c += model.coeffs[j] * eval_leg(static_cast<int>(j) + 1, rule.nodes[i]);
      }
      corr += rule.weights[i] * theta * c;
    }
    return g.mean() + corr;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    acc += rule.weights[i] * g.quantile(rule.nodes[i], rule.complements[i]) * d_value(model, rule.nodes[i]);
  }
  return acc;
}

std::vector<double> prior_modes(const DSModel& model, int num_modes, int grid,
                                std::vector<std::string>* warnings) {
  if (num_modes < 1) fail_validation("inference", "macro_modes", "num_modes must be >= 1");
  if (grid < 4) fail_validation("inference", "macro_modes", "grid must have >= 4 points");
  const Dist g = prior_dist(model.spec);
  const double norm = model.representation == Representation::L2 ? clip_normalizer(model) : 1.0;
  auto density = [&](double theta) { return prior_density_clipped(model, theta, norm); };
  std::vector<double> theta(grid);
  std::vector<double> f(grid);
  for (int i = 0; i < grid; ++i) {
    theta[i] = g.quantile((i + 0.5) / grid);
    f[i] = density(theta[i]);
  }
  std::vector<std::pair<double, double>> found;  // (height, location)
  for (std::size_t i : local_maxima(f)) {
    double loc;
    if (i == 0) {
      loc = g.lower() > -std::numeric_limits<double>::infinity()
                ? refine_max(density, g.lower(), theta[1])
                : theta[0];
    } else if (i + 1 == f.size()) {
      loc = g.upper() < std::numeric_limits<double>::infinity()
                ? refine_max(density, theta[i - 1], g.upper())
                : theta[i];
    } else {
      loc = refine_max(density, theta[i - 1], theta[i + 1]);
    }
    found.emplace_back(density(loc), loc);
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (static_cast<int>(found.size()) < num_modes && warnings) {
    warnings->push_back("requested " + std::to_string(num_modes) + " modes but the density has " +
                        std::to_string(found.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < found.size() && static_cast<int>(i) < num_modes; ++i) {
    out.push_back(found[i].second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MacroReport macro_mean(const DSModel& model, const StudyTable& panel,
                       const BootstrapConfig& config) {
  MacroReport report;
  report.summary_kind = SummaryKind::Mean;
  report.locations = {prior_mean(model)};
  report.ses = {0.0};
  if (config.B > 0) {
    const Representation rep = model.representation;
    auto summary = [rep](const DSModel& m) -> std::vector<double> {
      return {prior_mean(like_reference(m, rep))};
    };
    apply_bootstrap(report, bootstrap_se(panel, model, summary, config));
    report.locations = {prior_mean(model)};
  }
  return report;
}

MacroReport macro_modes(const DSModel& model, const StudyTable& panel, int num_modes,
                        const BootstrapConfig& config) {
  MacroReport report;
  report.summary_kind = SummaryKind::Modes;
  report.locations = prior_modes(model, num_modes, config.grid, &report.warnings);
  report.ses.assign(report.locations.size(), 0.0);
  if (config.B > 0 && !report.locations.empty()) {
    const Representation rep = model.representation;
    const int grid = config.grid;
    auto summary = [rep, num_modes, grid](const DSModel& m) {
      return prior_modes(like_reference(m, rep), num_modes, grid);
    };
    BootstrapResult boot = bootstrap_se(panel, model, summary, config);
    apply_bootstrap(report, boot);
  }
  return report;
}

double posterior_mode(const DSModel& model, const Observation& obs, int grid) {
  if (grid < 4) fail_validation("inference", "micro", "grid must have >= 4 points");
  const Dist post = posterior_params(model.spec, obs);
  const std::vector<double> theta = posterior_grid_theta(post, grid);
  auto density = [&](double t) { return posterior_lp_density(model, obs, t); };
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double v = density(theta[i]);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  const double lo = best == 0 ? std::max(post.lower(), theta[0] - (theta[1] - theta[0])) : theta[best - 1];
  const double hi = best + 1 == theta.size()
                        ? std::min(post.upper(), theta[best] + (theta[best] - theta[best - 1]))
                        : theta[best + 1];
  return refine_max(density, lo, hi);
}

PosteriorSummary micro(const DSModel& model, const Observation& obs, int grid) {
  if (grid < 4) fail_validation("inference", "micro", "grid must have >= 4 points");
  PosteriorSummary out;
  const Dist post = posterior_params(model.spec, obs);
  out.mean = elastic_bayes_mean(model, obs);
  out.theta = posterior_grid_theta(post, grid);
  out.density.resize(out.theta.size());
  for (std::size_t i = 0; i < out.theta.size(); ++i) {
    out.density[i] = posterior_lp_density(model, obs, out.theta[i]);
  }
  out.mode = posterior_mode(model, obs, grid);
  if (model.is_null() && model.representation == Representation::L2) {
    out.median = post.quantile(0.5);
    return out;
  }
  // CDF in v-space: F(v) = int_0^v d(G(Q_post(t))) dt / E_G[d | y].
  const Dist g = prior_dist(model.spec);
  const double den = posterior_correction(model, obs);
  const auto& rule = numerics::tanh_sinh(64);
  auto cdf_v = [&](double v) {
    return v * rule.integrate([&](double t) {
      return d_value(model, std::clamp(g.cdf(post.quantile(v * t)), 0.0, 1.0));
    }) / den;
  };
  const double v_med = numerics::bisect_root([&](double v) { return cdf_v(v) - 0.5; }, 0.0, 1.0, 1e-13);
  out.median = post.quantile(v_med);
  return out;
}

std::vector<int> kmeans_1d(const std::vector<double>& values, int num_groups, std::uint64_t seed,
                           int restarts) {
  if (num_groups < 1) fail_validation("inference", "cluster_studies", "num_groups must be >= 1");
  const std::set<double> distinct(values.begin(), values.end());
  if (static_cast<std::size_t>(num_groups) > distinct.size()) {
    fail_validation("inference", "cluster_studies",
                    "num_groups exceeds the number of distinct values (" +
                        std::to_string(distinct.size()) + ")");
  }
  const std::vector<double> pool(distinct.begin(), distinct.end());
  const std::size_t n = values.size();
  Rng rng = make_rng(seed, 0x6b6d65616e73ULL);
  double best_sse = std::numeric_limits<double>::infinity();
  std::vector<double> best_centers;
  std::vector<int> best_labels;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    std::vector<double> centers;
    std::vector<std::size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (int c = 0; c < num_groups; ++c) {
      std::uniform_int_distribution<std::size_t> pick(c, idx.size() - 1);
      std::swap(idx[c], idx[pick(rng)]);
      centers.push_back(pool[idx[c]]);
    }
    std::sort(centers.begin(), centers.end());
    std::vector<int> labels(n, 0);
    for (int it = 0; it < 1000; ++it) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        int bc = 0;
        for (int c = 1; c < num_groups; ++c) {
          if (std::fabs(values[i] - centers[c]) < std::fabs(values[i] - centers[bc])) bc = c;
        }
        if (bc != labels[i] || it == 0) changed = changed || bc != labels[i];
        labels[i] = bc;
      }
      std::vector<double> sum(num_groups, 0.0);
      std::vector<int> cnt(num_groups, 0);
      for (std::size_t i = 0; i < n; ++i) {
        sum[labels[i]] += values[i];
        ++cnt[labels[i]];
      }
      for (int c = 0; c < num_groups; ++c) {
        if (cnt[c] > 0) centers[c] = sum[c] / cnt[c];
      }
      if (!changed && it > 0) break;
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) sse += (values[i] - centers[labels[i]]) * (values[i] - centers[labels[i]]);
    // Relabel by ascending center.
    std::vector<int> order(num_groups);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return centers[a] < centers[b]; });
    std::vector<int> rank(num_groups);
    std::vector<double> sorted_centers(num_groups);
    for (int c = 0; c < num_groups; ++c) {
      rank[order[c]] = c + 1;
      sorted_centers[c] = centers[order[c]];
    }
    for (int& l : labels) l = rank[l];
    const bool better = sse < best_sse - 1e-12 * (1.0 + best_sse) ||
                        (std::fabs(sse - best_sse) <= 1e-12 * (1.0 + best_sse) &&
                         !best_centers.empty() && sorted_centers[0] < best_centers[0]);
    if (best_labels.empty() || better) {
      best_sse = sse;
      best_centers = sorted_centers;
      best_labels = labels;
    }
  }
  return best_labels;
}

std::vector<int> cluster_studies(const DSModel& model, const StudyTable& panel, int num_groups,
                                 std::uint64_t seed, int restarts) {
  validate_table(panel);
  std::map<std::pair<double, double>, double> cache;
  std::vector<double> modes;
  modes.reserve(panel.k());
  for (const auto& r : panel.rows) {
    auto it = cache.find({r.y, r.size});
    if (it == cache.end()) it = cache.emplace(std::make_pair(r.y, r.size), posterior_mode(model, r)).first;
    modes.push_back(it->second);
  }
  return kmeans_1d(modes, num_groups, seed, restarts);
}

}  // namespace dsgof
