#include "dsgof/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dsgof/error.hpp"
#include "dsgof/hyperparams.hpp"

namespace dsgof {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(Rng& rng) {
  // 53 random bits in the open interval (0, 1).
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double envelope_max(const DSModel& model, int grid) {
  const UFunction uf = u_function(model, grid);
  double mx = 0.0;
  for (double v : uf.values) mx = std::max(mx, v);
  return mx;
}

// Assigns each reference location a replicate location: greedily by smallest
// distance without reuse while replicate locations remain, then by nearest.
std::vector<double> match_locations(const std::vector<double>& reference,
                                    const std::vector<double>& found) {
  const std::size_t r = reference.size();
  std::vector<double> out(r, std::numeric_limits<double>::quiet_NaN());
  std::vector<bool> ref_done(r, false);
  std::vector<bool> used(found.size(), false);
  std::size_t assigned = 0;
  while (assigned < r && assigned < found.size()) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (ref_done[i]) continue;
      for (std::size_t j = 0; j < found.size(); ++j) {
        if (used[j]) continue;
        const double dist = std::fabs(reference[i] - found[j]);
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    out[bi] = found[bj];
    ref_done[bi] = true;
    used[bj] = true;
    ++assigned;
  }
  for (std::size_t i = 0; i < r; ++i) {
    if (ref_done[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (double f : found) {
      if (std::fabs(reference[i] - f) < best) {
        best = std::fabs(reference[i] - f);
        out[i] = f;
      }
    }
  }
  return out;
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state))};
  return Rng(seq);
}

SampleBatch sample_ds(const DSModel& model, std::size_t k, std::uint64_t seed, int grid) {
  Rng rng = make_rng(seed);
  SampleBatch batch = sample_ds(model, k, rng, grid);
  batch.seed = seed;
  return batch;
}

SampleBatch sample_ds(const DSModel& model, std::size_t k, Rng& rng, int grid) {
  const double mx = envelope_max(model, grid);
  if (!(mx > 0.0)) {
    fail_numerical("sampler", "sample_ds", "density correction is nonpositive on the whole grid");
  }
  const double envelope = 1.02 * mx;
  const Dist g = prior_dist(model.spec);
  SampleBatch batch;
  batch.envelope = envelope;
  batch.draws.reserve(k);
  std::size_t proposed = 0;
  const std::size_t limit = 1000 * (k + 100);
  while (batch.draws.size() < k) {
    if (++proposed > limit) {
      fail_numerical("sampler", "sample_ds", "acceptance rate is too low to finish sampling");
    }
    const double u = uniform01(rng);
    const double accept = uniform01(rng);
    const double d = std::max(d_value(model, u), 0.0);
    if (accept * envelope <= d) batch.draws.push_back(g.quantile(u));
  }
  batch.acceptance_rate = k == 0 ? 1.0 : static_cast<double>(k) / static_cast<double>(proposed);
  return batch;
}

Observation draw_observation(Family family, const Observation& like, double theta, Rng& rng) {
  Observation out = like;
  switch (family) {
    case Family::BinomialBeta: {
      std::binomial_distribution<long long> dist(static_cast<long long>(like.size),
                                                 std::clamp(theta, 0.0, 1.0));
      out.y = static_cast<double>(dist(rng));
      break;
    }
    case Family::PoissonGamma: {
      const double rate = theta * like.size;
      if (rate <= 0.0) {
        out.y = 0.0;
      } else {
        std::poisson_distribution<long long> dist(rate);
        out.y = static_cast<double>(dist(rng));
      }
      break;
    }
    case Family::NormalNormal: {
      std::normal_distribution<double> dist(theta, like.size);
      out.y = dist(rng);
      break;
    }
    case Family::ExponentialGamma: {
      std::exponential_distribution<double> dist(theta);
      do {
        out.y = dist(rng);
      } while (!(out.y > 0.0));
      break;
    }
  }
  return out;
}

BootstrapResult bootstrap_core(const std::vector<double>& reference, int B, std::uint64_t seed,
                               const std::function<std::vector<double>(Rng&, int)>& replicate) {
  if (B < 100) fail_validation("sampler", "bootstrap_se", "B must be >= 100");
  BootstrapResult out;
  out.reference = reference;
  out.requested = B;
  std::vector<std::vector<double>> results(B);
  std::vector<char> failed(B, 0);
  auto run = [&](int b) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(b) + 1);
    try {
      results[b] = replicate(rng, b);
      if (results[b].empty()) failed[b] = 1;
    } catch (const Error&) {
      failed[b] = 1;
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
  if (workers == 1) {
    for (int b = 0; b < B; ++b) run(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (int b = static_cast<int>(t); b < B; b += static_cast<int>(workers)) run(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (int b = 0; b < B; ++b) {
    if (failed[b]) {
      ++out.failures;
      continue;
    }
    out.replicates.push_back(match_locations(reference, results[b]));
  }
  if (out.failures * 10 > B) {
    fail_numerical("sampler", "bootstrap_se",
                   std::to_string(out.failures) + " of " + std::to_string(B) +
                       " bootstrap replicates failed (limit 10%)");
  }
  out.ses.assign(reference.size(), 0.0);
  const double n = static_cast<double>(out.replicates.size());
  if (n < 2) return out;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    double mean = 0.0;
    for (const auto& rep : out.replicates) mean += rep[i];
    mean /= n;
    double ss = 0.0;
    for (const auto& rep : out.replicates) ss += (rep[i] - mean) * (rep[i] - mean);
    out.ses[i] = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

BootstrapResult bootstrap_se(const StudyTable& panel, const DSModel& model,
                             const ModelSummary& summary, const BootstrapConfig& config) {
  validate_table(panel);
  const std::vector<double> reference = summary(model);
  FitOptions fit = config.fit;
  fit.m_max = model.m_max;
  auto replicate = [&](Rng& rng, int) {
    const SampleBatch thetas = sample_ds(model, panel.k(), rng, config.grid);
    StudyTable star;
    star.family = panel.family;
    star.rows.reserve(panel.k());
    for (std::size_t i = 0; i < panel.k(); ++i) {
      star.rows.push_back(draw_observation(panel.family, panel.rows[i], thetas.draws[i], rng));
    }
    const ConjugateSpec spec = config.refit_hyperparameters
                                   ? fit_hyperparameters(star, config.zero_truncated).spec
                                   : model.spec;
    return summary(fit_mom2(star, spec, fit));
  };
  return bootstrap_core(reference, config.B, config.seed, replicate);
}

}  // namespace dsgof
