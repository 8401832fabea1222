// dsgof: command-line front end for DS(G,m) empirical Bayes.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dsgof/datasets.hpp"
#include "dsgof/ds_core.hpp"
#include "dsgof/error.hpp"
#include "dsgof/hyperparams.hpp"
#include "dsgof/inference.hpp"
#include "dsgof/maxent.hpp"
#include "dsgof/report.hpp"
#include "dsgof/sampler.hpp"
#include "dsgof/simbench.hpp"
#include "dsgof/study_table.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dsgof;

namespace {

struct Options {
  std::string data;
  std::string dataset;
  std::string family;
  std::string y_col = "y";
  std::string size_col;
  std::string exposure_col;
  std::string count_col;
  bool zero_truncated = false;
  double alpha = NAN, beta = NAN, mu = NAN, tau = NAN;
  int m_max = 8;
  double eps = 1e-6;
  int max_iter = 100;
  int nodes = 64;
  int boot = 1000;
  std::uint64_t seed = 1;
  int grid = 250;
  bool maxent = false;
  int num_modes = 0;
  int groups = 0;
  std::string out = "dsgof_out";

  // micro
  double y = NAN, n = NAN, se = NAN, exposure = NAN;
  bool all_studies = false;

  // sample
  std::size_t draws = 1000;

  // simulate
  std::string scenario = "pharma";
  int reps = 0;
  int k = 0;
  std::vector<double> etas;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail_validation("cli", "write", "cannot write '" + path.string() + "'");
  f << text;
}

struct Loaded {
  StudyTable table;
  bool zero_truncated = false;
};

Loaded load_panel(const Options& o) {
  Loaded out;
  if (!o.dataset.empty() == !o.data.empty()) {
    fail_validation("cli", "ingest", "give exactly one of --data or --dataset");
  }
  if (!o.dataset.empty()) {
    const auto info = find_dataset(o.dataset);
    if (!info) fail_validation("cli", "ingest", "unknown bundled dataset '" + o.dataset + "'");
    if (!o.family.empty() && parse_family(o.family) != info->family) {
      fail_validation("cli", "ingest", "dataset '" + o.dataset + "' belongs to the " +
                                           std::string(family_name(info->family)) + " family");
    }
    out.table = load_dataset(o.dataset);
    out.zero_truncated = info->zero_truncated || o.zero_truncated;
    return out;
  }
  if (o.family.empty()) fail_validation("cli", "ingest", "--family is required with --data");
  ColumnMap cols;
  cols.y = o.y_col;
  cols.size = !o.exposure_col.empty() ? o.exposure_col : o.size_col;
  cols.count = o.count_col;
  out.table = ingest(o.data, parse_family(o.family), cols);
  out.zero_truncated = o.zero_truncated;
  return out;
}

struct Fitted {
  Loaded panel;
  ConjugateSpec spec;
  std::optional<MLEResult> mle;
  DSModel model;
  std::optional<MaxEntSolution> maxent;
};

ConjugateSpec spec_from_flags(const Options& o, Family family, bool* given) {
  ConjugateSpec spec;
  spec.family = family;
  *given = false;
  if (family == Family::NormalNormal) {
    if (std::isnan(o.mu) != std::isnan(o.tau)) {
      fail_validation("cli", "hyperparameters", "give both --mu and --tau or neither");
    }
    if (!std::isnan(o.mu)) {
      spec.hyper1 = o.mu;
      spec.hyper2 = o.tau * o.tau;
      *given = true;
    }
  } else {
    if (std::isnan(o.alpha) != std::isnan(o.beta)) {
      fail_validation("cli", "hyperparameters", "give both --alpha and --beta or neither");
    }
    if (!std::isnan(o.alpha)) {
      spec.hyper1 = o.alpha;
      spec.hyper2 = o.beta;
      *given = true;
    }
  }
  if (*given) validate_spec(spec);
  return spec;
}

FitOptions fit_options(const Options& o) {
  FitOptions f;
  f.m_max = o.m_max;
  f.eps = o.eps;
  f.max_iter = o.max_iter;
  f.nodes = o.nodes;
  return f;
}

Fitted fit_panel(const Options& o) {
  Fitted f;
  f.panel = load_panel(o);
  bool given = false;
  f.spec = spec_from_flags(o, f.panel.table.family, &given);
  if (!given) {
    f.mle = fit_hyperparameters(f.panel.table, f.panel.zero_truncated);
    f.spec = f.mle->spec;
  }
  f.model = fit_mom2(f.panel.table, f.spec, fit_options(o));
  if (o.maxent) {
    f.maxent = to_maxent(f.model);
    if (!f.maxent->converged) {
      fail_numerical("maxent", "to_maxent",
                     f.maxent->infeasible ? "the LP coefficients are not the moments of any positive density"
                                          : "moment equations did not converge");
    }
    f.model = with_maxent(f.model, *f.maxent);
  }
  return f;
}

json base_report(const std::string& command, const Options& o, const Fitted& f) {
  json r;
  r["schema_version"] = kReportSchemaVersion;
  r["version"] = kToolVersion;
  r["command"] = command;
  std::ostringstream digest;
  digest << std::hex << std::setw(16) << std::setfill('0') << table_digest(f.panel.table);
  r["input"] = {{"name", f.panel.table.name},
                {"family", std::string(family_name(f.panel.table.family))},
                {"k", f.panel.table.k()},
                {"digest_fnv1a64", digest.str()},
                {"zero_truncated", f.panel.zero_truncated}};
  r["options"] = {{"m_max", o.m_max}, {"eps", o.eps},   {"max_iter", o.max_iter},
                  {"nodes", o.nodes}, {"grid", o.grid}, {"maxent", o.maxent}};
  r["seeds"] = {{"seed", o.seed}, {"boot", o.boot}};
  r["spec"] = spec_to_json(f.spec);
  if (f.mle) {
    r["mle"] = {{"loglik", f.mle->loglik},
                {"converged", f.mle->converged},
                {"iterations", f.mle->iterations},
                {"boundary", f.mle->boundary}};
  } else {
    r["mle"] = nullptr;
  }
  r["model"] = model_to_json(f.model);
  r["qlp"] = qlp(f.model);
  const double md = min_d(f.model, o.grid);
  r["min_d"] = md;
  r["maxent_recommended"] = maxent_recommended(f.model, o.grid);
  if (f.maxent) {
    r["maxent"] = {{"c0", f.maxent->c0},
                   {"c", f.maxent->c},
                   {"residual", f.maxent->residual},
                   {"converged", f.maxent->converged},
                   {"infeasible", f.maxent->infeasible}};
  }
  const UFunction uf = u_function(f.model, o.grid);
  r["u_function"] = {{"grid", uf.grid}, {"values", uf.values}};
  json warnings = json::array();
  if (f.model.left_admissible) {
    warnings.push_back("MOM-II stopped at the last admissible iterate: the next coefficients gave a "
                       "nonpositive marginal for an observed study");
  } else if (!f.model.converged) {
    warnings.push_back("MOM-II did not converge within max_iter; the last iterate is reported");
  }
  if (md < -0.05 && f.model.representation == Representation::L2) {
    warnings.push_back("L2 density estimate dips below zero (min d = " + fmt(md) + "); consider --maxent");
  }
  r["warnings"] = warnings;
  return r;
}

void write_fit_grids(const Options& o, const Fitted& f, const fs::path& dir) {
  const UFunction uf = u_function(f.model, o.grid);
  std::string csv = "u,d\n";
  for (std::size_t i = 0; i < uf.grid.size(); ++i) csv += fmt(uf.grid[i]) + "," + fmt(uf.values[i]) + "\n";
  write_text(dir / "u_function.csv", csv);

  const Dist g = prior_dist(f.model.spec);
  const double norm = f.model.representation == Representation::L2 ? clip_normalizer(f.model) : 1.0;
  csv = "theta,ds_prior,parametric_prior\n";
  for (int i = 0; i < o.grid; ++i) {
    const double theta = g.quantile((i + 0.5) / o.grid);
    csv += fmt(theta) + "," + fmt(prior_density_clipped(f.model, theta, norm)) + "," + fmt(g.pdf(theta)) + "\n";
  }
  write_text(dir / "prior_density.csv", csv);
}

void finish(const json& report, const fs::path& dir) {
  write_text(dir / "report.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
}

fs::path prepare_out(const Options& o) {
  fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail_validation("cli", "output", "cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

BootstrapConfig boot_config(const Options& o, const Fitted& f) {
  BootstrapConfig c;
  c.B = o.boot;
  c.seed = o.seed;
  c.fit = fit_options(o);
  c.zero_truncated = f.panel.zero_truncated;
  c.grid = o.grid;
  c.refit_hyperparameters = f.mle.has_value();
  return c;
}

int cmd_fit(const Options& o, bool diagnose) {
  const fs::path dir = prepare_out(o);
  const Fitted f = fit_panel(o);
  json r = base_report(diagnose ? "diagnose" : "fit", o, f);
  if (diagnose) {
    std::string verdict;
    if (f.model.m_selected == 0) {
      verdict = "prior consistent with data";
    } else {
      verdict = "prior-data conflict: the parametric prior needs a correction of " +
                std::to_string(f.model.m_selected) + " term(s)";
    }
    r["verdict"] = verdict;
    std::string csv = "m,bic\n";
    for (const auto& p : f.model.bic_trace) csv += std::to_string(p.m) + "," + fmt(p.bic) + "\n";
    write_text(dir / "bic_trace.csv", csv);
  }
  write_fit_grids(o, f, dir);
  finish(r, dir);
  return 0;
}

int cmd_macro(const Options& o) {
  const fs::path dir = prepare_out(o);
  const Fitted f = fit_panel(o);
  json r = base_report("macro", o, f);
  const BootstrapConfig bc = boot_config(o, f);
  MacroReport m = o.num_modes > 0 ? macro_modes(f.model, f.panel.table, o.num_modes, bc)
                                   : macro_mean(f.model, f.panel.table, bc);
  if (o.groups > 0) m.cluster_assignments = cluster_studies(f.model, f.panel.table, o.groups, o.seed);
  r["macro"] = macro_to_json(m);
  std::string csv = "location,se\n";
  for (std::size_t i = 0; i < m.locations.size(); ++i) csv += fmt(m.locations[i]) + "," + fmt(m.ses[i]) + "\n";
  write_text(dir / "macro.csv", csv);
  write_fit_grids(o, f, dir);
  finish(r, dir);
  return 0;
}

Observation micro_observation(const Options& o, Family family) {
  if (std::isnan(o.y)) fail_validation("cli", "micro", "--y is required (or use --all)");
  Observation obs{o.y, 1.0};
  switch (family) {
    case Family::BinomialBeta:
      if (std::isnan(o.n)) fail_validation("cli", "micro", "--n is required for the binomial family");
      obs.size = o.n;
      break;
    case Family::NormalNormal:
      if (std::isnan(o.se)) fail_validation("cli", "micro", "--se is required for the normal family");
      obs.size = o.se;
      break;
    case Family::PoissonGamma:
      obs.size = std::isnan(o.exposure) ? 1.0 : o.exposure;
      break;
    case Family::ExponentialGamma:
      break;
  }
  validate_observation(family, obs);
  return obs;
}

int cmd_micro(const Options& o) {
  const fs::path dir = prepare_out(o);
  const Fitted f = fit_panel(o);
  json r = base_report("micro", o, f);
  if (o.all_studies) {
    std::string csv = "study,y,size,mean,median,mode\n";
    json list = json::array();
    for (std::size_t i = 0; i < f.panel.table.k(); ++i) {
      const Observation& obs = f.panel.table.rows[i];
      const PosteriorSummary s = micro(f.model, obs, o.grid);
      csv += std::to_string(i + 1) + "," + fmt(obs.y) + "," + fmt(obs.size) + "," + fmt(s.mean) + "," +
             fmt(s.median) + "," + fmt(s.mode) + "\n";
      json e = posterior_to_json(s, false);
      e["y"] = obs.y;
      e["size"] = obs.size;
      list.push_back(e);
    }
    r["micro"] = list;
    write_text(dir / "micro_all.csv", csv);
  } else {
    const Observation obs = micro_observation(o, f.panel.table.family);
    const PosteriorSummary s = micro(f.model, obs, o.grid);
    json e = posterior_to_json(s, false);
    e["y"] = obs.y;
    e["size"] = obs.size;
    r["micro"] = e;
    const Dist post = posterior_params(f.model.spec, obs);
    std::string csv = "theta,ds_posterior,parametric_posterior\n";
    for (std::size_t i = 0; i < s.theta.size(); ++i) {
      csv += fmt(s.theta[i]) + "," + fmt(s.density[i]) + "," + fmt(post.pdf(s.theta[i])) + "\n";
    }
    write_text(dir / "posterior_density.csv", csv);
  }
  finish(r, dir);
  return 0;
}

int cmd_sample(const Options& o) {
  const fs::path dir = prepare_out(o);
  const Fitted f = fit_panel(o);
  json r = base_report("sample", o, f);
  const SampleBatch b = sample_ds(f.model, o.draws, o.seed, o.grid);
  r["sample"] = {{"draws", b.draws.size()}, {"acceptance_rate", b.acceptance_rate}, {"envelope", b.envelope}};
  std::string csv = "theta\n";
  for (double t : b.draws) csv += fmt(t) + "\n";
  write_text(dir / "samples.csv", csv);
  finish(r, dir);
  return 0;
}

int cmd_maxent(Options o) {
  o.maxent = false;
  const fs::path dir = prepare_out(o);
  Fitted f = fit_panel(o);
  const MaxEntSolution sol = to_maxent(f.model);
  f.maxent = sol;
  json r = base_report("maxent", o, f);
  const DSModel me = with_maxent(f.model, sol);
  const UFunction l2 = u_function(f.model, o.grid);
  const UFunction ex = u_function(me, o.grid);
  std::string csv = "u,d_l2,d_maxent\n";
  for (std::size_t i = 0; i < l2.grid.size(); ++i) {
    csv += fmt(l2.grid[i]) + "," + fmt(l2.values[i]) + "," + fmt(ex.values[i]) + "\n";
  }
  write_text(dir / "maxent_u_function.csv", csv);
  finish(r, dir);
  return sol.converged ? 0 : 3;
}

int cmd_simulate(const Options& o) {
  const fs::path dir = prepare_out(o);
  json r;
  r["schema_version"] = kReportSchemaVersion;
  r["version"] = kToolVersion;
  r["command"] = "simulate";
  r["seeds"] = {{"seed", o.seed}};
  ScenarioConfig c;
  if (o.scenario == "pharma") {
    c = pharma_defaults();
  } else if (o.scenario == "compound") {
    c = compound_defaults();
  } else {
    fail_validation("cli", "simulate", "unknown scenario '" + o.scenario + "' (pharma or compound)");
  }
  c.seed = o.seed;
  c.fit = fit_options(o);
  if (o.reps > 0) c.replicates = o.reps;
  if (o.k > 0) c.k = o.k;
  if (!o.etas.empty()) c.etas = o.etas;
  r["scenario"] = {{"name", o.scenario}, {"replicates", c.replicates}, {"k", c.k}, {"etas", c.etas}};
  json rows = json::array();
  std::string csv;
  if (o.scenario == "pharma") {
    csv = "eta,mse_fq,mse_peb,mse_ds,ratio_peb_fq,ratio_peb_ds,used,failures\n";
    for (const auto& row : pharma_experiment(c)) {
      csv += fmt(row.eta) + "," + fmt(row.mse_fq) + "," + fmt(row.mse_peb) + "," + fmt(row.mse_ds) + "," +
             fmt(row.ratio_peb_fq) + "," + fmt(row.ratio_peb_ds) + "," + std::to_string(row.used) + "," +
             std::to_string(row.failures) + "\n";
      rows.push_back({{"eta", row.eta}, {"mse_fq", row.mse_fq}, {"mse_peb", row.mse_peb},
                      {"mse_ds", row.mse_ds}, {"ratio_peb_fq", row.ratio_peb_fq},
                      {"ratio_peb_ds", row.ratio_peb_ds}, {"used", row.used}, {"failures", row.failures}});
    }
  } else {
    csv = "eta,risk_peb,risk_ds,ratio,used,failures\n";
    for (const auto& row : compound_decision_experiment(c)) {
      csv += fmt(row.eta) + "," + fmt(row.risk_peb) + "," + fmt(row.risk_ds) + "," + fmt(row.ratio) + "," +
             std::to_string(row.used) + "," + std::to_string(row.failures) + "\n";
      rows.push_back({{"eta", row.eta}, {"risk_peb", row.risk_peb}, {"risk_ds", row.risk_ds},
                      {"ratio", row.ratio}, {"used", row.used}, {"failures", row.failures}});
    }
  }
  r["results"] = rows;
  write_text(dir / (o.scenario + ".csv"), csv);
  finish(r, dir);
  return 0;
}

void add_data_options(CLI::App* sub, Options& o) {
  sub->add_option("--data", o.data, "CSV file with a header line");
  sub->add_option("--dataset", o.dataset, "bundled dataset: shipyard, insurance, arsenic, rat, butterfly");
  sub->add_option("--family", o.family, "binomial | poisson | normal | exponential")
      ->check(CLI::IsMember({"binomial", "poisson", "normal", "exponential"}));
  sub->add_option("--y-col", o.y_col, "observation column");
  sub->add_option("--size-col", o.size_col, "n (binomial) or se (normal) column");
  sub->add_option("--exposure-col", o.exposure_col, "poisson exposure column");
  sub->add_option("--count-col", o.count_col, "histogram multiplicity column");
  sub->add_flag("--zero-truncated", o.zero_truncated, "zero-truncated poisson likelihood for the MLE");
  sub->add_option("--alpha", o.alpha, "prior alpha (skips the MLE)");
  sub->add_option("--beta", o.beta, "prior beta (gamma priors use the scale parameterization)");
  sub->add_option("--mu", o.mu, "normal prior mean");
  sub->add_option("--tau", o.tau, "normal prior standard deviation")->check(CLI::PositiveNumber);
  sub->add_option("--m-max", o.m_max, "largest LP degree")->check(CLI::Range(1, 12));
  sub->add_option("--eps", o.eps, "MOM-II convergence threshold")->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", o.max_iter, "MOM-II iteration cap")->check(CLI::PositiveNumber);
  sub->add_option("--nodes", o.nodes, "quadrature nodes")->check(CLI::Range(8, 512));
  sub->add_option("--grid", o.grid, "grid points for densities")->check(CLI::Range(4, 100000));
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_flag("--maxent", o.maxent, "use the maximum-entropy representation");
  sub->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DS(G,m) empirical Bayes: fit, diagnose and summarize conjugate priors"};
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "fit the LP-corrected prior");
  auto* diagnose = app.add_subcommand("diagnose", "report qLP, the U-function and a prior-data verdict");
  auto* macro = app.add_subcommand("macro", "prior mean or modes with bootstrap standard errors");
  auto* micro_cmd = app.add_subcommand("micro", "posterior mean, median and mode for a study");
  auto* sample = app.add_subcommand("sample", "draw from the fitted prior");
  auto* maxent = app.add_subcommand("maxent", "convert the fit to maximum-entropy form");
  auto* simulate = app.add_subcommand("simulate", "run a simulation scenario");
  for (auto* s : {fit, diagnose, macro, micro_cmd, sample, maxent}) add_data_options(s, o);
  macro->add_option("--boot", o.boot, "bootstrap replicates (0 disables)")->check(CLI::NonNegativeNumber);
  macro->add_option("--num-modes", o.num_modes, "report this many modes instead of the mean");
  macro->add_option("--groups", o.groups, "cluster studies into this many groups");
  micro_cmd->add_option("--y", o.y, "observed value");
  micro_cmd->add_option("--n", o.n, "binomial trials");
  micro_cmd->add_option("--se", o.se, "normal standard error");
  micro_cmd->add_option("--exposure", o.exposure, "poisson exposure");
  micro_cmd->add_flag("--all", o.all_studies, "summaries for every study in the panel");
  sample->add_option("--draws", o.draws, "number of draws");
  simulate->add_option("--scenario", o.scenario, "pharma | compound");
  simulate->add_option("--reps", o.reps, "replicates per eta");
  simulate->add_option("--k", o.k, "studies per panel");
  simulate->add_option("--eta", o.etas, "eta values")->delimiter(',');
  simulate->add_option("--seed", o.seed, "random seed");
  simulate->add_option("--m-max", o.m_max, "largest LP degree")->check(CLI::Range(1, 12));
  simulate->add_option("--eps", o.eps, "MOM-II convergence threshold");
  simulate->add_option("--max-iter", o.max_iter, "MOM-II iteration cap");
  simulate->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit) return cmd_fit(o, false);
    if (*diagnose) return cmd_fit(o, true);
    if (*macro) return cmd_macro(o);
    if (*micro_cmd) return cmd_micro(o);
    if (*sample) return cmd_sample(o);
    if (*maxent) return cmd_maxent(o);
    if (*simulate) return cmd_simulate(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Validation ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
