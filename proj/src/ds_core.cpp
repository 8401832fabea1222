#include "dsgof/ds_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "dsgof/error.hpp"
#include "dsgof/lp_basis.hpp"
#include "dsgof/numerics.hpp"

namespace dsgof {
namespace {

// Leg_j(u) at the posterior quadrature nodes of one distinct observation.
struct RowBasis {
  double count = 0.0;
  std::vector<double> w;
  std::vector<double> leg;  // node-major: leg[i * m + (j - 1)]
};

std::vector<RowBasis> build_row_bases(const StudyTable& panel, const ConjugateSpec& spec,
                                      int m, int nodes) {
  std::vector<RowBasis> out;
  for (const auto& wr : unique_rows(panel)) {
    const PosteriorNodes pn = posterior_nodes(spec, wr.obs, nodes);
    RowBasis rb;
    rb.count = wr.count;
    rb.w = pn.w;
    rb.leg.resize(pn.u.size() * m);
    for (std::size_t i = 0; i < pn.u.size(); ++i) {
      eval_leg_all(pn.u[i], std::span<double>(rb.leg.data() + i * m, m));
    }
    out.push_back(std::move(rb));
  }
  return out;
}

// Empty when 1 + sum LP E[T|y] <= 0 for some observed y, i.e. lp is outside
// the admissible region and the map is undefined.
std::optional<std::vector<double>> fixed_point_map(const std::vector<RowBasis>& rows,
                                                   const std::vector<double>& lp, double k) {
  const std::size_t m = lp.size();
  std::vector<double> next(m, 0.0);
  std::vector<double> num(m);
  for (const auto& rb : rows) {
    std::fill(num.begin(), num.end(), 0.0);
    double den = 0.0;
    for (std::size_t i = 0; i < rb.w.size(); ++i) {
      const double* leg = rb.leg.data() + i * m;
      double d = 1.0;
      for (std::size_t l = 0; l < m; ++l) d += lp[l] * leg[l];
      const double wd = rb.w[i] * d;
      den += wd;
      for (std::size_t j = 0; j < m; ++j) num[j] += wd * leg[j];
    }
    if (!(den > 0.0)) return std::nullopt;
    for (std::size_t j = 0; j < m; ++j) next[j] += rb.count * num[j] / den;
  }
  for (double& v : next) v /= k;
  return next;
}

void check_grid(int grid_size, const char* op) {
  if (grid_size < 2) fail_validation("ds_core", op, "grid size must be >= 2");
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

bool DSModel::is_null() const {
  return representation == Representation::L2 ? all_zero(coeffs)
                                              : all_zero(maxent_c) && maxent_c0 == 0.0;
}

DSModel make_model(const ConjugateSpec& spec, std::vector<double> coeffs) {
  validate_spec(spec);
  if (coeffs.size() > static_cast<std::size_t>(kMaxLpDegree)) {
    fail_validation("ds_core", "make_model", "at most 12 coefficients are supported");
  }
  DSModel model;
  model.spec = spec;
  model.m_max = static_cast<int>(coeffs.size());
  model.m_selected = static_cast<int>(
      std::count_if(coeffs.begin(), coeffs.end(), [](double c) { return c != 0.0; }));
  model.raw_coeffs = coeffs;
  model.coeffs = std::move(coeffs);
  return model;
}

std::vector<double> mom2_step(const StudyTable& panel, const ConjugateSpec& spec,
                              const std::vector<double>& coeffs, int nodes) {
  validate_table(panel);
  const auto rows = build_row_bases(panel, spec, static_cast<int>(coeffs.size()), nodes);
  auto next = fixed_point_map(rows, coeffs, static_cast<double>(panel.k()));
  if (!next) {
    fail_numerical("ds_core", "mom2_step",
                   "posterior correction 1 + sum LP E[T|y] is not positive for an observed study");
  }
  return *next;
}

DSModel fit_mom2(const StudyTable& panel, const ConjugateSpec& spec,
                 const FitOptions& options) {
  validate_spec(spec);
  validate_table(panel);
  if (panel.family != spec.family) {
    fail_validation("ds_core", "fit_mom2", "panel family does not match the prior family");
  }
  if (options.m_max < 1 || options.m_max > kMaxLpDegree) {
    fail_validation("ds_core", "fit_mom2", "m_max must lie in [1, 12]");
  }
  if (!(options.eps > 0.0)) fail_validation("ds_core", "fit_mom2", "eps must be > 0");
  if (options.max_iter < 1) fail_validation("ds_core", "fit_mom2", "max_iter must be >= 1");

  const int m = options.m_max;
  const double k = static_cast<double>(panel.k());
  const auto rows = build_row_bases(panel, spec, m, options.nodes);

  DSModel model;
  model.spec = spec;
  model.m_max = m;
  model.k = panel.k();
  model.nodes = options.nodes;
  model.converged = false;
  std::vector<double> lp(m, 0.0);
  std::vector<double> prev = lp;
  for (int it = 1; it <= options.max_iter; ++it) {
    auto next = fixed_point_map(rows, lp, k);
    if (!next) {
      // lp itself is inadmissible; keep the iterate it was computed from.
      lp = prev;
      model.left_admissible = true;
      break;
    }
    double step = 0.0;
    for (int j = 0; j < m; ++j) step += ((*next)[j] - lp[j]) * ((*next)[j] - lp[j]);
    prev = std::move(lp);
    lp = std::move(*next);
    model.iterations = it;
    model.last_step = step;
    if (!std::isfinite(step)) {
      fail_numerical("ds_core", "fit_mom2", "coefficient iterate is not finite");
    }
    if (step <= options.eps) {
      model.converged = true;
      break;
    }
  }
  model.raw_coeffs = lp;
  if (options.smooth) {
    BicResult bic = bic_select(lp, panel.k());
    model.coeffs = std::move(bic.coeffs);
    model.m_selected = bic.m_selected;
    model.bic_trace = std::move(bic.trace);
  } else {
    model.coeffs = lp;
    model.m_selected = m;
  }
  return model;
}

BicResult bic_select(const std::vector<double>& raw, std::size_t k) {
  for (double c : raw) {
    if (!std::isfinite(c)) fail_validation("ds_core", "bic_select", "coefficients must be finite");
  }
  if (k < 2) fail_validation("ds_core", "bic_select", "study count must be >= 2");
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::fabs(raw[a]) > std::fabs(raw[b]); });
  const double penalty = std::log(static_cast<double>(k)) / static_cast<double>(k);
  BicResult out;
  out.trace.push_back({0, 0.0});
  double cum = 0.0;
  double best = 0.0;
  for (std::size_t m = 1; m <= raw.size(); ++m) {
    cum += raw[order[m - 1]] * raw[order[m - 1]];
    const double bic = cum - static_cast<double>(m) * penalty;
    out.trace.push_back({static_cast<int>(m), bic});
    if (bic > best) {
      best = bic;
      out.m_selected = static_cast<int>(m);
    }
  }
  out.coeffs.assign(raw.size(), 0.0);
  for (int i = 0; i < out.m_selected; ++i) out.coeffs[order[i]] = raw[order[i]];
  return out;
}

double d_value(const DSModel& model, double u) {
  if (model.representation == Representation::L2) {
    double d = 1.0;
    for (std::size_t j = 0; j < model.coeffs.size(); ++j) {
      if (model.coeffs[j] != 0.0) d += model.coeffs[j] * eval_leg(static_cast<int>(j) + 1, u);
    }
    return d;
  }
  double s = model.maxent_c0;
  for (std::size_t j = 0; j < model.maxent_c.size(); ++j) {
    if (model.maxent_c[j] != 0.0) s += model.maxent_c[j] * eval_leg(static_cast<int>(j) + 1, u);
  }
  return std::exp(s);
}

UFunction u_function(const DSModel& model, int grid_size) {
  check_grid(grid_size, "u_function");
  UFunction out;
  out.grid.resize(grid_size);
  out.values.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    const double u = static_cast<double>(i) / (grid_size - 1);
    out.grid[i] = u;
    out.values[i] = d_value(model, u);
  }
  return out;
}

double qlp(const DSModel& model) {
  double s = 0.0;
  for (double c : model.coeffs) s += c * c;
  return s;
}

double min_d(const DSModel& model, int grid_size) {
  const UFunction uf = u_function(model, grid_size);
  return *std::min_element(uf.values.begin(), uf.values.end());
}

bool maxent_recommended(const DSModel& model, int grid_size) {
  return model.representation == Representation::L2 && min_d(model, grid_size) < -0.05;
}

double prior_density(const DSModel& model, double theta) {
  const Dist g = prior_dist(model.spec);
  const double base = g.pdf(theta);
  if (base == 0.0) return 0.0;
  return base * d_value(model, std::clamp(g.cdf(theta), 0.0, 1.0));
}

double clip_normalizer(const DSModel& model) {
  // Locate sign changes of d on a fine grid, then integrate the positive
  // pieces with Gauss-Legendre so the kinks do not spoil accuracy.
  constexpr int kScan = 2000;
  std::vector<double> cuts = {0.0};
  double prev = d_value(model, 0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double u = static_cast<double>(i) / kScan;
    const double cur = d_value(model, u);
    if ((prev < 0.0) != (cur < 0.0)) {
      const double lo = static_cast<double>(i - 1) / kScan;
      cuts.push_back(numerics::bisect_root([&](double x) { return d_value(model, x); }, lo, u, 1e-15));
    }
    prev = cur;
  }
  // d >= 0 throughout: both representations integrate to 1 by construction.
  if (cuts.size() == 1 && prev >= 0.0) return 1.0;
  cuts.push_back(1.0);
  const auto& rule = numerics::gauss_legendre(64);
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s];
    const double b = cuts[s + 1];
    if (b <= a) continue;
    total += (b - a) * rule.integrate([&](double t) {
      return std::max(d_value(model, a + (b - a) * t), 0.0);
    });
  }
  if (!(total > 0.0)) {
    fail_numerical("ds_core", "clip_normalizer", "density correction is nonpositive everywhere");
  }
  return total;
}

double prior_density_clipped(const DSModel& model, double theta, double normalizer) {
  const Dist g = prior_dist(model.spec);
  const double base = g.pdf(theta);
  if (base == 0.0) return 0.0;
  return base * std::max(d_value(model, std::clamp(g.cdf(theta), 0.0, 1.0)), 0.0) / normalizer;
}

double posterior_correction(const DSModel& model, const Observation& obs) {
  if (model.representation == Representation::L2) {
    if (all_zero(model.coeffs)) {
      validate_observation(model.spec.family, obs);
      return 1.0;
    }
    const auto et = posterior_expect_T_all(model.spec, obs, static_cast<int>(model.coeffs.size()),
                                           model.nodes);
    double den = 1.0;
    for (std::size_t j = 0; j < et.size(); ++j) den += model.coeffs[j] * et[j];
    return den;
  }
  const PosteriorNodes pn = posterior_nodes(model.spec, obs, model.nodes);
  double den = 0.0;
  for (std::size_t i = 0; i < pn.u.size(); ++i) den += pn.w[i] * d_value(model, pn.u[i]);
  return den;
}

double marginal_lp(const DSModel& model, const Observation& obs) {
  const double value = marginal_g(model.spec, obs) * posterior_correction(model, obs);
  if (!(value > 0.0)) {
    fail_numerical("ds_core", "marginal_lp",
                   "marginal is not positive (" + std::to_string(value) + ") at y = " +
                       std::to_string(obs.y));
  }
  return value;
}

double posterior_lp_density(const DSModel& model, const Observation& obs, double theta) {
  const Dist post = posterior_params(model.spec, obs);
  const double base = post.pdf(theta);
  if (model.is_null() && model.representation == Representation::L2) return base;
  const double den = posterior_correction(model, obs);
  if (!(den > 0.0)) {
    fail_numerical("ds_core", "posterior_lp_density",
                   "posterior normalizer is not positive; degenerate model");
  }
  if (base == 0.0) return 0.0;
  const double u = std::clamp(prior_dist(model.spec).cdf(theta), 0.0, 1.0);
  return base * d_value(model, u) / den;
}

namespace {

double elastic_core(const DSModel& model, const Observation& obs,
                    const std::function<double(double)>& h, bool exact_mean) {
  if (model.representation == Representation::L2 && all_zero(model.coeffs)) {
    if (exact_mean) return posterior_params(model.spec, obs).mean();
    return posterior_expect_hT(model.spec, obs, h, 0, model.nodes);
  }
  const PosteriorNodes pn = posterior_nodes(model.spec, obs, model.nodes);
  double num = 0.0;
  double den = 0.0;
  if (model.representation == Representation::L2) {
    const std::size_t m = model.coeffs.size();
    std::vector<double> leg(m);
    double num_corr = 0.0;
    double den_corr = 0.0;
    double base = 0.0;
    for (std::size_t i = 0; i < pn.u.size(); ++i) {
      eval_leg_all(pn.u[i], leg);
      double corr = 0.0;
      for (std::size_t j = 0; j < m; ++j) corr += model.coeffs[j] * leg[j];
      const double hv = h(pn.theta[i]);
      base += pn.w[i] * hv;
      num_corr += pn.w[i] * hv * corr;
      den_corr += pn.w[i] * corr;
    }
    if (exact_mean) base = posterior_params(model.spec, obs).mean();
    num = base + num_corr;
    den = 1.0 + den_corr;
  } else {
    for (std::size_t i = 0; i < pn.u.size(); ++i) {
      const double d = d_value(model, pn.u[i]);
      num += pn.w[i] * h(pn.theta[i]) * d;
      den += pn.w[i] * d;
    }
  }
  if (!(den > 0.0)) {
    fail_numerical("ds_core", "elastic_bayes", "posterior normalizer is not positive; degenerate model");
  }
  const double value = num / den;
  if (!std::isfinite(value)) fail_numerical("ds_core", "elastic_bayes", "estimate is not finite");
  return value;
}

}  // namespace

double elastic_bayes(const DSModel& model, const Observation& obs,
                     const std::function<double(double)>& h) {
  return elastic_core(model, obs, h, false);
}

double elastic_bayes_mean(const DSModel& model, const Observation& obs) {
  return elastic_core(model, obs, [](double t) { return t; }, true);
}

}  // namespace dsgof
