#include "dsgof/hyperparams.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "dsgof/error.hpp"
#include "dsgof/numerics.hpp"

namespace dsgof {
namespace {

using Point = std::array<double, 2>;

struct SimplexResult {
  Point x;
  double f;
  int iterations;
  bool converged;
};

// Nelder-Mead minimizer in two dimensions.
SimplexResult nelder_mead(const std::function<double(const Point&)>& f, Point start,
                          double step, int max_iter = 4000) {
  std::array<Point, 3> p = {start, start, start};
  p[1][0] += step;
  p[2][1] += step;
  std::array<double, 3> fv = {f(p[0]), f(p[1]), f(p[2])};
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order[0], mid = order[1], worst = order[2];
    const double size = std::max({std::fabs(p[1][0] - p[0][0]), std::fabs(p[2][0] - p[0][0]),
                                  std::fabs(p[1][1] - p[0][1]), std::fabs(p[2][1] - p[0][1])});
    if (std::fabs(fv[worst] - fv[best]) <= 1e-13 * (1.0 + std::fabs(fv[best])) &&
        size <= 1e-9) {
      converged = true;
      break;
    }
    Point centroid;
    for (int d = 0; d < 2; ++d) centroid[d] = 0.5 * (p[best][d] + p[mid][d]);
    auto along = [&](double t) {
      Point q;
      for (int d = 0; d < 2; ++d) q[d] = centroid[d] + t * (p[worst][d] - centroid[d]);
      return q;
    };
    const Point xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fv[best]) {
      const Point xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        p[worst] = xe;
        fv[worst] = fe;
      } else {
        p[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[mid]) {
      p[worst] = xr;
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      const Point xc = along(outside ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : fv[worst])) {
        p[worst] = xc;
        fv[worst] = fc;
      } else {
        for (int i : {mid, worst}) {
          for (int d = 0; d < 2; ++d) p[i][d] = p[best][d] + 0.5 * (p[i][d] - p[best][d]);
          fv[i] = f(p[i]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return {p[best], fv[best], it, converged};
}

// Runs the simplex from each start on (log a, log b), restarting once from the
// incumbent to shake off premature collapse, and keeps the best optimum.
MLEResult maximize_log_params(const std::function<double(double, double)>& loglik,
                              Family family, const std::vector<Point>& starts) {
  auto objective = [&](const Point& x) {
    if (std::fabs(x[0]) > 30.0 || std::fabs(x[1]) > 30.0) {
      return std::numeric_limits<double>::infinity();
    }
    const double v = loglik(std::exp(x[0]), std::exp(x[1]));
    return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
  };
  MLEResult best;
  best.loglik = -std::numeric_limits<double>::infinity();
  for (const Point& s : starts) {
    Point x0 = {std::log(s[0]), std::log(s[1])};
    SimplexResult r = nelder_mead(objective, x0, 0.5);
    SimplexResult r2 = nelder_mead(objective, r.x, 0.05);
    const int iters = r.iterations + r2.iterations;
    if (std::isfinite(r2.f) && -r2.f > best.loglik) {
      best.spec = {family, std::exp(r2.x[0]), std::exp(r2.x[1])};
      best.loglik = -r2.f;
      best.converged = r2.converged;
    }
    best.iterations += iters;
  }
  if (!std::isfinite(best.loglik)) {
    fail_numerical("hyperparams", "maximize", "likelihood is not finite at any start");
  }
  return best;
}

void require_rows(const StudyTable& panel, Family family, const char* op) {
  if (panel.family != family) {
    fail_validation("hyperparams", op, "panel family does not match the estimator");
  }
  validate_table(panel);
  if (panel.k() < 2) fail_validation("hyperparams", op, "at least 2 studies are required");
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return v.size() > 1 ? s / static_cast<double>(v.size() - 1) : 0.0;
}

std::vector<Point> scaled_starts(Point base) {
  return {base, {base[0] * 3.0, base[1] * 3.0}, {base[0] / 3.0, base[1] / 3.0}};
}

}  // namespace

double marginal_loglik(const StudyTable& panel, const ConjugateSpec& spec,
                       bool zero_truncated) {
  double acc = 0.0;
  for (const auto& wr : unique_rows(panel)) {
    double term = log_marginal_g(spec, wr.obs);
    if (zero_truncated) {
      const double p0 = marginal_g(spec, {0.0, wr.obs.size});
      term -= std::log1p(-p0);
    }
    acc += wr.count * term;
  }
  return acc;
}

MLEResult mle_beta_binomial(const StudyTable& panel) {
  require_rows(panel, Family::BinomialBeta, "mle_beta_binomial");
  bool all_zero = true;
  bool all_full = true;
  std::vector<double> props;
  for (const auto& r : panel.rows) {
    if (r.size <= 0.0) continue;
    all_zero = all_zero && r.y == 0.0;
    all_full = all_full && r.y == r.size;
    props.push_back(r.y / r.size);
  }
  if (props.size() < 2 || all_zero || all_full) {
    fail_validation("hyperparams", "mle_beta_binomial",
                    "panel is degenerate (all counts zero or all full); "
                    "beta-binomial hyperparameters are not identifiable");
  }
  const double m = std::clamp(mean_of(props), 1e-3, 1.0 - 1e-3);
  const double v = var_of(props);
  double s = (v > 0.0 && v < m * (1.0 - m)) ? m * (1.0 - m) / v - 1.0 : 10.0;
  s = std::clamp(s, 0.1, 1e4);
  auto ll = [&](double a, double b) {
    return marginal_loglik(panel, {Family::BinomialBeta, a, b});
  };
  return maximize_log_params(ll, Family::BinomialBeta, scaled_starts({m * s, (1.0 - m) * s}));
}

MLEResult mle_poisson_gamma(const StudyTable& panel, bool zero_truncated) {
  require_rows(panel, Family::PoissonGamma, "mle_poisson_gamma");
  if (zero_truncated) {
    for (const auto& r : panel.rows) {
      if (r.y < 1.0) {
        fail_validation("hyperparams", "mle_poisson_gamma",
                        "zero-truncated fit requires all counts >= 1");
      }
    }
  }
  std::vector<double> rates;
  std::vector<double> inv_exposure;
  for (const auto& r : panel.rows) {
    rates.push_back(r.y / r.size);
    inv_exposure.push_back(1.0 / r.size);
  }
  const double m = std::max(mean_of(rates), 1e-3);
  double v_theta = var_of(rates) - m * mean_of(inv_exposure);
  if (!(v_theta > 0.0)) v_theta = 0.1 * m * m;
  const double shape = std::clamp(m * m / v_theta, 1e-3, 1e4);
  const double scale = std::clamp(v_theta / m, 1e-4, 1e4);
  auto ll = [&](double a, double b) {
    return marginal_loglik(panel, {Family::PoissonGamma, a, b}, zero_truncated);
  };
  std::vector<Point> starts = scaled_starts({shape, scale});
  if (zero_truncated) starts.push_back({0.5, 10.0 * m});
  return maximize_log_params(ll, Family::PoissonGamma, starts);
}

MLEResult mle_exponential_gamma(const StudyTable& panel) {
  require_rows(panel, Family::ExponentialGamma, "mle_exponential_gamma");
  std::vector<double> ys;
  for (const auto& r : panel.rows) ys.push_back(r.y);
  // E[y] = 1 / (beta (alpha - 1)); start at alpha = 3.
  const double scale = 1.0 / (2.0 * mean_of(ys));
  auto ll = [&](double a, double b) {
    return marginal_loglik(panel, {Family::ExponentialGamma, a, b});
  };
  return maximize_log_params(ll, Family::ExponentialGamma, scaled_starts({3.0, scale}));
}

MLEResult mle_normal_normal(const StudyTable& panel) {
  require_rows(panel, Family::NormalNormal, "mle_normal_normal");
  // For fixed tau^2 the optimal mu is the precision-weighted mean, so the
  // search is one-dimensional over tau >= 0 (scan, then golden refinement).
  std::vector<double> ys;
  double max_s = 0.0;
  for (const auto& r : panel.rows) {
    ys.push_back(r.y);
    max_s = std::max(max_s, r.size);
  }
  auto profile_mu = [&](double tau2) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& r : panel.rows) {
      const double w = 1.0 / (r.size * r.size + tau2);
      num += w * r.y;
      den += w;
    }
    return num / den;
  };
  auto profile = [&](double tau) {
    const double tau2 = tau * tau;
    const double mu = profile_mu(tau2);
    double acc = 0.0;
    for (const auto& r : panel.rows) {
      const double v = r.size * r.size + tau2;
      const double z = r.y - mu;
      acc += -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * z * z / v;
    }
    return acc;
  };
  const double tau_max = 10.0 * (std::sqrt(var_of(ys)) + max_s) + 1e-12;
  constexpr int kScan = 2000;
  int best_i = 0;
  double best_v = profile(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double v = profile(tau_max * i / kScan);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  MLEResult out;
  out.iterations = kScan;
  double tau = 0.0;
  if (best_i > 0) {
    const double lo = tau_max * (best_i - 1) / kScan;
    const double hi = tau_max * std::min(best_i + 1, kScan) / kScan;
    tau = numerics::golden_section_max(profile, lo, hi, 1e-13);
    if (profile(tau) < profile(0.0)) tau = 0.0;
  }
  const double tau_floor = 1e-12 * (1.0 + max_s * max_s);
  out.boundary = tau * tau <= tau_floor;
  const double tau2 = out.boundary ? tau_floor : tau * tau;
  out.spec = {Family::NormalNormal, profile_mu(tau2), tau2};
  out.loglik = profile(std::sqrt(tau2));
  out.converged = true;
  return out;
}

MLEResult fit_hyperparameters(const StudyTable& panel, bool zero_truncated) {
  switch (panel.family) {
    case Family::BinomialBeta: return mle_beta_binomial(panel);
    case Family::PoissonGamma: return mle_poisson_gamma(panel, zero_truncated);
    case Family::NormalNormal: return mle_normal_normal(panel);
    case Family::ExponentialGamma: return mle_exponential_gamma(panel);
  }
  fail_validation("hyperparams", "fit_hyperparameters", "unknown family");
}

}  // namespace dsgof
