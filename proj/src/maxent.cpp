#include "dsgof/maxent.hpp"

#include <algorithm>
#include <cmath>

#include "dsgof/error.hpp"
#include "dsgof/lp_basis.hpp"
#include "dsgof/numerics.hpp"

namespace dsgof {
namespace {

constexpr int kSolveNodes = 128;
// Beyond this coefficient magnitude the target moments are taken to lie
// outside the moment space of positive densities (the dual is unbounded).
constexpr double kMaxCoefficient = 50.0;

struct DualState {
  double log_z = 0.0;
  double objective = 0.0;
  std::vector<double> grad;
  std::vector<double> hess;
};

// Basis values Leg_j(u_i) for the retained indices at every node.
struct Design {
  std::vector<int> index;  // retained 0-based coefficient indices
  std::vector<double> u;
  std::vector<double> w;
  std::vector<double> leg;  // node-major, index.size() per node
};

Design make_design(const std::vector<int>& index, int nodes) {
  const auto& rule = numerics::gauss_legendre(nodes);
  Design d;
  d.index = index;
  d.u = rule.nodes;
  d.w = rule.weights;
  const std::size_t r = index.size();
  d.leg.resize(rule.size() * r);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    for (std::size_t a = 0; a < r; ++a) d.leg[i * r + a] = eval_leg(index[a] + 1, rule.nodes[i]);
  }
  return d;
}

// Moments E_c[Leg_j] under the normalized exp density, plus log Z.
std::vector<double> moments(const Design& d, const std::vector<double>& c, double* log_z,
                            std::vector<double>* cov) {
  const std::size_t r = d.index.size();
  const std::size_t n = d.u.size();
  std::vector<double> s(n);
  double smax = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t a = 0; a < r; ++a) v += c[a] * d.leg[i * r + a];
    s[i] = v;
    smax = std::max(smax, v);
  }
  double z = 0.0;
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = d.w[i] * std::exp(s[i] - smax);
    z += p[i];
  }
  for (double& x : p) x /= z;
  if (log_z) *log_z = smax + std::log(z);
  std::vector<double> mean(r, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < r; ++a) mean[a] += p[i] * d.leg[i * r + a];
  }
  if (cov) {
    cov->assign(r * r, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < r; ++a) {
        const double da = d.leg[i * r + a] - mean[a];
        for (std::size_t b = 0; b < r; ++b) {
          (*cov)[a * r + b] += p[i] * da * (d.leg[i * r + b] - mean[b]);
        }
      }
    }
  }
  return mean;
}

std::vector<int> retained_indices(const DSModel& model) {
  std::vector<int> idx;
  for (std::size_t j = 0; j < model.coeffs.size(); ++j) {
    if (model.coeffs[j] != 0.0) idx.push_back(static_cast<int>(j));
  }
  return idx;
}

}  // namespace

MaxEntSolution to_maxent(const DSModel& model, double tol, int max_iter) {
  if (!(tol > 0.0)) fail_validation("maxent", "to_maxent", "tolerance must be > 0");
  MaxEntSolution sol;
  sol.c.assign(model.coeffs.size(), 0.0);
  const std::vector<int> idx = retained_indices(model);
  if (idx.empty()) return sol;

  const Design d = make_design(idx, kSolveNodes);
  const std::size_t r = idx.size();
  std::vector<double> target(r);
  std::vector<double> c(r);
  for (std::size_t a = 0; a < r; ++a) {
    target[a] = model.coeffs[idx[a]];
    c[a] = target[a];
  }
  auto dual = [&](const std::vector<double>& cc, double* log_z) {
    double lz = 0.0;
    moments(d, cc, &lz, nullptr);
    if (log_z) *log_z = lz;
    double obj = lz;
    for (std::size_t a = 0; a < r; ++a) obj -= cc[a] * target[a];
    return obj;
  };
  sol.converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    sol.iterations = it;
    std::vector<double> cov;
    const std::vector<double> mean = moments(d, c, nullptr, &cov);
    std::vector<double> grad(r);
    double gmax = 0.0;
    for (std::size_t a = 0; a < r; ++a) {
      grad[a] = mean[a] - target[a];
      gmax = std::max(gmax, std::fabs(grad[a]));
    }
    if (gmax <= 0.1 * tol) {
      sol.converged = true;
      break;
    }
    std::vector<double> neg(r);
    for (std::size_t a = 0; a < r; ++a) neg[a] = -grad[a];
    std::vector<double> step;
    try {
      step = numerics::solve_linear(cov, neg);
    } catch (const Error&) {
      step = neg;  // gradient descent fallback on a flat direction
    }
    const double f0 = dual(c, nullptr);
    double slope = 0.0;
    for (std::size_t a = 0; a < r; ++a) slope += grad[a] * step[a];
    double t = 1.0;
    std::vector<double> trial(r);
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t a = 0; a < r; ++a) trial[a] = c[a] + t * step[a];
      const double f1 = dual(trial, nullptr);
      if (std::isfinite(f1) && f1 <= f0 + 1e-4 * t * slope) break;
      t *= 0.5;
    }
    c = trial;
    const double cmax = std::fabs(*std::max_element(c.begin(), c.end(), [](double x, double y) {
      return std::fabs(x) < std::fabs(y);
    }));
    if (cmax > kMaxCoefficient) {
      sol.infeasible = true;
      break;
    }
  }
  double log_z = 0.0;
  dual(c, &log_z);
  sol.c0 = -log_z;
  for (std::size_t a = 0; a < r; ++a) sol.c[idx[a]] = c[a];
  sol.residual = maxent_residual(model, sol, 2 * kSolveNodes);
  sol.converged = !sol.infeasible && (sol.converged || sol.residual <= tol);
  return sol;
}

double maxent_residual(const DSModel& model, const MaxEntSolution& sol, int nodes) {
  const std::vector<int> idx = retained_indices(model);
  if (idx.empty()) return 0.0;
  const auto& rule = numerics::gauss_legendre(nodes);
  std::vector<double> mom(idx.size(), 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double u = rule.nodes[i];
    double s = sol.c0;
    for (std::size_t j = 0; j < sol.c.size(); ++j) {
      if (sol.c[j] != 0.0) s += sol.c[j] * eval_leg(static_cast<int>(j) + 1, u);
    }
    const double dens = rule.weights[i] * std::exp(s);
    mass += dens;
    for (std::size_t a = 0; a < idx.size(); ++a) mom[a] += dens * eval_leg(idx[a] + 1, u);
  }
  double worst = std::fabs(mass - 1.0);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    worst = std::max(worst, std::fabs(mom[a] - model.coeffs[idx[a]]));
  }
  return worst;
}

DSModel with_maxent(const DSModel& model, const MaxEntSolution& sol) {
  DSModel out = model;
  out.representation = Representation::MaxEnt;
  out.maxent_c0 = sol.c0;
  out.maxent_c = sol.c;
  return out;
}

}  // namespace dsgof
