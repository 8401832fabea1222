#include "dsgof/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dsgof/error.hpp"
#include "dsgof/lp_basis.hpp"
#include "dsgof/numerics.hpp"

namespace dsgof {
namespace {

using numerics::log_gamma;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

// x * log(y) with the 0 * log(0) = 0 convention.
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::BinomialBeta: return "binomial";
    case Family::PoissonGamma: return "poisson";
    case Family::NormalNormal: return "normal";
    case Family::ExponentialGamma: return "exponential";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "binomial") return Family::BinomialBeta;
  if (name == "poisson") return Family::PoissonGamma;
  if (name == "normal") return Family::NormalNormal;
  if (name == "exponential") return Family::ExponentialGamma;
  fail_validation("families", "parse_family",
                  "unknown family '" + std::string(name) +
                      "' (expected binomial, poisson, normal or exponential)");
}

void validate_spec(const ConjugateSpec& spec) {
  if (!std::isfinite(spec.hyper1) || !std::isfinite(spec.hyper2)) {
    fail_validation("families", "validate_spec", "hyperparameters must be finite");
  }
  if (spec.hyper2 <= 0.0) {
    fail_validation("families", "validate_spec",
                    spec.family == Family::NormalNormal
                        ? "prior variance tau^2 must be > 0"
                        : "beta hyperparameter must be > 0");
  }
  if (spec.family != Family::NormalNormal && spec.hyper1 <= 0.0) {
    fail_validation("families", "validate_spec", "alpha hyperparameter must be > 0");
  }
}

void validate_observation(Family family, const Observation& obs) {
  const double y = obs.y;
  switch (family) {
    case Family::BinomialBeta:
      if (!is_integer(obs.size) || obs.size < 0.0) {
        fail_validation("families", "validate_observation",
                        "binomial n must be a nonnegative integer");
      }
      if (!is_integer(y) || y < 0.0 || y > obs.size) {
        fail_validation("families", "validate_observation",
                        "binomial y must be an integer in [0, n]");
      }
      return;
    case Family::PoissonGamma:
      if (!is_integer(y) || y < 0.0) {
        fail_validation("families", "validate_observation",
                        "poisson y must be a nonnegative integer");
      }
      if (!(obs.size > 0.0) || !std::isfinite(obs.size)) {
        fail_validation("families", "validate_observation",
                        "poisson exposure must be > 0");
      }
      return;
    case Family::NormalNormal:
      if (!std::isfinite(y)) {
        fail_validation("families", "validate_observation", "normal y must be finite");
      }
      if (!(obs.size > 0.0) || !std::isfinite(obs.size)) {
        fail_validation("families", "validate_observation",
                        "normal standard error must be > 0");
      }
      return;
    case Family::ExponentialGamma:
      if (!(y > 0.0) || !std::isfinite(y)) {
        fail_validation("families", "validate_observation",
                        "exponential y must be > 0");
      }
      return;
  }
}

double Dist::log_pdf(double x) const {
  switch (kind) {
    case DistKind::Beta:
      if (x < 0.0 || x > 1.0) return -kInf;
      return xlogy(p1 - 1.0, x) + xlogy(p2 - 1.0, 1.0 - x) - numerics::log_beta(p1, p2);
    case DistKind::Gamma:
      if (x < 0.0) return -kInf;
      return xlogy(p1 - 1.0, x) - x / p2 - log_gamma(p1) - p1 * std::log(p2);
    case DistKind::Normal: {
      const double z = x - p1;
      return -0.5 * std::log(2.0 * std::numbers::pi * p2) - 0.5 * z * z / p2;
    }
  }
  return -kInf;
}

double Dist::pdf(double x) const { return std::exp(log_pdf(x)); }

double Dist::cdf(double x) const {
  switch (kind) {
    case DistKind::Beta:
      return numerics::reg_incomplete_beta(std::clamp(x, 0.0, 1.0), p1, p2);
    case DistKind::Gamma:
      return x <= 0.0 ? 0.0 : numerics::reg_incomplete_gamma(p1, x / p2);
    case DistKind::Normal:
      return numerics::normal_cdf(x, p1, std::sqrt(p2));
  }
  return 0.0;
}

double Dist::quantile(double p) const {
  switch (kind) {
    case DistKind::Beta: return numerics::beta_quantile(p, p1, p2);
    case DistKind::Gamma: return numerics::gamma_quantile(p, p1, p2);
    case DistKind::Normal: return numerics::normal_quantile(p, p1, std::sqrt(p2));
  }
  return 0.0;
}

double Dist::quantile(double p, double q) const {
  if (p <= 0.5) return quantile(p);
  switch (kind) {
    case DistKind::Beta: return 1.0 - numerics::beta_quantile(q, p2, p1);
    case DistKind::Gamma: return numerics::gamma_quantile(p, p1, p2);
    case DistKind::Normal: return p1 - std::sqrt(p2) * numerics::normal_quantile(q);
  }
  return 0.0;
}

double Dist::mean() const {
  switch (kind) {
    case DistKind::Beta: return p1 / (p1 + p2);
    case DistKind::Gamma: return p1 * p2;
    case DistKind::Normal: return p1;
  }
  return 0.0;
}

double Dist::variance() const {
  switch (kind) {
    case DistKind::Beta: {
      const double s = p1 + p2;
      return p1 * p2 / (s * s * (s + 1.0));
    }
    case DistKind::Gamma: return p1 * p2 * p2;
    case DistKind::Normal: return p2;
  }
  return 0.0;
}

double Dist::lower() const { return kind == DistKind::Normal ? -kInf : 0.0; }
double Dist::upper() const { return kind == DistKind::Beta ? 1.0 : kInf; }

Dist prior_dist(const ConjugateSpec& spec) {
  validate_spec(spec);
  switch (spec.family) {
    case Family::BinomialBeta: return {DistKind::Beta, spec.hyper1, spec.hyper2};
    case Family::PoissonGamma:
    case Family::ExponentialGamma: return {DistKind::Gamma, spec.hyper1, spec.hyper2};
    case Family::NormalNormal: return {DistKind::Normal, spec.hyper1, spec.hyper2};
  }
  return {};
}

PosteriorParams posterior_params(const ConjugateSpec& spec, const Observation& obs) {
  validate_spec(spec);
  validate_observation(spec.family, obs);
  const double a = spec.hyper1;
  const double b = spec.hyper2;
  switch (spec.family) {
    case Family::BinomialBeta:
      return {DistKind::Beta, a + obs.y, b + obs.size - obs.y};
    case Family::PoissonGamma:
      return {DistKind::Gamma, a + obs.y, b / (1.0 + b * obs.size)};
    case Family::ExponentialGamma:
      return {DistKind::Gamma, a + 1.0, b / (1.0 + b * obs.y)};
    case Family::NormalNormal: {
      const double s2 = obs.size * obs.size;
      const double lambda = s2 / (s2 + b);
      return {DistKind::Normal, lambda * a + (1.0 - lambda) * obs.y, (1.0 - lambda) * s2};
    }
  }
  return {};
}

double log_likelihood(Family family, const Observation& obs, double theta) {
  validate_observation(family, obs);
  const double y = obs.y;
  switch (family) {
    case Family::BinomialBeta: {
      if (theta < 0.0 || theta > 1.0) return -kInf;
      const double n = obs.size;
      return log_gamma(n + 1.0) - log_gamma(y + 1.0) - log_gamma(n - y + 1.0) +
             xlogy(y, theta) + xlogy(n - y, 1.0 - theta);
    }
    case Family::PoissonGamma: {
      if (theta < 0.0) return -kInf;
      const double rate = theta * obs.size;
      return xlogy(y, rate) - rate - log_gamma(y + 1.0);
    }
    case Family::NormalNormal: {
      const double s2 = obs.size * obs.size;
      const double z = y - theta;
      return -0.5 * std::log(2.0 * std::numbers::pi * s2) - 0.5 * z * z / s2;
    }
    case Family::ExponentialGamma:
      if (theta <= 0.0) return -kInf;
      return std::log(theta) - theta * y;
  }
  return -kInf;
}

double log_marginal_g(const ConjugateSpec& spec, const Observation& obs) {
  validate_spec(spec);
  validate_observation(spec.family, obs);
  const double a = spec.hyper1;
  const double b = spec.hyper2;
  const double y = obs.y;
  switch (spec.family) {
    case Family::BinomialBeta: {
      const double n = obs.size;
      return log_gamma(n + 1.0) - log_gamma(y + 1.0) - log_gamma(n - y + 1.0) +
             numerics::log_beta(y + a, n - y + b) - numerics::log_beta(a, b);
    }
    case Family::PoissonGamma: {
      // Negative binomial with p = 1 / (1 + beta E).
      const double be = b * obs.size;
      return log_gamma(a + y) - log_gamma(a) - log_gamma(y + 1.0) -
             a * std::log1p(be) + xlogy(y, be) - y * std::log1p(be);
    }
    case Family::NormalNormal: {
      const double v = obs.size * obs.size + b;
      const double z = y - a;
      return -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * z * z / v;
    }
    case Family::ExponentialGamma:
      return std::log(a) + std::log(b) - (a + 1.0) * std::log1p(b * y);
  }
  return -kInf;
}

double marginal_g(const ConjugateSpec& spec, const Observation& obs) {
  return std::exp(log_marginal_g(spec, obs));
}

PosteriorNodes posterior_nodes(const ConjugateSpec& spec, const Observation& obs,
                               int nodes) {
  const Dist prior = prior_dist(spec);
  const Dist post = posterior_params(spec, obs);
  const auto& rule = numerics::tanh_sinh(nodes);
  PosteriorNodes out;
  out.theta.resize(rule.size());
  out.u.resize(rule.size());
  out.w = rule.weights;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double theta = post.quantile(rule.nodes[i], rule.complements[i]);
    out.theta[i] = theta;
    out.u[i] = std::clamp(prior.cdf(theta), 0.0, 1.0);
  }
  return out;
}

std::vector<double> posterior_expect_T_all(const ConjugateSpec& spec,
                                           const Observation& obs, int m, int nodes) {
  if (m < 0 || m > kMaxLpDegree) {
    fail_validation("families", "posterior_expect_T", "degree must lie in [1, 12]");
  }
  const PosteriorNodes pn = posterior_nodes(spec, obs, nodes);
  std::vector<double> out(m, 0.0);
  std::vector<double> leg(m);
  for (std::size_t i = 0; i < pn.u.size(); ++i) {
    eval_leg_all(pn.u[i], leg);
    for (int j = 0; j < m; ++j) out[j] += pn.w[i] * leg[j];
  }
  return out;
}

double posterior_expect_T(const ConjugateSpec& spec, const Observation& obs, int j,
                          int nodes) {
  if (j < 1 || j > kMaxLpDegree) {
    fail_validation("families", "posterior_expect_T", "degree must lie in [1, 12]");
  }
  return posterior_expect_T_all(spec, obs, j, nodes)[j - 1];
}

double posterior_expect_hT(const ConjugateSpec& spec, const Observation& obs,
                           const std::function<double(double)>& h, int j, int nodes) {
  if (j < 0 || j > kMaxLpDegree) {
    fail_validation("families", "posterior_expect_hT", "degree must lie in [0, 12]");
  }
  const PosteriorNodes pn = posterior_nodes(spec, obs, nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < pn.u.size(); ++i) {
    const double t = j == 0 ? 1.0 : eval_leg(j, pn.u[i]);
    acc += pn.w[i] * h(pn.theta[i]) * t;
  }
  if (!std::isfinite(acc)) {
    fail_numerical("families", "posterior_expect_hT", "integrand is not finite");
  }
  return acc;
}

}  // namespace dsgof
