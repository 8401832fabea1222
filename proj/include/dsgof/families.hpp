#pragma once

// Conjugate families: likelihood, prior g/G, marginal f_G(y), conjugate
// posterior and posterior expectations of rank polynomials.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace dsgof {

enum class Family { BinomialBeta, PoissonGamma, NormalNormal, ExponentialGamma };

std::string_view family_name(Family f);
// Accepts the CLI names: binomial, poisson, normal, exponential.
Family parse_family(std::string_view name);

// hyper1/hyper2 hold (alpha, beta) for the gamma/beta priors, with the gamma
// in the scale parameterization, and (mu, tau^2) for the normal prior.
struct ConjugateSpec {
  Family family = Family::BinomialBeta;
  double hyper1 = 1.0;
  double hyper2 = 1.0;
};

void validate_spec(const ConjugateSpec& spec);

// size is n (binomial), s (normal standard error), E (poisson exposure) and
// is ignored for the exponential family.
struct Observation {
  double y = 0.0;
  double size = 1.0;
};

void validate_observation(Family family, const Observation& obs);

enum class DistKind { Beta, Gamma, Normal };

// A one-dimensional law used both as prior G and as conjugate posterior.
// Beta(p1 = a, p2 = b); Gamma(p1 = shape, p2 = scale); Normal(p1 = mean, p2 = variance).
struct Dist {
  DistKind kind = DistKind::Beta;
  double p1 = 1.0;
  double p2 = 1.0;

  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;
  // Quantile at p given q = 1 - p exactly; keeps precision in the upper tail.
  double quantile(double p, double q) const;
  double mean() const;
  double variance() const;
  // Support endpoints (possibly infinite).
  double lower() const;
  double upper() const;
};

using PosteriorParams = Dist;

Dist prior_dist(const ConjugateSpec& spec);
PosteriorParams posterior_params(const ConjugateSpec& spec, const Observation& obs);

// log f(y | theta).
double log_likelihood(Family family, const Observation& obs, double theta);

double log_marginal_g(const ConjugateSpec& spec, const Observation& obs);
double marginal_g(const ConjugateSpec& spec, const Observation& obs);

// Posterior quadrature in v-space: theta_i = Q_post(v_i) and u_i = G(theta_i)
// for tanh-sinh nodes v_i with weights w_i.
struct PosteriorNodes {
  std::vector<double> theta;
  std::vector<double> u;
  std::vector<double> w;
};

PosteriorNodes posterior_nodes(const ConjugateSpec& spec, const Observation& obs,
                               int nodes = 64);

// Returns E_G[T_j | y] for j = 1..m at index j - 1.
std::vector<double> posterior_expect_T_all(const ConjugateSpec& spec,
                                           const Observation& obs, int m,
                                           int nodes = 64);
double posterior_expect_T(const ConjugateSpec& spec, const Observation& obs, int j,
                          int nodes = 64);

// E_G[h(Theta) T_j(Theta; G) | y]; j = 0 means T_0 = 1.
double posterior_expect_hT(const ConjugateSpec& spec, const Observation& obs,
                           const std::function<double(double)>& h, int j,
                           int nodes = 64);

}  // namespace dsgof
