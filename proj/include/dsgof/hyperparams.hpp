#pragma once

#include "dsgof/families.hpp"
#include "dsgof/study_table.hpp"

namespace dsgof {

struct MLEResult {
  ConjugateSpec spec;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  // Normal family only: the maximum sits at tau^2 = 0. spec.hyper2 then holds
  // a tiny positive floor so the spec stays valid.
  bool boundary = false;
};

MLEResult mle_beta_binomial(const StudyTable& panel);
MLEResult mle_normal_normal(const StudyTable& panel);
MLEResult mle_poisson_gamma(const StudyTable& panel, bool zero_truncated = false);
MLEResult mle_exponential_gamma(const StudyTable& panel);

// Dispatches on panel.family.
MLEResult fit_hyperparameters(const StudyTable& panel, bool zero_truncated = false);

// Marginal log-likelihood of the conjugate model; the zero-truncated variant
// divides each Poisson term by 1 - P(Y = 0).
double marginal_loglik(const StudyTable& panel, const ConjugateSpec& spec,
                       bool zero_truncated = false);

}  // namespace dsgof
