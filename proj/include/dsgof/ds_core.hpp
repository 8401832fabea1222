#pragma once

// The DS(G,m) model: pi(theta) = g(theta) d(G(theta)) with
// d(u) = 1 + sum_j LP[j] Leg_j(u) (L2 form) or exp(c0 + sum_j c_j Leg_j(u)).

#include <cstddef>
#include <functional>
#include <vector>

#include "dsgof/families.hpp"
#include "dsgof/study_table.hpp"

namespace dsgof {

enum class Representation { L2, MaxEnt };

struct BicPoint {
  int m = 0;
  double bic = 0.0;
};

struct DSModel {
  ConjugateSpec spec;
  // coeffs[j - 1] = LP[j]; length m_max. Zeroed entries were removed by BIC.
  std::vector<double> coeffs;
  // Converged MOM-II iterate before smoothing.
  std::vector<double> raw_coeffs;
  int m_max = 0;
  int m_selected = 0;
  std::vector<BicPoint> bic_trace;
  int iterations = 0;
  bool converged = true;
  double last_step = 0.0;  // sum of squared coefficient changes at the last iteration
  // The iteration reached coefficients with 1 + sum LP E[T|y] <= 0 for an
  // observed study and stopped at the last admissible iterate (converged = false).
  bool left_admissible = false;
  std::size_t k = 0;
  int nodes = 64;

  Representation representation = Representation::L2;
  double maxent_c0 = 0.0;
  std::vector<double> maxent_c;  // same indexing as coeffs

  bool is_null() const;
};

// A model with the given coefficients and no fit metadata.
DSModel make_model(const ConjugateSpec& spec, std::vector<double> coeffs);

struct FitOptions {
  int m_max = 8;
  double eps = 1e-6;
  int max_iter = 100;
  int nodes = 64;
  bool smooth = true;
};

DSModel fit_mom2(const StudyTable& panel, const ConjugateSpec& spec,
                 const FitOptions& options = {});

// One fixed-point map: k^-1 sum_i E_LP[T_j | y_i] for j = 1..coeffs.size().
std::vector<double> mom2_step(const StudyTable& panel, const ConjugateSpec& spec,
                              const std::vector<double>& coeffs, int nodes = 64);

struct BicResult {
  std::vector<double> coeffs;
  int m_selected = 0;
  std::vector<BicPoint> trace;  // m = 0..raw.size()
};

// Keeps the m* largest-magnitude coefficients, m* maximizing
// BIC(m) = sum of the m largest LP^2 - m log(k) / k.
BicResult bic_select(const std::vector<double>& raw, std::size_t k);

// d(u) under the model's active representation.
double d_value(const DSModel& model, double u);

struct UFunction {
  std::vector<double> grid;
  std::vector<double> values;
};

// Uniform grid of grid_size points on [0, 1] including both endpoints.
UFunction u_function(const DSModel& model, int grid_size = 250);

double qlp(const DSModel& model);

// min of d over a uniform grid; a value below -0.05 means the L2 series is
// visibly negative and the max-entropy form is the safer density.
double min_d(const DSModel& model, int grid_size = 250);
bool maxent_recommended(const DSModel& model, int grid_size = 250);

// g(theta) d(G(theta)); may be negative for the L2 form.
double prior_density(const DSModel& model, double theta);

// Integral of max(d, 0) over [0, 1]; 1 when d never dips below zero.
double clip_normalizer(const DSModel& model);

// g(theta) max(d(G(theta)), 0) / clip_normalizer.
double prior_density_clipped(const DSModel& model, double theta, double normalizer);

// E_G[d(G(Theta)) | y], i.e. 1 + sum_j LP[j] E_G[T_j | y] in the L2 form.
double posterior_correction(const DSModel& model, const Observation& obs);

double marginal_lp(const DSModel& model, const Observation& obs);
double posterior_lp_density(const DSModel& model, const Observation& obs, double theta);
double elastic_bayes(const DSModel& model, const Observation& obs,
                     const std::function<double(double)>& h);
// h(theta) = theta, using the closed-form conjugate posterior mean for the
// leading term so the null model reproduces parametric Bayes exactly.
double elastic_bayes_mean(const DSModel& model, const Observation& obs);

}  // namespace dsgof
