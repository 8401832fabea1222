#pragma once

#include <vector>

#include "dsgof/ds_core.hpp"

namespace dsgof {

struct MaxEntSolution {
  double c0 = 0.0;
  std::vector<double> c;  // c[j - 1]; zero outside the retained set
  double residual = 0.0;  // max |int Leg_j exp(...) du - LP[j]| over retained j
  bool converged = true;
  // The target moments admit no positive density; c diverged and was stopped.
  bool infeasible = false;
  int iterations = 0;
};

// Finds exp(c0 + sum_j c_j Leg_j(u)) matching the model's nonzero L2
// coefficients as moments. Damped Newton on the convex dual
// log Z(c) - sum_j c_j LP[j], started at c = LP; c0 = -log Z.
MaxEntSolution to_maxent(const DSModel& model, double tol = 1e-8, int max_iter = 200);

// Max moment violation of a solution, by Gauss-Legendre with `nodes` points.
double maxent_residual(const DSModel& model, const MaxEntSolution& sol, int nodes);

// Copy of the model switched to the max-entropy representation.
DSModel with_maxent(const DSModel& model, const MaxEntSolution& sol);

}  // namespace dsgof
