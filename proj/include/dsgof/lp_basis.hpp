#pragma once

#include <span>

namespace dsgof {

struct ConjugateSpec;

inline constexpr int kMaxLpDegree = 12;

// Shifted orthonormal Legendre polynomial on [0, 1]:
// Leg_j(u) = sqrt(2j + 1) * P_j(2u - 1), so that the integral of Leg_j^2 is 1.
double eval_leg(int j, double u);

// Fills out[j - 1] = Leg_j(u) for j = 1..out.size() using one recurrence pass.
void eval_leg_all(double u, std::span<double> out);

// Rank polynomial T_j(theta; G) = Leg_j(G(theta)) for the prior G of spec.
double eval_T(int j, double theta, const ConjugateSpec& spec);

}  // namespace dsgof
