#include "dsgof/lp_basis.hpp"

#include <cmath>
#include <string>

#include "dsgof/error.hpp"
#include "dsgof/families.hpp"

namespace dsgof {
namespace {

void check_degree(int j, const char* op) {
  if (j < 1 || j > kMaxLpDegree) {
    fail_validation("lp_basis", op,
                    "degree must lie in [1, 12], got " + std::to_string(j));
  }
}

void check_unit(double u, const char* op) {
  if (!(u >= 0.0 && u <= 1.0)) {
    fail_validation("lp_basis", op, "u must lie in [0, 1]");
  }
}

}  // namespace

double eval_leg(int j, double u) {
  check_degree(j, "eval_leg");
  check_unit(u, "eval_leg");
  const double x = 2.0 * u - 1.0;
  double p_prev = 1.0;
  double p = x;
  for (int n = 1; n < j; ++n) {
    const double next = ((2.0 * n + 1.0) * x * p - n * p_prev) / (n + 1.0);
    p_prev = p;
    p = next;
  }
  return std::sqrt(2.0 * j + 1.0) * p;
}

void eval_leg_all(double u, std::span<double> out) {
  if (out.size() > static_cast<std::size_t>(kMaxLpDegree)) {
    fail_validation("lp_basis", "eval_leg_all", "at most 12 degrees supported");
  }
  check_unit(u, "eval_leg_all");
  const double x = 2.0 * u - 1.0;
  double p_prev = 1.0;
  double p = x;
  for (std::size_t n = 1; n <= out.size(); ++n) {
    out[n - 1] = std::sqrt(2.0 * n + 1.0) * p;
    const double next = ((2.0 * n + 1.0) * x * p - n * p_prev) / (n + 1.0);
    p_prev = p;
    p = next;
  }
}

double eval_T(int j, double theta, const ConjugateSpec& spec) {
  check_degree(j, "eval_T");
  return eval_leg(j, prior_dist(spec).cdf(theta));
}

}  // namespace dsgof
