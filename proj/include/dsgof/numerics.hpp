#pragma once

// Special functions, distribution CDFs/quantiles and Gauss-Legendre
// quadrature on the unit interval. Everything here is a pure function.

#include <cstddef>
#include <functional>
#include <vector>

namespace dsgof::numerics {

// ln Gamma(x) for x > 0.
double log_gamma(double x);

// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b).
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b). Continued fraction (modified Lentz)
// on whichever tail converges faster; absolute error below 1e-13 in practice.
double reg_incomplete_beta(double x, double a, double b);

// Regularized lower incomplete gamma P(a, x). Series for x < a + 1,
// continued fraction otherwise.
double reg_incomplete_gamma(double a, double x);

double normal_cdf(double x, double mean = 0.0, double sd = 1.0);

// Quantiles. p = 0 and p = 1 return the support endpoints; for unbounded
// supports those are -inf / +inf.
double beta_quantile(double p, double a, double b);
double gamma_quantile(double p, double shape, double scale = 1.0);
double normal_quantile(double p, double mean = 0.0, double sd = 1.0);

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, inside (0, 1)
  std::vector<double> weights;  // positive, sum to 1
  std::vector<double> complements;  // 1 - nodes, without cancellation

  std::size_t size() const noexcept { return nodes.size(); }

  // Sum_i w_i f(x_i).
  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

inline constexpr int kDefaultQuadratureNodes = 64;
inline constexpr int kMaxQuadratureNodes = 512;

// n-point Gauss-Legendre rule on [0, 1]; exact for polynomials of degree
// 2n - 1. Rules are cached, so repeated calls are cheap.
const QuadratureRule& gauss_legendre(int n);

// n-point tanh-sinh rule on [0, 1] with weights normalized to sum to 1.
// Converges exponentially for integrands with algebraic or logarithmic
// endpoint singularities, e.g. anything composed with a quantile function.
const QuadratureRule& tanh_sinh(int n);

// Maximize a unimodal function on [lo, hi] by golden-section search.
// Returns the abscissa of the maximum.
double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double tol = 1e-10);

// Root of a continuous f on [lo, hi] with f(lo), f(hi) of opposite sign
// (bisection; robust and plenty fast for the sizes used here).
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol = 1e-12);

// Solves the dense n x n system A x = b (row-major A) by Gaussian elimination
// with partial pivoting. Throws a numerical error on a singular matrix.
std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b);

}  // namespace dsgof::numerics
