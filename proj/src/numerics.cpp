#include "dsgof/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "dsgof/error.hpp"

namespace dsgof::numerics {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* op, const std::string& msg) {
  if (!ok) fail_validation("numerics", op, msg);
}

// Continued fraction for I_x(a, b), NR "betacf" with modified Lentz.
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 20000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  fail_numerical("numerics", "reg_incomplete_beta",
                 "continued fraction did not converge (a=" + std::to_string(a) +
                     ", b=" + std::to_string(b) + ")");
}

double gamma_series(double a, double x) {
  double sum = 1.0 / a;
  double del = sum;
  double ap = a;
  for (int n = 0; n < 100000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
  }
  fail_numerical("numerics", "reg_incomplete_gamma", "series did not converge");
}

// Upper tail Q(a, x) by continued fraction.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) {
      return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
    }
  }
  fail_numerical("numerics", "reg_incomplete_gamma",
                 "continued fraction did not converge");
}

QuadratureRule build_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z_prev = z;
      z = z_prev - p1 / dp;
      if (std::fabs(z - z_prev) <= 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // z is descending in i; map [-1,1] -> [0,1] with increasing order.
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  rule.complements.assign(rule.nodes.rbegin(), rule.nodes.rend());
  return rule;
}

// Nodes at t_i = -t_max + i h; v(t) = 1 / (1 + exp(-pi sinh t)). The
// complement 1 - v(t) = v(-t) is stored separately so that quantiles near
// v = 1 keep full relative precision.
QuadratureRule build_tanh_sinh(int n) {
  constexpr double kTMax = 3.1;  // v(-t_max) ~ 7e-16
  const double h = n == 1 ? 0.0 : 2.0 * kTMax / (n - 1);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.complements.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : -kTMax + i * h;
    const double s = std::numbers::pi * std::sinh(t);
    const double lo = 1.0 / (1.0 + std::exp(-s));
    const double hi = 1.0 / (1.0 + std::exp(s));
    rule.nodes[i] = lo;
    rule.complements[i] = hi;
    rule.weights[i] = std::numbers::pi * std::cosh(t) * lo * hi;
    total += rule.weights[i];
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

}  // namespace

double log_gamma(double x) {
  require(x > 0.0 && std::isfinite(x), "log_gamma",
          "argument must be positive and finite");
  return std::lgamma(x);
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double reg_incomplete_beta(double x, double a, double b) {
  require(a > 0.0 && b > 0.0, "reg_incomplete_beta", "shape parameters must be > 0");
  require(x >= 0.0 && x <= 1.0, "reg_incomplete_beta", "x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(log_front);
  double value;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    value = front * beta_continued_fraction(x, a, b) / a;
  } else {
    value = 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
  }
  return std::clamp(value, 0.0, 1.0);
}

double reg_incomplete_gamma(double a, double x) {
  require(a > 0.0, "reg_incomplete_gamma", "shape must be > 0");
  require(x >= 0.0, "reg_incomplete_gamma", "x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::clamp(gamma_series(a, x), 0.0, 1.0);
  return std::clamp(1.0 - gamma_continued_fraction(a, x), 0.0, 1.0);
}

double normal_cdf(double x, double mean, double sd) {
  require(sd > 0.0, "normal_cdf", "sd must be > 0");
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

double normal_quantile(double p, double mean, double sd) {
  require(sd > 0.0, "normal_quantile", "sd must be > 0");
  require(p >= 0.0 && p <= 1.0, "normal_quantile", "p must lie in [0, 1]");
  if (p == 0.0) return -kInf;
  if (p == 1.0) return kInf;
  // Acklam's rational approximation followed by one Halley step.
  static constexpr std::array<double, 6> a = {
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double z;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int it = 0; it < 2; ++it) {
    const double e = 0.5 * std::erfc(-z / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
    z = z - u / (1.0 + 0.5 * z * u);
  }
  return mean + sd * z;
}

double beta_quantile(double p, double a, double b) {
  require(a > 0.0 && b > 0.0, "beta_quantile", "shape parameters must be > 0");
  require(p >= 0.0 && p <= 1.0, "beta_quantile", "p must lie in [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double a1 = a - 1.0;
  const double b1 = b - 1.0;
  double x;
  if (a >= 1.0 && b >= 1.0) {
    const double pp = (p < 0.5) ? p : 1.0 - p;
    const double t = std::sqrt(-2.0 * std::log(pp));
    x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (p < 0.5) x = -x;
    const double al = (x * x - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = (x * std::sqrt(al + h) / h) -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) *
                         (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = a / (a + b * std::exp(2.0 * w));
  } else {
    const double lna = std::log(a / (a + b));
    const double lnb = std::log(b / (a + b));
    const double t = std::exp(a * lna) / a;
    const double u = std::exp(b * lnb) / b;
    const double w = t + u;
    if (p < t / w) {
      x = std::pow(a * w * p, 1.0 / a);
    } else {
      x = 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
    }
  }
  const double afac = -log_beta(a, b);
  // Halley iterations with a bracket kept for a bisection fallback.
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    if (!(x > 0.0 && x < 1.0)) x = 0.5 * (lo + hi);
    const double err = reg_incomplete_beta(x, a, b) - p;
    if (err < 0.0) lo = x; else hi = x;
    if (err == 0.0) return x;
    const double dens = std::exp(a1 * std::log(x) + b1 * std::log1p(-x) + afac);
    double step;
    if (dens > 0.0 && std::isfinite(dens)) {
      const double u = err / dens;
      step = u / (1.0 - 0.5 * std::min(1.0, u * (a1 / x - b1 / (1.0 - x))));
    } else {
      step = x - 0.5 * (lo + hi);
    }
    double next = x - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-15 * std::max(x, 1e-300) || hi - lo <= 4 * kEps * hi) {
      return next;
    }
    x = next;
  }
  return x;
}

double gamma_quantile(double p, double shape, double scale) {
  require(shape > 0.0 && scale > 0.0, "gamma_quantile",
          "shape and scale must be > 0");
  require(p >= 0.0 && p <= 1.0, "gamma_quantile", "p must lie in [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return kInf;
  const double a = shape;
  const double a1 = a - 1.0;
  const double gln = log_gamma(a);
  double x;
  if (a > 1.0) {
    const double pp = (p < 0.5) ? p : 1.0 - p;
    const double t = std::sqrt(-2.0 * std::log(pp));
    x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (p < 0.5) x = -x;
    x = std::max(1e-3, a * std::pow(1.0 - 1.0 / (9.0 * a) - x / (3.0 * std::sqrt(a)), 3));
  } else {
    const double t = 1.0 - a * (0.253 + a * 0.12);
    if (p < t) {
      x = std::pow(p / t, 1.0 / a);
    } else {
      x = 1.0 - std::log1p(-(p - t) / (1.0 - t));
    }
  }
  double lo = 0.0;
  double hi = kInf;
  for (int it = 0; it < 200; ++it) {
    if (!(x > lo && x < hi)) x = std::isinf(hi) ? 2.0 * std::max(lo, 1.0) : 0.5 * (lo + hi);
    const double err = reg_incomplete_gamma(a, x) - p;
    if (err < 0.0) lo = x; else hi = x;
    if (err == 0.0) break;
    const double dens = std::exp(-x + a1 * std::log(x) - gln);
    double next;
    if (dens > 0.0 && std::isfinite(dens)) {
      const double u = err / dens;
      next = x - u / (1.0 - 0.5 * std::min(1.0, u * (a1 / x - 1.0)));
    } else {
      next = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi);
    }
    if (!(next > lo && next < hi)) {
      next = std::isinf(hi) ? 2.0 * std::max(x, 1e-300) : 0.5 * (lo + hi);
    }
    if (std::fabs(next - x) <= 1e-15 * x) {
      x = next;
      break;
    }
    x = next;
  }
  return x * scale;
}

const QuadratureRule& gauss_legendre(int n) {
  require(n >= 1 && n <= kMaxQuadratureNodes, "gauss_legendre",
          "node count must lie in [1, 512], got " + std::to_string(n));
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

const QuadratureRule& tanh_sinh(int n) {
  require(n >= 1 && n <= kMaxQuadratureNodes, "tanh_sinh",
          "node count must lie in [1, 512], got " + std::to_string(n));
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_tanh_sinh(n)).first;
  return it->second;
}

double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::fabs(b - a) > tol * (1.0 + std::fabs(a) + std::fabs(b))) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    fail_numerical("numerics", "bisect_root", "root is not bracketed");
  }
  for (int it = 0; it < 400 && hi - lo > tol * (1.0 + std::fabs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  require(a.size() == n * n, "solve_linear", "matrix and vector sizes disagree");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
    }
    if (std::fabs(a[piv * n + col]) < 1e-300) {
      fail_numerical("numerics", "solve_linear", "matrix is singular");
    }
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * x[c];
    x[i] = s / a[i * n + i];
  }
  return x;
}

}  // namespace dsgof::numerics
