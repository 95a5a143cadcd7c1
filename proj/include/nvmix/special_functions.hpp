#pragma once

// Real-parameter gamma and incomplete gamma kernels.
//
//   lower_inc_gamma(a, x) = int_0^x t^(a-1) e^(-t) dt,      a > 0
//   upper_inc_gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt,    any real a
//
// Algorithm map for upper_inc_gamma:
//   x >= a + 1 (a > 0), or x >= 1 (a <= 0)  : Legendre continued fraction, modified Lentz
//   0 < a <= 1/2, x < a + 1                 : small-x expansion around Gamma(a) - 1/a
//   a > 1/2, x < a + 1                      : Gamma(a) - lower power series
//   a == 0                                  : E1 (series below 1, continued fraction above)
//   a < 0, x < 1                            : start at a + m in (-1/2, 1/2], recur down m times
//
// Everything is double precision; accuracy is governed by GammaAccuracy.

#include <cmath>
#include <limits>
#include <iterator>
#include <numbers>
#include <string>

#include "nvmix/errors.hpp"

namespace nvmix {

struct GammaAccuracy {
  double rel_tol = 1e-12;
  int max_iterations = 500;
};

namespace detail {

inline void check_accuracy(const GammaAccuracy& acc) {
  if (!(acc.rel_tol > 0.0) || acc.max_iterations < 1) {
    throw InputError("GammaAccuracy requires rel_tol > 0 and max_iterations >= 1");
  }
}

inline bool is_nonpositive_integer(double a) { return a <= 0.0 && a == std::floor(a); }

inline double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw ConvergenceError(std::string(what) + ": result is not representable in double precision");
  }
  return v;
}

// Sum_{n>=0} x^n / (a (a+1) ... (a+n)), so that gamma(a, x) = x^a e^-x * sum.
inline double lower_series(double a, double x, const GammaAccuracy& acc) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 1; n <= acc.max_iterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * acc.rel_tol * 1e-3) return sum;
  }
  throw ConvergenceError("lower incomplete gamma series did not converge (a=" + std::to_string(a) +
                         ", x=" + std::to_string(x) + ")");
}

// Natural log of the Legendre continued fraction part, Gamma(a, x) = exp(a ln x - x) * cf.
// Valid for x > 0 and any real a; converges quickly when x >= a + 1.
inline double log_upper_cf(double a, double x, const GammaAccuracy& acc) {
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  const double eps = acc.rel_tol * 1e-3;
  for (int i = 1; i <= acc.max_iterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= eps) return std::log(h) + a * std::log(x) - x;
  }
  throw ConvergenceError("upper incomplete gamma continued fraction did not converge (a=" +
                         std::to_string(a) + ", x=" + std::to_string(x) + ")");
}

// (Gamma(1 + a) - 1) / a for |a| <= 1/2, with its a -> 0 limit -EulerGamma.
// Uses the Maclaurin series of 1/Gamma(z); lgamma-based forms lose digits as a -> 0.
inline double gamma1p_minus_one_over(double a) {
  static constexpr double rgamma_coeffs[] = {
      0.5772156649015328606065,   -0.655878071520253881077,   -0.042002635034095235529,
      0.1665386113822914895017,   -0.04219773455554433674821, -0.009621971527876973562115,
      0.007218943246663099542395, -0.001165167591859065112114, -0.0002152416741149509728157,
      0.0001280502823881161861532, -2.013485478078823865569e-5, -1.250493482142670657345e-6,
      1.133027231981695882374e-6, -2.05633841697760710345e-7,  6.116095104481415817862e-9,
      5.002007644469222930056e-9, -1.181274570487020144588e-9, 1.043426711691100510492e-10,
      7.78226343990507125405e-12, -3.696805618642205708188e-12, 5.100370287454475979015e-13,
      -2.058326053566506783222e-14, -5.34812253942301798237e-15, 1.226778628238260790159e-15,
      -1.181259301697458769514e-16, 1.18669225475160033258e-18, 1.412380655318031781556e-18,
      -2.298745684435370206592e-19};
  // (1/Gamma(1+a) - 1) / a, Horner from the highest coefficient.
  double s = 0.0;
  for (auto it = std::rbegin(rgamma_coeffs); it != std::rend(rgamma_coeffs); ++it) s = s * a + *it;
  if (a == 0.0) return -s;
  return -std::tgamma(1.0 + a) * s;
}

// Gamma(a, x) for 0 < |a| <= 1/2 and small x, from
//   Gamma(a, x) = (Gamma(1+a) - 1)/a - (x^a - 1)/a - x^a sum_{n>=1} (-x)^n / (n! (a+n)).
inline double upper_small_x(double a, double x, const GammaAccuracy& acc) {
  const double lx = std::log(x);
  const double xa_m1 = (a == 0.0) ? lx : std::expm1(a * lx) / a;
  double term = 1.0;
  double sum = 0.0;
  int n = 1;
  for (; n <= acc.max_iterations; ++n) {
    term *= -x / n;
    const double contrib = term / (a + n);
    sum += contrib;
    if (std::abs(contrib) <= std::abs(sum) * acc.rel_tol * 1e-3) break;
  }
  if (n > acc.max_iterations) {
    throw ConvergenceError("small-x incomplete gamma expansion did not converge");
  }
  return gamma1p_minus_one_over(a) - xa_m1 - std::exp(a * lx) * sum;
}

}  // namespace detail

/// Complete gamma function. Poles at 0, -1, -2, ... raise DomainError.
inline double gamma(double a) {
  if (std::isnan(a) || detail::is_nonpositive_integer(a)) {
    throw DomainError("gamma: pole or invalid argument a=" + std::to_string(a));
  }
  return detail::finite_or_throw(std::tgamma(a), "gamma");
}

/// Exponential integral E1(x) = Gamma(0, x), x > 0.
inline double exp_int_e1(double x, const GammaAccuracy& acc = {}) {
  detail::check_accuracy(acc);
  if (!(x > 0.0)) throw DomainError("exp_int_e1: requires x > 0");
  if (std::isinf(x)) return 0.0;
  if (x <= 1.0) {
    // -EulerGamma - ln x - sum_{n>=1} (-x)^n / (n n!)
    double term = 1.0;
    double sum = 0.0;
    for (int n = 1; n <= acc.max_iterations; ++n) {
      term *= -x / n;
      const double contrib = term / n;
      sum += contrib;
      if (std::abs(contrib) <= std::abs(sum) * acc.rel_tol * 1e-3) {
        return -std::numbers::egamma - std::log(x) - sum;
      }
    }
    throw ConvergenceError("exp_int_e1 series did not converge");
  }
  return std::exp(detail::log_upper_cf(0.0, x, acc));
}

/// Lower incomplete gamma, a > 0 and x >= 0.
inline double lower_inc_gamma(double a, double x, const GammaAccuracy& acc = {}) {
  detail::check_accuracy(acc);
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw DomainError("lower_inc_gamma: requires a > 0 and x >= 0 (a=" + std::to_string(a) +
                      ", x=" + std::to_string(x) + ")");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return gamma(a);
  if (x < a + 1.0) {
    return std::exp(a * std::log(x) - x) * detail::lower_series(a, x, acc);
  }
  return detail::finite_or_throw(gamma(a) - std::exp(detail::log_upper_cf(a, x, acc)),
                                 "lower_inc_gamma");
}

/// x^(-a) * lower_inc_gamma(a, x); finite at x = 0 where it equals 1/a.
///
/// Used wherever gamma(a, x) is paired with a compensating power of x (mixture densities,
/// characteristic functions, identity envelopes) so that neither factor under- or overflows.
inline double lower_inc_gamma_ratio(double a, double x, const GammaAccuracy& acc = {}) {
  detail::check_accuracy(acc);
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw DomainError("lower_inc_gamma_ratio: requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0 / a;
  if (x < a + 1.0) return std::exp(-x) * detail::lower_series(a, x, acc);
  return std::exp(-a * std::log(x)) * lower_inc_gamma(a, x, acc);
}

/// Upper incomplete gamma for any real a. x >= 0 when a > 0, x > 0 otherwise.
///
/// For a < 0 the value grows like -x^a / a as x -> 0; once that leaves the double range a
/// ConvergenceError is raised instead of returning inf or NaN.
inline double upper_inc_gamma(double a, double x, const GammaAccuracy& acc = {}) {
  detail::check_accuracy(acc);
  if (std::isnan(a) || std::isnan(x)) throw DomainError("upper_inc_gamma: NaN argument");
  if (std::isinf(x) && x > 0.0) return 0.0;

  if (a > 0.0) {
    if (x < 0.0) throw DomainError("upper_inc_gamma: requires x >= 0 for a > 0");
    if (x == 0.0) return gamma(a);
    if (x >= a + 1.0) return std::exp(detail::log_upper_cf(a, x, acc));
    if (a <= 0.5) return detail::upper_small_x(a, x, acc);
    return gamma(a) - std::exp(a * std::log(x) - x) * detail::lower_series(a, x, acc);
  }

  if (!(x > 0.0)) {
    throw DomainError("upper_inc_gamma: requires x > 0 for a <= 0 (a=" + std::to_string(a) + ")");
  }
  if (a == 0.0) return exp_int_e1(x, acc);
  if (x >= 1.0) {
    return detail::finite_or_throw(std::exp(detail::log_upper_cf(a, x, acc)), "upper_inc_gamma");
  }

  // Downward recurrence Gamma(s-1, x) = (x^(s-1) e^-x - Gamma(s, x)) / (1 - s), stable for x < 1.
  const double steps = std::floor(0.5 - a);
  double s = a + steps;
  if (detail::is_nonpositive_integer(a)) s = 0.0;
  double value = (s == 0.0) ? exp_int_e1(x, acc) : detail::upper_small_x(s, x, acc);
  const double lx = std::log(x);
  for (int k = 0; k < static_cast<int>(steps); ++k) {
    const double next = s - 1.0;
    value = (std::exp(next * lx - x) - value) / (-next);
    if (!std::isfinite(value)) break;
    s = next;
  }
  return detail::finite_or_throw(value, "upper_inc_gamma");
}

}  // namespace nvmix
