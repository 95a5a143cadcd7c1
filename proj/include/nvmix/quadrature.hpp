#pragma once

// Error-controlled one-dimensional quadrature.
//
// integrate_finite          : globally adaptive 7/15-point Gauss-Kronrod with bisection
// integrate_semi_infinite   : x = a + u / (1 - u) onto (0, 1), then integrate_finite
// integrate_oscillatory_cos : int_{x0}^inf cos(b x) envelope(x) dx by half-period
//                             partition plus iterated Euler averaging of the partial sums
//
// Nodes are strictly interior, so integrable endpoint singularities are never evaluated.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "nvmix/errors.hpp"

namespace nvmix {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 200;
  int oscillatory_max_half_periods = 400;
  int acceleration_terms = 12;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InputError("quadrature tolerances must be > 0");
    if (max_subdivisions < 1) throw InputError("max_subdivisions must be >= 1");
    if (oscillatory_max_half_periods < 1) throw InputError("oscillatory_max_half_periods must be >= 1");
    if (acceleration_terms < 2) throw InputError("acceleration_terms must be >= 2");
  }

  [[nodiscard]] double tolerance_for(double value) const {
    return std::max(abs_tol, rel_tol * std::abs(value));
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

struct GkSegment {
  double a;
  double b;
  double value;
  double error;
};

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for kronrod_nodes[1], [3], [5] and the centre.
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
double checked_eval(const F& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    throw ConvergenceError("integrand is not finite at x=" + std::to_string(x));
  }
  return y;
}

// One 15-point Kronrod panel; the error estimate follows the QUADPACK qk15 heuristic.
template <class F>
GkSegment gk15(const F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked_eval(f, centre);

  double res_k = fc * kronrod_weights[7];
  double res_g = fc * gauss_weights[3];
  double res_abs = std::abs(res_k);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    f1[j] = checked_eval(f, centre - dx);
    f2[j] = checked_eval(f, centre + dx);
    const double sum = f1[j] + f2[j];
    res_k += kronrod_weights[j] * sum;
    res_abs += kronrod_weights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) res_g += gauss_weights[j / 2] * sum;
  }
  const double mean = 0.5 * res_k;
  double res_asc = kronrod_weights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    res_asc += kronrod_weights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }

  res_k *= half;
  res_abs *= std::abs(half);
  res_asc *= std::abs(half);
  double err = std::abs((res_k - res_g * half));
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * res_abs, err);
  }
  return {a, b, res_k, err};
}

}  // namespace detail

/// Adaptive integral of f over [a, b]. On budget exhaustion the best value is returned with
/// converged = false.
template <class F>
QuadratureResult integrate_finite(const F& f, double a, double b, const QuadratureOptions& opts = {}) {
  opts.validate();
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate_finite: requires finite a < b");
  }

  auto by_error = [](const detail::GkSegment& l, const detail::GkSegment& r) { return l.error < r.error; };
  std::priority_queue<detail::GkSegment, std::vector<detail::GkSegment>, decltype(by_error)> heap(by_error);

  QuadratureResult out;
  const auto first = detail::gk15(f, a, b);
  out.evaluations = 15;
  heap.push(first);
  double total = first.value;
  double total_err = first.error;

  bool exhausted = false;
  while (total_err > opts.tolerance_for(total)) {
    if (static_cast<int>(heap.size()) >= opts.max_subdivisions) {
      exhausted = true;
      break;
    }
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      exhausted = true;  // cannot bisect further in double precision
      break;
    }
    heap.pop();
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    out.evaluations += 30;
    heap.push(left);
    heap.push(right);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
  }

  // Re-sum in left-to-right order so the result does not depend on heap history.
  std::vector<detail::GkSegment> segments;
  segments.reserve(heap.size());
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const detail::GkSegment& l, const detail::GkSegment& r) { return l.a < r.a; });
  out.value = 0.0;
  out.error_estimate = 0.0;
  for (const auto& s : segments) {
    out.value += s.value;
    out.error_estimate += s.error;
  }
  out.subdivisions = static_cast<int>(segments.size());
  out.converged = !exhausted && out.error_estimate <= opts.tolerance_for(out.value);
  return out;
}

/// Integral of f over [a, inf) through the map x = a + u / (1 - u).
template <class F>
QuadratureResult integrate_semi_infinite(const F& f, double a, const QuadratureOptions& opts = {}) {
  if (!std::isfinite(a)) throw DomainError("integrate_semi_infinite: lower limit must be finite");
  auto mapped = [&f, a](double u) {
    const double one_minus = 1.0 - u;
    const double fx = f(a + u / one_minus);
    if (fx == 0.0) return 0.0;
    return fx / (one_minus * one_minus);
  };
  return integrate_finite(mapped, 0.0, 1.0, opts);
}

/// Repeated pairwise averaging of partial sums (Euler transformation of the alternating tail).
inline double euler_average(std::vector<double> sums) {
  for (std::size_t len = sums.size(); len > 1; --len) {
    for (std::size_t i = 0; i + 1 < len; ++i) sums[i] = 0.5 * (sums[i] + sums[i + 1]);
  }
  return sums.empty() ? 0.0 : sums.front();
}

/// int_{x0}^inf cos(b x) envelope(x) dx for an envelope that is eventually monotone and decaying.
///
/// The range is cut at the zeros (pi/2 + k pi)/b of the cosine, each piece is integrated with
/// integrate_finite, and the last acceleration_terms partial sums are Euler-averaged. The
/// estimate is accepted once two successive accelerated values agree to tolerance.
template <class F>
QuadratureResult integrate_oscillatory_cos(const F& envelope, double b, double x0,
                                           const QuadratureOptions& opts = {}) {
  opts.validate();
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("integrate_oscillatory_cos: requires b > 0");
  if (!(x0 >= 0.0) || !std::isfinite(x0)) {
    throw DomainError("integrate_oscillatory_cos: requires finite x0 >= 0");
  }

  auto integrand = [&envelope, b](double x) {
    const double e = envelope(x);
    return e == 0.0 ? 0.0 : e * std::cos(b * x);
  };
  auto zero = [b](long k) { return (0.5 * std::numbers::pi + static_cast<double>(k) * std::numbers::pi) / b; };

  long k = static_cast<long>(std::ceil((b * x0 - 0.5 * std::numbers::pi) / std::numbers::pi));
  if (k < 0) k = 0;
  while (zero(k) <= x0) ++k;

  // Piece errors accumulate over many half-periods, so each piece is held to a tighter target.
  QuadratureOptions piece_opts = opts;
  piece_opts.abs_tol = opts.abs_tol * 0.01;
  piece_opts.rel_tol = std::max(opts.rel_tol * 0.01, 1e-14);

  const auto terms = static_cast<std::size_t>(opts.acceleration_terms);
  QuadratureResult out;
  std::vector<double> partial;
  double running = 0.0;
  double segment_err = 0.0;
  bool segments_ok = true;
  double accel = 0.0;
  double prev_accel = 0.0;
  double last_change = std::numeric_limits<double>::infinity();
  int stable = 0;

  double left = x0;
  for (int n = 0; n < opts.oscillatory_max_half_periods; ++n, ++k) {
    const double right = zero(k);
    const auto piece = integrate_finite(integrand, left, right, piece_opts);
    left = right;
    out.evaluations += piece.evaluations;
    out.subdivisions += piece.subdivisions;
    segment_err += piece.error_estimate;
    segments_ok = segments_ok && piece.converged;
    running += piece.value;
    partial.push_back(running);

    if (partial.size() < terms) continue;
    prev_accel = accel;
    accel = euler_average(std::vector<double>(partial.end() - static_cast<long>(terms), partial.end()));
    if (partial.size() == terms) continue;
    last_change = std::abs(accel - prev_accel);
    stable = (last_change <= opts.tolerance_for(accel)) ? stable + 1 : 0;
    if (stable >= 2) break;
  }

  out.value = partial.size() >= terms ? accel : running;
  out.error_estimate = (std::isfinite(last_change) ? last_change : std::abs(out.value)) + segment_err;
  out.converged = stable >= 2 && segments_ok && out.error_estimate <= opts.tolerance_for(out.value);
  return out;
}

}  // namespace nvmix
