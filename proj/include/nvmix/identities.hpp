#pragma once

// Verifiable equalities built on the mixture closed forms.
//
//   Int1 (nu > 1/2, b != 0, alpha > 0):
//     int_0^inf x^(-2 nu) cos(b x) gamma(nu, alpha x^2) dx
//       = sqrt(pi) / 2^(2 nu) * |b|^(2 nu - 1) * Gamma(1/2 - nu, b^2 / (4 alpha))
//   Int2 (nu > 0, b != 0, alpha > 0):
//     int_0^inf x^(2 nu - 1) cos(b x) Gamma(1/2 - nu, alpha x^2) dx
//       = 2^(2 nu - 1) sqrt(pi) / |b|^(2 nu) * gamma(nu, b^2 / (4 alpha))
//   CosTransform{Pareto,Beta}: 2 int_0^inf cos(t x) f(x) dx = phi(t) for the mixture pdf f, cf phi
//   McCf{Pareto,Beta}: empirical mean of exp(i t X) against phi(t), k-sigma gate
//
// For the CF checks the (nu, b) slots of IdentityCase carry (lambda, t) and alpha is unused.
// Both integral identities scale exactly under (b, alpha) -> (c b, c^2 alpha):
//   Int1(c b, c^2 alpha) = c^(2 nu - 1) Int1(b, alpha),   Int2(c b, c^2 alpha) = c^(-2 nu) Int2(b, alpha).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "nvmix/errors.hpp"
#include "nvmix/format.hpp"
#include "nvmix/mixtures.hpp"
#include "nvmix/quadrature.hpp"
#include "nvmix/special_functions.hpp"

namespace nvmix {

enum class IdentityKind { Int1, Int2, CosTransformPareto, CosTransformBeta, McCfPareto, McCfBeta };

enum class MixtureFamily { Pareto, BetaPower };

inline std::string_view identity_name(IdentityKind id) {
  switch (id) {
    case IdentityKind::Int1: return "int1";
    case IdentityKind::Int2: return "int2";
    case IdentityKind::CosTransformPareto: return "cos-pareto";
    case IdentityKind::CosTransformBeta: return "cos-beta";
    case IdentityKind::McCfPareto: return "mc-pareto";
    case IdentityKind::McCfBeta: return "mc-beta";
  }
  return "unknown";
}

inline std::optional<IdentityKind> parse_identity(std::string_view name) {
  for (auto id : {IdentityKind::Int1, IdentityKind::Int2, IdentityKind::CosTransformPareto,
                  IdentityKind::CosTransformBeta, IdentityKind::McCfPareto, IdentityKind::McCfBeta}) {
    if (identity_name(id) == name) return id;
  }
  return std::nullopt;
}

inline bool is_monte_carlo(IdentityKind id) {
  return id == IdentityKind::McCfPareto || id == IdentityKind::McCfBeta;
}

struct IdentityCase {
  IdentityKind identity = IdentityKind::Int1;
  double nu = 1.0;
  double b = 1.0;
  double alpha = 1.0;

  /// Empty when the tuple satisfies the identity's preconditions, otherwise the reason.
  [[nodiscard]] std::string violation() const {
    if (!std::isfinite(nu) || !std::isfinite(b) || !std::isfinite(alpha)) return "parameters must be finite";
    if (!(alpha > 0.0)) return "alpha must be > 0";
    switch (identity) {
      case IdentityKind::Int1:
        if (!(nu > 0.5)) return "int1 requires nu > 1/2";
        if (b == 0.0) return "int1 requires b != 0";
        break;
      case IdentityKind::Int2:
        if (!(nu > 0.0)) return "int2 requires nu > 0";
        if (b == 0.0) return "int2 requires b != 0";
        break;
      case IdentityKind::CosTransformPareto:
      case IdentityKind::CosTransformBeta:
        if (!(nu > 0.0)) return "cosine-transform check requires lambda > 0";
        if (b == 0.0) return "cosine-transform check requires t != 0";
        break;
      case IdentityKind::McCfPareto:
      case IdentityKind::McCfBeta:
        if (!(nu > 0.0)) return "Monte Carlo check requires lambda > 0";
        break;
    }
    return {};
  }

  void validate() const {
    if (auto why = violation(); !why.empty()) {
      throw DomainError(std::string(identity_name(identity)) + " (nu=" + shortest_repr(nu) +
                        ", b=" + shortest_repr(b) + ", alpha=" + shortest_repr(alpha) + "): " + why);
    }
  }
};

struct VerifyOptions {
  double tolerance = 1e-6;
  QuadratureOptions quadrature;
  GammaAccuracy gamma;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 42;
  double k_sigma = 4.0;
};

struct VerificationReport {
  IdentityCase identity_case;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool pass = false;
  QuadratureResult lhs_diagnostics;
  double mc_std_error = 0.0;
  std::optional<std::uint64_t> seed;
  double tolerance = 0.0;
  std::string note;  // set when the left-hand side could not be computed
};

inline constexpr double relative_error_floor = 1e-300;

// ---------------------------------------------------------------------------------------------
// Int1

inline double int1_rhs(double nu, double b, double alpha, const GammaAccuracy& acc = {}) {
  IdentityCase{IdentityKind::Int1, nu, b, alpha}.validate();
  const double ab = std::abs(b);
  const double log_pref = 0.5 * std::log(std::numbers::pi) - 2.0 * nu * std::numbers::ln2 + (2.0 * nu - 1.0) * std::log(ab);
  return std::exp(log_pref) * upper_inc_gamma(0.5 - nu, ab * ab / (4.0 * alpha), acc);
}

/// x^(-2 nu) gamma(nu, alpha x^2), continuous at 0 with value alpha^nu / nu.
inline double int1_envelope(double nu, double alpha, double x, const GammaAccuracy& acc = {}) {
  return std::pow(alpha, nu) * lower_inc_gamma_ratio(nu, alpha * x * x, acc);
}

inline QuadratureResult int1_lhs(double nu, double b, double alpha, const QuadratureOptions& opts = {},
                                 const GammaAccuracy& acc = {}) {
  IdentityCase{IdentityKind::Int1, nu, b, alpha}.validate();
  return integrate_oscillatory_cos([&](double x) { return int1_envelope(nu, alpha, x, acc); }, std::abs(b), 0.0,
                                   opts);
}

// ---------------------------------------------------------------------------------------------
// Int2

inline double int2_rhs(double nu, double b, double alpha, const GammaAccuracy& acc = {}) {
  IdentityCase{IdentityKind::Int2, nu, b, alpha}.validate();
  const double ab = std::abs(b);
  const double log_pref =
      (2.0 * nu - 1.0) * std::numbers::ln2 + 0.5 * std::log(std::numbers::pi) - 2.0 * nu * std::log(ab);
  return std::exp(log_pref) * lower_inc_gamma(nu, ab * ab / (4.0 * alpha), acc);
}

/// x^(2 nu - 1) Gamma(1/2 - nu, alpha x^2), x > 0. Integrable at 0 for every nu > 0.
inline double int2_envelope(double nu, double alpha, double x, const GammaAccuracy& acc = {}) {
  return std::pow(x, 2.0 * nu - 1.0) * upper_inc_gamma(0.5 - nu, alpha * x * x, acc);
}

inline QuadratureResult int2_lhs(double nu, double b, double alpha, const QuadratureOptions& opts = {},
                                 const GammaAccuracy& acc = {}) {
  IdentityCase{IdentityKind::Int2, nu, b, alpha}.validate();
  return integrate_oscillatory_cos([&](double x) { return int2_envelope(nu, alpha, x, acc); }, std::abs(b), 0.0,
                                   opts);
}

// ---------------------------------------------------------------------------------------------
// Reports

namespace detail {

inline void fill_errors(VerificationReport& r) {
  r.abs_err = std::abs(r.lhs - r.rhs);
  r.rel_err = r.abs_err / std::max(std::abs(r.rhs), relative_error_floor);
}

template <class Lhs, class Rhs>
VerificationReport quadrature_report(const IdentityCase& c, double tolerance, Lhs&& lhs, Rhs&& rhs) {
  VerificationReport r;
  r.identity_case = c;
  r.tolerance = tolerance;
  r.rhs = rhs();
  try {
    r.lhs_diagnostics = lhs();
    r.lhs = r.lhs_diagnostics.value;
    fill_errors(r);
    r.pass = r.rel_err <= tolerance;
  } catch (const ConvergenceError& e) {
    r.lhs = std::numeric_limits<double>::quiet_NaN();
    r.abs_err = r.rel_err = std::numeric_limits<double>::quiet_NaN();
    r.lhs_diagnostics.converged = false;
    r.pass = false;
    r.note = e.what();
  }
  return r;
}

inline double closed_form_cf(MixtureFamily family, double lambda, double t, const GammaAccuracy& acc) {
  return family == MixtureFamily::Pareto ? pareto_mixture_cf(lambda, t, acc) : beta_mixture_cf(lambda, t, acc);
}

inline double closed_form_pdf(MixtureFamily family, double lambda, double x, const GammaAccuracy& acc) {
  return family == MixtureFamily::Pareto ? pareto_mixture_pdf(lambda, x, acc) : beta_mixture_pdf(lambda, x, acc);
}

inline MixingLaw family_law(MixtureFamily family, double lambda) {
  if (family == MixtureFamily::Pareto) return ParetoLaw(lambda);
  return BetaPowerLaw(lambda);
}

}  // namespace detail

/// 2 int_0^inf cos(t x) f(x) dx against the closed-form characteristic function.
inline VerificationReport cos_transform_check(MixtureFamily family, double lambda, double t,
                                              const VerifyOptions& opts = {}) {
  const IdentityCase c{family == MixtureFamily::Pareto ? IdentityKind::CosTransformPareto
                                                       : IdentityKind::CosTransformBeta,
                       lambda, t, 1.0};
  c.validate();
  const auto acc = opts.gamma;
  return detail::quadrature_report(
      c, opts.tolerance,
      [&] {
        auto r = integrate_oscillatory_cos([&](double x) { return detail::closed_form_pdf(family, lambda, x, acc); },
                                           std::abs(t), 0.0, opts.quadrature);
        r.value *= 2.0;
        r.error_estimate *= 2.0;
        return r;
      },
      [&] { return detail::closed_form_cf(family, lambda, t, acc); });
}

/// Monte Carlo check of the closed-form CF: pass iff |empirical - phi(t)| <= k_sigma * std_error.
inline VerificationReport mc_cf_check(MixtureFamily family, double lambda, double t, std::size_t n,
                                      std::uint64_t seed, double k_sigma = 4.0, const GammaAccuracy& acc = {}) {
  const IdentityCase c{family == MixtureFamily::Pareto ? IdentityKind::McCfPareto : IdentityKind::McCfBeta, lambda,
                       t, 1.0};
  c.validate();
  if (n < 10'000) throw InputError("Monte Carlo CF check requires n >= 10000");
  if (!(k_sigma > 0.0)) throw InputError("k_sigma must be > 0");

  const auto batch = sample(MixtureSpec(detail::family_law(family, lambda)), n, seed);
  const auto emp = empirical_cf(batch, t);
  VerificationReport r;
  r.identity_case = c;
  r.seed = seed;
  r.tolerance = k_sigma;
  r.lhs = emp.estimate.real();
  r.rhs = detail::closed_form_cf(family, lambda, t, acc);
  r.abs_err = std::abs(emp.estimate - std::complex<double>(r.rhs, 0.0));
  r.rel_err = r.abs_err / std::max(std::abs(r.rhs), relative_error_floor);
  r.mc_std_error = emp.std_error();
  r.pass = r.abs_err <= k_sigma * r.mc_std_error;
  r.lhs_diagnostics.converged = true;
  return r;
}

/// Runs one case. Invalid parameters throw; numerical failures are recorded in the report.
inline VerificationReport verify(const IdentityCase& c, const VerifyOptions& opts = {}) {
  c.validate();
  switch (c.identity) {
    case IdentityKind::Int1:
      return detail::quadrature_report(
          c, opts.tolerance, [&] { return int1_lhs(c.nu, c.b, c.alpha, opts.quadrature, opts.gamma); },
          [&] { return int1_rhs(c.nu, c.b, c.alpha, opts.gamma); });
    case IdentityKind::Int2:
      return detail::quadrature_report(
          c, opts.tolerance, [&] { return int2_lhs(c.nu, c.b, c.alpha, opts.quadrature, opts.gamma); },
          [&] { return int2_rhs(c.nu, c.b, c.alpha, opts.gamma); });
    case IdentityKind::CosTransformPareto:
      return cos_transform_check(MixtureFamily::Pareto, c.nu, c.b, opts);
    case IdentityKind::CosTransformBeta:
      return cos_transform_check(MixtureFamily::BetaPower, c.nu, c.b, opts);
    case IdentityKind::McCfPareto:
      return mc_cf_check(MixtureFamily::Pareto, c.nu, c.b, opts.mc_samples, opts.seed, opts.k_sigma, opts.gamma);
    case IdentityKind::McCfBeta:
      return mc_cf_check(MixtureFamily::BetaPower, c.nu, c.b, opts.mc_samples, opts.seed, opts.k_sigma, opts.gamma);
  }
  throw InputError("verify: unknown identity");
}

// ---------------------------------------------------------------------------------------------
// Grids

struct GridSpec {
  IdentityKind identity = IdentityKind::Int1;
  std::vector<double> nu_values;
  std::vector<double> b_values;
  std::vector<double> alpha_values;
  double tolerance = 1e-6;
};

struct GridResult {
  std::vector<VerificationReport> reports;
  std::size_t passed = 0;
  std::size_t failed = 0;
};

/// Cases in lexicographic (nu, b, alpha) order. Any invalid tuple rejects the whole grid.
inline std::vector<IdentityCase> expand_grid(const GridSpec& grid) {
  if (grid.nu_values.empty() || grid.b_values.empty() || grid.alpha_values.empty()) {
    throw InputError("grid: nu, b and alpha lists must be non-empty");
  }
  if (!(grid.tolerance > 0.0)) throw InputError("grid: tolerance must be > 0");
  std::vector<IdentityCase> cases;
  std::string problems;
  for (double nu : grid.nu_values) {
    for (double b : grid.b_values) {
      for (double alpha : grid.alpha_values) {
        IdentityCase c{grid.identity, nu, b, alpha};
        if (auto why = c.violation(); !why.empty()) {
          problems += "\n  (nu=" + shortest_repr(nu) + ", b=" + shortest_repr(b) + ", alpha=" + shortest_repr(alpha) +
                      "): " + why;
        }
        cases.push_back(c);
      }
    }
  }
  if (!problems.empty()) throw InputError("grid contains invalid tuples:" + problems);
  return cases;
}

/// Verifies every grid point. Cases may run on `threads` workers; reports keep grid order.
inline GridResult verify_grid(const GridSpec& grid, VerifyOptions opts = {}, unsigned threads = 1) {
  const auto cases = expand_grid(grid);
  opts.tolerance = grid.tolerance;
  GridResult out;
  out.reports.resize(cases.size());

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cases.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < cases.size(); ++i) out.reports[i] = verify(cases[i], opts);
  } else {
    std::vector<std::future<void>> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < cases.size(); i += threads) out.reports[i] = verify(cases[i], opts);
      }));
    }
    for (auto& f : workers) f.get();
  }
  for (const auto& r : out.reports) (r.pass ? out.passed : out.failed) += 1;
  return out;
}

}  // namespace nvmix
