#pragma once

// Normal variance(-mean) mixtures X = mu + theta W + sigma sqrt(W) Z.
//
// Mixing laws:
//   Pareto(lambda)    density lambda w^(-lambda-1) on [1, inf)
//   BetaPower(lambda) density lambda w^(lambda-1)  on (0, 1)
//   Custom            user density on an interval of [0, inf), numeric treatment only
//
// Pure variance mixtures (mu = theta = 0, sigma = 1) of the two parametric laws have closed-form
// densities and characteristic functions in terms of incomplete gamma functions; every law and
// every (mu, theta, sigma) is also available through quadrature over the mixing expectation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "nvmix/errors.hpp"
#include "nvmix/format.hpp"
#include "nvmix/quadrature.hpp"
#include "nvmix/random.hpp"
#include "nvmix/special_functions.hpp"

namespace nvmix {

namespace detail {
inline double checked_shape(double lambda, const char* law) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError(std::string(law) + ": shape lambda must be a finite positive number");
  }
  return lambda;
}
}  // namespace detail

struct ParetoLaw {
  explicit ParetoLaw(double shape) : lambda(detail::checked_shape(shape, "ParetoLaw")) {}
  double lambda;
};

struct BetaPowerLaw {
  explicit BetaPowerLaw(double shape) : lambda(detail::checked_shape(shape, "BetaPowerLaw")) {}
  double lambda;
};

/// Mixing law given by a density on [lower, upper] (upper may be +inf), lower >= 0.
///
/// Construction integrates the density to check normalization (within 1e-8) and records any
/// negative value seen at a quadrature node. The CDF is tabulated on an adaptively refined grid
/// and inverted by linear interpolation for sampling. A density cannot express an atom at 0,
/// so P(W = 0) = 0 holds for every accepted law.
class CustomLaw {
 public:
  CustomLaw(std::function<double(double)> density, double lower, double upper, std::string description,
            const QuadratureOptions& opts = {}) {
    if (!density) throw InputError("CustomLaw: density is empty");
    if (!(lower >= 0.0) || !std::isfinite(lower)) throw InputError("CustomLaw: support must start at a finite lower >= 0");
    if (!(upper > lower)) throw InputError("CustomLaw: support requires upper > lower");

    auto state = std::make_shared<State>();
    state->density = std::move(density);
    state->lower = lower;
    state->upper = upper;
    state->description = std::move(description);

    bool negative = false;
    auto mapped = [&](double y) {
      const double p = state->density(state->to_w(y));
      if (p < 0.0) negative = true;
      return p * state->jacobian(y);
    };
    const double y_end = state->y_end();
    const auto total = integrate_finite(mapped, 0.0, y_end, opts);
    if (negative) throw InputError("CustomLaw: density is negative somewhere on the support");
    if (!total.converged || std::abs(total.value - 1.0) > 1e-8) {
      throw InputError("CustomLaw: density does not integrate to 1 within 1e-8 (got " +
                       std::to_string(total.value) + ")");
    }

    // Adaptive CDF table: bisect any cell carrying more than 1/2048 of the mass.
    constexpr int initial_cells = 64;
    constexpr int max_depth = 14;
    constexpr double max_cell_mass = 1.0 / 2048.0;
    state->knots.push_back(0.0);
    state->cdf.push_back(0.0);
    bool tabulated = true;
    std::function<void(double, double, int)> add_cell = [&](double y0, double y1, int depth) {
      const auto m = integrate_finite(mapped, y0, y1, opts);
      tabulated = tabulated && m.converged;
      if (m.value > max_cell_mass && depth < max_depth) {
        const double mid = 0.5 * (y0 + y1);
        add_cell(y0, mid, depth + 1);
        add_cell(mid, y1, depth + 1);
        return;
      }
      state->knots.push_back(y1);
      state->cdf.push_back(state->cdf.back() + std::max(m.value, 0.0));
    };
    for (int i = 0; i < initial_cells; ++i) {
      add_cell(y_end * i / initial_cells, y_end * (i + 1) / initial_cells, 0);
    }
    const double mass = state->cdf.back();
    for (double& c : state->cdf) c /= mass;
    state->invertible = tabulated && mass > 0.0;
    state_ = std::move(state);
  }

  [[nodiscard]] double density(double w) const {
    if (w < state_->lower || w > state_->upper) return 0.0;
    return state_->density(w);
  }
  [[nodiscard]] double lower() const { return state_->lower; }
  [[nodiscard]] double upper() const { return state_->upper; }
  [[nodiscard]] const std::string& description() const { return state_->description; }
  [[nodiscard]] bool invertible() const { return state_->invertible; }
  [[nodiscard]] std::size_t table_size() const { return state_->knots.size(); }

  /// Tabulated inverse CDF, u in [0, 1).
  [[nodiscard]] double inverse_cdf(double u) const {
    if (!state_->invertible) throw InputError("CustomLaw '" + state_->description + "' has no invertible CDF table");
    const auto& cdf = state_->cdf;
    const auto& knots = state_->knots;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t hi = (it == cdf.end()) ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
    if (hi == 0) hi = 1;
    const std::size_t lo = hi - 1;
    const double span = cdf[hi] - cdf[lo];
    const double frac = span > 0.0 ? (u - cdf[lo]) / span : 0.0;
    return state_->to_w(knots[lo] + frac * (knots[hi] - knots[lo]));
  }

 private:
  struct State {
    std::function<double(double)> density;
    double lower = 0.0;
    double upper = 0.0;
    std::string description;
    std::vector<double> knots;  // in the integration coordinate y
    std::vector<double> cdf;
    bool invertible = false;

    [[nodiscard]] bool semi_infinite() const { return std::isinf(upper); }
    [[nodiscard]] double y_end() const { return semi_infinite() ? 1.0 : upper - lower; }
    [[nodiscard]] double to_w(double y) const {
      return semi_infinite() ? lower + y / (1.0 - y) : lower + y;
    }
    [[nodiscard]] double jacobian(double y) const {
      return semi_infinite() ? 1.0 / ((1.0 - y) * (1.0 - y)) : 1.0;
    }
  };
  std::shared_ptr<const State> state_;
};

using MixingLaw = std::variant<ParetoLaw, BetaPowerLaw, CustomLaw>;

struct MixtureSpec {
  explicit MixtureSpec(MixingLaw law, double location = 0.0, double drift = 0.0, double scale = 1.0)
      : mixing(std::move(law)), mu(location), theta(drift), sigma(scale) {
    if (!std::isfinite(mu) || !std::isfinite(theta)) throw DomainError("MixtureSpec: mu and theta must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("MixtureSpec: sigma must be > 0");
  }

  [[nodiscard]] bool is_pure() const { return mu == 0.0 && theta == 0.0 && sigma == 1.0; }

  MixingLaw mixing;
  double mu;
  double theta;
  double sigma;
};

/// Short text form, e.g. "pareto(lambda=1.5)".
inline std::string describe(const MixingLaw& law) {
  return std::visit(
      [](const auto& l) -> std::string {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ParetoLaw>) {
          return "pareto(lambda=" + shortest_repr(l.lambda) + ")";
        } else if constexpr (std::is_same_v<T, BetaPowerLaw>) {
          return "beta(lambda=" + shortest_repr(l.lambda) + ")";
        } else {
          return "custom(" + l.description() + ")";
        }
      },
      law);
}

inline double mixing_density(const MixingLaw& law, double w) {
  return std::visit(
      [w](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ParetoLaw>) {
          return w >= 1.0 ? l.lambda * std::pow(w, -l.lambda - 1.0) : 0.0;
        } else if constexpr (std::is_same_v<T, BetaPowerLaw>) {
          return (w > 0.0 && w < 1.0) ? l.lambda * std::pow(w, l.lambda - 1.0) : 0.0;
        } else {
          return l.density(w);
        }
      },
      law);
}

/// E[g(W)] by quadrature over the support of the mixing law.
template <class G>
QuadratureResult mixing_expectation(const MixingLaw& law, const G& g, const QuadratureOptions& opts = {}) {
  return std::visit(
      [&](const auto& l) -> QuadratureResult {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ParetoLaw>) {
          const double lam = l.lambda;
          return integrate_semi_infinite([&](double w) { return g(w) * lam * std::pow(w, -lam - 1.0); }, 1.0,
                                         opts);
        } else if constexpr (std::is_same_v<T, BetaPowerLaw>) {
          const double lam = l.lambda;
          return integrate_finite([&](double w) { return g(w) * lam * std::pow(w, lam - 1.0); }, 0.0, 1.0, opts);
        } else {
          auto integrand = [&](double w) { return g(w) * l.density(w); };
          if (std::isinf(l.upper())) return integrate_semi_infinite(integrand, l.lower(), opts);
          return integrate_finite(integrand, l.lower(), l.upper(), opts);
        }
      },
      law);
}

namespace detail {

inline double converged_value(const QuadratureResult& r, const char* what) {
  if (!r.converged) {
    throw ConvergenceError(std::string(what) + ": quadrature did not converge (estimate " +
                           std::to_string(r.value) + " +/- " + std::to_string(r.error_estimate) + ")");
  }
  return r.value;
}

// E[exp(-s W)] for Pareto(lambda), s >= 0: lambda s^lambda Gamma(-lambda, s).
inline double pareto_laplace(double lambda, double s, const GammaAccuracy& acc) {
  if (s == 0.0) return 1.0;
  const double log_s = std::log(s);
  if (lambda * -log_s < 650.0) {
    return lambda * std::exp(lambda * log_s) * upper_inc_gamma(-lambda, s, acc);
  }
  // Gamma(-lambda, s) would overflow. Here s^lambda < e^-650, so only the moment terms
  // E[W^n] (-s)^n / n! = lambda (-s)^n / (n! (lambda - n)), n < lambda, contribute.
  double sum = 1.0;
  double term = 1.0;
  for (int n = 1; n < lambda && n < 200; ++n) {
    term *= -s / n;
    const double contrib = term * lambda / (lambda - n);
    sum += contrib;
    if (std::abs(contrib) < 1e-17) break;
  }
  return sum;
}

}  // namespace detail

/// Density of sqrt(W) Z, W ~ Pareto(lambda):
///   (2^lambda lambda / sqrt(pi)) |x|^(-2 lambda - 1) gamma(lambda + 1/2, x^2 / 2).
/// Evaluated as lambda / sqrt(2 pi) * s^(-a) gamma(a, s), a = lambda + 1/2, s = x^2 / 2, which is
/// the same quantity without the x -> 0 overflow; x = 0 gives the limit lambda / ((lambda + 1/2) sqrt(2 pi)).
inline double pareto_mixture_pdf(double lambda, double x, const GammaAccuracy& acc = {}) {
  detail::checked_shape(lambda, "pareto_mixture_pdf");
  if (std::isnan(x)) throw DomainError("pareto_mixture_pdf: x is NaN");
  const double coeff = lambda / std::sqrt(2.0 * std::numbers::pi);
  if (x == 0.0) return coeff / (lambda + 0.5);
  return coeff * lower_inc_gamma_ratio(lambda + 0.5, 0.5 * x * x, acc);
}

/// Moment generating function of Pareto(lambda): lambda (-u)^lambda Gamma(-lambda, -u), u < 0.
/// u = 0 returns 1; u > 0 diverges and is a DomainError.
inline double pareto_mgf(double lambda, double u, const GammaAccuracy& acc = {}) {
  detail::checked_shape(lambda, "pareto_mgf");
  if (!(u <= 0.0)) throw DomainError("pareto_mgf: defined only for u <= 0");
  return detail::pareto_laplace(lambda, -u, acc);
}

/// Characteristic function of sqrt(W) Z, W ~ Pareto(lambda):
/// (t^(2 lambda) lambda / 2^lambda) Gamma(-lambda, t^2 / 2), and 1 at t = 0.
inline double pareto_mixture_cf(double lambda, double t, const GammaAccuracy& acc = {}) {
  detail::checked_shape(lambda, "pareto_mixture_cf");
  if (!std::isfinite(t)) throw DomainError("pareto_mixture_cf: t must be finite");
  return detail::pareto_laplace(lambda, 0.5 * t * t, acc);
}

/// Density of sqrt(W) Z, W ~ BetaPower(lambda):
///   (2^-lambda lambda / sqrt(pi)) |x|^(2 lambda - 1) Gamma(1/2 - lambda, x^2 / 2).
/// At x = 0 the density is infinite for lambda <= 1/2 (DomainError) and equals
/// lambda / ((lambda - 1/2) sqrt(2 pi)) otherwise.
inline double beta_mixture_pdf(double lambda, double x, const GammaAccuracy& acc = {}) {
  detail::checked_shape(lambda, "beta_mixture_pdf");
  if (std::isnan(x)) throw DomainError("beta_mixture_pdf: x is NaN");
  const double coeff = lambda / std::sqrt(2.0 * std::numbers::pi);
  if (x == 0.0) {
    if (lambda <= 0.5) throw DomainError("beta_mixture_pdf: density is unbounded at x = 0 for lambda <= 1/2");
    return coeff / (lambda - 0.5);
  }
  const double s = 0.5 * x * x;
  const double a = 0.5 - lambda;
  // |x|^(2 lambda - 1) = (2 s)^(lambda - 1/2), folded into s^(-a).
  return coeff * std::exp(-a * std::log(s)) * upper_inc_gamma(a, s, acc);
}

/// Characteristic function of sqrt(W) Z, W ~ BetaPower(lambda):
/// (2^lambda lambda / t^(2 lambda)) gamma(lambda, t^2 / 2), and 1 at t = 0.
inline double beta_mixture_cf(double lambda, double t, const GammaAccuracy& acc = {}) {
  detail::checked_shape(lambda, "beta_mixture_cf");
  if (!std::isfinite(t)) throw DomainError("beta_mixture_cf: t must be finite");
  return lambda * lower_inc_gamma_ratio(lambda, 0.5 * t * t, acc);
}

/// E_W[ N(x; mu + theta W, sigma^2 W) ] by quadrature over the mixing law.
inline double mixture_pdf_numeric(const MixtureSpec& spec, double x, const QuadratureOptions& opts = {}) {
  const double mu = spec.mu;
  const double theta = spec.theta;
  const double var_scale = spec.sigma * spec.sigma;
  auto conditional = [=](double w) {
    if (!(w > 0.0)) return 0.0;
    const double v = var_scale * w;
    const double d = x - mu - theta * w;
    return std::exp(-d * d / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
  };
  return detail::converged_value(mixing_expectation(spec.mixing, conditional, opts), "mixture_pdf_numeric");
}

/// e^(i mu t) E_W[ exp((i theta t - sigma^2 t^2 / 2) W) ] by quadrature over the mixing law.
inline std::complex<double> mixture_cf_numeric(const MixtureSpec& spec, double t, const QuadratureOptions& opts = {}) {
  if (!std::isfinite(t)) throw DomainError("mixture_cf_numeric: t must be finite");
  if (t == 0.0) return {1.0, 0.0};
  const double damp = 0.5 * spec.sigma * spec.sigma * t * t;
  const double freq = spec.theta * t;
  const double re = detail::converged_value(
      mixing_expectation(spec.mixing, [=](double w) { return std::exp(-damp * w) * std::cos(freq * w); }, opts),
      "mixture_cf_numeric");
  double im = 0.0;
  if (freq != 0.0) {
    im = detail::converged_value(
        mixing_expectation(spec.mixing, [=](double w) { return std::exp(-damp * w) * std::sin(freq * w); }, opts),
        "mixture_cf_numeric");
  }
  return std::polar(1.0, spec.mu * t) * std::complex<double>(re, im);
}

/// E[exp(u W)], u <= 0, by quadrature; the only MGF route for custom laws.
inline double mixing_mgf_numeric(const MixingLaw& law, double u, const QuadratureOptions& opts = {}) {
  if (!(u <= 0.0)) throw DomainError("mixing_mgf_numeric: defined only for u <= 0");
  return detail::converged_value(mixing_expectation(law, [u](double w) { return std::exp(u * w); }, opts),
                                 "mixing_mgf_numeric");
}

struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::size_t n = 0;
};

/// Stream ids used by sample(); sample_mixing() reproduces the W draws of sample().
inline constexpr std::uint64_t mixing_stream_id = 0;
inline constexpr std::uint64_t normal_stream_id = 1;

/// n inverse-CDF draws of W: Pareto U^(-1/lambda), BetaPower U^(1/lambda), Custom from the table.
inline std::vector<double> sample_mixing(const MixingLaw& law, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InputError("sample: n must be >= 1");
  RandomStream stream(split_seed(seed, mixing_stream_id));
  std::vector<double> w(n);
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ParetoLaw>) {
          const double e = -1.0 / l.lambda;
          for (auto& v : w) v = std::pow(stream.uniform_open_below(), e);
        } else if constexpr (std::is_same_v<T, BetaPowerLaw>) {
          const double e = 1.0 / l.lambda;
          for (auto& v : w) v = std::pow(stream.uniform_open_below(), e);
        } else {
          if (!l.invertible()) throw InputError("sample: custom law has no invertible CDF tabulation");
          for (auto& v : w) v = l.inverse_cdf(stream.uniform());
        }
      },
      law);
  return w;
}

/// n independent draws of mu + theta W + sigma sqrt(W) Z; bit-identical for identical inputs.
inline SampleBatch sample(const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  SampleBatch batch;
  batch.values = sample_mixing(spec.mixing, n, seed);
  batch.seed = seed;
  batch.n = n;
  RandomStream normals(split_seed(seed, normal_stream_id));
  for (auto& v : batch.values) {
    const double w = v;
    v = spec.mu + spec.theta * w + spec.sigma * std::sqrt(w) * normals.normal();
  }
  return batch;
}

struct EmpiricalCf {
  std::complex<double> estimate;
  double std_error_real = 0.0;
  double std_error_imag = 0.0;

  /// Standard error of the complex estimate, sqrt(se_re^2 + se_im^2).
  [[nodiscard]] double std_error() const { return std::hypot(std_error_real, std_error_imag); }
};

/// Sample mean of exp(i t X_j) with standard errors of its real and imaginary parts.
inline EmpiricalCf empirical_cf(const SampleBatch& batch, double t) {
  const std::size_t n = batch.values.size();
  if (n < 2) throw InputError("empirical_cf: needs at least 2 values");
  if (!std::isfinite(t)) throw DomainError("empirical_cf: t must be finite");
  double sum_c = 0.0;
  double sum_s = 0.0;
  for (double x : batch.values) {
    sum_c += std::cos(t * x);
    sum_s += std::sin(t * x);
  }
  const double mean_c = sum_c / static_cast<double>(n);
  const double mean_s = sum_s / static_cast<double>(n);
  double ss_c = 0.0;
  double ss_s = 0.0;
  for (double x : batch.values) {
    const double dc = std::cos(t * x) - mean_c;
    const double ds = std::sin(t * x) - mean_s;
    ss_c += dc * dc;
    ss_s += ds * ds;
  }
  const double denom = static_cast<double>(n) * static_cast<double>(n - 1);
  return {{mean_c, mean_s}, std::sqrt(ss_c / denom), std::sqrt(ss_s / denom)};
}

}  // namespace nvmix
