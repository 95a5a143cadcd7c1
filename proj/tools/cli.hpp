#pragma once

// Command-line front end.
//
//   nvmix eval     --fn NAME [--a --x --lambda --t --u]
//   nvmix verify   --identity ID --nu --b [--alpha] [--tolerance] [--format] [--out] [--max-half-periods]
//   nvmix grid     --identity ID [--nu LIST --b LIST --alpha LIST] [--tolerance] [--format] [--out] [--threads]
//   nvmix sample   --mixing pareto|beta --lambda L --n N --seed S [--mu --theta --sigma] [--out]
//   nvmix cf-check --mixing pareto|beta --lambda L --t LIST --n N --seed S [--k-sigma] [--format] [--out]
//
// Exit codes: 0 success/pass, 1 verification failure, 2 usage or domain error,
// 3 numerical non-convergence. NVMIX_TOLERANCE overrides the default verification tolerance.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nvmix/nvmix.hpp"

namespace nvmix::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_nonconvergence = 3;

inline constexpr const char* tolerance_env = "NVMIX_TOLERANCE";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double parse_real(const std::string& text, const std::string& flag) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw UsageError(flag + ": '" + text + "' is not a finite real number");
  }
  return v;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError(flag + ": empty entry in list '" + text + "'");
    out.push_back(parse_real(item, flag));
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

inline double default_tolerance() {
  if (const char* env = std::getenv(tolerance_env); env != nullptr && *env != '\0') {
    const double v = parse_real(env, tolerance_env);
    if (!(v > 0.0)) throw UsageError(std::string(tolerance_env) + " must be > 0");
    return v;
  }
  return 1e-6;
}

inline std::string format_17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << content;
  } else {
    write_file_atomic(out_path, content);
  }
}

inline std::string render_reports(const std::vector<VerificationReport>& reports, const GridResult* grid,
                                  const std::string& format) {
  if (format == "csv") return reports_to_csv(reports);
  if (format == "json") {
    if (grid != nullptr) return dump_json(grid_to_json(*grid));
    return dump_json(report_to_json(reports.front()));
  }
  std::string text;
  for (const auto& r : reports) text += report_to_text(r);
  return text;
}

struct DefaultGrid {
  std::vector<double> nu, b, alpha;
};

inline DefaultGrid default_grid(IdentityKind id) {
  switch (id) {
    case IdentityKind::Int1: return {{0.6, 1.0, 1.5, 2.5}, {0.5, 1.0, 2.0}, {0.5, 1.0, 2.0}};
    case IdentityKind::Int2: return {{0.25, 0.5, 1.0, 2.0}, {0.5, 1.0, 2.0}, {0.5, 1.0, 2.0}};
    case IdentityKind::McCfPareto:
    case IdentityKind::McCfBeta: return {{0.5, 1.5}, {0.5, 1.0, 2.0}, {1.0}};
    default: return {{0.5, 1.0, 2.0}, {0.5, 1.0, 2.0}, {1.0}};
  }
}

inline IdentityKind identity_or_throw(const std::string& name) {
  auto id = parse_identity(name);
  if (!id) throw UsageError("unknown identity '" + name + "' (int1, int2, cos-pareto, cos-beta, mc-pareto, mc-beta)");
  return *id;
}

inline MixtureFamily family_or_throw(const std::string& name) {
  if (name == "pareto") return MixtureFamily::Pareto;
  if (name == "beta") return MixtureFamily::BetaPower;
  throw UsageError("unknown mixing law '" + name + "' (pareto, beta)");
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Incomplete gamma functions, normal variance mixtures and integral-identity verification", "nvmix"};
  app.require_subcommand(1);

  // All numeric flags are taken as strings and parsed here so that every malformed or
  // non-finite value maps onto the same usage error.
  std::map<std::string, std::string> v;
  auto flag = [&v](CLI::App* sub, const std::string& name, const std::string& help) {
    return sub->add_option("--" + name, v[name], help);
  };

  auto* eval = app.add_subcommand("eval", "Evaluate a special function or closed-form mixture formula");
  flag(eval, "fn", "gamma | lower-inc-gamma | upper-inc-gamma | pareto-pdf | pareto-cf | pareto-mgf | beta-pdf | beta-cf")
      ->required();
  for (const char* name : {"a", "x", "lambda", "t", "u"}) flag(eval, name, std::string("argument ") + name);

  auto* verify_cmd = app.add_subcommand("verify", "Verify one identity case");
  flag(verify_cmd, "identity", "int1 | int2 | cos-pareto | cos-beta | mc-pareto | mc-beta")->required();
  flag(verify_cmd, "nu", "nu (lambda for CF checks)")->required();
  flag(verify_cmd, "b", "b (t for CF checks)")->required();
  flag(verify_cmd, "alpha", "alpha (default 1)");
  flag(verify_cmd, "tolerance", "relative-error threshold");
  flag(verify_cmd, "format", "text | json | csv (default text)");
  flag(verify_cmd, "out", "output file");
  flag(verify_cmd, "seed", "seed for Monte Carlo checks (default 42)");
  flag(verify_cmd, "n", "sample size for Monte Carlo checks (default 1000000)");
  flag(verify_cmd, "k-sigma", "Monte Carlo gate in standard errors (default 4)");
  flag(verify_cmd, "max-half-periods", "oscillatory quadrature budget (default 400)");

  auto* grid_cmd = app.add_subcommand("grid", "Verify an identity over a parameter grid");
  flag(grid_cmd, "identity", "identity id")->required();
  flag(grid_cmd, "nu", "comma-separated nu values");
  flag(grid_cmd, "b", "comma-separated b values");
  flag(grid_cmd, "alpha", "comma-separated alpha values");
  flag(grid_cmd, "tolerance", "relative-error threshold");
  flag(grid_cmd, "format", "json | csv (default json)");
  flag(grid_cmd, "out", "output file");
  flag(grid_cmd, "threads", "worker threads (default: hardware concurrency)");
  flag(grid_cmd, "seed", "seed for Monte Carlo checks (default 42)");
  flag(grid_cmd, "n", "sample size for Monte Carlo checks (default 1000000)");
  flag(grid_cmd, "max-half-periods", "oscillatory quadrature budget (default 400)");

  auto* sample_cmd = app.add_subcommand("sample", "Draw from a normal variance(-mean) mixture");
  flag(sample_cmd, "mixing", "pareto | beta")->required();
  flag(sample_cmd, "lambda", "shape parameter")->required();
  flag(sample_cmd, "n", "number of draws")->required();
  flag(sample_cmd, "seed", "64-bit seed")->required();
  flag(sample_cmd, "mu", "location (default 0)");
  flag(sample_cmd, "theta", "drift (default 0)");
  flag(sample_cmd, "sigma", "scale (default 1)");
  flag(sample_cmd, "out", "output CSV file");

  auto* cf_cmd = app.add_subcommand("cf-check", "Monte Carlo check of the closed-form characteristic function");
  flag(cf_cmd, "mixing", "pareto | beta")->required();
  flag(cf_cmd, "lambda", "shape parameter")->required();
  flag(cf_cmd, "t", "comma-separated t values")->required();
  flag(cf_cmd, "n", "sample size (>= 10000)")->required();
  flag(cf_cmd, "seed", "64-bit seed")->required();
  flag(cf_cmd, "k-sigma", "gate in standard errors (default 4)");
  flag(cf_cmd, "format", "text | json | csv (default text)");
  flag(cf_cmd, "out", "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  CLI::App* active = nullptr;
  for (auto* sub : {eval, verify_cmd, grid_cmd, sample_cmd, cf_cmd}) {
    if (sub->parsed()) active = sub;
  }
  auto has = [&active](const std::string& name) {
    const auto* opt = active == nullptr ? nullptr : active->get_option_no_throw("--" + name);
    return opt != nullptr && opt->count() > 0;
  };
  auto real = [&](const std::string& name) {
    if (!has(name)) throw UsageError("--" + name + " is required here");
    return parse_real(v[name], "--" + name);
  };
  auto real_or = [&](const std::string& name, double fallback) { return has(name) ? real(name) : fallback; };
  auto count = [&](const std::string& name, std::uint64_t fallback) -> std::uint64_t {
    if (!has(name)) return fallback;
    const auto& s = v[name];
    std::uint64_t n = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw UsageError("--" + name + ": '" + s + "' is not a non-negative integer");
    }
    return n;
  };
  auto half_periods = [&](VerifyOptions& opts) {
    const auto n = count("max-half-periods", static_cast<std::uint64_t>(opts.quadrature.oscillatory_max_half_periods));
    if (n < 1 || n > 1'000'000) throw UsageError("--max-half-periods must be in [1, 1000000]");
    opts.quadrature.oscillatory_max_half_periods = static_cast<int>(n);
  };
  auto format = [&](const char* fallback) {
    std::string f = has("format") ? v["format"] : fallback;
    if (f != "text" && f != "json" && f != "csv") throw UsageError("--format must be text, json or csv");
    return f;
  };

  try {
    if (eval->parsed()) {
      const std::string fn = v["fn"];
      double value = 0.0;
      if (fn == "gamma") {
        value = gamma(real("a"));
      } else if (fn == "lower-inc-gamma") {
        value = lower_inc_gamma(real("a"), real("x"));
      } else if (fn == "upper-inc-gamma") {
        value = upper_inc_gamma(real("a"), real("x"));
      } else if (fn == "pareto-pdf") {
        value = pareto_mixture_pdf(real("lambda"), real("x"));
      } else if (fn == "pareto-cf") {
        value = pareto_mixture_cf(real("lambda"), real("t"));
      } else if (fn == "pareto-mgf") {
        value = pareto_mgf(real("lambda"), real("u"));
      } else if (fn == "beta-pdf") {
        value = beta_mixture_pdf(real("lambda"), real("x"));
      } else if (fn == "beta-cf") {
        value = beta_mixture_cf(real("lambda"), real("t"));
      } else {
        throw UsageError("unknown function '" + fn + "'");
      }
      out << format_17(value) << "\n";
      return exit_ok;
    }

    if (verify_cmd->parsed()) {
      const IdentityCase c{identity_or_throw(v["identity"]), real("nu"), real("b"), real_or("alpha", 1.0)};
      VerifyOptions opts;
      opts.tolerance = has("tolerance") ? real("tolerance") : default_tolerance();
      if (!(opts.tolerance > 0.0)) throw UsageError("--tolerance must be > 0");
      opts.seed = count("seed", opts.seed);
      opts.mc_samples = count("n", opts.mc_samples);
      opts.k_sigma = real_or("k-sigma", opts.k_sigma);
      half_periods(opts);
      const auto fmt = format("text");
      const auto report = verify(c, opts);
      emit(render_reports({report}, nullptr, fmt), v["out"], out);
      if (!report.lhs_diagnostics.converged) {
        err << "quadrature did not converge" << (report.note.empty() ? "" : ": " + report.note) << "\n";
        return exit_nonconvergence;
      }
      if (!report.pass) {
        err << "verification failed: rel_err " << shortest_repr(report.rel_err) << "\n";
        return exit_failed;
      }
      return exit_ok;
    }

    if (grid_cmd->parsed()) {
      GridSpec grid;
      grid.identity = identity_or_throw(v["identity"]);
      const auto defaults = default_grid(grid.identity);
      grid.nu_values = has("nu") ? parse_list(v["nu"], "--nu") : defaults.nu;
      grid.b_values = has("b") ? parse_list(v["b"], "--b") : defaults.b;
      grid.alpha_values = has("alpha") ? parse_list(v["alpha"], "--alpha") : defaults.alpha;
      grid.tolerance = has("tolerance") ? real("tolerance") : default_tolerance();
      VerifyOptions opts;
      opts.seed = count("seed", opts.seed);
      opts.mc_samples = count("n", opts.mc_samples);
      half_periods(opts);
      const auto threads = static_cast<unsigned>(count("threads", std::max(1u, std::thread::hardware_concurrency())));
      const auto fmt = format("json");
      if (fmt == "text") throw UsageError("grid output must be json or csv");

      const auto result = verify_grid(grid, opts, threads);
      emit(render_reports(result.reports, &result, fmt), v["out"], out);
      (v["out"].empty() ? err : out) << result.passed << "/" << result.reports.size() << " pass\n";
      const auto unconverged = std::count_if(result.reports.begin(), result.reports.end(),
                                             [](const auto& r) { return !r.lhs_diagnostics.converged; });
      if (unconverged != 0) err << "warning: " << unconverged << " case(s) did not reach the quadrature tolerance\n";
      if (result.failed != 0) {
        err << result.failed << " case(s) failed\n";
        return exit_failed;
      }
      return exit_ok;
    }

    if (sample_cmd->parsed()) {
      const auto family = family_or_throw(v["mixing"]);
      const double lambda = real("lambda");
      const auto n = count("n", 0);
      if (n < 1) throw UsageError("--n must be >= 1");
      const auto seed = count("seed", 0);
      const MixingLaw law = family == MixtureFamily::Pareto ? MixingLaw(ParetoLaw(lambda)) : MixingLaw(BetaPowerLaw(lambda));
      const MixtureSpec spec(law, real_or("mu", 0.0), real_or("theta", 0.0), real_or("sigma", 1.0));
      const auto batch = sample(spec, n, seed);
      std::ostringstream csv;
      write_sample_csv(csv, spec, batch);
      emit(csv.str(), v["out"], out);
      return exit_ok;
    }

    if (cf_cmd->parsed()) {
      const auto family = family_or_throw(v["mixing"]);
      const double lambda = real("lambda");
      const auto ts = parse_list(v["t"], "--t");
      const auto n = count("n", 0);
      if (n < 10'000) throw UsageError("--n must be >= 10000");
      const auto seed = count("seed", 0);
      const double k = real_or("k-sigma", 4.0);
      const auto fmt = format("text");
      std::vector<VerificationReport> reports;
      for (double t : ts) reports.push_back(mc_cf_check(family, lambda, t, n, seed, k));
      GridResult summary;
      summary.reports = reports;
      for (const auto& r : reports) (r.pass ? summary.passed : summary.failed) += 1;
      emit(render_reports(reports, &summary, fmt), v["out"], out);
      if (summary.failed != 0) {
        err << summary.failed << " of " << reports.size() << " t values failed the " << shortest_repr(k)
            << "-sigma gate\n";
        return exit_failed;
      }
      return exit_ok;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return exit_usage;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return exit_usage;
  } catch (const ConvergenceError& e) {
    err << "numerical error: " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  err << "error: no command given\n";
  return exit_usage;
}

}  // namespace nvmix::cli
