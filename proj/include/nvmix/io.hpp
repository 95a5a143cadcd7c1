#pragma once

// Report and sample serialization.
//
// Report columns, in this order for both JSON objects and CSV:
//   identity, nu, b, alpha, lhs, rhs, abs_err, rel_err, pass, evals, subdivisions, converged, seed
// Floats use the shortest decimal form that round-trips; CSV always uses '.' as decimal mark.
// Sample CSV: one "# nvmix-sample ..." comment line with spec and seed, a header "x", one value per line.

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "nvmix/errors.hpp"
#include "nvmix/format.hpp"
#include "nvmix/identities.hpp"
#include "nvmix/mixtures.hpp"

namespace nvmix {

inline constexpr std::array<std::string_view, 13> report_columns = {
    "identity", "nu", "b", "alpha", "lhs", "rhs", "abs_err", "rel_err", "pass", "evals", "subdivisions",
    "converged", "seed"};

inline nlohmann::ordered_json report_to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["identity"] = identity_name(r.identity_case.identity);
  j["nu"] = r.identity_case.nu;
  j["b"] = r.identity_case.b;
  j["alpha"] = r.identity_case.alpha;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["abs_err"] = r.abs_err;
  j["rel_err"] = r.rel_err;
  j["pass"] = r.pass;
  j["evals"] = r.lhs_diagnostics.evaluations;
  j["subdivisions"] = r.lhs_diagnostics.subdivisions;
  j["converged"] = r.lhs_diagnostics.converged;
  if (r.seed) {
    j["seed"] = *r.seed;
  } else {
    j["seed"] = nullptr;
  }
  return j;
}

inline nlohmann::ordered_json grid_to_json(const GridResult& g) {
  nlohmann::ordered_json j;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : g.reports) j["reports"].push_back(report_to_json(r));
  j["summary"] = {{"total", g.reports.size()}, {"passed", g.passed}, {"failed", g.failed}};
  return j;
}

/// Canonical text of a JSON document (two-space indent, trailing newline).
inline std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline std::string csv_header() {
  std::string line;
  for (std::size_t i = 0; i < report_columns.size(); ++i) {
    if (i) line += ',';
    line += report_columns[i];
  }
  return line + "\n";
}

inline std::string report_to_csv_row(const VerificationReport& r) {
  std::ostringstream os;
  os << identity_name(r.identity_case.identity) << ',' << shortest_repr(r.identity_case.nu) << ','
     << shortest_repr(r.identity_case.b) << ',' << shortest_repr(r.identity_case.alpha) << ','
     << shortest_repr(r.lhs) << ',' << shortest_repr(r.rhs) << ',' << shortest_repr(r.abs_err) << ','
     << shortest_repr(r.rel_err) << ',' << (r.pass ? "true" : "false") << ',' << r.lhs_diagnostics.evaluations
     << ',' << r.lhs_diagnostics.subdivisions << ',' << (r.lhs_diagnostics.converged ? "true" : "false") << ',';
  if (r.seed) os << *r.seed;
  os << '\n';
  return os.str();
}

inline std::string reports_to_csv(const std::vector<VerificationReport>& reports) {
  std::string out = csv_header();
  for (const auto& r : reports) out += report_to_csv_row(r);
  return out;
}

/// Human-readable single-report rendering.
inline std::string report_to_text(const VerificationReport& r) {
  std::ostringstream os;
  os << identity_name(r.identity_case.identity) << " nu=" << shortest_repr(r.identity_case.nu)
     << " b=" << shortest_repr(r.identity_case.b) << " alpha=" << shortest_repr(r.identity_case.alpha) << '\n'
     << "  lhs      = " << shortest_repr(r.lhs) << '\n'
     << "  rhs      = " << shortest_repr(r.rhs) << '\n'
     << "  abs_err  = " << shortest_repr(r.abs_err) << '\n'
     << "  rel_err  = " << shortest_repr(r.rel_err) << '\n';
  if (r.seed) {
    os << "  std_err  = " << shortest_repr(r.mc_std_error) << " (seed " << *r.seed << ")\n";
  } else {
    os << "  evals    = " << r.lhs_diagnostics.evaluations << ", subdivisions = " << r.lhs_diagnostics.subdivisions
       << ", converged = " << (r.lhs_diagnostics.converged ? "yes" : "no") << '\n';
  }
  if (!r.note.empty()) os << "  note     = " << r.note << '\n';
  os << "  " << (r.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------------------------
// Samples

inline std::string sample_header(const MixtureSpec& spec, const SampleBatch& batch) {
  return "# nvmix-sample mixing=" + describe(spec.mixing) + " mu=" + shortest_repr(spec.mu) +
         " theta=" + shortest_repr(spec.theta) + " sigma=" + shortest_repr(spec.sigma) +
         " n=" + std::to_string(batch.n) + " seed=" + std::to_string(batch.seed);
}

inline void write_sample_csv(std::ostream& os, const MixtureSpec& spec, const SampleBatch& batch) {
  os << sample_header(spec, batch) << "\nx\n";
  for (double v : batch.values) os << shortest_repr(v) << '\n';
}

/// Values of a sample CSV; comment lines and the "x" header are skipped.
inline std::vector<double> read_sample_csv(std::istream& is) {
  std::vector<double> values;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line == "x") continue;
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc()) throw InputError("sample CSV: cannot parse '" + line + "'");
    values.push_back(v);
  }
  return values;
}

/// Writes `content` to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw InputError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace nvmix
