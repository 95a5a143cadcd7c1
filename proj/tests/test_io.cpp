#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "nvmix/io.hpp"

using namespace nvmix;

namespace {

VerificationReport sample_report() { return verify(IdentityCase{IdentityKind::Int1, 1.5, 2.0, 0.5}); }

std::vector<std::string> split(const std::string& line, char sep, bool keep_trailing = false) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (keep_trailing && !line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nvmix_io_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(ShortestRepr, RoundTripsRandomDoubles) {
  std::mt19937_64 gen(31);
  for (int i = 0; i < 20000; ++i) {
    double v = 0.0;
    const std::uint64_t bits = gen();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const auto s = shortest_repr(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    ASSERT_EQ(back, v) << s;
  }
}

TEST(ShortestRepr, NonFinite) {
  EXPECT_EQ(shortest_repr(std::nan("")), "nan");
  EXPECT_EQ(shortest_repr(INFINITY), "inf");
  EXPECT_EQ(shortest_repr(-INFINITY), "-inf");
  EXPECT_EQ(shortest_repr(0.1), "0.1");
}

TEST(ReportJson, FieldOrder) {
  const auto j = report_to_json(sample_report());
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  ASSERT_EQ(keys.size(), report_columns.size());
  for (std::size_t i = 0; i < keys.size(); ++i) EXPECT_EQ(keys[i], report_columns[i]);
  EXPECT_TRUE(j["seed"].is_null());
  EXPECT_EQ(j["identity"], "int1");
}

TEST(ReportJson, RoundTripIsByteIdentical) {
  GridResult g;
  g.reports = {sample_report(), mc_cf_check(MixtureFamily::Pareto, 1.5, 1.0, 20'000, 9)};
  g.passed = 2;
  const std::string text = dump_json(grid_to_json(g));
  const auto parsed = nlohmann::ordered_json::parse(text);
  EXPECT_EQ(dump_json(parsed), text);
  EXPECT_EQ(parsed["reports"][1]["seed"], 9);
  EXPECT_EQ(parsed["summary"]["total"], 2);
}

TEST(ReportJson, NonConvergedReportStillSerializes) {
  VerifyOptions opts;
  opts.quadrature.oscillatory_max_half_periods = 1;
  auto r = verify(IdentityCase{IdentityKind::Int1, 0.6, 0.5, 0.5}, opts);
  const auto text = dump_json(report_to_json(r));
  EXPECT_EQ(dump_json(nlohmann::ordered_json::parse(text)), text);
  EXPECT_NE(text.find("\"converged\": false"), std::string::npos);
}

TEST(ReportCsv, MatchesJsonToSeventeenDigits) {
  const auto r = sample_report();
  const auto j = report_to_json(r);
  const auto csv = reports_to_csv({r});
  const auto lines = split(csv, '\n');
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0] + "\n", csv_header());
  const auto cells = split(lines[1], ',', true);
  ASSERT_EQ(cells.size(), report_columns.size());
  for (const char* key : {"nu", "b", "alpha", "lhs", "rhs", "abs_err", "rel_err"}) {
    const auto idx = static_cast<std::size_t>(
        std::find(report_columns.begin(), report_columns.end(), key) - report_columns.begin());
    char a[32];
    char b[32];
    std::snprintf(a, sizeof a, "%.17g", std::stod(cells[idx]));
    std::snprintf(b, sizeof b, "%.17g", j[key].get<double>());
    EXPECT_STREQ(a, b) << key;
  }
  EXPECT_EQ(cells[8], "true");
  EXPECT_EQ(cells[12], "");
}

TEST(ReportText, MentionsVerdict) {
  const auto text = report_to_text(sample_report());
  EXPECT_NE(text.find("PASS"), std::string::npos);
  EXPECT_NE(text.find("int1 nu=1.5 b=2 alpha=0.5"), std::string::npos);
}

TEST(SampleCsv, WriteReadRoundTrip) {
  const MixtureSpec spec(ParetoLaw{1.5}, 0.25, 0.0, 2.0);
  const auto batch = sample(spec, 1000, 4);
  std::stringstream ss;
  write_sample_csv(ss, spec, batch);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# nvmix-sample mixing=pareto(lambda=1.5) mu=0.25 theta=0 sigma=2 n=1000 seed=4\nx\n", 0), 0u);
  std::stringstream in(text);
  EXPECT_EQ(read_sample_csv(in), batch.values);
}

TEST(SampleCsv, RejectsGarbage) {
  std::stringstream in("x\n1.5\nabc\n");
  EXPECT_THROW(read_sample_csv(in), InputError);
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemporary) {
  const auto path = temp_path("atomic.txt");
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(content, "second\n");
  auto tmp = path;
  tmp += ".tmp";
  EXPECT_FALSE(std::filesystem::exists(tmp));
  std::filesystem::remove(path);
}

TEST(AtomicWrite, UnwritableDirectoryIsInputError) {
  EXPECT_THROW(write_file_atomic("/nonexistent-dir/x/report.json", "{}"), InputError);
}
