#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nvmix/identities.hpp"
#include "oracles.hpp"

using namespace nvmix;
using oracle::real;

namespace {

const double sqrt_pi = std::sqrt(std::numbers::pi);

double rel_diff(double got, double want) { return std::abs(got - want) / std::abs(want); }

GridSpec full_grid(IdentityKind id, std::vector<double> nus) {
  return GridSpec{id, std::move(nus), {0.5, 1.0, 2.0}, {0.5, 1.0, 2.0}, 1e-6};
}

}  // namespace

// ---- Int1 ----------------------------------------------------------------------------------------

TEST(Int1Rhs, UnitParametersMatchQuadratureOracle) {
  // (sqrt(pi) / 4) Gamma(-1/2, 1/4), the incomplete gamma taken from an independent quadrature
  constexpr double frozen_gamma = 1.4154194561257572;
  const real oracle_gamma = oracle::exp_sinh([](real t) { return std::pow(t, -1.5L) * std::exp(-t); }, 0.25L);
  EXPECT_LT(rel_diff(static_cast<double>(oracle_gamma), frozen_gamma), 1e-14);
  EXPECT_LT(rel_diff(int1_rhs(1.0, 1.0, 1.0), sqrt_pi / 4.0 * frozen_gamma), 1e-13);
}

TEST(Int1Rhs, EvenInB) {
  for (double nu : {0.6, 1.3, 3.0}) {
    for (double b : {0.2, 1.0, 7.0}) EXPECT_EQ(int1_rhs(nu, b, 1.5), int1_rhs(nu, -b, 1.5));
  }
}

TEST(Int1Rhs, ScalesUnderSubstitution) {
  // rhs(nu, c b, c^2 alpha) = c^(2 nu - 1) rhs(nu, b, alpha)
  for (double nu : {0.6, 1.5, 2.5}) {
    for (double c : {0.5, 2.0}) {
      const double lhs = int1_rhs(nu, c * 1.0, c * c * 1.0);
      EXPECT_LT(rel_diff(lhs, std::pow(c, 2.0 * nu - 1.0) * int1_rhs(nu, 1.0, 1.0)), 1e-13) << nu << " " << c;
    }
  }
}

TEST(Int1Lhs, UnitParameters) {
  const auto r = int1_lhs(1.0, 1.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(rel_diff(r.value, int1_rhs(1.0, 1.0, 1.0)), 1e-8);
}

TEST(Int1Lhs, EnvelopeLimitAtOrigin) {
  EXPECT_DOUBLE_EQ(int1_envelope(2.0, 3.0, 0.0), 4.5);
  EXPECT_LT(rel_diff(int1_envelope(2.0, 3.0, 1e-9), 4.5), 1e-12);
}

TEST(Int1Lhs, NearLowerShapeBoundary) {
  const auto r = int1_lhs(0.6, 2.0, 0.5);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(rel_diff(r.value, int1_rhs(0.6, 2.0, 0.5)), 1e-6);
}

TEST(Int1Lhs, ScalingWithinQuadratureError) {
  for (double c : {0.5, 2.0}) {
    const double nu = 1.5;
    const auto base = int1_lhs(nu, 1.0, 1.0);
    const auto scaled = int1_lhs(nu, c, c * c);
    const double f = std::pow(c, 2.0 * nu - 1.0);
    EXPECT_LE(std::abs(scaled.value - f * base.value), scaled.error_estimate + f * base.error_estimate + 1e-12) << c;
  }
}

TEST(Int1, Preconditions) {
  EXPECT_THROW(int1_rhs(0.5, 1.0, 1.0), DomainError);
  EXPECT_THROW(int1_rhs(0.4, 1.0, 1.0), DomainError);
  EXPECT_THROW(int1_rhs(1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(int1_rhs(1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(int1_lhs(1.0, 1.0, -1.0), DomainError);
  EXPECT_THROW(int1_rhs(1.0, INFINITY, 1.0), DomainError);
}

// ---- Int2 ----------------------------------------------------------------------------------------

TEST(Int2Rhs, ElementaryCase) {
  EXPECT_LT(rel_diff(int2_rhs(1.0, 2.0, 1.0), sqrt_pi / 2.0 * (1.0 - std::exp(-1.0))), 1e-15);
}

TEST(Int2Rhs, EvenInB) {
  for (double nu : {0.25, 1.0, 2.0}) EXPECT_EQ(int2_rhs(nu, 1.7, 0.3), int2_rhs(nu, -1.7, 0.3));
}

TEST(Int2Rhs, VanishesAsAlphaGrows) {
  double prev = int2_rhs(1.0, 1.0, 1.0);
  for (double alpha : {1e2, 1e4, 1e8, 1e16}) {
    const double v = int2_rhs(1.0, 1.0, alpha);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-16);
}

TEST(Int2Rhs, ScalesUnderSubstitution) {
  for (double nu : {0.25, 1.0, 2.0}) {
    for (double c : {0.5, 2.0}) {
      EXPECT_LT(rel_diff(int2_rhs(nu, c * 0.7, c * c * 1.3) * std::pow(c, 2.0 * nu), int2_rhs(nu, 0.7, 1.3)), 1e-13);
    }
  }
}

TEST(Int2Lhs, ElementaryCase) {
  const auto r = int2_lhs(1.0, 2.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(rel_diff(r.value, int2_rhs(1.0, 2.0, 1.0)), 1e-8);
}

TEST(Int2Lhs, SmallShapeRegime) {
  const auto r = int2_lhs(0.25, 1.0, 1.0);
  EXPECT_LT(rel_diff(r.value, int2_rhs(0.25, 1.0, 1.0)), 1e-6);
}

TEST(Int2Lhs, LargeShapeRegime) {
  const auto r = int2_lhs(2.0, 0.5, 2.0);
  EXPECT_LT(rel_diff(r.value, int2_rhs(2.0, 0.5, 2.0)), 1e-6);
}

TEST(Int2Lhs, EvenInB) {
  EXPECT_EQ(int2_lhs(1.0, 1.5, 1.0).value, int2_lhs(1.0, -1.5, 1.0).value);
  EXPECT_EQ(int1_lhs(1.0, 1.5, 1.0).value, int1_lhs(1.0, -1.5, 1.0).value);
}

TEST(Int2, Preconditions) {
  EXPECT_THROW(int2_rhs(0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(int2_lhs(1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(int2_lhs(1.0, 1.0, 0.0), DomainError);
}

// ---- verification --------------------------------------------------------------------------------

TEST(Verify, ReportFields) {
  const auto r = verify(IdentityCase{IdentityKind::Int2, 1.0, 2.0, 1.0});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.abs_err, std::abs(r.lhs - r.rhs));
  EXPECT_EQ(r.rel_err, r.abs_err / std::abs(r.rhs));
  EXPECT_TRUE(r.lhs_diagnostics.converged);
  EXPECT_GT(r.lhs_diagnostics.evaluations, 0);
  EXPECT_FALSE(r.seed.has_value());
  EXPECT_EQ(r.tolerance, 1e-6);
}

TEST(Verify, PassFollowsThreshold) {
  VerifyOptions strict;
  strict.tolerance = 1e-18;
  const auto r = verify(IdentityCase{IdentityKind::Int1, 1.0, 1.0, 1.0}, strict);
  EXPECT_EQ(r.pass, r.rel_err <= 1e-18);
  EXPECT_FALSE(r.pass);
}

TEST(Verify, RejectsInvalidCases) {
  EXPECT_THROW(verify(IdentityCase{IdentityKind::Int1, 0.4, 1.0, 1.0}), DomainError);
  EXPECT_THROW(verify(IdentityCase{IdentityKind::Int2, 1.0, 0.0, 1.0}), DomainError);
  EXPECT_THROW(verify(IdentityCase{IdentityKind::CosTransformBeta, 1.0, 0.0, 1.0}), DomainError);
  EXPECT_THROW(verify(IdentityCase{IdentityKind::McCfPareto, -1.0, 1.0, 1.0}), DomainError);
}

TEST(Verify, TruncatedQuadratureIsRecordedNotThrown) {
  VerifyOptions opts;
  opts.quadrature.oscillatory_max_half_periods = 2;
  const auto r = verify(IdentityCase{IdentityKind::Int1, 0.6, 0.5, 0.5}, opts);
  EXPECT_FALSE(r.lhs_diagnostics.converged);
  EXPECT_FALSE(r.pass);
}

TEST(Verify, IdentityNamesRoundTrip) {
  for (auto id : {IdentityKind::Int1, IdentityKind::Int2, IdentityKind::CosTransformPareto,
                  IdentityKind::CosTransformBeta, IdentityKind::McCfPareto, IdentityKind::McCfBeta}) {
    EXPECT_EQ(parse_identity(identity_name(id)), id);
  }
  EXPECT_FALSE(parse_identity("int3").has_value());
}

// ---- cosine transform ----------------------------------------------------------------------------

TEST(CosTransform, ParetoUnit) {
  const auto r = cos_transform_check(MixtureFamily::Pareto, 1.0, 1.0);
  EXPECT_LE(r.rel_err, 1e-7);
  EXPECT_TRUE(r.pass);
}

TEST(CosTransform, SmallFrequency) {
  VerifyOptions opts;
  opts.tolerance = 1e-7;
  for (auto fam : {MixtureFamily::Pareto, MixtureFamily::BetaPower}) {
    const auto r = cos_transform_check(fam, 1.0, 1e-3, opts);
    EXPECT_TRUE(r.pass) << r.rel_err;
  }
}

TEST(CosTransform, UnitBetaAgainstElementaryValue) {
  const auto r = cos_transform_check(MixtureFamily::BetaPower, 1.0, 2.0);
  EXPECT_NEAR(r.lhs, (1.0 - std::exp(-2.0)) / 2.0, 1e-8);
}

TEST(CosTransform, GridForBothFamilies) {
  for (auto fam : {MixtureFamily::Pareto, MixtureFamily::BetaPower}) {
    for (double l : {0.5, 1.0, 2.0}) {
      for (double t : {0.5, 1.0, 2.0}) {
        const auto r = cos_transform_check(fam, l, t);
        EXPECT_LE(r.rel_err, 1e-7) << static_cast<int>(fam) << " " << l << " " << t;
      }
    }
  }
}

TEST(CosTransform, RejectsZeroFrequency) {
  EXPECT_THROW(cos_transform_check(MixtureFamily::Pareto, 1.0, 0.0), DomainError);
}

// ---- Monte Carlo ---------------------------------------------------------------------------------

TEST(McCf, ParetoAtUnitFrequency) {
  const auto r = mc_cf_check(MixtureFamily::Pareto, 1.5, 1.0, 1'000'000, 42);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.seed, 42u);
  EXPECT_GT(r.mc_std_error, 0.0);
}

TEST(McCf, BetaHalfAtTwo) { EXPECT_TRUE(mc_cf_check(MixtureFamily::BetaPower, 0.5, 2.0, 1'000'000, 42).pass); }

TEST(McCf, ZeroFrequencyIsExact) {
  const auto r = mc_cf_check(MixtureFamily::Pareto, 1.5, 0.0, 10'000, 1);
  EXPECT_EQ(r.abs_err, 0.0);
  EXPECT_EQ(r.mc_std_error, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(McCf, Preconditions) {
  EXPECT_THROW(mc_cf_check(MixtureFamily::Pareto, 1.5, 1.0, 9'999, 1), InputError);
  EXPECT_THROW(mc_cf_check(MixtureFamily::Pareto, 1.5, 1.0, 10'000, 1, 0.0), InputError);
}

TEST(McCf, Deterministic) {
  const auto a = mc_cf_check(MixtureFamily::BetaPower, 1.5, 0.5, 20'000, 8);
  const auto b = mc_cf_check(MixtureFamily::BetaPower, 1.5, 0.5, 20'000, 8);
  EXPECT_EQ(a.lhs, b.lhs);
  EXPECT_EQ(a.mc_std_error, b.mc_std_error);
}

// ---- grids ---------------------------------------------------------------------------------------

TEST(Grid, Int1AllPass) {
  const auto g = verify_grid(full_grid(IdentityKind::Int1, {0.6, 1.0, 1.5, 2.5}), {}, 4);
  EXPECT_EQ(g.reports.size(), 36u);
  EXPECT_EQ(g.passed, 36u);
  EXPECT_EQ(g.failed, 0u);
}

TEST(Grid, Int2AllPass) {
  const auto g = verify_grid(full_grid(IdentityKind::Int2, {0.25, 0.5, 1.0, 2.0}), {}, 4);
  EXPECT_EQ(g.reports.size(), 36u);
  EXPECT_EQ(g.passed, 36u);
}

TEST(Grid, LexicographicOrderIndependentOfThreads) {
  const auto spec = GridSpec{IdentityKind::Int2, {2.0, 0.5}, {1.0, 0.5}, {2.0, 1.0}, 1e-6};
  const auto serial = verify_grid(spec, {}, 1);
  const auto parallel = verify_grid(spec, {}, 8);
  ASSERT_EQ(serial.reports.size(), 8u);
  std::size_t i = 0;
  for (double nu : spec.nu_values) {
    for (double b : spec.b_values) {
      for (double alpha : spec.alpha_values) {
        const auto& c = serial.reports[i].identity_case;
        EXPECT_EQ(c.nu, nu);
        EXPECT_EQ(c.b, b);
        EXPECT_EQ(c.alpha, alpha);
        EXPECT_EQ(serial.reports[i].lhs, parallel.reports[i].lhs);
        ++i;
      }
    }
  }
}

TEST(Grid, InvalidInputs) {
  EXPECT_THROW(expand_grid(GridSpec{IdentityKind::Int1, {}, {1.0}, {1.0}, 1e-6}), InputError);
  EXPECT_THROW(expand_grid(GridSpec{IdentityKind::Int1, {0.4}, {1.0}, {1.0}, 1e-6}), InputError);
  EXPECT_THROW(expand_grid(GridSpec{IdentityKind::Int1, {1.0, 0.3}, {1.0}, {1.0}, 1e-6}), InputError);
  EXPECT_THROW(expand_grid(GridSpec{IdentityKind::Int2, {1.0}, {1.0}, {1.0}, 0.0}), InputError);
}

TEST(Grid, ToleranceFromSpec) {
  const auto g = verify_grid(GridSpec{IdentityKind::Int2, {1.0}, {2.0}, {1.0}, 1e-3});
  EXPECT_EQ(g.reports[0].tolerance, 1e-3);
}
