#include <cmath>

#include <gtest/gtest.h>

#include "implorenz/conditions.hpp"
#include "implorenz/errors.hpp"

using namespace implorenz;

namespace {

ImpulseSpec spec_with(double eps) {
  ImpulseSpec s;
  s.epsilon = eps;
  return s;
}

SectionJetMap geo_jet(double eps) {
  const GeoImpulsiveSystem sys(GeoParams{}, spec_with(eps));
  return [sys](const SectionPoint& z) { return sys.tilde_F_jet(z); };
}

SectionMap geo_map(double eps) {
  const GeoImpulsiveSystem sys(GeoParams{}, spec_with(eps));
  return [sys](const SectionPoint& z) { return sys.tilde_F(z); };
}

bool passes(const ConditionReport& r, const std::string& which) {
  if (which == "L3") return r.l3.pass;
  if (which == "H1") return r.h1.pass;
  if (which == "H2") return r.h2.pass;
  return r.h3.pass;
}

}  // namespace

TEST(L3, DefaultMarginsMatchClosedForm) {
  // Hy = 0.3, |Gx^-1| = 2/3 (at |u| = 1), |Gx^-1 Hx| = 0.3, Gy = 0.
  const L3Report r = check_L3(geo_jet(0.0));
  EXPECT_NEAR(r.Hy, 0.3, 1e-9);
  EXPECT_NEAR(r.Gx_inv, 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(r.Gx_inv_Hx, 0.3, 1e-3);
  EXPECT_NEAR(r.Gy, 0.0, 1e-15);
  EXPECT_NEAR(r.slack_second, 0.8 - 2 * std::sqrt(0.06), 1e-3);
  EXPECT_NEAR(r.slack_third, 0.7 / 3.0, 1e-6);
  EXPECT_TRUE(r.grid_converged);
  EXPECT_TRUE(r.pass);
}

TEST(L3, PerturbationShrinksButKeepsMargins) {
  const L3Report a = check_L3(geo_jet(0.0)), b = check_L3(geo_jet(0.05));
  EXPECT_TRUE(b.pass);
  EXPECT_LT(b.slack_second, a.slack_second);
  EXPECT_GT(b.slack_second, 0.0);
  EXPECT_GT(b.slack_third, 0.0);
}

TEST(L3, FiberFactorAboveOneFails) {
  const FixtureCase fx = make_fixture(Fixture::EtaTooLarge);
  const L3Report r = check_L3(fx.map, fx.settings.l3_grid);
  EXPECT_NEAR(r.Hy, 1.5, 1e-9);
  EXPECT_LT(r.slack_Hy, 0.0);
  EXPECT_FALSE(r.pass);
}

TEST(H1, DefaultExponentIsExact) {
  const H1Report r = fit_H1(geo_jet(0.0));
  EXPECT_NEAR(r.alpha, 0.25, 1e-6);
  EXPECT_GE(r.r2, 0.999);
  EXPECT_TRUE(r.pass);
}

TEST(H1, PerturbedExponentUnchanged) {
  const H1Report r = fit_H1(geo_jet(0.05));
  EXPECT_NEAR(r.alpha, 0.25, 0.02);
  EXPECT_TRUE(r.pass);
}

TEST(H1, SmoothMapHasZeroExponent) {
  // Odd extension of u -> 0.5 + u / 2: derivative constant, nothing to fit.
  const auto f = fiber_product_map([](double u) { return 0.5 + 0.5 * u; }, [](double) { return 0.5; });
  const H1Report r = fit_H1(f);
  EXPECT_NEAR(r.alpha, 0.0, 0.02);
  EXPECT_LT(r.log_spread, 0.05);
  EXPECT_TRUE(r.pass);
}

TEST(H2, DefaultConeExpands) {
  const H2Report r = check_H2_cones(geo_jet(0.0));
  EXPECT_NEAR(r.lambda_u, 1.5, 1e-3);
  EXPECT_GE(r.lambda_min, 1.4);
  EXPECT_EQ(r.escape_rate, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(H2, NarrowerConeKeepsExpansion) {
  const H2Report r = check_H2_cones(geo_jet(0.0), 15.0);
  EXPECT_GE(r.lambda_min, 1.4);
  EXPECT_NEAR(r.lambda_u, 1.5, 1e-3);
  EXPECT_GT(r.lambda_s, 1.0);
}

TEST(H2, BadAngleIsConfigError) {
  EXPECT_THROW(check_H2_cones(geo_jet(0.0), 0.0), ConfigError);
  EXPECT_THROW(check_H2_cones(geo_jet(0.0), 60.0), ConfigError);
}

TEST(H3, DefaultMeasureScalesLinearly) {
  const auto r = estimate_H3(geo_map(0.0), {0.1, 0.05, 0.02, 0.01, 0.005, 0.002}, 4, 400000, 1, 4);
  EXPECT_NEAR(r.beta[0], 1.0, 0.05);
  EXPECT_TRUE(r.stable);
  EXPECT_TRUE(r.pass);
  // Halving eps roughly halves the strip measure.
  EXPECT_NEAR(r.measure[0][1] / r.measure[0][0], 0.5, 0.1);
}

TEST(H3, NeedsEnoughSamples) {
  EXPECT_THROW(estimate_H3(geo_map(0.0), {0.1, 0.05}, 2, 1000), ConfigError);
}

TEST(H6, RowsAreFinite) {
  const auto rows = check_H6(geo_jet(0.05), {0.05, 0.1, 0.2}, 2000);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_TRUE(std::isfinite(r.lambda_u));
    EXPECT_TRUE(std::isfinite(r.lambda_s));
    EXPECT_GT(r.lambda_u, 1.0);
  }
}

TEST(Fixtures, EachFailsOnlyItsTarget) {
  for (Fixture f : all_fixtures()) {
    FixtureCase fx = make_fixture(f);
    fx.settings.workers = 4;
    const ConditionReport r = check_conditions(fx.map, fx.settings, fx.name);
    for (const std::string which : {"L3", "H1", "H2", "H3"}) {
      if (which == fx.target)
        EXPECT_FALSE(passes(r, which)) << fx.name << " should fail " << which;
      else
        EXPECT_TRUE(passes(r, which)) << fx.name << " should pass " << which;
    }
    EXPECT_FALSE(r.all_pass);
  }
}

TEST(Conditions, DefaultsPassAtZeroEpsilon) {
  ConditionSettings s;
  s.workers = 4;
  const ConditionReport r = check_conditions(geo_jet(0.0), s, "eps=0");
  EXPECT_TRUE(r.l3.pass);
  EXPECT_TRUE(r.h1.pass);
  EXPECT_TRUE(r.h2.pass);
  EXPECT_TRUE(r.h3.pass);
  EXPECT_TRUE(r.all_pass);
  EXPECT_EQ(r.label, "eps=0");
}
