#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "implorenz/errors.hpp"
#include "implorenz/impulse.hpp"

using namespace implorenz;

namespace {

ImpulseSpec spec_with(double eps, DisplacementField f = DisplacementField::SineBump) {
  ImpulseSpec s;
  s.epsilon = eps;
  s.field = f;
  return s;
}

OdeImpulsiveSystem ode_system(double eps) {
  return OdeImpulsiveSystem(LorenzFlow(LorenzParams{}, IntegratorConfig{}), classical_chart(),
                            spec_with(eps));
}

Point3 attractor_point(int k) {
  const LorenzFlow flow(LorenzParams{}, IntegratorConfig{});
  return flow.integrate(Point3{1, 1, 20}, 10 + 0.37L * k);
}

}  // namespace

TEST(Displace, SineBumpExample) {
  const SectionPoint w = displace(SectionPoint{0, 0.5}, spec_with(0.05));
  EXPECT_EQ(w.u, 0.0);
  EXPECT_NEAR(w.v, 0.55, 1e-15);
}

TEST(Displace, ZeroEpsilonIsIdentity) {
  const SectionPoint w{0.3, -0.7};
  EXPECT_EQ(displace(w, spec_with(0.0)), w);
}

TEST(Displace, BoundaryStaysOnBoundary) {
  for (auto f : {DisplacementField::SineBump, DisplacementField::Shear, DisplacementField::Rotate}) {
    for (double t = -1; t <= 1; t += 0.125) {
      for (const SectionPoint w : {SectionPoint{1, t}, SectionPoint{-1, t}, SectionPoint{t, 1}, SectionPoint{t, -1}}) {
        if (w.u == 0) continue;
        const SectionPoint h = displace(w, spec_with(0.1, f));
        EXPECT_TRUE(in_square(h));
        EXPECT_NEAR(std::max(std::abs(h.u), std::abs(h.v)), 1.0, 1e-16) << to_string(f);
        if (f == DisplacementField::Shear) continue;  // slides along v = +-1
        EXPECT_NEAR(h.u, w.u, 1e-16) << to_string(f);
        EXPECT_NEAR(h.v, w.v, 1e-16) << to_string(f);
      }
    }
  }
}

TEST(Displace, InteriorStaysInSquare) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (auto f : {DisplacementField::SineBump, DisplacementField::Shear, DisplacementField::Rotate}) {
    for (int i = 0; i < 10000; ++i) {
      const SectionPoint h = displace(SectionPoint{ud(rng), ud(rng)}, spec_with(0.1, f));
      EXPECT_TRUE(in_square(h));
    }
  }
}

TEST(Displace, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ud(-0.95, 0.95);
  const double h = 1e-6;
  for (auto f : {DisplacementField::SineBump, DisplacementField::Shear, DisplacementField::Rotate}) {
    const ImpulseSpec s = spec_with(0.1, f);
    for (int i = 0; i < 50; ++i) {
      const SectionPoint w{ud(rng), ud(rng)};
      const Mat2 j = displace_jacobian(w, s);
      const SectionPoint up = displace(SectionPoint{w.u + h, w.v}, s), um = displace(SectionPoint{w.u - h, w.v}, s);
      const SectionPoint vp = displace(SectionPoint{w.u, w.v + h}, s), vm = displace(SectionPoint{w.u, w.v - h}, s);
      EXPECT_NEAR(j(0, 0), (up.u - um.u) / (2 * h), 1e-7) << to_string(f);
      EXPECT_NEAR(j(1, 0), (up.v - um.v) / (2 * h), 1e-7) << to_string(f);
      EXPECT_NEAR(j(0, 1), (vp.u - vm.u) / (2 * h), 1e-7) << to_string(f);
      EXPECT_NEAR(j(1, 1), (vp.v - vm.v) / (2 * h), 1e-7) << to_string(f);
    }
  }
}

TEST(Displace, OutsideSquareIsRejected) {
  try {
    displace(SectionPoint{1.5, 0}, spec_with(0.05, DisplacementField::Shear));
    FAIL() << "expected OutOfSection";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfSection);
  }
}

TEST(Displace, LandingOnSingularLineIsNudged) {
  // Shear with eps = 1/16 and v = -16 u cancels u exactly (1 - u^2 rounds to 1).
  const double u = std::ldexp(1.0, -30);
  int nudges = 0;
  const SectionPoint h = displace(SectionPoint{u, -16 * u}, spec_with(0.0625, DisplacementField::Shear), &nudges);
  EXPECT_EQ(h.u, 1e-15);
  EXPECT_EQ(nudges, 1);
  const SectionPoint m = displace(SectionPoint{-u, 16 * u}, spec_with(0.0625, DisplacementField::Shear), &nudges);
  EXPECT_EQ(m.u, -1e-15);
  EXPECT_EQ(nudges, 2);
}

TEST(Displace, PointOnSingularLineIsNotMoved) {
  int nudges = 0;
  const SectionPoint h = displace(SectionPoint{0.0, 0.3}, spec_with(0.05), &nudges);
  EXPECT_EQ(h.u, 0.0);
  EXPECT_EQ(nudges, 0);
}

TEST(ImpulseSpec, Validation) {
  ImpulseSpec s;
  EXPECT_NO_THROW(s.validate());
  s.epsilon = 0.11;
  EXPECT_THROW(s.validate(), ConfigError);
  s = ImpulseSpec{};
  s.s0 = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = ImpulseSpec{};
  s.s0 = 0.2;
  EXPECT_THROW(s.validate(), ConfigError);
  s = ImpulseSpec{};
  s.epsilon = -1e-3;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(ImpulseSpec, FieldNames) {
  for (auto f : {DisplacementField::SineBump, DisplacementField::Shear, DisplacementField::Rotate})
    EXPECT_EQ(parse_displacement_field(to_string(f)), f);
  EXPECT_THROW(parse_displacement_field("twist"), ConfigError);
}

TEST(GeoImpulse, ApplyDropsBelowSection) {
  const GeoImpulsiveSystem sys(GeoParams{}, spec_with(0.05));
  const SuspensionState s = sys.impulse_apply({0, 0.5});
  EXPECT_EQ(s.height, 0.05);
  EXPECT_NEAR(s.base.v, 0.55, 1e-15);
}

TEST(GeoImpulse, Tau1AfterImpulseIsRoofMinusDrop) {
  const GeoParams g;
  const GeoImpulsiveSystem sys(g, spec_with(0.0));
  for (double u : {0.9, 0.1, -0.01, 1e-6}) {
    const SectionPoint w{u, 0.2};
    EXPECT_DOUBLE_EQ(sys.tau1(sys.impulse_apply(w)), geo_R(w, g) - 0.05);
    EXPECT_DOUBLE_EQ(sys.tau1({w, 0.0}), geo_R(w, g));
  }
}

TEST(GeoImpulse, TrajectoryFollowsInductiveSteps) {
  const GeoParams g;
  const GeoImpulsiveSystem sys(g, spec_with(0.05));
  const auto tr = sys.trajectory({{0.37, 0.2}, 0.0}, 200.0);
  ASSERT_GT(tr.impulses(), 50u);
  ASSERT_EQ(tr.taus.size(), tr.hits.size() + 1);
  for (std::size_t n = 0; n + 1 < tr.taus.size(); ++n) {
    EXPECT_GT(tr.taus[n + 1], tr.taus[n]);
    if (n > 0) EXPECT_GE(tr.taus[n + 1] - tr.taus[n], g.r0 - 0.05 - 1e-12);
    EXPECT_EQ(tr.entries[n + 1], sys.impulse_apply(tr.hits[n]));
    EXPECT_EQ(tr.hits[n], geo_F(tr.entries[n].base, g));
  }
  EXPECT_LT(tr.taus.back(), 200.0);
}

TEST(GeoImpulse, EvaluateAtZeroIsIdentity) {
  const GeoImpulsiveSystem sys(GeoParams{}, spec_with(0.05));
  const SuspensionState x{{0.4, -0.3}, 0.7};
  EXPECT_EQ(sys.evaluate_Y(x, 0.0), x);
}

TEST(GeoImpulse, EvaluateMatchesTrajectoryEnd) {
  const GeoImpulsiveSystem sys(GeoParams{}, spec_with(0.05));
  const SuspensionState x{{0.4, -0.3}, 0.0};
  const auto tr = sys.trajectory(x, 37.5);
  const SuspensionState y = sys.evaluate_Y(x, 37.5);
  EXPECT_EQ(y.base, tr.end_state.base);
  EXPECT_NEAR(y.height, tr.end_state.height, 1e-12);
}

TEST(GeoImpulse, ImpulseCountMatchesMeanReturnTime) {
  const GeoImpulsiveSystem sys(GeoParams{}, spec_with(0.05));
  // Independent Birkhoff average of the impulsive return time.
  SectionPoint z{0.2718281828, 0.1};
  for (int i = 0; i < 1000; ++i) z = sys.tilde_F(z);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    sum += sys.roof_Y(z);
    z = sys.tilde_F(z);
  }
  const double mean = sum / n;
  const double horizon = 100000.0;
  const auto tr = sys.trajectory({{0.31, -0.4}, 0.0}, horizon);
  EXPECT_NEAR(double(tr.impulses()), horizon / mean, 0.02 * horizon / mean);
}

TEST(GeoImpulse, RejectsRoofBelowDrop) {
  GeoParams g;
  g.r0 = 0.04;
  EXPECT_THROW(GeoImpulsiveSystem(g, spec_with(0.0)), ConfigError);
}

TEST(OdeImpulse, Tau1AfterImpulseIsReturnTimeMinusDrop) {
  const auto sys = ode_system(0.0);
  for (const ChartCoords w : {ChartCoords{0.3L, 0.1L}, ChartCoords{-0.6L, -0.2L}}) {
    const Real flight = sys.flow().flow_to_section(sys.chart().from_chart(w), sys.chart()).flight_time;
    EXPECT_NEAR(double(sys.tau1(sys.impulse_apply(w))), double(flight - 0.05L), 1e-8);
  }
}

TEST(OdeImpulse, ImpulseTargetLeavesThePlane) {
  const auto sys = ode_system(0.05);
  const Point3 p = sys.impulse_apply(ChartCoords{0.3L, 0.4L});
  EXPECT_GT(std::abs(double(p[2] - sys.chart().height)), 1e-3);
}

TEST(OdeImpulse, ZeroEpsilonIsTimeShiftedFlow) {
  const auto sys = ode_system(0.0);
  const Point3 x = attractor_point(1);
  for (Real t : {2.5L, 6.0L, 10.0L}) {
    const auto tr = sys.trajectory(x, t);
    ASSERT_FALSE(tr.no_return);
    const Point3 expect = sys.flow().integrate(x, t + Real(tr.impulses()) * 0.05L);
    EXPECT_LE(double(distance(tr.end_state, expect)), 1e-6 * (1 + double(norm(expect))));
  }
}

TEST(OdeImpulse, TrajectoryGapsAndHits) {
  const auto sys = ode_system(0.05);
  const auto tr = sys.trajectory(attractor_point(2), 20);
  ASSERT_GT(tr.impulses(), 5u);
  for (std::size_t n = 0; n + 1 < tr.taus.size(); ++n) {
    EXPECT_GT(tr.taus[n + 1], tr.taus[n]);
    EXPECT_TRUE(in_square(tr.hits[n]));
    const Point3 again = sys.impulse_apply(tr.hits[n]);
    EXPECT_LE(double(distance(again, tr.entries[n + 1])), 1e-12);
  }
}

TEST(OdeImpulse, SemiflowLawShortTimes) {
  const auto sys = ode_system(0.05);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> td(0.0, 3.0);
  for (int k = 0; k < 5; ++k) {
    const Point3 x = attractor_point(k);
    const Real s = td(rng), t = td(rng);
    const Point3 a = sys.evaluate_Y(sys.evaluate_Y(x, s), t);
    const Point3 b = sys.evaluate_Y(x, s + t);
    EXPECT_LE(double(distance(a, b)), 1e-6);
  }
}

TEST(OdeImpulse, EvaluateAtZeroIsIdentity) {
  const auto sys = ode_system(0.05);
  const Point3 x = attractor_point(0);
  EXPECT_EQ(sys.evaluate_Y(x, 0), x);
}
