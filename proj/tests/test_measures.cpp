#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "implorenz/errors.hpp"
#include "implorenz/measures.hpp"

using namespace implorenz;

namespace {

ImpulseSpec spec_with(double eps) {
  ImpulseSpec s;
  s.epsilon = eps;
  return s;
}

SectionMap geo_map(double eps) {
  const GeoImpulsiveSystem sys(GeoParams{}, spec_with(eps));
  return [sys](const SectionPoint& z) { return sys.tilde_F(z); };
}

OrbitSettings orbits(std::size_t seeds, std::size_t length, std::uint64_t master = 1) {
  OrbitSettings s;
  s.seeds = seeds;
  s.length = length;
  s.burn_in = 500;
  s.master_seed = master;
  return s;
}

EmpiricalMeasure dirac(const SectionPoint& p) {
  EmpiricalMeasure mu;
  mu.points = {p};
  mu.weights = {1.0};
  return mu;
}

// Contracts each half of the square onto its own fixed point (+-1/2, 0).
SectionPoint two_sinks(const SectionPoint& z) {
  const double s = z.u > 0 ? 1.0 : -1.0;
  return {s * (0.25 + 0.5 * std::abs(z.u)), 0.5 * z.v};
}

}  // namespace

TEST(TestFamily, SizeAndConstant) {
  const TestFamily fam(4);
  EXPECT_EQ(fam.size(), 41u);
  const auto vals = fam.eval({0.3, -0.2});
  EXPECT_EQ(vals[0], 1.0);
  EXPECT_EQ(fam.lipschitz(0), 0.0);
  EXPECT_NE(TestFamily(3).id(), fam.id());
}

TEST(TestFamily, BoundedAndLipschitz) {
  const TestFamily fam(4);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ud(-1.0, 1.0), small(-1e-3, 1e-3);
  for (int i = 0; i < 2000; ++i) {
    const SectionPoint a{ud(rng), ud(rng)};
    const SectionPoint b{std::clamp(a.u + small(rng), -1.0, 1.0), std::clamp(a.v + small(rng), -1.0, 1.0)};
    const auto fa = fam.eval(a), fb = fam.eval(b);
    for (std::size_t k = 0; k < fam.size(); ++k) {
      EXPECT_LE(std::abs(fa[k]), 1.0);
      EXPECT_LE(std::abs(fa[k] - fb[k]), fam.lipschitz(k) * sup_distance(a, b) + 1e-15) << fam.describe(k);
    }
  }
}

TEST(FlowFamily, HeightIntegralMatchesQuadrature) {
  const FlowFamily fam(2);
  std::vector<double> exact(fam.size(), 0.0), quad(fam.size(), 0.0), tmp(fam.size());
  const double u = 0.3, v = -0.6, h1 = 0.05, h2 = 2.7;
  fam.add_height_integral(u, v, h1, h2, exact);
  const int n = 20000;
  const double dh = (h2 - h1) / n;
  for (int i = 0; i < n; ++i) {
    fam.eval(u, v, h1 + (i + 0.5) * dh, tmp);
    for (std::size_t k = 0; k < tmp.size(); ++k) quad[k] += tmp[k] * dh;
  }
  for (std::size_t k = 0; k < fam.size(); ++k) EXPECT_NEAR(exact[k], quad[k], 1e-7);
}

TEST(Birkhoff, ConstantAveragesToOne) {
  const TestFamily fam(4);
  const auto r = birkhoff_map_average(geo_map(0.05), {0.3, 0.1}, 5000, fam, 100);
  EXPECT_FALSE(r.truncated);
  EXPECT_EQ(r.completed, 5000u);
  EXPECT_NEAR(r.values[0], 1.0, 1e-12);
}

TEST(Birkhoff, FixedPointOrbitGivesPointValues) {
  // u = 1 is fixed by the expanding factor; the fiber contracts onto v = 0.5 / 0.7.
  const TestFamily fam(4);
  const SectionPoint fixed{1.0, 0.5 / 0.7};
  const auto r = birkhoff_map_average(geo_map(0.0), fixed, 1000, fam);
  const auto expect = fam.eval(fixed);
  for (std::size_t k = 0; k < fam.size(); ++k) EXPECT_NEAR(r.values[k], expect[k], 1e-12);
}

TEST(Birkhoff, SingularStartIsRejected) {
  EXPECT_THROW(birkhoff_map_average(geo_map(0.0), {0.0, 0.1}, 10, TestFamily(2)), NumericalError);
}

TEST(WeakStar, DiracDistanceIsTwo) {
  const TestFamily fam(4);
  const auto a = integrate(dirac({0.0, 0.0}), fam);
  const auto b = integrate(dirac({1.0, 0.0}), fam);
  EXPECT_NEAR(weak_star_distance(a, b), 2.0, 1e-15);
  EXPECT_EQ(weak_star_distance(a, a), 0.0);
}

TEST(WeakStar, TriangleInequality) {
  const TestFamily fam(3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto a = integrate(dirac({ud(rng), ud(rng)}), fam);
    const auto b = integrate(dirac({ud(rng), ud(rng)}), fam);
    const auto c = integrate(dirac({ud(rng), ud(rng)}), fam);
    EXPECT_LE(weak_star_distance(a, c), weak_star_distance(a, b) + weak_star_distance(b, c) + 1e-15);
  }
}

TEST(WeakStar, FamilyMismatch) {
  const auto a = integrate(dirac({0.2, 0.0}), TestFamily(3));
  const auto b = integrate(dirac({0.2, 0.0}), TestFamily(4));
  try {
    weak_star_distance(a, b);
    FAIL() << "expected FamilyMismatch";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FamilyMismatch);
  }
}

TEST(EmpiricalMeasure, WeightsAndDeterminism) {
  const auto mu = empirical_invariant_measure(geo_map(0.05), orbits(8, 1000));
  EXPECT_EQ(mu.size(), 8000u);
  EXPECT_EQ(mu.failed_seeds(), 0u);
  double w = 0;
  for (double x : mu.weights) w += x;
  EXPECT_NEAR(w, 1.0, 1e-12);
  auto par = orbits(8, 1000);
  par.workers = 3;
  const auto nu = empirical_invariant_measure(geo_map(0.05), par);
  EXPECT_EQ(mu.points, nu.points);
}

TEST(EmpiricalMeasure, PushforwardDefectIsSmall) {
  const auto map = geo_map(0.05);
  auto s = orbits(100, 10000);
  s.workers = 4;
  const auto mu = empirical_invariant_measure(map, s);
  EXPECT_LE(pushforward_defect(mu, map, TestFamily(4)), 0.02);
}

TEST(EmpiricalMeasure, UMarginalMatchesOneDimensionalMap) {
  auto s = orbits(100, 10000);
  s.workers = 4;
  const auto mu = empirical_invariant_measure(geo_map(0.0), s);
  // Independent 1-D run of the expanding factor from its own random starts.
  const GeoParams p;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  std::vector<double> one(8, 0.0), two(8, 0.0);
  auto accumulate = [](double u, double w, std::vector<double>& acc) {
    for (int j = 1; j <= 4; ++j) {
      acc[j - 1] += w * std::cos(j * std::numbers::pi * u);
      acc[j + 3] += w * std::sin(j * std::numbers::pi * u);
    }
  };
  const int seeds = 100, length = 10000;
  for (int k = 0; k < seeds; ++k) {
    double u = ud(rng);
    for (int i = 0; i < 500; ++i) u = f1d(u, p);
    for (int i = 0; i < length; ++i) {
      accumulate(u, 1.0 / (seeds * length), one);
      u = f1d(u, p);
    }
  }
  for (std::size_t i = 0; i < mu.size(); ++i) accumulate(mu.points[i].u, mu.weights[i], two);
  for (int j = 0; j < 8; ++j) EXPECT_NEAR(one[j], two[j], 0.02);
}

TEST(EmpiricalMeasure, DoublingLengthStabilizes) {
  const TestFamily fam(4);
  auto s = orbits(100, 10000);
  s.workers = 4;
  const auto a = integrate(empirical_invariant_measure(geo_map(0.05), s), fam);
  s.length *= 2;
  const auto b = integrate(empirical_invariant_measure(geo_map(0.05), s), fam);
  EXPECT_LE(weak_star_distance(a, b), 0.01);
}

TEST(Basins, UnperturbedMapHasOneCluster) {
  auto s = orbits(100, 20000);
  s.workers = 4;
  const auto probe = basin_probe(geo_map(0.0), TestFamily(4), s);
  EXPECT_EQ(probe.base.s, 1u);
  EXPECT_TRUE(probe.stable);
  EXPECT_GT(probe.base.coverage, 0.95);
}

TEST(Basins, TwoSinkFixtureHasTwoClusters) {
  auto s = orbits(60, 2000);
  const auto probe = basin_probe(two_sinks, TestFamily(4), s);
  EXPECT_EQ(probe.base.s, 2u);
  EXPECT_EQ(probe.doubled.s, 2u);
  EXPECT_TRUE(probe.stable);
  EXPECT_NEAR(probe.base.clusters[0].fraction + probe.base.clusters[1].fraction, 1.0, 1e-12);
}

TEST(Basins, IndependentMasterSeedsAgree) {
  auto a = orbits(60, 20000, 11), b = orbits(60, 20000, 12);
  a.workers = b.workers = 4;
  const auto map = geo_map(0.05);
  const auto ra = per_seed_averages(map, TestFamily(4), a);
  const auto rb = per_seed_averages(map, TestFamily(4), b);
  EXPECT_EQ(cluster_basins(ra.rows).s, cluster_basins(rb.rows).s);
}

TEST(Basins, NeedsTwoRows) {
  EXPECT_THROW(cluster_basins({{0.0}}), ConfigError);
}

TEST(Lift, ConstantIntegratesToOne) {
  const GeoImpulsiveSystem sys(GeoParams{}, spec_with(0.05));
  const GeoArcModel model(sys, FlowFamily(2));
  const auto mu = empirical_invariant_measure(geo_map(0.05), orbits(10, 2000));
  const auto lift = suspension_lift(mu, model);
  EXPECT_NEAR(lift.nu.values[0], 1.0, 1e-12);
  EXPECT_EQ(lift.samples, mu.size());
}

TEST(Lift, BaseOnlyFunctionsAreRoofWeighted) {
  const GeoImpulsiveSystem sys(GeoParams{}, spec_with(0.05));
  const FlowFamily fam(2);
  const GeoArcModel model(sys, fam);
  const auto mu = empirical_invariant_measure(geo_map(0.05), orbits(10, 2000));
  const auto lift = suspension_lift(mu, model);
  // Fubini on the suspension: int phi(z) R_Y(z) dmu / int R_Y dmu.
  const TestFamily& base = fam.section();
  std::vector<double> num(base.size(), 0.0), tmp(base.size());
  double den = 0;
  for (const SectionPoint& z : mu.points) {
    const double r = sys.roof_Y(z);
    base.eval(z.u, z.v, tmp);
    for (std::size_t k = 0; k < tmp.size(); ++k) num[k] += tmp[k] * r;
    den += r;
  }
  for (std::size_t k = 0; k < base.size(); ++k) EXPECT_NEAR(lift.nu.values[3 * k], num[k] / den, 1e-12);
  EXPECT_NEAR(lift.mean_roof, den / mu.size(), 1e-12);
}

TEST(Lift, AgreesWithFlowBirkhoffAverages) {
  const GeoArcModel model(GeoImpulsiveSystem(GeoParams{}, spec_with(0.0)), FlowFamily(2));
  auto s = orbits(40, 25000);
  s.workers = 4;
  const auto lift = suspension_lift(empirical_invariant_measure(geo_map(0.0), s), model, 4);
  OrbitSettings f = orbits(40, 1, 99);
  f.workers = 4;
  const auto flow = birkhoff_flow_average(model, f, 40000.0);
  ASSERT_EQ(flow.trajectories, 40u);
  for (std::size_t k = 0; k < model.family().size(); ++k) {
    const double se = std::hypot(lift.nu.stderrs[k], flow.stderrs[k]);
    EXPECT_LE(std::abs(lift.nu.values[k] - flow.values[k]), std::max(4 * se, 1e-3)) << k;
  }
}

TEST(Lift, DefectAtZeroShiftIsZero) {
  const GeoArcModel model(GeoImpulsiveSystem(GeoParams{}, spec_with(0.05)), FlowFamily(2));
  const auto mu = empirical_invariant_measure(geo_map(0.05), orbits(4, 500));
  const auto d = flow_invariance_defect(mu, model, 0.0);
  EXPECT_EQ(d.max_defect, 0.0);
  EXPECT_THROW(flow_invariance_defect(mu, model, -1.0), ConfigError);
}

TEST(Lift, DefectIsSmallAtUnitShift) {
  const GeoArcModel model(GeoImpulsiveSystem(GeoParams{}, spec_with(0.05)), FlowFamily(2));
  auto s = orbits(50, 4000);
  s.workers = 4;
  const auto st = streaming_lift(model, s, 1.0);
  EXPECT_LE(st.defect.max_defect, 0.02);
  EXPECT_NEAR(st.lift.nu.values[0], 1.0, 1e-12);
}

TEST(Lift, StreamingMatchesStoredSamples) {
  const GeoArcModel model(GeoImpulsiveSystem(GeoParams{}, spec_with(0.05)), FlowFamily(2));
  const auto s = orbits(6, 800);
  const auto st = streaming_lift(model, s, 1.0);
  const auto mu = empirical_invariant_measure(geo_map(0.05), s);
  const auto lift = suspension_lift(mu, model);
  const auto d = flow_invariance_defect(mu, model, 1.0);
  for (std::size_t k = 0; k < model.family().size(); ++k) {
    EXPECT_NEAR(st.lift.nu.values[k], lift.nu.values[k], 1e-12);
    EXPECT_NEAR(st.defect.defects[k], d.defects[k], 1e-12);
  }
}
