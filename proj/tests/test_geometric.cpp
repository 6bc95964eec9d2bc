#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "implorenz/errors.hpp"
#include "implorenz/geometric.hpp"

using namespace implorenz;

TEST(F1d, Examples) {
  const GeoParams p;
  EXPECT_EQ(f1d(1.0, p), 1.0);
  EXPECT_EQ(f1d(1.0 / 16, p), -0.75);
  EXPECT_EQ(f1d(-1.0 / 16, p), 0.75);
}

TEST(F1d, SingularAtZero) {
  try {
    f1d(0.0, GeoParams{});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularInput);
  }
}

TEST(F1d, DerivativeBoundedBelowAndMatchesDifferences) {
  const GeoParams p;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ud(0.01, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double u = ud(rng) * (i % 2 ? 1 : -1);
    const double d = f1d_prime(u, p);
    EXPECT_GE(d, 1.5 - 1e-12);
    EXPECT_GT(d, std::sqrt(2.0));
    const double h = 1e-7;
    EXPECT_NEAR(d, (f1d(u + h, p) - f1d(u - h, p)) / (2 * h), 1e-5 * d);
  }
}

TEST(GeoF, Examples) {
  const GeoParams p;
  const SectionPoint a = geo_F({1, 1}, p);
  EXPECT_EQ(a.u, 1.0);
  EXPECT_DOUBLE_EQ(a.v, 0.8);
  const SectionPoint b = geo_F({1e-12, 0.9}, p);
  EXPECT_NEAR(b.v, 0.5, 1e-15);
  EXPECT_THROW(geo_F({0.0, 0.3}, p), NumericalError);
}

TEST(GeoF, FiberImageBound) {
  const GeoParams p;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  double sup = 0;
  for (int i = 0; i < 1000000; ++i) {
    SectionPoint z{ud(rng), ud(rng)};
    if (z.u == 0) continue;
    const SectionPoint w = geo_F(z, p);
    ASSERT_TRUE(in_square(w));
    sup = std::max(sup, std::abs(w.v));
  }
  EXPECT_LE(sup, 0.8);
}

TEST(GeoF, JetMatchesFiniteDifferences) {
  const GeoParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  const double h = 1e-7;
  for (int i = 0; i < 200; ++i) {
    SectionPoint z{ud(rng), ud(rng)};
    if (std::abs(z.u) < 0.01) continue;
    const MapJet j = geo_F_jet(z, p);
    EXPECT_EQ(j.image, geo_F(z, p));
    const SectionPoint up = geo_F({z.u + h, z.v}, p), um = geo_F({z.u - h, z.v}, p);
    const SectionPoint vp = geo_F({z.u, z.v + h}, p), vm = geo_F({z.u, z.v - h}, p);
    EXPECT_NEAR(j.jacobian(0, 0), (up.u - um.u) / (2 * h), 1e-5 * std::abs(j.jacobian(0, 0)));
    EXPECT_NEAR(j.jacobian(1, 0), (up.v - um.v) / (2 * h), 1e-6);
    EXPECT_NEAR(j.jacobian(0, 1), (vp.u - vm.u) / (2 * h), 1e-9);
    EXPECT_NEAR(j.jacobian(1, 1), (vp.v - vm.v) / (2 * h), 1e-6);
  }
}

TEST(GeoR, Examples) {
  const GeoParams p;
  EXPECT_EQ(geo_R({1, 0.3}, p), 1.0);
  EXPECT_EQ(geo_R({-1, -0.3}, p), 1.0);
  EXPECT_NEAR(geo_R({std::exp(-3.0), 0}, p), 4.0, 1e-15);
  EXPECT_GT(geo_R({1e-200, 0}, p), 400.0);
  EXPECT_THROW(geo_R({0.0, 0.0}, p), NumericalError);
}

TEST(GeoR, ReturnTimeSlopeIsExact) {
  const GeoParams p;
  const ReturnTimeFit fit = fit_return_time(p);
  EXPECT_NEAR(fit.slope, 1.0 / p.lambda1, 1e-12);
  GeoParams q;
  q.lambda1 = 2.5;
  EXPECT_NEAR(fit_return_time(q).slope, 0.4, 1e-12);
}

TEST(GeoParams, Validation) {
  EXPECT_NO_THROW(GeoParams{}.validate());
  GeoParams p;
  p.alpha = 0.6;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.c = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.eta = 0.6;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.r0 = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.lambda1 = -1;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Suspension, ZeroTimeIsIdentity) {
  const auto flow = SuspensionFlow::geometric(GeoParams{});
  const SuspensionState s{{0.3, -0.2}, 0.4};
  EXPECT_EQ(flow.flow(s, 0), s);
}

TEST(Suspension, OneRoofCrossing) {
  const GeoParams p;
  const auto flow = SuspensionFlow::geometric(p);
  const SectionPoint z{0.3, -0.2};
  long crossings = 0;
  const SuspensionState s = flow.flow({z, 0}, geo_R(z, p), crossings);
  EXPECT_EQ(s.base, geo_F(z, p));
  EXPECT_EQ(s.height, 0.0);
  EXPECT_EQ(crossings, 1);
}

TEST(Suspension, SemigroupIsExactBeforeFirstCrossing) {
  const auto flow = SuspensionFlow::geometric(GeoParams{});
  const SuspensionState s{{0.25, 0.5}, 0.0};
  EXPECT_EQ(flow.flow(flow.flow(s, 0.5), 0.25), flow.flow(s, 0.75));
}

TEST(Suspension, SemigroupHoldsToRounding) {
  const auto flow = SuspensionFlow::geometric(GeoParams{});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-1.0, 1.0), td(0.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const SuspensionState s{{ud(rng), ud(rng)}, 0.0};
    const double a = td(rng), b = td(rng);
    long n1 = 0, n2 = 0, n3 = 0;
    const auto split = flow.flow(flow.flow(s, a, n1), b, n2);
    const auto whole = flow.flow(s, a + b, n3);
    EXPECT_EQ(n1 + n2, n3);
    EXPECT_EQ(split.base, whole.base);
    EXPECT_LE(std::abs(split.height - whole.height), 64 * 40.0 * std::numeric_limits<double>::epsilon());
  }
}

TEST(Suspension, RoofBirkhoffAverageConverges) {
  // Time average of the roof along a generic orbit of the 1-D factor.
  const GeoParams p;
  auto average = [&](std::size_t n) {
    double u = 0.3141592653589793, sum = 0;
    for (std::size_t i = 0; i < 1000; ++i) u = f1d(u, p);
    for (std::size_t i = 0; i < n; ++i) {
      sum += geo_R({u, 0}, p);
      u = f1d(u, p);
    }
    return sum / n;
  };
  const double a = average(250000), b = average(1000000);
  EXPECT_TRUE(std::isfinite(b));
  EXPECT_NEAR(a, b, 0.01 * b);
}
