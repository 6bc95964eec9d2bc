#include "implorenz/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/LU>
#include <boost/math/tools/roots.hpp>

#include "implorenz/errors.hpp"
#include "implorenz/parallel.hpp"
#include "stats.hpp"

namespace implorenz {
namespace {

using detail::fit_line;
using detail::LineFit;

double sup_norm(const Vec2& w) { return std::max(std::abs(w[0]), std::abs(w[1])); }

double row_sum_norm(const Mat2& m) {
  return std::max(std::abs(m(0, 0)) + std::abs(m(0, 1)), std::abs(m(1, 0)) + std::abs(m(1, 1)));
}

struct L3Sups {
  double Hy = 0, Gx_inv = 0, Gx_inv_Hx = 0, Gy = 0;
};

L3Sups l3_sups(const SectionJetMap& f, std::size_t n) {
  L3Sups s;
  for (std::size_t i = 0; i <= n; ++i) {
    const double u = -1.0 + 2.0 * double(i) / double(n);
    if (std::abs(u) < kSingularGuard) continue;
    for (std::size_t k = 0; k <= n; ++k) {
      const double v = -1.0 + 2.0 * double(k) / double(n);
      const Mat2 J = f({u, v}).jacobian;
      const double gx_inv = 1.0 / std::abs(J(0, 0));
      s.Hy = std::max(s.Hy, std::abs(J(1, 1)));
      s.Gx_inv = std::max(s.Gx_inv, gx_inv);
      s.Gx_inv_Hx = std::max(s.Gx_inv_Hx, gx_inv * std::abs(J(1, 0)));
      s.Gy = std::max(s.Gy, std::abs(J(0, 1)));
    }
  }
  return s;
}

bool close_5pct(double a, double b) {
  return std::abs(a - b) <= 0.05 * std::max(std::abs(a), std::abs(b)) + 1e-12;
}

}  // namespace

L3Report check_L3(const SectionJetMap& f, std::size_t grid) {
  if (grid < 2) throw ConfigError("L3 grid must have at least 2 cells per axis");
  const L3Sups coarse = l3_sups(f, grid);
  const L3Sups fine = l3_sups(f, 2 * grid);
  L3Report r;
  r.grid = 2 * grid;
  r.grid_converged = close_5pct(coarse.Hy, fine.Hy) && close_5pct(coarse.Gx_inv, fine.Gx_inv) &&
                     close_5pct(coarse.Gx_inv_Hx, fine.Gx_inv_Hx) && close_5pct(coarse.Gy, fine.Gy);
  r.Hy = fine.Hy;
  r.Gx_inv = fine.Gx_inv;
  r.Gx_inv_Hx = fine.Gx_inv_Hx;
  r.Gy = fine.Gy;
  r.slack_Hy = 1.0 - r.Hy;
  r.slack_Gx_inv = 1.0 - r.Gx_inv;
  r.slack_second = 1.0 - r.Hy * r.Gx_inv - 2.0 * std::sqrt(r.Gx_inv * r.Hy * r.Gx_inv_Hx);
  r.slack_third = (1.0 - r.Hy) * (1.0 - r.Gx_inv) - r.Hy * r.Gx_inv_Hx * r.Gy;
  r.pass = r.slack_Hy > 0 && r.slack_Gx_inv > 0 && r.slack_second > 0 && r.slack_third > 0;
  return r;
}

H1Report fit_H1(const SectionJetMap& f, std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw ConfigError("H1 fit needs at least 1000 samples");
  auto rng = seeded_rng(seed, 0x481);
  std::uniform_real_distribution<double> lg(-8.0, -1.0), vd(-1.0, 1.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> x, y;
  x.reserve(samples);
  y.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = std::pow(10.0, lg(rng));
    const double u = sign(rng) ? a : -a;
    const double v = vd(rng);
    x.push_back(std::log(a));
    y.push_back(std::log(row_sum_norm(f({u, v}).jacobian)));
  }
  const LineFit fit = fit_line(x, y);
  H1Report r;
  r.samples = samples;
  r.alpha = -fit.slope;
  r.A = std::exp(fit.intercept);
  r.r2 = fit.r2;
  double my = 0, vy = 0;
  for (double t : y) my += t;
  my /= y.size();
  for (double t : y) vy += (t - my) * (t - my);
  r.log_spread = std::sqrt(vy / y.size());
  r.fitted = r.r2 >= 0.95;
  // A bounded derivative has nothing to fit; it satisfies the bound with alpha = 0.
  r.pass = r.fitted || (std::abs(r.alpha) < 0.02 && r.log_spread < 0.05);
  return r;
}

H2Report check_H2_cones(const SectionJetMap& f, double half_angle_deg, std::size_t samples,
                        std::uint64_t seed) {
  if (!(half_angle_deg > 0 && half_angle_deg <= 45))
    throw ConfigError("cone half-angle must lie in (0, 45] degrees");
  if (samples == 0) throw ConfigError("H2 needs at least one sample");
  const double slope = std::tan(half_angle_deg * std::numbers::pi / 180.0);
  const double tol = 1e-12;
  constexpr int kDirections = 9;
  auto rng = seeded_rng(seed, 0x482);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  H2Report r;
  r.half_angle_deg = half_angle_deg;
  r.samples = samples;
  r.lambda_u = r.lambda_s = std::numeric_limits<double>::infinity();
  std::size_t escapes = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    SectionPoint z{ud(rng), ud(rng)};
    if (std::abs(z.u) < kSingularGuard) z.u = std::copysign(kSingularGuard, z.u == 0 ? 1.0 : z.u);
    const Mat2 J = f(z).jacobian;
    const Mat2 Jinv = J.inverse();
    bool escaped = false;
    for (int k = 0; k < kDirections; ++k) {
      const double t = slope * (2.0 * k / (kDirections - 1) - 1.0);
      const Vec2 wu(1.0, t);
      const Vec2 iu = J * wu;
      r.lambda_u = std::min(r.lambda_u, sup_norm(iu) / sup_norm(wu));
      if (std::abs(iu[1]) > slope * std::abs(iu[0]) * (1 + tol)) escaped = true;
      const Vec2 ws(t, 1.0);
      const Vec2 is = Jinv * ws;
      r.lambda_s = std::min(r.lambda_s, sup_norm(is) / sup_norm(ws));
      if (std::abs(is[0]) > slope * std::abs(is[1]) * (1 + tol)) escaped = true;
    }
    if (escaped) ++escapes;
  }
  r.lambda_min = std::min(r.lambda_u, r.lambda_s);
  r.escape_rate = double(escapes) / double(samples);
  r.pass = r.lambda_min > 1.0 && r.escape_rate <= 1e-3;
  return r;
}

H3Report estimate_H3(const SectionMap& f, const std::vector<double>& eps_grid, int n_max,
                     std::size_t samples, std::uint64_t seed, int workers) {
  if (eps_grid.size() < 2) throw ConfigError("H3 needs at least two epsilon values");
  if (n_max < 0) throw ConfigError("H3 n_max must be nonnegative");
  if (samples < 100000) throw ConfigError("H3 needs at least 1e5 samples per cell");
  const std::size_t ne = eps_grid.size(), nn = std::size_t(n_max) + 1;
  constexpr std::size_t kChunks = 64;
  std::vector<std::vector<std::size_t>> counts(kChunks, std::vector<std::size_t>(nn * ne, 0));
  parallel_for(kChunks, workers, [&](std::size_t c) {
    auto rng = seeded_rng(seed, 0x483000 + c);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    const std::size_t lo = samples * c / kChunks, hi = samples * (c + 1) / kChunks;
    auto& cnt = counts[c];
    for (std::size_t i = lo; i < hi; ++i) {
      SectionPoint z{ud(rng), ud(rng)};
      bool singular = false;
      for (std::size_t n = 0; n < nn; ++n) {
        const double d = singular ? 0.0 : std::abs(z.u);
        for (std::size_t e = 0; e < ne; ++e)
          if (d < eps_grid[e]) ++cnt[n * ne + e];
        if (n + 1 == nn || singular) continue;
        if (d < kSingularGuard) {
          singular = true;
          continue;
        }
        try {
          z = f(z);
        } catch (const NumericalError&) {
          singular = true;
        }
      }
    }
  });

  H3Report r;
  r.eps_grid = eps_grid;
  r.samples = samples;
  for (int n = 0; n <= n_max; ++n) r.n_grid.push_back(n);
  r.measure.assign(nn, std::vector<double>(ne, 0.0));
  r.upper_bound.assign(nn, std::vector<bool>(ne, false));
  for (std::size_t n = 0; n < nn; ++n) {
    std::vector<double> lx, ly;
    for (std::size_t e = 0; e < ne; ++e) {
      std::size_t total = 0;
      for (const auto& cnt : counts) total += cnt[n * ne + e];
      if (total == 0) {
        r.measure[n][e] = 1.0 / double(samples);
        r.upper_bound[n][e] = true;
      } else {
        r.measure[n][e] = double(total) / double(samples);
        lx.push_back(std::log(eps_grid[e]));
        ly.push_back(std::log(r.measure[n][e]));
      }
    }
    const LineFit fit = fit_line(lx, ly);
    r.beta.push_back(fit.slope);
    r.B.push_back(std::exp(fit.intercept));
    r.r2.push_back(lx.size() >= 2 ? fit.r2 : 0.0);
  }
  double lo = r.beta[0], hi = r.beta[0];
  r.stable = true;
  bool fitted = true;
  for (std::size_t n = 0; n < nn; ++n) {
    r.beta_mean += r.beta[n] / double(nn);
    r.B_max = std::max(r.B_max, r.B[n]);
    lo = std::min(lo, r.beta[n]);
    hi = std::max(hi, r.beta[n]);
    if (std::abs(r.beta[n] - r.beta[0]) > 0.1) r.stable = false;
    if (r.r2[n] < 0.95) fitted = false;
  }
  r.beta_spread = hi - lo;
  r.pass = r.stable && fitted;
  return r;
}

std::vector<H6Row> check_H6(const SectionJetMap& f, const std::vector<double>& radii,
                            std::size_t samples, std::uint64_t seed) {
  std::vector<H6Row> rows;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    if (!(r > 0 && r <= 1)) throw ConfigError("H6 disk size must lie in (0, 1]");
    auto rng = seeded_rng(seed, 0x486000 + ri);
    std::uniform_real_distribution<double> ud(-1.0, 1.0), unit(0.0, 1.0);
    H6Row row;
    row.r = r;
    row.lambda_u = row.lambda_s = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
      // u-disk: horizontal segment of length <= r inside one side of the singular line
      const double side = unit(rng) < 0.5 ? -1.0 : 1.0;
      const double len = r * std::max(unit(rng), 1e-6);
      const double a0 = kSingularGuard + (1.0 - kSingularGuard - len) * unit(rng);
      const double v = ud(rng);
      const SectionPoint x{side * a0, v}, y{side * (a0 + len), v};
      row.lambda_u = std::min(row.lambda_u, sup_distance(f(x).image, f(y).image) / len);

      // s-disk: image of a vertical fiber segment, kept if its image has size <= r
      const double u = side * (kSingularGuard + (1.0 - kSingularGuard) * unit(rng));
      double gap = 2.0 * std::max(unit(rng), 1e-6);
      const double v1 = -1.0 + (2.0 - gap) * unit(rng);
      double img = sup_distance(f({u, v1}).image, f({u, v1 + gap}).image);
      if (img > r) {
        gap *= r / img;
        img = sup_distance(f({u, v1}).image, f({u, v1 + gap}).image);
      }
      if (img > 0 && img <= r * (1 + 1e-9)) row.lambda_s = std::min(row.lambda_s, gap / img);
    }
    rows.push_back(row);
  }
  return rows;
}

ConditionReport check_conditions(const SectionJetMap& f, const ConditionSettings& s,
                                 std::string label) {
  ConditionReport r;
  r.label = std::move(label);
  r.l3 = check_L3(f, s.l3_grid);
  r.h1 = fit_H1(f, s.h1_samples, s.seed);
  r.h2 = check_H2_cones(f, s.h2_half_angle_deg, s.h2_samples, s.seed);
  r.h3 = estimate_H3([&f](const SectionPoint& z) { return f(z).image; }, s.h3_eps, s.h3_n_max,
                     s.h3_samples, s.seed, s.workers);
  r.h6 = check_H6(f, s.h6_radii, s.h6_samples, s.seed);
  r.all_pass = r.l3.pass && r.h1.pass && r.h2.pass && r.h3.pass;
  return r;
}

SectionJetMap fiber_product_map(std::function<double(double)> g, std::function<double(double)> g_prime,
                                const GeoParams& fiber) {
  return [g = std::move(g), gp = std::move(g_prime), fiber](const SectionPoint& z) {
    MapJet j = geo_F_jet(z, fiber);
    const double a = std::max(std::abs(z.u), kAbsUFloor);
    const double s = z.u > 0 ? 1.0 : -1.0;
    j.image.u = s * g(a);
    j.jacobian(0, 0) = gp(a);
    j.jacobian(0, 1) = 0.0;
    return j;
  };
}

namespace {

// Smooth step in ln s: 1 below ln(lo), 0 above ln(hi).
struct LogCutoff {
  double lo, hi;
  double value(double s) const {
    const double x = (std::log(s) - std::log(lo)) / (std::log(hi) - std::log(lo));
    if (x <= 0) return 1.0;
    if (x >= 1) return 0.0;
    return 1.0 - x * x * (3.0 - 2.0 * x);
  }
  // derivative with respect to ln s
  double dlog(double s) const {
    const double w = std::log(hi) - std::log(lo);
    const double x = (std::log(s) - std::log(lo)) / w;
    if (x <= 0 || x >= 1) return 0.0;
    return -6.0 * x * (1.0 - x) / w;
  }
};

SectionJetMap log_periodic_map(double kappa) {
  const LogCutoff chi{1e-4, 1e-2};
  auto g = [=](double s) {
    return -1.0 + 2.0 * std::pow(s, 0.75) * (1.0 + kappa * std::sin(3.0 * std::log(s)) * chi.value(s));
  };
  auto gp = [=](double s) {
    const double L = std::log(s);
    const double wobble = (0.75 * std::sin(3 * L) + 3.0 * std::cos(3 * L)) * chi.value(s) +
                          std::sin(3 * L) * chi.dlog(s);
    return std::pow(s, -0.25) * (1.5 + 2.0 * kappa * wobble);
  };
  return fiber_product_map(g, gp);
}

SectionJetMap cusp_map(double kappa) {
  const GeoParams p;
  auto base = [p](double s) { return p.c * std::pow(s, p.alpha) - 1.0; };
  auto root_eq = [&](double s) {
    const double q0 = -std::sqrt(s), q1 = std::sqrt(1.0 - s);
    return base(s) - kappa * (q0 + (q1 - q0) * s);
  };
  std::uintmax_t iters = 200;
  const auto br = boost::math::tools::toms748_solve(root_eq, 0.05, 0.95,
                                                    boost::math::tools::eps_tolerance<double>(52), iters);
  const double sc = 0.5 * (br.first + br.second);
  const double q0 = -std::sqrt(sc), q1 = std::sqrt(1.0 - sc);
  auto q = [sc](double s) { return std::copysign(std::sqrt(std::abs(s - sc)), s - sc); };
  auto g = [=](double s) { return base(s) + kappa * (q(s) - (q0 + (q1 - q0) * s)); };
  auto gp = [=](double s) {
    const double d = std::max(std::abs(s - sc), kAbsUFloor);
    return p.c * p.alpha * std::pow(s, p.alpha - 1.0) + kappa * (0.5 / std::sqrt(d) - (q1 - q0));
  };
  return fiber_product_map(g, gp);
}

}  // namespace

std::vector<Fixture> all_fixtures() {
  return {Fixture::WeakExpansion, Fixture::LogPeriodic, Fixture::NarrowCone, Fixture::SqrtCusp};
}

FixtureCase make_fixture(Fixture which, const ConditionSettings& base) {
  FixtureCase fc;
  fc.settings = base;
  switch (which) {
    case Fixture::WeakExpansion:
      fc.name = "weak-expansion";
      fc.target = "L3";
      fc.map = fiber_product_map(
          [](double s) { return -1.0 + 2.96 * std::pow(s, 0.75) - 0.96 * std::pow(s, 1.25); },
          [](double s) { return 2.22 * std::pow(s, -0.25) - 1.2 * std::pow(s, 0.25); });
      break;
    case Fixture::LogPeriodic:
      fc.name = "log-periodic";
      fc.target = "H1";
      fc.map = log_periodic_map(0.2);
      break;
    case Fixture::NarrowCone: {
      fc.name = "narrow-cone";
      fc.target = "H2";
      const GeoParams p;
      fc.map = [p](const SectionPoint& z) { return geo_F_jet(z, p); };
      fc.settings.h2_half_angle_deg = 10.0;
      break;
    }
    case Fixture::SqrtCusp:
      fc.name = "sqrt-cusp";
      fc.target = "H3";
      fc.map = cusp_map(0.25);
      break;
    case Fixture::EtaTooLarge: {
      fc.name = "eta-1.5";
      fc.target = "L3";
      GeoParams p;
      p.eta = 1.5;
      fc.map = [p](const SectionPoint& z) { return geo_F_jet(z, p); };
      break;
    }
  }
  return fc;
}

}  // namespace implorenz
