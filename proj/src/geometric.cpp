#include "implorenz/geometric.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "implorenz/errors.hpp"
#include "implorenz/parallel.hpp"
#include "stats.hpp"

namespace implorenz {

void GeoParams::validate() const {
  auto bad = [](const std::string& why) { throw ConfigError("geometric parameters: " + why); };
  if (!(alpha > std::sqrt(0.5) && alpha < 1)) bad("alpha must lie in (sqrt(2)/2, 1)");
  if (!(c * alpha > std::sqrt(2.0))) bad("c*alpha must exceed sqrt(2)");
  if (!(eta >= 0 && eta < 1)) bad("eta must lie in [0, 1)");
  if (!(eta + delta0 <= 1)) bad("eta + delta0 must not exceed 1");
  if (!(beta > 0)) bad("beta must be positive");
  if (!(r0 > 0) || !(lambda1 > 0)) bad("r0 and lambda1 must be positive");
}

namespace {

double abs_u(double u) { return std::max(std::abs(u), kAbsUFloor); }

void require_off_gamma(double u) {
  if (u == 0.0) throw NumericalError(ErrorKind::SingularInput, "point on the singular line u = 0");
}

}  // namespace

double f1d(double u, const GeoParams& p) {
  require_off_gamma(u);
  return (u > 0 ? 1.0 : -1.0) * (p.c * std::pow(abs_u(u), p.alpha) - 1.0);
}

double f1d_prime(double u, const GeoParams& p) {
  require_off_gamma(u);
  return p.c * p.alpha * std::pow(abs_u(u), p.alpha - 1.0);
}

SectionPoint geo_F(const SectionPoint& z, const GeoParams& p) {
  require_off_gamma(z.u);
  const double a = abs_u(z.u);
  const double s = z.u > 0 ? 1.0 : -1.0;
  return {s * (p.c * std::pow(a, p.alpha) - 1.0), p.eta * z.v * std::pow(a, p.beta) + p.delta0 * s};
}

MapJet geo_F_jet(const SectionPoint& z, const GeoParams& p) {
  require_off_gamma(z.u);
  const double a = abs_u(z.u);
  const double s = z.u > 0 ? 1.0 : -1.0;
  const double ab = std::pow(a, p.beta);
  MapJet j;
  j.image = {s * (p.c * std::pow(a, p.alpha) - 1.0), p.eta * z.v * ab + p.delta0 * s};
  j.jacobian << p.c * p.alpha * std::pow(a, p.alpha - 1.0), 0.0,
      s * p.eta * z.v * p.beta * std::pow(a, p.beta - 1.0), p.eta * ab;
  return j;
}

double geo_R(const SectionPoint& z, const GeoParams& p) {
  require_off_gamma(z.u);
  return p.r0 - std::log(abs_u(z.u)) / p.lambda1;
}

SuspensionFlow::SuspensionFlow(SectionMap base_map, std::function<double(const SectionPoint&)> roof,
                               double reset)
    : map_(std::move(base_map)), roof_(std::move(roof)), reset_(reset) {}

SuspensionFlow SuspensionFlow::geometric(const GeoParams& p) {
  return SuspensionFlow([p](const SectionPoint& z) { return geo_F(z, p); },
                        [p](const SectionPoint& z) { return geo_R(z, p); });
}

SuspensionState SuspensionFlow::flow(SuspensionState s, double t) const {
  long n = 0;
  return flow(s, t, n);
}

SuspensionState SuspensionFlow::flow(SuspensionState s, double t, long& crossings) const {
  if (t < 0) throw ConfigError("suspension flow needs t >= 0");
  crossings = 0;
  // Carry the total height so split times round the same way as a single step.
  double total = s.height + t;
  for (;;) {
    const double roof = roof_(s.base);
    if (total < roof) {
      s.height = total;
      return s;
    }
    total = reset_ + (total - roof);
    s.base = map_(s.base);
    ++crossings;
  }
}

ReturnTimeFit fit_return_time(const GeoParams& p, std::size_t samples, double u_lo, double u_hi,
                              std::uint64_t seed) {
  if (samples < 3 || !(u_lo > 0 && u_lo < u_hi && u_hi <= 1)) throw ConfigError("invalid return-time fit range");
  auto rng = seeded_rng(seed, 0x5e7);
  std::uniform_real_distribution<double> lg(std::log(u_lo), std::log(u_hi)), vd(-1.0, 1.0);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = std::exp(lg(rng));
    const SectionPoint z{i % 2 ? -a : a, vd(rng)};
    x.push_back(-std::log(a));
    y.push_back(geo_R(z, p));
  }
  const auto fit = detail::fit_line(x, y);
  return {fit.slope, fit.intercept, fit.r2, samples, 0};
}

}  // namespace implorenz
