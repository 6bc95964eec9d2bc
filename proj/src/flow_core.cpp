#include "implorenz/flow_core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "implorenz/errors.hpp"
#include "implorenz/parallel.hpp"
#include "ode_engine.hpp"
#include "stats.hpp"

namespace implorenz {

using detail::Engine;
using detail::StepRecord;

void LorenzParams::validate() const {
  if (!(sigma > 0) || !(r > 1) || !(b > 0) || !std::isfinite(sigma) || !std::isfinite(r) ||
      !std::isfinite(b))
    throw ConfigError("Lorenz parameters need sigma > 0, r > 1, b > 0");
}

void IntegratorConfig::validate() const {
  if (!(abs_tol > 0) || !(rel_tol > 0)) throw ConfigError("integrator tolerances must be positive");
  if (!(max_step > 0)) throw ConfigError("integrator max_step must be positive");
  if (!(max_flight_time > 0)) throw ConfigError("max_flight_time must be positive");
  if (!(trapping_radius > 0)) throw ConfigError("trapping_radius must be positive");
}

IntegratorConfig calibration_integrator() {
  IntegratorConfig c;
  c.abs_tol = 1e-10L;
  c.rel_tol = 1e-10L;
  c.max_step = 0.05L;
  return c;
}

Point3 lorenz_rhs(const Point3& p, const LorenzParams& q) {
  return {q.sigma * (p[1] - p[0]), q.r * p[0] - p[1] - p[0] * p[2], p[0] * p[1] - q.b * p[2]};
}

Mat3 lorenz_jacobian(const Point3& p, const LorenzParams& q) {
  Mat3 a;
  a << -q.sigma, q.sigma, 0, q.r - p[2], -1, -p[0], p[1], p[0], -q.b;
  return a;
}

Real norm(const Point3& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }

Real distance(const Point3& a, const Point3& b) {
  return norm({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

void SectionChart::validate() const {
  if (!(u_half > 0) || !(v_half > 0) || !std::isfinite(gamma_angle))
    throw ConfigError("section chart needs positive half-widths and a finite angle");
  if (crossing_sign != 1 && crossing_sign != -1)
    throw ConfigError("crossing_sign must be +1 or -1");
}

ChartCoords SectionChart::to_chart(const Point3& p) const {
  const Real s = std::sin(gamma_angle), c = std::cos(gamma_angle);
  const Real a = p[0] * s - p[1] * c;
  const Real b = p[0] * c + p[1] * s;
  return {a / u_half, b / v_half};
}

Point3 SectionChart::from_chart(const ChartCoords& q) const {
  const Real s = std::sin(gamma_angle), c = std::cos(gamma_angle);
  const Real a = q.u * u_half, b = q.v * v_half;
  return {a * s + b * c, -a * c + b * s, height};
}

Eigen::Matrix<Real, 2, 3> SectionChart::reading() const {
  const Real s = std::sin(gamma_angle), c = std::cos(gamma_angle);
  Eigen::Matrix<Real, 2, 3> m;
  m << s / u_half, -c / u_half, 0, c / v_half, s / v_half, 0;
  return m;
}

Eigen::Matrix<Real, 3, 2> SectionChart::embedding() const {
  const Real s = std::sin(gamma_angle), c = std::cos(gamma_angle);
  Eigen::Matrix<Real, 3, 2> m;
  m << s * u_half, c * v_half, -c * u_half, s * v_half, 0, 0;
  return m;
}

namespace {

constexpr Real kGrazing = 1e-8L;

template <std::size_t N>
void emit_samples(const StepRecord<N>& rec, Real t_stop, Real sample_dt, Real& next_sample,
                  const TraceSampler& sampler) {
  if (!sampler || !(sample_dt > 0)) return;
  while (next_sample < t_stop && next_sample <= rec.t1) {
    const auto x = rec.hermite(next_sample);
    sampler(next_sample, Point3{x[0], x[1], x[2]});
    next_sample += sample_dt;
  }
}

template <std::size_t N>
struct HitSearch {
  bool found = false;
  Real t = 0;
  detail::StateN<N> x{};
  ChartCoords coords;
  int grazing = 0;
};

/// Runs `eng` until the next accepted crossing or `limit`.
template <std::size_t N>
HitSearch<N> run_until_hit(Engine<N>& eng, const SectionChart& chart, Real limit, Real sample_dt,
                           const TraceSampler& sampler) {
  HitSearch<N> out;
  const Real h = chart.height;
  Real g_prev = eng.state()[2] - h;
  if (g_prev == 0) g_prev = eng.deriv()[2];
  Real next_sample = eng.time();
  while (eng.time() < limit) {
    const auto rec = eng.step(limit);
    const Real g_new = rec.x1[2] - h;
    const bool crossed = chart.crossing_sign < 0 ? (g_prev > 0 && g_new <= 0)
                                                 : (g_prev < 0 && g_new >= 0);
    if (crossed) {
      auto [t, x] = eng.locate(rec, h);
      detail::StateN<N> f;
      eng.system()(x, f, t);
      const ChartCoords c = chart.to_chart(Point3{x[0], x[1], x[2]});
      if (std::abs(f[2]) < kGrazing) {
        ++out.grazing;
      } else if (chart.contains(c)) {
        emit_samples(rec, t, sample_dt, next_sample, sampler);
        if (sampler) sampler(t, Point3{x[0], x[1], x[2]});
        out.found = true;
        out.t = t;
        out.x = x;
        out.coords = c;
        return out;
      }
    }
    emit_samples(rec, limit, sample_dt, next_sample, sampler);
    g_prev = g_new != 0 ? g_new : rec.f1[2];
  }
  return out;
}

}  // namespace

LorenzFlow::LorenzFlow(LorenzParams params, IntegratorConfig config)
    : params_(params), config_(config) {
  params_.validate();
  config_.validate();
}

Point3 LorenzFlow::integrate(const Point3& p, Real t) const {
  if (t < 0) throw ConfigError("integrate needs t >= 0");
  if (t == 0) return p;
  Engine<3> eng(params_, config_, 1, p);
  eng.run_to(t);
  return eng.state();
}

Point3 LorenzFlow::integrate_backward(const Point3& p, Real t) const {
  if (t < 0) throw ConfigError("integrate_backward needs t >= 0");
  if (t == 0) return p;
  Engine<3> eng(params_, config_, -1, p);
  eng.run_to(t);
  return eng.state();
}

Point3 LorenzFlow::trace(const Point3& p, Real t, Real sample_dt,
                         const TraceSampler& sampler) const {
  if (t < 0) throw ConfigError("trace needs t >= 0");
  Engine<3> eng(params_, config_, 1, p);
  Real next = 0;
  while (eng.time() < t) {
    const auto rec = eng.step(t);
    emit_samples(rec, t, sample_dt, next, sampler);
  }
  if (sampler) sampler(t, eng.state());
  return eng.state();
}

SectionSearch LorenzFlow::search_section(const Point3& p, const SectionChart& chart, Real horizon,
                                         Real sample_dt, const TraceSampler& sampler) const {
  const Real limit = std::min(horizon, config_.max_flight_time);
  Engine<3> eng(params_, config_, 1, p);
  auto hs = run_until_hit(eng, chart, limit, sample_dt, sampler);
  SectionSearch out;
  out.grazing_rejected = hs.grazing;
  if (hs.found) {
    out.hit = SectionHit{hs.x, hs.coords, hs.t, hs.grazing};
    return out;
  }
  if (horizon > config_.max_flight_time)
    throw NumericalError(ErrorKind::NoReturn, "no section hit within the maximal flight time");
  if (sampler) sampler(limit, eng.state());
  out.end_state = eng.state();
  return out;
}

SectionHit LorenzFlow::flow_to_section(const Point3& p, const SectionChart& chart) const {
  Engine<3> eng(params_, config_, 1, p);
  auto hs = run_until_hit(eng, chart, config_.max_flight_time, 0, {});
  if (!hs.found)
    throw NumericalError(ErrorKind::NoReturn, "no section hit within the maximal flight time");
  return SectionHit{hs.x, hs.coords, hs.t, hs.grazing};
}

SectionHitWithJacobian LorenzFlow::flow_to_section_with_jacobian(const Point3& p,
                                                                 const SectionChart& chart) const {
  detail::StateN<12> x0{};
  x0[0] = p[0];
  x0[1] = p[1];
  x0[2] = p[2];
  x0[3] = x0[7] = x0[11] = 1;
  Engine<12> eng(params_, config_, 1, x0);
  auto hs = run_until_hit(eng, chart, config_.max_flight_time, 0, {});
  if (!hs.found)
    throw NumericalError(ErrorKind::NoReturn, "no section hit within the maximal flight time");
  SectionHitWithJacobian out;
  const Point3 xp{hs.x[0], hs.x[1], hs.x[2]};
  out.hit = SectionHit{xp, hs.coords, hs.t, hs.grazing};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.flow_jacobian(i, j) = hs.x[3 + 3 * i + j];
  const Point3 f = lorenz_rhs(xp, params_);
  Eigen::Matrix<Real, 3, 1> fv(f[0], f[1], f[2]);
  Eigen::Matrix<Real, 1, 3> nt(0, 0, 1);
  const Mat3 proj = Mat3::Identity() - fv * nt / f[2];
  const Eigen::Matrix<Real, 2, 2> j = chart.reading() * proj * out.flow_jacobian * chart.embedding();
  out.section_jacobian = j.cast<double>();
  return out;
}

std::optional<std::pair<Real, Point3>> LorenzFlow::backward_to_plane(const Point3& p,
                                                                     const SectionChart& chart,
                                                                     Real max_time) const {
  Engine<3> eng(params_, config_, -1, p);
  const Real h = chart.height;
  // A hit exactly at max_time must not be lost to rounding of the endpoint.
  const Real limit = max_time * (1 + 64 * std::numeric_limits<Real>::epsilon()) + 1e-15L;
  Real g_prev = p[2] - h;
  if (g_prev == 0) g_prev = eng.deriv()[2];
  while (eng.time() < limit) {
    const auto rec = eng.step(limit);
    const Real g_new = rec.x1[2] - h;
    if ((g_prev > 0) != (g_new > 0) || g_new == 0) {
      auto [t, x] = eng.locate(rec, h);
      if (chart.contains(chart.to_chart(x))) return std::make_pair(t, x);
    }
    g_prev = g_new != 0 ? g_new : rec.f1[2];
  }
  return std::nullopt;
}

int exit_side(const LorenzFlow& flow, const Point3& p) {
  Engine<3> eng(flow.params(), flow.config(), 1, p);
  const Real limit = flow.config().max_flight_time;
  while (eng.time() < limit) {
    const auto rec = eng.step(limit);
    if (rec.f0[2] < 0 && rec.f1[2] >= 0) return rec.x1[0] >= 0 ? 1 : -1;
  }
  throw NumericalError(ErrorKind::NoReturn, "orbit did not leave the neighbourhood of the origin");
}

SectionChart classical_chart() {
  SectionChart c;
  c.height = 27;
  c.gamma_angle = 2.80315699149581107775L;
  c.u_half = 9.29169756891981225844L;
  c.v_half = 5.06428810137479704827L;
  return c;
}

SectionChart calibrate_chart(const LorenzParams& params, int crossings,
                             const IntegratorConfig& config) {
  params.validate();
  if (crossings < 10) throw ConfigError("chart calibration needs at least 10 crossings");
  LorenzFlow flow(params, config);
  SectionChart chart;
  chart.height = params.r - 1;

  // Direction of the singular line through the center, from the lobe switch
  // on the unit circle.
  auto side_at = [&](Real theta) {
    return exit_side(flow, Point3{std::cos(theta), std::sin(theta), chart.height});
  };
  constexpr int kScan = 64;
  const Real pi = std::numbers::pi_v<Real>;
  Real lo = 0, hi = 0;
  int s_lo = side_at(0);
  bool bracketed = false;
  for (int k = 1; k <= kScan && !bracketed; ++k) {
    const Real th = pi * k / kScan;
    const int s = side_at(th);
    if (s != s_lo) {
      lo = pi * (k - 1) / kScan;
      hi = th;
      bracketed = true;
    }
  }
  if (!bracketed) throw NumericalError(ErrorKind::SingularInput, "could not locate the singular line");
  for (int it = 0; it < 48; ++it) {
    const Real mid = (lo + hi) / 2;
    if (side_at(mid) == s_lo) lo = mid; else hi = mid;
  }
  chart.gamma_angle = (lo + hi) / 2;

  // Bounding box of attractor crossings in the rotated frame.
  SectionChart wide = chart;
  wide.u_half = wide.v_half = 10 * flow.config().trapping_radius;
  Point3 x = flow.integrate(Point3{1, 1, 20}, 50);
  Real amax = 0, bmax = 0;
  for (int n = 0; n < crossings; ++n) {
    const SectionHit hit = flow.flow_to_section(x, wide);
    amax = std::max(amax, std::abs(hit.coords.u) * wide.u_half);
    bmax = std::max(bmax, std::abs(hit.coords.v) * wide.v_half);
    x = hit.point;
  }
  chart.u_half = 1.05L * amax;
  chart.v_half = 1.05L * bmax;
  return chart;
}

ReturnTimeFit fit_return_time(const LorenzFlow& flow, const SectionChart& chart, std::size_t samples,
                              double u_lo, double u_hi, double v, std::uint64_t seed) {
  if (samples < 3 || !(u_lo > 0 && u_lo < u_hi && u_hi <= 1)) throw ConfigError("invalid return-time fit range");
  auto rng = seeded_rng(seed, 0x5e7);
  std::uniform_real_distribution<double> lg(std::log(u_lo), std::log(u_hi));
  ReturnTimeFit out;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = std::exp(lg(rng));
    const Point3 p = chart.from_chart({Real(i % 2 ? -a : a), Real(v)});
    try {
      const SectionHit hit = flow.flow_to_section(p, chart);
      x.push_back(-std::log(a));
      y.push_back(double(hit.flight_time));
    } catch (const NumericalError& e) {
      if (e.kind() != ErrorKind::NoReturn) throw;
      ++out.no_return;
    }
  }
  const auto fit = detail::fit_line(x, y);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r2 = fit.r2;
  out.samples = x.size();
  return out;
}

}  // namespace implorenz
