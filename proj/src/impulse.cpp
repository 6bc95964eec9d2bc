#include "implorenz/impulse.hpp"

#include <cmath>
#include <limits>

#include "implorenz/errors.hpp"

namespace implorenz {

std::string_view to_string(DisplacementField f) {
  switch (f) {
    case DisplacementField::SineBump: return "sine-bump";
    case DisplacementField::Shear: return "shear";
    case DisplacementField::Rotate: return "rotate";
  }
  return "unknown";
}

DisplacementField parse_displacement_field(std::string_view name) {
  if (name == "sine-bump") return DisplacementField::SineBump;
  if (name == "shear") return DisplacementField::Shear;
  if (name == "rotate") return DisplacementField::Rotate;
  throw ConfigError("unknown displacement field '" + std::string(name) + "'");
}

Mat2 displacement_jacobian(DisplacementField f, const SectionPoint& p) {
  const double pi = std::numbers::pi;
  const double u = p.u, v = p.v;
  Mat2 j;
  switch (f) {
    case DisplacementField::SineBump:
      j << pi * std::cos(pi * u) * (1 - v * v), -2 * v * std::sin(pi * u),
          -2 * u * std::sin(pi * v), pi * std::cos(pi * v) * (1 - u * u);
      break;
    case DisplacementField::Shear:
      j << -2 * u * v, 1 - u * u, 0, 0;
      break;
    case DisplacementField::Rotate: {
      const double a = 1 - u * u, b = 1 - v * v;
      // d = (-a b v, a b u)
      j << 2 * u * b * v, -a * (b - 2 * v * v), a * b - 2 * u * u * b, -2 * a * v * u;
      break;
    }
  }
  return j;
}

void ImpulseSpec::validate() const {
  if (!(s0 > 0) || !(s0 <= t0)) throw ConfigError("impulse needs 0 < s0 <= t0");
  if (!(epsilon >= 0) || !(epsilon <= 0.1)) throw ConfigError("impulse needs 0 <= epsilon <= 0.1");
}

namespace {

template <class T>
void displace_in_place(T& u, T& v, const ImpulseSpec& spec, int* nudges) {
  const T u_prev = u;
  if (spec.epsilon != 0) {
    const auto d = displacement<T>(spec.field, u, v);
    u += T(spec.epsilon) * d[0];
    v += T(spec.epsilon) * d[1];
    if (!(std::abs(u) <= 1 && std::abs(v) <= 1))
      throw NumericalError(ErrorKind::OutOfSection, "displaced point left the section square");
  }
  if (u == 0 && u_prev != 0) {
    u = std::copysign(T(1e-15), u_prev);
    if (nudges) ++*nudges;
  }
}

}  // namespace

SectionPoint displace(const SectionPoint& w, const ImpulseSpec& spec, int* nudges) {
  SectionPoint out = w;
  displace_in_place(out.u, out.v, spec, nudges);
  return out;
}

ChartCoords displace(const ChartCoords& w, const ImpulseSpec& spec, int* nudges) {
  ChartCoords out = w;
  displace_in_place(out.u, out.v, spec, nudges);
  return out;
}

Mat2 displace_jacobian(const SectionPoint& w, const ImpulseSpec& spec) {
  Mat2 j = Mat2::Identity();
  if (spec.epsilon != 0) j += spec.epsilon * displacement_jacobian(spec.field, w);
  return j;
}

// ---------------------------------------------------------------- geometric

GeoImpulsiveSystem::GeoImpulsiveSystem(GeoParams geo, ImpulseSpec spec)
    : geo_(geo), spec_(spec) {
  spec_.validate();
  if (!(geo_.r0 > spec_.s0)) throw ConfigError("geometric roof floor r0 must exceed s0");
}

SuspensionState GeoImpulsiveSystem::impulse_apply(const SectionPoint& w, int* nudges) const {
  return {displace(w, spec_, nudges), spec_.s0};
}

SectionPoint GeoImpulsiveSystem::tilde_F(const SectionPoint& z, int* nudges) const {
  return displace(geo_F(z, geo_), spec_, nudges);
}

MapJet GeoImpulsiveSystem::tilde_F_jet(const SectionPoint& z) const {
  MapJet j = geo_F_jet(z, geo_);
  const Mat2 dh = displace_jacobian(j.image, spec_);
  j.image = displace(j.image, spec_);
  j.jacobian = dh * j.jacobian;
  return j;
}

double GeoImpulsiveSystem::roof_Y(const SectionPoint& z) const {
  return geo_R(z, geo_) - spec_.s0;
}

double GeoImpulsiveSystem::tau1(const SuspensionState& x) const {
  return geo_R(x.base, geo_) - x.height;
}

SuspensionFlow GeoImpulsiveSystem::semiflow() const {
  return SuspensionFlow([*this](const SectionPoint& z) { return tilde_F(z); },
                        [g = geo_](const SectionPoint& z) { return geo_R(z, g); }, spec_.s0);
}

ImpulsiveTrajectory<SuspensionState> GeoImpulsiveSystem::trajectory(
    const SuspensionState& x, double horizon, double sample_dt,
    const SegmentSampler<SuspensionState>& sampler) const {
  if (!(horizon > 0)) throw ConfigError("trajectory horizon must be positive");
  ImpulsiveTrajectory<SuspensionState> tr;
  tr.horizon = horizon;
  tr.taus.push_back(0.0);
  tr.entries.push_back(x);
  SuspensionState s = x;
  double t = 0.0;
  double next_sample = 0.0;
  for (;;) {
    const std::size_t seg = tr.entries.size() - 1;
    const double hit_time = t + tau1(s);
    const double stop = std::min(hit_time, horizon);
    if (sampler && sample_dt > 0) {
      while (next_sample < stop) {
        sampler(next_sample, {s.base, s.height + (next_sample - t)}, seg);
        next_sample += sample_dt;
      }
    }
    if (hit_time > horizon) {
      tr.end_state = {s.base, s.height + (horizon - t)};
      if (sampler) sampler(horizon, tr.end_state, seg);
      return tr;
    }
    const SectionPoint w = geo_F(s.base, geo_);
    tr.hits.push_back(w);
    s = impulse_apply(w, &tr.nudged);
    t = hit_time;
    tr.taus.push_back(t);
    tr.entries.push_back(s);
  }
}

SuspensionState GeoImpulsiveSystem::evaluate_Y(const SuspensionState& x, double t) const {
  return semiflow().flow(x, t);
}

// ---------------------------------------------------------------------- ODE

OdeImpulsiveSystem::OdeImpulsiveSystem(LorenzFlow flow, SectionChart chart, ImpulseSpec spec)
    : flow_(std::move(flow)), chart_(chart), spec_(spec) {
  spec_.validate();
  chart_.validate();
}

Point3 OdeImpulsiveSystem::impulse_apply(const ChartCoords& w, int* nudges) const {
  const ChartCoords h = displace(w, spec_, nudges);
  return flow_.integrate(chart_.from_chart(h), spec_.s0);
}

Real OdeImpulsiveSystem::tau1(const Point3& x) const {
  return flow_.flow_to_section(x, chart_).flight_time;
}

ImpulsiveTrajectory<Point3, Real> OdeImpulsiveSystem::trajectory(
    const Point3& x, Real horizon, Real sample_dt, const SegmentSampler<Point3, Real>& sampler) const {
  if (!(horizon > 0)) throw ConfigError("trajectory horizon must be positive");
  ImpulsiveTrajectory<Point3, Real> tr;
  tr.horizon = horizon;
  tr.taus.push_back(0);
  tr.entries.push_back(x);
  Point3 s = x;
  Real t = 0;
  for (;;) {
    const std::size_t seg = tr.entries.size() - 1;
    TraceSampler local;
    if (sampler) {
      local = [&, t0 = t](Real tt, const Point3& p) {
        if (t0 + tt < horizon || tt == 0) sampler(t0 + tt, p, seg);
      };
    }
    SectionSearch found;
    try {
      found = flow_.search_section(s, chart_, horizon - t, sample_dt, local);
    } catch (const NumericalError& e) {
      if (e.kind() != ErrorKind::NoReturn) throw;
      tr.no_return = true;
      tr.end_state = s;
      return tr;
    }
    tr.grazing_rejected += found.grazing_rejected;
    if (!found.hit) {
      tr.end_state = found.end_state;
      if (sampler) sampler(horizon, found.end_state, seg);
      return tr;
    }
    const SectionHit& hit = *found.hit;
    tr.hits.push_back(hit.coords.section());
    t += hit.flight_time;
    s = impulse_apply(hit.coords, &tr.nudged);
    tr.taus.push_back(t);
    tr.entries.push_back(s);
    if (t >= horizon) {
      tr.end_state = s;
      return tr;
    }
  }
}

Point3 OdeImpulsiveSystem::evaluate_Y(const Point3& x, Real t) const {
  if (t < 0) throw ConfigError("evaluate_Y needs t >= 0");
  if (t == 0) return x;
  const auto tr = trajectory(x, t);
  if (tr.no_return)
    throw NumericalError(ErrorKind::NoReturn, "impulsive trajectory reached the stable manifold");
  return tr.end_state;
}

}  // namespace implorenz
