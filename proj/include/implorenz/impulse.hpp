#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "implorenz/flow_core.hpp"
#include "implorenz/geometric.hpp"
#include "implorenz/section.hpp"

namespace implorenz {

/// Catalog of boundary-vanishing displacement fields d on [-1,1]^2.
enum class DisplacementField { SineBump, Shear, Rotate };

std::string_view to_string(DisplacementField f);
/// Accepts "sine-bump", "shear", "rotate". Throws ConfigError otherwise.
DisplacementField parse_displacement_field(std::string_view name);

template <class T>
std::array<T, 2> displacement(DisplacementField f, T u, T v) {
  using std::sin;
  const T pi = std::numbers::pi_v<T>;
  switch (f) {
    case DisplacementField::SineBump:
      return {sin(pi * u) * (1 - v * v), sin(pi * v) * (1 - u * u)};
    case DisplacementField::Shear:
      return {(1 - u * u) * v, T(0)};
    case DisplacementField::Rotate: {
      const T w = (1 - u * u) * (1 - v * v);
      return {-w * v, w * u};
    }
  }
  return {T(0), T(0)};
}

/// Jacobian of d at (u,v).
Mat2 displacement_jacobian(DisplacementField f, const SectionPoint& p);

struct ImpulseSpec {
  double epsilon = 0.0;
  double s0 = 0.05;
  double t0 = 0.1;
  DisplacementField field = DisplacementField::SineBump;

  /// 0 < s0 <= t0 and 0 <= epsilon <= 0.1.
  void validate() const;
};

/// In-section part of the impulse, h_eps(w) = w + eps d(w). If a point with
/// u != 0 lands exactly on u = 0 it is moved to u = +-1e-15 (sign of w.u) and
/// `nudges` is incremented. Points already on u = 0 are left there.
SectionPoint displace(const SectionPoint& w, const ImpulseSpec& spec, int* nudges = nullptr);
ChartCoords displace(const ChartCoords& w, const ImpulseSpec& spec, int* nudges = nullptr);
Mat2 displace_jacobian(const SectionPoint& w, const ImpulseSpec& spec);

/// Record of an impulsive trajectory truncated at `horizon`. taus[0] = 0 and
/// segment n covers [taus[n], taus[n+1]) (the last one ends at the horizon).
template <class State, class Time = double>
struct ImpulsiveTrajectory {
  std::vector<Time> taus;
  std::vector<State> entries;     ///< state at the start of each segment
  std::vector<SectionPoint> hits; ///< section point ending segment n
  State end_state{};
  Time horizon = 0;
  bool no_return = false;  ///< final segment never reaches the section
  int nudged = 0;
  int grazing_rejected = 0;

  std::size_t impulses() const { return hits.size(); }
};

/// Sampler for trajectory dumps: (time, state, segment index).
template <class State, class Time = double>
using SegmentSampler = std::function<void(Time, const State&, std::size_t)>;

/// Geometric backend: base map h_eps o F, impulse (h_eps(w), s0).
class GeoImpulsiveSystem {
 public:
  GeoImpulsiveSystem(GeoParams geo, ImpulseSpec spec);

  const GeoParams& geo() const { return geo_; }
  const ImpulseSpec& spec() const { return spec_; }

  SuspensionState impulse_apply(const SectionPoint& w, int* nudges = nullptr) const;
  SectionPoint tilde_F(const SectionPoint& z, int* nudges = nullptr) const;
  MapJet tilde_F_jet(const SectionPoint& z) const;
  double roof_Y(const SectionPoint& z) const;

  /// Time to the next section hit from a suspension state.
  double tau1(const SuspensionState& x) const;

  ImpulsiveTrajectory<SuspensionState> trajectory(
      const SuspensionState& x, double horizon, double sample_dt = 0.0,
      const SegmentSampler<SuspensionState>& sampler = {}) const;

  SuspensionState evaluate_Y(const SuspensionState& x, double t) const;

  /// The impulsive semiflow as a suspension (base h_eps o F, reset s0).
  SuspensionFlow semiflow() const;

 private:
  GeoParams geo_;
  ImpulseSpec spec_;
};

/// Lorenz backend: impulse X_{s0}(chart^{-1}(h_eps(w))).
class OdeImpulsiveSystem {
 public:
  OdeImpulsiveSystem(LorenzFlow flow, SectionChart chart, ImpulseSpec spec);

  const LorenzFlow& flow() const { return flow_; }
  const SectionChart& chart() const { return chart_; }
  const ImpulseSpec& spec() const { return spec_; }

  Point3 impulse_apply(const ChartCoords& w, int* nudges = nullptr) const;
  Point3 impulse_apply(const SectionPoint& w, int* nudges = nullptr) const {
    return impulse_apply(ChartCoords{w.u, w.v}, nudges);
  }

  /// First hit time of the underlying flow; throws NoReturn.
  Real tau1(const Point3& x) const;

  ImpulsiveTrajectory<Point3, Real> trajectory(const Point3& x, Real horizon, Real sample_dt = 0,
                                               const SegmentSampler<Point3, Real>& sampler = {}) const;

  Point3 evaluate_Y(const Point3& x, Real t) const;

 private:
  LorenzFlow flow_;
  SectionChart chart_;
  ImpulseSpec spec_;
};

}  // namespace implorenz
