#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>

#include <Eigen/Core>

#include "implorenz/section.hpp"

namespace implorenz {

// Long chaotic arcs amplify rounding by ~e^{0.9 t}; the ODE backend therefore
// carries its state in extended precision.
using Real = long double;
using Point3 = std::array<Real, 3>;
using Mat3 = Eigen::Matrix<Real, 3, 3>;

struct LorenzParams {
  Real sigma = 10;
  Real r = 28;
  Real b = Real(8) / 3;

  /// Throws ConfigError unless sigma > 0, r > 1, b > 0.
  void validate() const;
};

struct IntegratorConfig {
  Real abs_tol = 1e-16L;
  Real rel_tol = 1e-16L;
  Real max_step = 0.02L;
  Real max_flight_time = 50;
  Real trapping_radius = 100;

  void validate() const;
};

/// Settings used when calibrating a chart: the bounding box only needs a few
/// significant digits, so a looser integrator keeps it cheap.
IntegratorConfig calibration_integrator();

Point3 lorenz_rhs(const Point3& p, const LorenzParams& params);
Mat3 lorenz_jacobian(const Point3& p, const LorenzParams& params);
Real norm(const Point3& p);
Real distance(const Point3& a, const Point3& b);

/// Chart coordinates in extended precision (same meaning as SectionPoint).
struct ChartCoords {
  Real u = 0;
  Real v = 0;

  SectionPoint section() const {
    return {static_cast<double>(u), static_cast<double>(v)};
  }
};

/// Affine chart of the rectangle on the plane x3 = r - 1. The u axis is normal
/// to the tangent of the singular curve at the plane's center (0,0,r-1), which
/// lies on the z axis and therefore on the stable manifold of the origin.
struct SectionChart {
  Real height = 27;
  Real gamma_angle = 0;  ///< direction of the singular line in the (x1,x2) plane
  Real u_half = 1;
  Real v_half = 1;
  int crossing_sign = -1;  ///< accepted crossings have sign(dx3/dt) == crossing_sign

  void validate() const;

  ChartCoords to_chart(const Point3& p) const;
  Point3 from_chart(const ChartCoords& c) const;
  Point3 from_section(const SectionPoint& s) const {
    return from_chart({s.u, s.v});
  }
  bool contains(const ChartCoords& c) const {
    return c.u >= -1 && c.u <= 1 && c.v >= -1 && c.v <= 1;
  }

  /// d(u,v)/d(x1,x2) as a 2x3 matrix (the x3 column is zero).
  Eigen::Matrix<Real, 2, 3> reading() const;
  /// d(x1,x2,x3)/d(u,v).
  Eigen::Matrix<Real, 3, 2> embedding() const;
};

struct SectionHit {
  Point3 point;
  ChartCoords coords;
  Real flight_time = 0;
  int grazing_rejected = 0;
};

struct SectionHitWithJacobian {
  SectionHit hit;
  Mat3 flow_jacobian;  ///< d X_T / dx at the start point, T = flight time
  Mat2 section_jacobian;  ///< d(u',v')/d(u,v) of the return map
};

/// Called with (t, state) at t = 0, dt, 2dt, ... and at the final time.
using TraceSampler = std::function<void(Real, const Point3&)>;

/// Result of a bounded search for the next section hit.
struct SectionSearch {
  std::optional<SectionHit> hit;  ///< empty if the horizon came first
  Point3 end_state{};             ///< state at the horizon when no hit
  int grazing_rejected = 0;
};

class LorenzFlow {
 public:
  LorenzFlow(LorenzParams params, IntegratorConfig config);

  const LorenzParams& params() const { return params_; }
  const IntegratorConfig& config() const { return config_; }

  Point3 rhs(const Point3& p) const { return lorenz_rhs(p, params_); }

  /// X_t(p) for t >= 0.
  Point3 integrate(const Point3& p, Real t) const;
  /// X_{-t}(p) for t >= 0 (reversed field).
  Point3 integrate_backward(const Point3& p, Real t) const;

  /// Samples X_t(p) on [0, t] every `sample_dt` and returns X_t(p).
  Point3 trace(const Point3& p, Real t, Real sample_dt, const TraceSampler& sampler) const;

  /// First t > 0 with X_t(p) on the section (correct direction, inside the
  /// rectangle). Throws NoReturn past max_flight_time.
  SectionHit flow_to_section(const Point3& p, const SectionChart& chart) const;

  /// As flow_to_section but stops at `horizon` if that comes first. Throws
  /// NoReturn only when max_flight_time < horizon is exceeded.
  SectionSearch search_section(const Point3& p, const SectionChart& chart, Real horizon,
                               Real sample_dt = 0, const TraceSampler& sampler = {}) const;

  /// Return to the section with the variational equations carried along.
  SectionHitWithJacobian flow_to_section_with_jacobian(const Point3& p,
                                                       const SectionChart& chart) const;

  /// Smallest t in (0, max_time] with X_{-t}(p) on the plane inside the
  /// rectangle (either direction). Empty if none.
  std::optional<std::pair<Real, Point3>> backward_to_plane(const Point3& p,
                                                           const SectionChart& chart,
                                                           Real max_time) const;

 private:
  LorenzParams params_;
  IntegratorConfig config_;
};

/// Which lobe the orbit of p visits first: sign of x1 when x3 reaches its
/// first local minimum. Flips across the stable manifold of the origin.
int exit_side(const LorenzFlow& flow, const Point3& p);

/// Chart for the classical parameters (sigma=10, r=28, b=8/3) as produced
/// by calibrate_chart with 1e5 crossings.
SectionChart classical_chart();

/// Locates the singular direction by bisection on `exit_side` and sizes the
/// rectangle as the 5%-inflated bounding box of `crossings` attractor hits.
SectionChart calibrate_chart(const LorenzParams& params, int crossings = 100000,
                             const IntegratorConfig& config = calibration_integrator());

/// Return-time log law on the ODE backend: |u| log-uniform in [u_lo, u_hi],
/// v fixed at `v`, alternating sides of the singular line.
ReturnTimeFit fit_return_time(const LorenzFlow& flow, const SectionChart& chart,
                              std::size_t samples = 200, double u_lo = 1e-6, double u_hi = 1e-2,
                              double v = 0.0, std::uint64_t seed = 1);

}  // namespace implorenz
