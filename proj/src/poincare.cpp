#include "implorenz/poincare.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "implorenz/errors.hpp"

namespace implorenz {

namespace {

void require_regular(double u) {
  if (std::abs(u) < kSingularGuard)
    throw NumericalError(ErrorKind::SingularInput, "point inside the guard band of u = 0");
}

}  // namespace

// ---------------------------------------------------------------- geometric

double GeometricPoincare::t_minus(const SuspensionState& x) const {
  if (!(x.height > 0) || x.height > sys_.spec().t0)
    throw NumericalError(ErrorKind::NotInFlowBox, "state is not inside the flow box below the section");
  return -x.height;
}

SectionPoint GeometricPoincare::psi(const SuspensionState& x) const {
  t_minus(x);
  return x.base;
}

double GeometricPoincare::t_plus(const SectionPoint& y) const {
  // The displaced section sits at constant height s0 above the section.
  (void)y;
  return sys_.spec().s0;
}

SuspensionState GeometricPoincare::psi_inv(const SectionPoint& y) const {
  return {y, t_plus(y)};
}

SuspensionState GeometricPoincare::F_Y(const SuspensionState& x) const {
  const SectionPoint z = psi(x);
  require_regular(z.u);
  return sys_.impulse_apply(geo_F(z, sys_.geo()));
}

SectionPoint GeometricPoincare::tilde_F_Y(const SectionPoint& z) const {
  require_regular(z.u);
  return sys_.tilde_F(z);
}

MapJet GeometricPoincare::tilde_F_Y_jet(const SectionPoint& z) const {
  require_regular(z.u);
  return sys_.tilde_F_jet(z);
}

double GeometricPoincare::R_Y(const SuspensionState& x) const {
  const SectionPoint z = psi(x);
  require_regular(z.u);
  return geo_R(z, sys_.geo()) + t_minus(x);
}

// ---------------------------------------------------------------------- ODE

void OdePoincare::require_regular(const ChartCoords& z) const {
  implorenz::require_regular(static_cast<double>(z.u));
}

Real OdePoincare::t_minus(const Point3& x) const {
  const auto back = sys_.flow().backward_to_plane(x, sys_.chart(), sys_.spec().t0);
  if (!back)
    throw NumericalError(ErrorKind::NotInFlowBox, "backward flow did not reach the section within t0");
  return -back->first;
}

ChartCoords OdePoincare::psi(const Point3& x) const {
  const auto back = sys_.flow().backward_to_plane(x, sys_.chart(), sys_.spec().t0);
  if (!back)
    throw NumericalError(ErrorKind::NotInFlowBox, "backward flow did not reach the section within t0");
  return sys_.chart().to_chart(back->second);
}

Real OdePoincare::t_plus(const ChartCoords& y) const {
  // Smallest t > 0 with X_t(y) on the displaced section, i.e. with transit
  // time back to the section equal to the drop time.
  const auto& flow = sys_.flow();
  const Point3 p = sys_.chart().from_chart(y);
  const Real s0 = sys_.spec().s0;
  const Real t0 = sys_.spec().t0;
  auto g = [&](Real t) { return -t_minus(flow.integrate(p, t)) - s0; };
  Real a = s0 / 4, b = t0;
  Real ga = g(a), gb = g(b);
  if (gb == 0) return b;
  if (!(ga < 0 && gb > 0))
    throw NumericalError(ErrorKind::NotInFlowBox, "forward transit to the displaced section not bracketed");
  std::uintmax_t iters = 100;
  auto tol = boost::math::tools::eps_tolerance<Real>(std::numeric_limits<Real>::digits - 3);
  const auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
  return (r.first + r.second) / 2;
}

Point3 OdePoincare::psi_inv(const ChartCoords& y) const {
  return sys_.flow().integrate(sys_.chart().from_chart(y), t_plus(y));
}

SectionHit OdePoincare::F(const ChartCoords& z) const {
  require_regular(z);
  return sys_.flow().flow_to_section(sys_.chart().from_chart(z), sys_.chart());
}

Point3 OdePoincare::F_Y(const Point3& x) const {
  require_regular(psi(x));
  const SectionHit hit = sys_.flow().flow_to_section(x, sys_.chart());
  return sys_.impulse_apply(hit.coords);
}

ChartCoords OdePoincare::tilde_F_Y(const ChartCoords& z) const {
  return displace(F(z).coords, sys_.spec());
}

MapJet OdePoincare::tilde_F_Y_jet(const SectionPoint& z) const {
  const ChartCoords zc{z.u, z.v};
  require_regular(zc);
  const auto j = sys_.flow().flow_to_section_with_jacobian(sys_.chart().from_chart(zc), sys_.chart());
  const SectionPoint w = j.hit.coords.section();
  MapJet out;
  out.image = displace(j.hit.coords, sys_.spec()).section();
  out.jacobian = displace_jacobian(w, sys_.spec()) * j.section_jacobian;
  return out;
}

Real OdePoincare::R_Y(const Point3& x) const {
  const ChartCoords z = psi(x);
  return F(z).flight_time + t_minus(x);
}

}  // namespace implorenz
