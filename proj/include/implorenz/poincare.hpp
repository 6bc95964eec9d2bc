#pragma once

#include "implorenz/impulse.hpp"

namespace implorenz {

/// Return-map machinery on the geometric backend. Points of the displaced
/// section are suspension states (z, s0).
class GeometricPoincare {
 public:
  explicit GeometricPoincare(GeoImpulsiveSystem sys) : sys_(std::move(sys)) {}

  const GeoImpulsiveSystem& system() const { return sys_; }

  double t_minus(const SuspensionState& x) const;
  SectionPoint psi(const SuspensionState& x) const;
  SuspensionState psi_inv(const SectionPoint& y) const;
  double t_plus(const SectionPoint& y) const;

  SuspensionState F_Y(const SuspensionState& x) const;
  SectionPoint tilde_F_Y(const SectionPoint& z) const;
  MapJet tilde_F_Y_jet(const SectionPoint& z) const;
  double R_Y(const SuspensionState& x) const;

 private:
  GeoImpulsiveSystem sys_;
};

/// The same objects for the Lorenz flow. Displaced-section points are Point3.
class OdePoincare {
 public:
  explicit OdePoincare(OdeImpulsiveSystem sys) : sys_(std::move(sys)) {}

  const OdeImpulsiveSystem& system() const { return sys_; }

  /// Negative time back to the section; NotInFlowBox beyond t0.
  Real t_minus(const Point3& x) const;
  ChartCoords psi(const Point3& x) const;
  /// Inverse of psi via the forward transit time t_plus.
  Point3 psi_inv(const ChartCoords& y) const;
  Real t_plus(const ChartCoords& y) const;

  Point3 F_Y(const Point3& x) const;
  /// h_eps o F with F the unperturbed return map.
  ChartCoords tilde_F_Y(const ChartCoords& z) const;
  MapJet tilde_F_Y_jet(const SectionPoint& z) const;
  /// Unperturbed return map F and its flight time.
  SectionHit F(const ChartCoords& z) const;
  /// R o psi + t_minus.
  Real R_Y(const Point3& x) const;

 private:
  void require_regular(const ChartCoords& z) const;

  OdeImpulsiveSystem sys_;
};

}  // namespace implorenz
