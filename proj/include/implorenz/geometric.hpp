#pragma once

#include <cstdint>
#include <functional>

#include "implorenz/section.hpp"

namespace implorenz {

/// Parameters of the closed-form geometric Lorenz map
///   F(u,v) = (sign(u)(c|u|^alpha - 1), eta v |u|^beta + delta0 sign(u)),
///   R(u,v) = r0 - ln|u| / lambda1.
struct GeoParams {
  double alpha = 0.75;
  double c = 2.0;
  double eta = 0.3;
  double beta = 1.5;
  double delta0 = 0.5;
  double lambda1 = 1.0;
  double r0 = 1.0;

  /// Throws ConfigError if the map would leave the square or fail to expand.
  void validate() const;
};

/// Floor applied to |u| before logs and powers.
inline constexpr double kAbsUFloor = 1e-300;

double f1d(double u, const GeoParams& p);
double f1d_prime(double u, const GeoParams& p);

/// The evaluators below do not validate `p`, so deliberately broken
/// parameter sets can be fed to the condition checkers.
SectionPoint geo_F(const SectionPoint& z, const GeoParams& p);
MapJet geo_F_jet(const SectionPoint& z, const GeoParams& p);
double geo_R(const SectionPoint& z, const GeoParams& p);

/// Same fit for geo_R; the slope is 1/lambda1 exactly.
ReturnTimeFit fit_return_time(const GeoParams& p, std::size_t samples = 200, double u_lo = 1e-6,
                              double u_hi = 1e-2, std::uint64_t seed = 1);

struct SuspensionState {
  SectionPoint base;
  double height = 0.0;

  friend bool operator==(const SuspensionState&, const SuspensionState&) = default;
};

/// Suspension semiflow over a base map. On reaching the roof the base is
/// replaced by base_map(base) and the height restarts at `reset`, so the time
/// between roof crossings is roof(base) - reset.
class SuspensionFlow {
 public:
  SuspensionFlow(SectionMap base_map, std::function<double(const SectionPoint&)> roof,
                 double reset = 0.0);

  /// Plain geometric Lorenz suspension (reset 0).
  static SuspensionFlow geometric(const GeoParams& p);

  SuspensionState flow(SuspensionState s, double t) const;
  SuspensionState flow(SuspensionState s, double t, long& crossings) const;

  double roof(const SectionPoint& z) const { return roof_(z); }
  SectionPoint base_map(const SectionPoint& z) const { return map_(z); }
  double reset() const { return reset_; }

 private:
  SectionMap map_;
  std::function<double(const SectionPoint&)> roof_;
  double reset_;
};

}  // namespace implorenz
