#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Core>

namespace implorenz {

/// Normalized coordinates on the cross-section, (u,v) in [-1,1]^2.
/// The singular line is {u = 0}; D1 = {u > 0}, D2 = {u < 0}.
struct SectionPoint {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const SectionPoint&, const SectionPoint&) = default;
};

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Image of a section map together with its differential at the source.
struct MapJet {
  SectionPoint image;
  Mat2 jacobian;
};

using SectionMap = std::function<SectionPoint(const SectionPoint&)>;
using SectionJetMap = std::function<MapJet(const SectionPoint&)>;

/// Points with |u| below this are treated as lying on the singular line.
inline constexpr double kSingularGuard = 1e-12;

inline bool in_square(const SectionPoint& p) {
  return std::abs(p.u) <= 1.0 && std::abs(p.v) <= 1.0;
}

/// Least-squares fit of return time against -ln|u| for points near u = 0.
struct ReturnTimeFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t samples = 0;
  std::size_t no_return = 0;  ///< samples dropped because the orbit never came back
};

inline double sup_distance(const SectionPoint& a, const SectionPoint& b) {
  return std::max(std::abs(a.u - b.u), std::abs(a.v - b.v));
}

}  // namespace implorenz
