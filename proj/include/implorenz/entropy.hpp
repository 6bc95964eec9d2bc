#pragma once

#include <functional>
#include <vector>

#include "implorenz/geometric.hpp"
#include "implorenz/measures.hpp"
#include "implorenz/section.hpp"

namespace implorenz {

/// Cone of directions within `half_angle_deg` of the u axis.
struct UnstableCone {
  double half_angle_deg = 45.0;
  bool contains(const Vec2& w) const;
};

struct TangentFrame {
  SectionPoint base;
  Vec2 dir{1.0, 0.0};
  double log_sum = 0.0;
  std::size_t steps = 0;
};

struct TangentStep {
  TangentFrame frame;
  double log_stretch = 0.0;
  bool in_cone = true;
};

/// Pushes the unit vector by the differential, renormalizes and accumulates
/// the log of the Euclidean stretch.
TangentStep tangent_step(const TangentFrame& frame, const SectionJetMap& map,
                         const UnstableCone& cone = {});

struct EntropySettings {
  OrbitSettings orbits;
  std::size_t align = 50;
  UnstableCone cone;
};

struct EntropyReport {
  double epsilon = 0.0;
  double h_map = 0.0;
  double h_map_stderr = 0.0;
  double mean_roof = 0.0;
  double mean_roof_stderr = 0.0;
  double h_flow = 0.0;
  double h_flow_stderr = 0.0;
  std::size_t steps = 0;
  std::size_t cone_escapes = 0;
  std::size_t failed_seeds = 0;
  // Per-seed sums, for paired comparisons between runs with common seeds.
  std::vector<std::size_t> seeds;
  std::vector<double> log_sums;
  std::vector<double> roof_sums;
  std::vector<double> counts;
};

/// Abramov step: h_flow = h_map / mean_roof with errors combined in
/// quadrature. Throws DegenerateRoof if mean_roof <= 0.
EntropyReport entropy_flow(double h_map, double h_map_stderr, double mean_roof,
                           double mean_roof_stderr);

/// Entropy of the map from aligned tangent frames along random orbits, with
/// the mean roof taken along the same orbits.
EntropyReport entropy_map(const SectionJetMap& map, const std::function<double(const SectionPoint&)>& roof,
                          const EntropySettings& settings);

/// Standard error of h_flow(a) - h_flow(b), paired over common seeds.
double h_flow_difference_stderr(const EntropyReport& a, const EntropyReport& b);

struct OracleResult {
  double h = 0.0;
  double h_stderr = 0.0;
  double mean_neg_log_u = 0.0;   ///< E[-ln|u|] under the 1-D invariant measure
  double mean_roof = 0.0;        ///< r0 + E[-ln|u|]/lambda1
  std::size_t n = 0;
};

/// Birkhoff average of log|f1d'| along one generic orbit of the 1-D map,
/// standard error by batch means.
OracleResult quotient_entropy_oracle(const GeoParams& p, std::size_t n, std::uint64_t seed,
                                     std::size_t burn_in = 1000);

}  // namespace implorenz
