#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "implorenz/entropy.hpp"
#include "implorenz/measures.hpp"

namespace implorenz {

/// Everything the sweep needs at one epsilon. `arc` owns the system; the
/// other callables may capture it.
struct SweepPoint {
  std::shared_ptr<const ArcModel> arc;
  SectionJetMap jet;
};
using SweepFactory = std::function<SweepPoint(double epsilon)>;

SweepFactory geometric_sweep_factory(const GeoParams& geo, const ImpulseSpec& base);
SweepFactory ode_sweep_factory(const OdeImpulsiveSystem& base, double arc_dt = 0.01);

struct SweepSettings {
  std::vector<double> epsilons{0.1, 0.05, 0.02, 0.01, 0.005, 0.0};
  OrbitSettings orbits;   ///< shared by every epsilon (common random numbers)
  std::size_t align = 50;
  UnstableCone cone;
  int degree = 4;
};

struct SweepRow {
  double epsilon = 0;
  bool ok = false;
  std::string error;
  DistanceEstimate distance;  ///< flow-family weak* proxy distance to epsilon = 0
  EntropyReport entropy;
  double dh = 0;              ///< h_flow(eps) - h_flow(0)
  double dh_stderr = 0;       ///< paired over common seeds
  LiftResult lift;
};

struct MonotoneCheck {
  bool pass = false;
  std::vector<double> margins;  ///< per consecutive pair: value_prev + 2 se - value_next
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< epsilons sorted decreasing, 0 last
  MonotoneCheck distance_monotone;
  MonotoneCheck entropy_monotone;
  double distance_ratio = 0;   ///< d(smallest positive eps) / d(largest eps)
};

/// Runs the lift and entropy estimators at every epsilon (0 is added if
/// missing) and compares each against epsilon = 0. Failures at one epsilon
/// are recorded in its row and the sweep continues.
SweepResult stability_sweep(const SweepFactory& factory, const SweepSettings& settings);

}  // namespace implorenz
