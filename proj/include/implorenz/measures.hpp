#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "implorenz/families.hpp"
#include "implorenz/impulse.hpp"
#include "implorenz/section.hpp"

namespace implorenz {

struct OrbitSettings {
  std::size_t seeds = 200;
  std::size_t burn_in = 1000;
  std::size_t length = 100000;  ///< recorded samples per seed
  std::size_t stride = 1;       ///< map iterations between recorded samples
  std::uint64_t master_seed = 1;
  std::size_t first_seed = 0;   ///< seed indices are first_seed .. first_seed + seeds - 1
  int workers = 1;

  void validate() const;
};

struct SeedStatus {
  std::size_t index = 0;
  bool ok = true;
  std::size_t samples = 0;
  std::string error;
};

/// Uniform start on the square outside the singular guard band.
SectionPoint random_start(std::uint64_t master, std::size_t seed_index);

/// Iterates `map` from random starts and calls visit(slot, z) for every
/// recorded sample (slot = position of the seed within this run). Calls for a
/// given slot come from one thread, in orbit order. Seeds that fail mid-orbit
/// are flagged; samples already visited stay with their slot.
std::vector<SeedStatus> sample_orbits(const SectionMap& map, const OrbitSettings& settings,
                                      const std::function<void(std::size_t, const SectionPoint&)>& visit);

struct BirkhoffResult {
  std::vector<double> values;
  std::size_t completed = 0;
  bool truncated = false;
  std::string error;
};

/// Time averages of the family along n iterates of x0 after burn_in.
BirkhoffResult birkhoff_map_average(const SectionMap& map, const SectionPoint& x0, std::size_t n,
                                    const TestFamily& fam, std::size_t burn_in = 0);

struct EmpiricalMeasure {
  std::vector<SectionPoint> points;
  std::vector<double> weights;
  std::vector<std::size_t> seed_offsets;  ///< start of each surviving seed's block
  std::vector<SeedStatus> seeds;
  std::string backend;
  double epsilon = 0.0;
  std::size_t burn_in = 0;
  std::size_t length = 0;
  std::size_t stride = 1;

  std::size_t size() const { return points.size(); }
  std::size_t failed_seeds() const;
};

/// Pooled orbit samples; failed seeds are excluded.
EmpiricalMeasure empirical_invariant_measure(const SectionMap& map, const OrbitSettings& settings);

/// A family evaluated against one measure. Distances require equal ids.
struct MeasureEvaluation {
  std::string family;
  std::vector<double> values;
  std::vector<double> stderrs;
  /// Per-seed linearized contributions (seed ids in `seeds`); lets two
  /// evaluations driven by the same seeds report a paired standard error.
  std::vector<std::size_t> seeds;
  std::vector<std::vector<double>> influence;
};

MeasureEvaluation integrate(const EmpiricalMeasure& mu, const TestFamily& fam);

/// max_j |m1_j - m2_j|; throws FamilyMismatch for different families.
double weak_star_distance(const MeasureEvaluation& m1, const MeasureEvaluation& m2);

/// Standard error of m1_j - m2_j: paired over common seeds when both carry
/// influences for the same seed ids, otherwise combined in quadrature.
double difference_stderr(const MeasureEvaluation& m1, const MeasureEvaluation& m2, std::size_t j);

struct DistanceEstimate {
  double distance = 0.0;
  std::size_t argmax = 0;
  double standard_error = 0.0;  ///< of the maximizing component
};
DistanceEstimate weak_star_estimate(const MeasureEvaluation& m1, const MeasureEvaluation& m2);

/// max_j |int phi_j o map dmu - int phi_j dmu|.
double pushforward_defect(const EmpiricalMeasure& mu, const SectionMap& map, const TestFamily& fam);

// ------------------------------------------------------------------ basins

struct SeedAverages {
  std::vector<std::size_t> seed_index;
  std::vector<std::vector<double>> rows;
  std::size_t failed = 0;
};

/// Per-seed Birkhoff averages of the section family.
SeedAverages per_seed_averages(const SectionMap& map, const TestFamily& fam,
                               const OrbitSettings& settings);

struct Cluster {
  std::vector<std::size_t> members;  ///< row indices
  std::vector<double> centroid;
  double spread = 0.0;       ///< max sup-distance member to centroid
  double separation = std::numeric_limits<double>::infinity();  ///< to the nearest other centroid
  double fraction = 0.0;
  bool accepted = false;
};

struct BasinReport {
  std::size_t s = 0;  ///< number of accepted clusters
  std::vector<Cluster> clusters;  ///< sorted by size, largest first
  std::size_t seeds = 0;
  std::size_t failed_seeds = 0;
  double coverage = 0.0;  ///< fraction of surviving seeds in accepted clusters
  double tol = 0.05;
};

/// Single-linkage clustering with sup-norm cutoff `tol`. Requires >= 2 rows.
BasinReport cluster_basins(const std::vector<std::vector<double>>& rows, double tol = 0.05,
                           std::size_t failed_seeds = 0);

struct BasinProbe {
  BasinReport base;
  BasinReport doubled;
  bool stable = false;
};

/// Clusters `settings.seeds` seeds and then twice as many (same master seed,
/// indices reused) and compares the counts.
BasinProbe basin_probe(const SectionMap& map, const TestFamily& fam, const OrbitSettings& settings,
                       double tol = 0.05);

// ------------------------------------------------------ suspension lift

/// Flow arcs above the section used by the suspension lift. A section point z
/// stands for the displaced-section point psi^{-1}(z); time 0 is that point.
class ArcModel {
 public:
  virtual ~ArcModel() = default;
  virtual const FlowFamily& family() const = 0;
  /// Return time R_Y at psi^{-1}(z).
  virtual double roof(const SectionPoint& z) const = 0;
  /// The induced return map on the section.
  virtual SectionPoint next(const SectionPoint& z) const = 0;
  /// Adds int_a^b phi_k(Y_t(psi^{-1} z)) dt into out, 0 <= a <= b.
  virtual void integrate(const SectionPoint& z, double a, double b, std::span<double> out) const = 0;
};

class GeoArcModel : public ArcModel {
 public:
  GeoArcModel(GeoImpulsiveSystem sys, FlowFamily fam);
  const FlowFamily& family() const override { return fam_; }
  double roof(const SectionPoint& z) const override;
  SectionPoint next(const SectionPoint& z) const override;
  void integrate(const SectionPoint& z, double a, double b, std::span<double> out) const override;

  /// Same integral from an arbitrary suspension state.
  void integrate_state(const SuspensionState& x, double a, double b, std::span<double> out) const;

 private:
  GeoImpulsiveSystem sys_;
  FlowFamily fam_;
};

/// Trapezoid quadrature along Lorenz arcs sampled every `dt` (<= 0.01).
class OdeArcModel : public ArcModel {
 public:
  OdeArcModel(OdeImpulsiveSystem sys, FlowFamily fam, double dt = 0.01);
  const FlowFamily& family() const override { return fam_; }
  double roof(const SectionPoint& z) const override;
  SectionPoint next(const SectionPoint& z) const override;
  void integrate(const SectionPoint& z, double a, double b, std::span<double> out) const override;

  void integrate_state(const Point3& x, double a, double b, std::span<double> out) const;

 private:
  OdeImpulsiveSystem sys_;
  FlowFamily fam_;
  double dt_;
};

struct LiftResult {
  MeasureEvaluation nu;      ///< nu_Y(phi) for the flow family
  double mean_roof = 0.0;
  double mean_roof_stderr = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;   ///< singular samples
};

/// Monte-Carlo evaluation of the lifted flow measure.
LiftResult suspension_lift(const EmpiricalMeasure& mu, const ArcModel& model, int workers = 1);

struct InvarianceDefect {
  double max_defect = 0.0;
  std::size_t argmax = 0;
  std::vector<double> defects;  ///< nu(phi o Y_s) - nu(phi), signed
  std::vector<double> stderrs;
  std::size_t samples = 0;
};

/// max over the family of |nu_Y(phi o Y_s) - nu_Y(phi)|.
InvarianceDefect flow_invariance_defect(const EmpiricalMeasure& mu, const ArcModel& model,
                                        double s, int workers = 1);

/// Same quantities computed on the fly from orbits of model.next(), without
/// storing the samples. s = 0 skips the defect.
struct StreamingLift {
  LiftResult lift;
  InvarianceDefect defect;
  std::vector<SeedStatus> seeds;
};
StreamingLift streaming_lift(const ArcModel& model, const OrbitSettings& settings, double s);

struct FlowAverage {
  std::vector<double> values;
  std::vector<double> stderrs;
  std::size_t trajectories = 0;
};

/// (1/T) int_0^T phi(Y_t(psi^{-1} z)) dt for a single start.
std::vector<double> birkhoff_flow_average(const ArcModel& model, const SectionPoint& z, double T);

/// Mean and standard error over independent starts (seed indices as in
/// `settings`, orbit length ignored) after `settings.burn_in` map iterates.
FlowAverage birkhoff_flow_average(const ArcModel& model, const OrbitSettings& settings, double T);

}  // namespace implorenz
