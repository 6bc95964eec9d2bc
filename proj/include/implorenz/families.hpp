#pragma once

#include <span>
#include <string>
#include <vector>

#include "implorenz/flow_core.hpp"
#include "implorenz/geometric.hpp"
#include "implorenz/section.hpp"

namespace implorenz {

/// Trigonometric test functions on the square:
///   cos(j pi u) cos(k pi v), 0 <= j,k <= d, and sin(j pi u) cos(k pi v), 1 <= j,k <= d.
/// Index 0 is the constant function.
class TestFamily {
 public:
  explicit TestFamily(int degree = 4);

  int degree() const { return degree_; }
  std::size_t size() const { return terms_.size(); }
  std::string id() const;

  /// Writes all values at (u,v) into out (size() entries).
  void eval(double u, double v, std::span<double> out) const;
  std::vector<double> eval(const SectionPoint& p) const;
  /// Lipschitz constant of term i in the sup norm on the square.
  double lipschitz(std::size_t i) const;
  std::string describe(std::size_t i) const;

 private:
  struct Term {
    bool sine;
    int j, k;
  };
  int degree_;
  std::vector<Term> terms_;
};

/// Flow-level family: section family times height factors
///   {1, cos(pi h / 2), sin(pi h / 2)}.
/// Index = 3 * section_index + factor.
class FlowFamily {
 public:
  explicit FlowFamily(int degree = 4);

  const TestFamily& section() const { return section_; }
  std::size_t size() const { return 3 * section_.size(); }
  std::string id() const;

  void eval(double u, double v, double h, std::span<double> out) const;
  /// Adds the exact integral over heights [h1, h2] at a fixed base (u,v).
  void add_height_integral(double u, double v, double h1, double h2, std::span<double> out) const;

  /// Coordinates used for Lorenz states: (x1/20, x2/27, x3/13.5).
  static void lorenz_coords(const Point3& p, double& u, double& v, double& h);

 private:
  TestFamily section_;
};

}  // namespace implorenz
