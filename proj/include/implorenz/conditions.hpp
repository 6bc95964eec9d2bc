#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "implorenz/entropy.hpp"
#include "implorenz/geometric.hpp"
#include "implorenz/section.hpp"

namespace implorenz {

/// Sup-norm quantities of the hyperbolicity inequalities for f = (G, H).
struct L3Report {
  double Hy = 0, Gx_inv = 0, Gx_inv_Hx = 0, Gy = 0;
  double slack_Hy = 0;       ///< 1 - |H_y|
  double slack_Gx_inv = 0;   ///< 1 - |G_x^{-1}|
  double slack_second = 0;   ///< 1 - |H_y||G_x^{-1}| - 2 sqrt(|G_x^{-1}||H_y||G_x^{-1}H_x|)
  double slack_third = 0;    ///< (1-|H_y|)(1-|G_x^{-1}|) - |H_y||G_x^{-1}H_x||G_y|
  std::size_t grid = 0;
  bool grid_converged = true;  ///< doubling the grid moved every sup by <= 5%
  bool pass = false;
};

struct H1Report {
  double A = 0, alpha = 0, r2 = 0;
  double log_spread = 0;  ///< standard deviation of log|df| over the samples
  std::size_t samples = 0;
  bool fitted = false;    ///< r2 >= 0.95
  bool pass = false;      ///< fitted, or derivative essentially constant
};

struct H2Report {
  double half_angle_deg = 45;
  double lambda_u = 0;   ///< min forward expansion on the unstable cone
  double lambda_s = 0;   ///< min backward expansion on the stable cone
  double lambda_min = 0;
  double escape_rate = 0;
  std::size_t samples = 0;
  bool pass = false;     ///< lambda_min > 1 and escape_rate <= 1e-3
};

struct H3Report {
  std::vector<double> eps_grid;
  std::vector<int> n_grid;
  std::vector<std::vector<double>> measure;  ///< [n][eps], normalized Lebesgue
  std::vector<std::vector<bool>> upper_bound;  ///< zero-count cells
  std::vector<double> beta, B, r2;  ///< per n
  double beta_mean = 0, B_max = 0, beta_spread = 0;
  std::size_t samples = 0;
  bool stable = false;  ///< every beta_n within 0.1 of beta_0
  bool pass = false;    ///< stable and every r2 >= 0.95
};

struct H6Row {
  double r = 0;
  double lambda_u = 0;
  double lambda_s = 0;
};

struct ConditionSettings {
  std::size_t l3_grid = 400;
  std::size_t h1_samples = 2000;
  double h2_half_angle_deg = 45;
  std::size_t h2_samples = 20000;
  std::vector<double> h3_eps{0.1, 0.05, 0.02, 0.01, 0.005, 0.002};
  int h3_n_max = 10;
  std::size_t h3_samples = 1000000;
  std::vector<double> h6_radii{0.05, 0.1, 0.2};
  std::size_t h6_samples = 5000;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct ConditionReport {
  std::string label;
  L3Report l3;
  H1Report h1;
  H2Report h2;
  H3Report h3;
  std::vector<H6Row> h6;
  bool all_pass = false;
};

L3Report check_L3(const SectionJetMap& f, std::size_t grid = 400);
H1Report fit_H1(const SectionJetMap& f, std::size_t samples = 2000, std::uint64_t seed = 1);
H2Report check_H2_cones(const SectionJetMap& f, double half_angle_deg = 45, std::size_t samples = 20000,
                        std::uint64_t seed = 1);
H3Report estimate_H3(const SectionMap& f, const std::vector<double>& eps_grid, int n_max,
                     std::size_t samples, std::uint64_t seed = 1, int workers = 1);
std::vector<H6Row> check_H6(const SectionJetMap& f, const std::vector<double>& radii,
                            std::size_t samples = 5000, std::uint64_t seed = 1);

ConditionReport check_conditions(const SectionJetMap& f, const ConditionSettings& settings,
                                 std::string label = "");

/// Maps built to break exactly one of the checked conditions.
enum class Fixture {
  WeakExpansion,   ///< L3: second inequality violated, expansion still > 1
  LogPeriodic,     ///< H1: log-periodic wobble of the derivative near u = 0
  NarrowCone,      ///< H2: default map with a 10 degree unstable cone
  SqrtCusp,        ///< H3: square-root cusp at the preimage of u = 0
  EtaTooLarge,     ///< L3: fiber factor 1.5
};

struct FixtureCase {
  std::string name;
  std::string target;  ///< "L3", "H1", "H2" or "H3"
  SectionJetMap map;
  ConditionSettings settings;
};

FixtureCase make_fixture(Fixture which, const ConditionSettings& base = {});
std::vector<Fixture> all_fixtures();

/// Fixture with the 1-D factor G replaced by an odd extension of g on (0,1]
/// and the fiber part of the default geometric map.
SectionJetMap fiber_product_map(std::function<double(double)> g, std::function<double(double)> g_prime,
                                const GeoParams& fiber = {});

}  // namespace implorenz
