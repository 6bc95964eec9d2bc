#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "implorenz/conditions.hpp"
#include "implorenz/flow_core.hpp"
#include "implorenz/geometric.hpp"
#include "implorenz/impulse.hpp"

namespace implorenz::cli {

enum class Backend { Geometric, Ode };

struct ChartSettings {
  std::string mode = "auto";  ///< auto | classical | calibrate
  int crossings = 100000;
};

struct MeasureConfig {
  std::size_t seeds = 200;
  std::size_t burn_in = 1000;
  std::size_t length = 100000;
  std::size_t stride = 1;
  std::size_t first_seed = 0;
  int degree = 4;
  double invariance_s = 1.0;
  std::size_t export_max_points = 100000;
};

struct EntropyConfig {
  std::size_t align = 50;
  double cone_half_angle_deg = 45.0;
  std::size_t oracle_samples = 10000000;
};

struct SimulateConfig {
  std::vector<double> x0;  ///< (u, v, height) or (x1, x2, x3); empty = backend default
  double horizon = 50.0;
  double sample_dt = 0.01;
};

struct SectionMapConfig {
  std::size_t points = 1000;
};

struct BasinConfig {
  double tol = 0.05;
};

struct ConditionsConfig {
  ConditionSettings settings;
  std::string fixture = "none";
};

struct ExperimentConfig {
  Backend backend = Backend::Geometric;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output = "out";
  LorenzParams lorenz;
  ChartSettings chart;
  IntegratorConfig integrator;
  GeoParams geometric;
  ImpulseSpec impulse;
  std::vector<double> sweep_epsilons{0.1, 0.05, 0.02, 0.01, 0.005, 0.0};
  MeasureConfig measure;
  EntropyConfig entropy;
  SimulateConfig simulate;
  SectionMapConfig section_map;
  BasinConfig basins;
  ConditionsConfig conditions;

  void validate() const;
};

std::string to_string(Backend b);
Backend parse_backend(const std::string& s);

/// Strict parse: unknown keys and wrong types raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace implorenz::cli
