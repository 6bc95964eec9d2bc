#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "implorenz/errors.hpp"

namespace implorenz::cli {

using nlohmann::json;

std::string to_string(Backend b) { return b == Backend::Ode ? "ode" : "geometric"; }

Backend parse_backend(const std::string& s) {
  if (s == "geometric") return Backend::Geometric;
  if (s == "ode") return Backend::Ode;
  throw ConfigError("backend must be \"ode\" or \"geometric\", got \"" + s + "\"");
}

namespace {

// Reads fields from one JSON object and rejects anything it did not consume.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + " has the wrong type");
    }
  }

  void get_real(const char* key, Real& out) {
    double d = static_cast<double>(out);
    get(key, d);
    out = d;
  }

  void get_count(const char* key, std::size_t& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (v.is_number_unsigned()) {
      out = v.get<std::size_t>();
    } else if (v.is_number_integer() && v.get<long long>() >= 0) {
      out = static_cast<std::size_t>(v.get<long long>());
    } else if (v.is_number_float() && v.get<double>() >= 0 && v.get<double>() == std::floor(v.get<double>())) {
      out = static_cast<std::size_t>(v.get<double>());
    } else {
      throw ConfigError(where(key) + " must be a nonnegative integer");
    }
  }

  std::optional<Section> sub(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Section(j_.at(key), where(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError("unknown key " + where(k.c_str()));
  }

 private:
  std::string where(const char* key = nullptr) const {
    std::string p = path_.empty() ? "" : path_;
    if (key) p += (p.empty() ? "" : ".") + std::string(key);
    return p.empty() ? "config" : p;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

void ExperimentConfig::validate() const {
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (chart.mode != "auto" && chart.mode != "classical" && chart.mode != "calibrate")
    throw ConfigError("chart.mode must be auto, classical or calibrate");
  lorenz.validate();
  integrator.validate();
  geometric.validate();
  impulse.validate();
  for (double e : sweep_epsilons)
    if (!(e >= 0 && e <= 0.1)) throw ConfigError("sweep epsilons must lie in [0, 0.1]");
  if (std::find(sweep_epsilons.begin(), sweep_epsilons.end(), 0.0) == sweep_epsilons.end())
    throw ConfigError("sweep epsilons must include 0");
  if (measure.degree < 1 || measure.degree > 16) throw ConfigError("measure.degree must lie in [1, 16]");
  if (!(measure.invariance_s >= 0)) throw ConfigError("measure.invariance_s must be >= 0");
  if (!(entropy.cone_half_angle_deg > 0 && entropy.cone_half_angle_deg <= 45))
    throw ConfigError("entropy.cone_half_angle_deg must lie in (0, 45]");
  if (!simulate.x0.empty() && simulate.x0.size() != 3)
    throw ConfigError("simulate.x0 must have three entries");
  if (!(simulate.horizon > 0)) throw ConfigError("simulate.horizon must be positive");
  if (!(simulate.sample_dt > 0)) throw ConfigError("simulate.sample_dt must be positive");
  if (section_map.points == 0) throw ConfigError("section_map.points must be positive");
  if (!(basins.tol > 0)) throw ConfigError("basins.tol must be positive");
  static const std::set<std::string> fixtures{"none", "weak-expansion", "log-periodic", "narrow-cone",
                                              "sqrt-cusp", "eta-1.5"};
  if (!fixtures.count(conditions.fixture)) throw ConfigError("unknown conditions.fixture " + conditions.fixture);
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Section top(j, "");
  std::string backend = to_string(c.backend);
  top.get("backend", backend);
  c.backend = parse_backend(backend);
  top.get("seed", c.seed);
  top.get("workers", c.workers);
  top.get("output", c.output);
  if (auto s = top.sub("lorenz")) {
    s->get_real("sigma", c.lorenz.sigma);
    s->get_real("r", c.lorenz.r);
    s->get_real("b", c.lorenz.b);
    s->finish();
  }
  if (auto s = top.sub("chart")) {
    s->get("mode", c.chart.mode);
    s->get("crossings", c.chart.crossings);
    s->finish();
  }
  if (auto s = top.sub("integrator")) {
    s->get_real("abs_tol", c.integrator.abs_tol);
    s->get_real("rel_tol", c.integrator.rel_tol);
    s->get_real("max_step", c.integrator.max_step);
    s->get_real("max_flight_time", c.integrator.max_flight_time);
    s->get_real("trapping_radius", c.integrator.trapping_radius);
    s->finish();
  }
  if (auto s = top.sub("geometric")) {
    s->get("alpha", c.geometric.alpha);
    s->get("c", c.geometric.c);
    s->get("eta", c.geometric.eta);
    s->get("beta", c.geometric.beta);
    s->get("delta0", c.geometric.delta0);
    s->get("lambda1", c.geometric.lambda1);
    s->get("r0", c.geometric.r0);
    s->finish();
  }
  if (auto s = top.sub("impulse")) {
    s->get("epsilon", c.impulse.epsilon);
    s->get("s0", c.impulse.s0);
    s->get("t0", c.impulse.t0);
    std::string field(to_string(c.impulse.field));
    s->get("field", field);
    c.impulse.field = parse_displacement_field(field);
    s->finish();
  }
  if (auto s = top.sub("sweep")) {
    s->get("epsilons", c.sweep_epsilons);
    s->finish();
  }
  if (auto s = top.sub("measure")) {
    s->get_count("seeds", c.measure.seeds);
    s->get_count("burn_in", c.measure.burn_in);
    s->get_count("length", c.measure.length);
    s->get_count("stride", c.measure.stride);
    s->get_count("first_seed", c.measure.first_seed);
    s->get("degree", c.measure.degree);
    s->get("invariance_s", c.measure.invariance_s);
    s->get_count("export_max_points", c.measure.export_max_points);
    s->finish();
  }
  if (auto s = top.sub("entropy")) {
    s->get_count("align", c.entropy.align);
    s->get("cone_half_angle_deg", c.entropy.cone_half_angle_deg);
    s->get_count("oracle_samples", c.entropy.oracle_samples);
    s->finish();
  }
  if (auto s = top.sub("simulate")) {
    s->get("x0", c.simulate.x0);
    s->get("horizon", c.simulate.horizon);
    s->get("sample_dt", c.simulate.sample_dt);
    s->finish();
  }
  if (auto s = top.sub("section_map")) {
    s->get_count("points", c.section_map.points);
    s->finish();
  }
  if (auto s = top.sub("basins")) {
    s->get("tol", c.basins.tol);
    s->finish();
  }
  if (auto s = top.sub("conditions")) {
    auto& cs = c.conditions.settings;
    s->get_count("l3_grid", cs.l3_grid);
    s->get_count("h1_samples", cs.h1_samples);
    s->get("h2_half_angle_deg", cs.h2_half_angle_deg);
    s->get_count("h2_samples", cs.h2_samples);
    s->get("h3_eps", cs.h3_eps);
    s->get("h3_n_max", cs.h3_n_max);
    s->get_count("h3_samples", cs.h3_samples);
    s->get("h6_radii", cs.h6_radii);
    s->get_count("h6_samples", cs.h6_samples);
    s->get("fixture", c.conditions.fixture);
    s->finish();
  }
  top.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  const auto& cs = c.conditions.settings;
  return {
      {"backend", to_string(c.backend)},
      {"seed", c.seed},
      {"workers", c.workers},
      {"output", c.output},
      {"lorenz", {{"sigma", double(c.lorenz.sigma)}, {"r", double(c.lorenz.r)}, {"b", double(c.lorenz.b)}}},
      {"chart", {{"mode", c.chart.mode}, {"crossings", c.chart.crossings}}},
      {"integrator",
       {{"abs_tol", double(c.integrator.abs_tol)},
        {"rel_tol", double(c.integrator.rel_tol)},
        {"max_step", double(c.integrator.max_step)},
        {"max_flight_time", double(c.integrator.max_flight_time)},
        {"trapping_radius", double(c.integrator.trapping_radius)}}},
      {"geometric",
       {{"alpha", c.geometric.alpha},
        {"c", c.geometric.c},
        {"eta", c.geometric.eta},
        {"beta", c.geometric.beta},
        {"delta0", c.geometric.delta0},
        {"lambda1", c.geometric.lambda1},
        {"r0", c.geometric.r0}}},
      {"impulse",
       {{"epsilon", c.impulse.epsilon},
        {"s0", c.impulse.s0},
        {"t0", c.impulse.t0},
        {"field", std::string(to_string(c.impulse.field))}}},
      {"sweep", {{"epsilons", c.sweep_epsilons}}},
      {"measure",
       {{"seeds", c.measure.seeds},
        {"burn_in", c.measure.burn_in},
        {"length", c.measure.length},
        {"stride", c.measure.stride},
        {"first_seed", c.measure.first_seed},
        {"degree", c.measure.degree},
        {"invariance_s", c.measure.invariance_s},
        {"export_max_points", c.measure.export_max_points}}},
      {"entropy",
       {{"align", c.entropy.align},
        {"cone_half_angle_deg", c.entropy.cone_half_angle_deg},
        {"oracle_samples", c.entropy.oracle_samples}}},
      {"simulate", {{"x0", c.simulate.x0}, {"horizon", c.simulate.horizon}, {"sample_dt", c.simulate.sample_dt}}},
      {"section_map", {{"points", c.section_map.points}}},
      {"basins", {{"tol", c.basins.tol}}},
      {"conditions",
       {{"l3_grid", cs.l3_grid},
        {"h1_samples", cs.h1_samples},
        {"h2_half_angle_deg", cs.h2_half_angle_deg},
        {"h2_samples", cs.h2_samples},
        {"h3_eps", cs.h3_eps},
        {"h3_n_max", cs.h3_n_max},
        {"h3_samples", cs.h3_samples},
        {"h6_radii", cs.h6_radii},
        {"h6_samples", cs.h6_samples},
        {"fixture", c.conditions.fixture}}},
  };
}

}  // namespace implorenz::cli
