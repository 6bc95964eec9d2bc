#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>

#include <CLI11.hpp>

#include "implorenz/errors.hpp"
#include "implorenz/parallel.hpp"
#include "implorenz/poincare.hpp"
#include "io.hpp"
#include "reports.hpp"

namespace implorenz::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void save_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

OrbitSettings orbit_settings(const ExperimentConfig& c) {
  OrbitSettings o;
  o.seeds = c.measure.seeds;
  o.burn_in = c.measure.burn_in;
  o.length = c.measure.length;
  o.stride = c.measure.stride;
  o.first_seed = c.measure.first_seed;
  o.master_seed = c.seed;
  o.workers = c.workers;
  o.validate();
  return o;
}

bool is_classical(const LorenzParams& p) {
  const LorenzParams ref;
  return std::abs(p.sigma - ref.sigma) < 1e-12 && std::abs(p.r - ref.r) < 1e-12 &&
         std::abs(p.b - ref.b) < 1e-12;
}

SweepFactory factory_for(const ExperimentConfig& c) {
  if (c.backend == Backend::Geometric) return geometric_sweep_factory(c.geometric, c.impulse);
  OdeImpulsiveSystem sys(LorenzFlow(c.lorenz, c.integrator), chart_for(c), c.impulse);
  return ode_sweep_factory(sys);
}

// Map, differential and roof at the configured epsilon.
struct Model {
  SweepPoint point;
  SectionMap map;
  std::function<double(const SectionPoint&)> roof;
};

Model model_for(const ExperimentConfig& c, double eps) {
  Model m;
  m.point = factory_for(c)(eps);
  auto arc = m.point.arc;
  m.map = [arc](const SectionPoint& z) { return arc->next(z); };
  m.roof = [arc](const SectionPoint& z) { return arc->roof(z); };
  return m;
}

json error_json(const std::string& category, const std::string& kind, const std::string& message) {
  return {{"error", category}, {"kind", kind}, {"message", message}};
}

}  // namespace

SectionChart chart_for(const ExperimentConfig& c) {
  if (c.chart.mode == "classical" || (c.chart.mode == "auto" && is_classical(c.lorenz))) {
    if (!is_classical(c.lorenz)) throw ConfigError("the classical chart only fits sigma=10, r=28, b=8/3");
    return classical_chart();
  }
  return calibrate_chart(c.lorenz, c.chart.crossings);
}

void cmd_simulate(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
  io::CsvWriter traj(dir / "trajectory.csv", {"t", "x1", "x2", "x3", "segment"});
  json summary{{"schema", kSimulateSchema}, {"backend", to_string(c.backend)}, {"horizon", c.simulate.horizon}};
  std::vector<double> taus;
  std::vector<SectionPoint> hits;
  if (c.backend == Backend::Geometric) {
    GeoImpulsiveSystem sys(c.geometric, c.impulse);
    SuspensionState x{{0.3, 0.1}, c.impulse.s0};
    if (!c.simulate.x0.empty()) x = {{c.simulate.x0[0], c.simulate.x0[1]}, c.simulate.x0[2]};
    if (!in_square(x.base) || x.height < 0) throw ConfigError("simulate.x0 must be (u, v, height) with (u,v) in the square");
    auto tr = sys.trajectory(x, c.simulate.horizon, c.simulate.sample_dt,
                             [&](double t, const SuspensionState& s, std::size_t seg) {
                               traj << t << s.base.u << s.base.v << s.height << seg;
                               traj.end_row();
                             });
    taus = tr.taus;
    hits = tr.hits;
    summary["x0"] = {x.base.u, x.base.v, x.height};
    summary["end_state"] = {tr.end_state.base.u, tr.end_state.base.v, tr.end_state.height};
    summary["no_return"] = tr.no_return;
    summary["nudged"] = tr.nudged;
    summary["grazing_rejected"] = tr.grazing_rejected;
  } else {
    OdeImpulsiveSystem sys(LorenzFlow(c.lorenz, c.integrator), chart_for(c), c.impulse);
    Point3 x = c.simulate.x0.empty() ? sys.impulse_apply(SectionPoint{0.3, 0.1})
                                     : Point3{c.simulate.x0[0], c.simulate.x0[1], c.simulate.x0[2]};
    auto tr = sys.trajectory(x, c.simulate.horizon, c.simulate.sample_dt,
                             [&](Real t, const Point3& p, std::size_t seg) {
                               traj << t << p[0] << p[1] << p[2] << seg;
                               traj.end_row();
                             });
    for (Real t : tr.taus) taus.push_back(double(t));
    hits = tr.hits;
    summary["x0"] = {double(x[0]), double(x[1]), double(x[2])};
    summary["end_state"] = {double(tr.end_state[0]), double(tr.end_state[1]), double(tr.end_state[2])};
    summary["no_return"] = tr.no_return;
    summary["nudged"] = tr.nudged;
    summary["grazing_rejected"] = tr.grazing_rejected;
  }
  traj.close();
  io::CsvWriter imp(dir / "impulses.csv", {"index", "tau", "hit_u", "hit_v"});
  for (std::size_t n = 1; n < taus.size(); ++n) {
    imp << n << taus[n] << hits[n - 1].u << hits[n - 1].v;
    imp.end_row();
  }
  imp.close();
  summary["impulses"] = hits.size();
  summary["taus"] = taus;
  save_json(dir / "simulate.json", summary);
  log << "simulate: " << hits.size() << " impulses up to t=" << c.simulate.horizon << "\n";
}

void cmd_section_map(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
  const Model m = model_for(c, c.impulse.epsilon);
  const std::size_t n = c.section_map.points;
  struct Row {
    SectionPoint z, image;
    double roof = 0;
    std::string error;
  };
  std::vector<Row> rows(n);
  parallel_for(n, c.workers, [&](std::size_t i) {
    Row& r = rows[i];
    r.z = random_start(c.seed, i);
    try {
      r.image = m.map(r.z);
      r.roof = m.roof(r.z);
    } catch (const NumericalError& e) {
      r.error = std::string(to_string(e.kind()));
      r.image = {std::nan(""), std::nan("")};
      r.roof = std::nan("");
    }
  });
  io::CsvWriter csv(dir / "section_map.csv", {"u", "v", "image_u", "image_v", "roof", "error"});
  std::map<std::string, std::size_t> failures;
  for (const Row& r : rows) {
    csv << r.z.u << r.z.v << r.image.u << r.image.v << r.roof << r.error;
    csv.end_row();
    if (!r.error.empty()) ++failures[r.error];
  }
  csv.close();
  save_json(dir / "section_map.json", {{"schema", kSectionMapSchema},
                                       {"backend", to_string(c.backend)},
                                       {"epsilon", c.impulse.epsilon},
                                       {"points", n},
                                       {"failures", failures}});
  log << "section-map: " << n << " points\n";
}

void cmd_measure(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
  const Model m = model_for(c, c.impulse.epsilon);
  const OrbitSettings os = orbit_settings(c);
  const TestFamily fam(c.measure.degree);
  const std::size_t k = fam.size();

  const std::size_t total = os.seeds * os.length;
  const std::size_t thin = std::max<std::size_t>(
      1, (total + c.measure.export_max_points - 1) / std::max<std::size_t>(1, c.measure.export_max_points));
  std::vector<std::vector<double>> sums(os.seeds, std::vector<double>(k, 0.0));
  std::vector<std::size_t> counts(os.seeds, 0);
  std::vector<std::vector<SectionPoint>> kept(os.seeds);
  std::vector<std::vector<double>> scratch(os.seeds, std::vector<double>(k));
  const auto status = sample_orbits(m.map, os, [&](std::size_t slot, const SectionPoint& z) {
    fam.eval(z.u, z.v, scratch[slot]);
    for (std::size_t j = 0; j < k; ++j) sums[slot][j] += scratch[slot][j];
    if (counts[slot] % thin == 0) kept[slot].push_back(z);
    ++counts[slot];
  });

  // Pooled ratio estimate over surviving seeds, with per-seed influence.
  double n_ok = 0;
  std::size_t failed = 0, b = 0;
  std::vector<double> values(k, 0.0), stderrs(k, 0.0);
  for (std::size_t s = 0; s < os.seeds; ++s) {
    if (!status[s].ok) {
      ++failed;
      continue;
    }
    n_ok += counts[s];
    ++b;
    for (std::size_t j = 0; j < k; ++j) values[j] += sums[s][j];
  }
  if (n_ok == 0) throw NumericalError(ErrorKind::NoReturn, "every seed failed");
  for (double& v : values) v /= n_ok;
  for (std::size_t j = 0; j < k && b > 1; ++j) {
    double ss = 0;
    for (std::size_t s = 0; s < os.seeds; ++s) {
      if (!status[s].ok) continue;
      const double infl = (sums[s][j] - values[j] * counts[s]) / n_ok;
      ss += infl * infl;
    }
    stderrs[j] = std::sqrt(ss * b / (b - 1.0));
  }

  std::vector<SectionPoint> pts;
  for (std::size_t s = 0; s < os.seeds; ++s)
    if (status[s].ok) pts.insert(pts.end(), kept[s].begin(), kept[s].end());
  const std::vector<double> weights(pts.size(), pts.empty() ? 0.0 : 1.0 / pts.size());
  io::CsvWriter pcsv(dir / "measure.csv", {"u", "v", "weight"});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pcsv << pts[i].u << pts[i].v << weights[i];
    pcsv.end_row();
  }
  pcsv.close();
  io::write_points_binary(dir / "measure.bin", pts, weights);

  io::CsvWriter scsv(dir / "measure_section.csv", {"index", "function", "value", "stderr"});
  for (std::size_t j = 0; j < k; ++j) {
    scsv << j << fam.describe(j) << values[j] << stderrs[j];
    scsv.end_row();
  }
  scsv.close();

  const StreamingLift lift = streaming_lift(*m.point.arc, os, c.measure.invariance_s);
  io::CsvWriter fcsv(dir / "measure_flow.csv", {"index", "value", "stderr", "invariance_defect", "defect_stderr"});
  for (std::size_t j = 0; j < lift.lift.nu.values.size(); ++j) {
    const bool has_defect = j < lift.defect.defects.size();
    fcsv << j << lift.lift.nu.values[j] << lift.lift.nu.stderrs[j]
         << (has_defect ? lift.defect.defects[j] : std::nan(""))
         << (has_defect ? lift.defect.stderrs[j] : std::nan(""));
    fcsv.end_row();
  }
  fcsv.close();

  save_json(dir / "measure.json",
            {{"schema", kMeasureSchema},
             {"backend", to_string(c.backend)},
             {"epsilon", c.impulse.epsilon},
             {"family", fam.id()},
             {"flow_family", lift.lift.nu.family},
             {"seeds", os.seeds},
             {"failed_seeds", failed},
             {"samples", std::size_t(n_ok)},
             {"burn_in", os.burn_in},
             {"length", os.length},
             {"stride", os.stride},
             {"exported_points", pts.size()},
             {"export_thinning", thin},
             {"mean_roof", number(lift.lift.mean_roof)},
             {"mean_roof_stderr", number(lift.lift.mean_roof_stderr)},
             {"invariance_s", c.measure.invariance_s},
             {"invariance_defect", number(lift.defect.max_defect)},
             {"invariance_argmax", lift.defect.argmax}});
  log << "measure: " << std::size_t(n_ok) << " samples, invariance defect " << lift.defect.max_defect << "\n";
}

void cmd_basins(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
  const Model m = model_for(c, c.impulse.epsilon);
  const BasinProbe probe = basin_probe(m.map, TestFamily(c.measure.degree), orbit_settings(c), c.basins.tol);
  io::CsvWriter csv(dir / "basins.csv", {"run", "cluster", "size", "fraction", "spread", "separation", "accepted"});
  auto dump = [&](const std::string& run, const BasinReport& r) {
    for (std::size_t i = 0; i < r.clusters.size(); ++i) {
      const Cluster& cl = r.clusters[i];
      csv << run << i << cl.members.size() << cl.fraction << cl.spread << cl.separation << int(cl.accepted);
      csv.end_row();
    }
  };
  dump("base", probe.base);
  dump("doubled", probe.doubled);
  csv.close();
  save_json(dir / "basins.json", {{"schema", kBasinsSchema},
                                  {"backend", to_string(c.backend)},
                                  {"epsilon", c.impulse.epsilon},
                                  {"base", to_json(probe.base)},
                                  {"doubled", to_json(probe.doubled)},
                                  {"stable", probe.stable}});
  log << "basins: s=" << probe.base.s << " (doubled seeds: " << probe.doubled.s << ")\n";
}

void cmd_entropy(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
  const Model m = model_for(c, c.impulse.epsilon);
  EntropySettings es;
  es.orbits = orbit_settings(c);
  es.align = c.entropy.align;
  es.cone.half_angle_deg = c.entropy.cone_half_angle_deg;
  EntropyReport r = entropy_map(m.point.jet, m.roof, es);
  r.epsilon = c.impulse.epsilon;
  json j{{"schema", kEntropySchema}, {"backend", to_string(c.backend)}, {"rows", json::array({to_json(r)})}};
  if (c.backend == Backend::Geometric && c.impulse.epsilon == 0.0) {
    const OracleResult o = quotient_entropy_oracle(c.geometric, c.entropy.oracle_samples, c.seed);
    j["oracle"] = {{"h", o.h},
                   {"h_stderr", o.h_stderr},
                   {"mean_roof", o.mean_roof},
                   {"samples", o.n},
                   {"relative_difference", std::abs(r.h_map - o.h) / o.h}};
  }
  save_json(dir / "entropy.json", j);
  log << "entropy: h_map=" << r.h_map << " h_flow=" << r.h_flow << "\n";
}

void cmd_stability_sweep(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
  SweepSettings s;
  s.epsilons = c.sweep_epsilons;
  s.orbits = orbit_settings(c);
  s.align = c.entropy.align;
  s.cone.half_angle_deg = c.entropy.cone_half_angle_deg;
  s.degree = c.measure.degree;
  const SweepResult r = stability_sweep(factory_for(c), s);
  json j = to_json(r);
  j["backend"] = to_string(c.backend);
  save_json(dir / "sweep.json", j);

  io::CsvWriter csv(dir / "sweep.csv", {"epsilon", "ok", "distance", "distance_stderr", "h_map", "h_map_stderr",
                                        "mean_roof", "h_flow", "h_flow_stderr", "dh_flow", "dh_flow_stderr"});
  std::vector<double> xs, ds, dhs;
  for (const auto& row : r.rows) {
    csv << row.epsilon << int(row.ok) << row.distance.distance << row.distance.standard_error << row.entropy.h_map
        << row.entropy.h_map_stderr << row.entropy.mean_roof << row.entropy.h_flow << row.entropy.h_flow_stderr
        << row.dh << row.dh_stderr;
    csv.end_row();
    if (!row.ok) continue;
    xs.push_back(row.epsilon);
    ds.push_back(row.distance.distance);
    dhs.push_back(std::abs(row.dh));
  }
  csv.close();
  io::SvgPlot pd("weak* proxy distance to the unperturbed measure", "epsilon", "distance");
  pd.add_line(xs, ds, "distance");
  pd.add_scatter(xs, ds, "");
  pd.save(dir / "sweep_distance.svg");
  io::SvgPlot pe("flow entropy deviation", "epsilon", "|h_flow(eps) - h_flow(0)|");
  pe.add_line(xs, dhs, "|dh_flow|");
  pe.add_scatter(xs, dhs, "");
  pe.save(dir / "sweep_entropy.svg");
  log << "stability-sweep: " << r.rows.size() << " epsilons, distance monotone "
      << (r.distance_monotone.pass ? "yes" : "no") << ", entropy monotone " << (r.entropy_monotone.pass ? "yes" : "no")
      << "\n";
}

void cmd_check_conditions(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
  ConditionSettings s = c.conditions.settings;
  s.seed = c.seed;
  s.workers = c.workers;
  SectionJetMap map;
  std::string label;
  if (c.conditions.fixture != "none") {
    static const std::map<std::string, Fixture> names{{"weak-expansion", Fixture::WeakExpansion},
                                                      {"log-periodic", Fixture::LogPeriodic},
                                                      {"narrow-cone", Fixture::NarrowCone},
                                                      {"sqrt-cusp", Fixture::SqrtCusp},
                                                      {"eta-1.5", Fixture::EtaTooLarge}};
    FixtureCase fc = make_fixture(names.at(c.conditions.fixture), s);
    map = fc.map;
    s = fc.settings;
    label = "fixture:" + fc.name;
  } else {
    map = model_for(c, c.impulse.epsilon).point.jet;
    label = to_string(c.backend) + ":epsilon=" + io::format_double(c.impulse.epsilon);
  }
  const ConditionReport r = check_conditions(map, s, label);
  save_json(dir / "conditions.json", to_json(r));
  io::CsvWriter csv(dir / "h3.csv", {"n", "epsilon", "measure", "upper_bound"});
  for (std::size_t n = 0; n < r.h3.measure.size(); ++n)
    for (std::size_t e = 0; e < r.h3.eps_grid.size(); ++e) {
      csv << r.h3.n_grid[n] << r.h3.eps_grid[e] << r.h3.measure[n][e] << int(r.h3.upper_bound[n][e]);
      csv.end_row();
    }
  csv.close();
  log << "check-conditions " << label << ": L3 " << r.l3.pass << " H1 " << r.h1.pass << " H2 " << r.h2.pass
      << " H3 " << r.h3.pass << "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Impulsive Lorenz semiflow lab"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir, backend;
  std::uint64_t seed = 0;
  int workers = -1;
  auto* opt_seed = app.add_option("--seed", seed, "master RNG seed");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads (0 = all cores)");
  app.add_option("--backend", backend, "ode or geometric");

  using Cmd = void (*)(const ExperimentConfig&, const fs::path&, std::ostream&);
  struct Command {
    std::string name;
    std::string help;
    Cmd fn;
  };
  const std::vector<Command> commands{
      {"simulate", "impulsive trajectory from the configured x0 to T", cmd_simulate},
      {"section-map", "orbit of the section return map", cmd_section_map},
      {"measure", "empirical invariant measure and its test-family integrals", cmd_measure},
      {"basins", "cluster seeds by their Birkhoff averages", cmd_basins},
      {"entropy", "map and flow entropy, plus the quotient oracle on the geometric backend", cmd_entropy},
      {"stability-sweep", "distance and entropy change over the epsilon sweep", cmd_stability_sweep},
      {"check-conditions", "condition checks on the section map or a configured failure fixture", cmd_check_conditions}};
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << error_json("config", "usage", e.what()).dump() << "\n";
    return kExitConfig;
  }

  try {
    ExperimentConfig c = config_path.empty() ? parse_config(json::object()) : load_config(config_path);
    if (*opt_seed) c.seed = seed;
    if (workers >= 0) c.workers = workers;
    if (!backend.empty()) c.backend = parse_backend(backend);
    if (!out_dir.empty()) c.output = out_dir;
    c.validate();
    const fs::path dir(c.output);
    fs::create_directories(dir);
    save_json(dir / "config.json", to_json(c));
    for (const auto& cmd : commands)
      if (app.got_subcommand(cmd.name)) cmd.fn(c, dir, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << error_json("config", "ConfigError", e.what()).dump() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << error_json("numerical", std::string(to_string(e.kind())), e.what()).dump() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << error_json("numerical", "runtime", e.what()).dump() << "\n";
    return kExitNumerical;
  }
}

}  // namespace implorenz::cli
