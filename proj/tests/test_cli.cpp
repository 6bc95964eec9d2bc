#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "implorenz/errors.hpp"

#include "commands.hpp"
#include "config.hpp"
#include "io.hpp"
#include "reports.hpp"

using namespace implorenz;
using namespace implorenz::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("implorenz_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"implorenz-lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.in.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

void expect_error_line(const std::string& err) {
  ASSERT_FALSE(err.empty());
  EXPECT_EQ(err.find('\n'), err.size() - 1) << err;
  const json e = json::parse(err);
  EXPECT_TRUE(e.contains("error"));
  EXPECT_TRUE(e.contains("kind"));
  EXPECT_TRUE(e.contains("message"));
}

}  // namespace

TEST(Config, Defaults) {
  const ExperimentConfig c = parse_config(json::object());
  EXPECT_EQ(c.backend, Backend::Geometric);
  EXPECT_EQ(c.measure.seeds, 200u);
  EXPECT_EQ(c.impulse.s0, 0.05);
  EXPECT_EQ(c.sweep_epsilons.back(), 0.0);
  EXPECT_EQ(c.conditions.fixture, "none");
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(parse_config(json{{"bogus", 1}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"impulse", {{"epsilon", 0.05}, {"drop", 0.1}}}}), ConfigError);
}

TEST(Config, WrongTypesAreRejected) {
  EXPECT_THROW(parse_config(json{{"seed", "one"}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"measure", {{"seeds", -3}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"measure", {{"seeds", 2.5}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"impulse", 0.05}}), ConfigError);
}

TEST(Config, SemanticValidation) {
  EXPECT_THROW(parse_config(json{{"impulse", {{"epsilon", 0.5}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"sweep", {{"epsilons", {0.1, 0.05}}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"backend", "spectral"}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"conditions", {{"fixture", "nope"}}}}), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  json j{{"backend", "ode"}, {"seed", 7}, {"impulse", {{"epsilon", 0.02}, {"field", "shear"}}},
         {"measure", {{"seeds", 12}, {"stride", 3}}}};
  const ExperimentConfig a = parse_config(j);
  const json once = to_json(a);
  const json twice = to_json(parse_config(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(a.impulse.field, DisplacementField::Shear);
  EXPECT_EQ(a.measure.stride, 3u);
}

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
  const auto none = run_cli({});
  EXPECT_EQ(none.code, kExitConfig);
  expect_error_line(none.err);
  EXPECT_EQ(run_cli({"fly"}).code, kExitConfig);
}

TEST(Cli, SimulateIsDeterministic) {
  const fs::path d = scratch("simulate");
  const fs::path cfg = write_config(d, {{"impulse", {{"epsilon", 0.05}}}, {"simulate", {{"horizon", 20.0}}}});
  const auto a = run_cli({"--config", cfg.string(), "--out", (d / "a").string(), "simulate"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  const auto b = run_cli({"--config", cfg.string(), "--out", (d / "b").string(), "simulate"});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(slurp(d / "a" / "trajectory.csv"), slurp(d / "b" / "trajectory.csv"));
  EXPECT_EQ(slurp(d / "a" / "impulses.csv"), slurp(d / "b" / "impulses.csv"));
  EXPECT_TRUE(fs::exists(d / "a" / "config.json"));

  // Impulse times strictly increase.
  std::istringstream in(slurp(d / "a" / "impulses.csv"));
  std::string line;
  std::getline(in, line);
  double prev = -1;
  int rows = 0;
  while (std::getline(in, line)) {
    const double t = std::stod(line.substr(0, line.find(',')));
    EXPECT_GT(t, prev);
    prev = t;
    ++rows;
  }
  EXPECT_GT(rows, 5);
}

TEST(Cli, SimulateOdeWritesTrajectory) {
  const fs::path d = scratch("simulate_ode");
  const auto r = run_cli({"--backend", "ode", "--out", d.string(), "simulate"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string head = slurp(d / "trajectory.csv").substr(0, 40);
  EXPECT_EQ(head.rfind("t,x1,x2,x3,segment", 0), 0u) << head;
}

TEST(Cli, BadConfigExitsTwo) {
  const fs::path d = scratch("badcfg");
  const fs::path cfg = write_config(d, {{"measure", {{"seeds", "many"}}}});
  const auto r = run_cli({"--config", cfg.string(), "--out", d.string(), "measure"});
  EXPECT_EQ(r.code, kExitConfig);
  expect_error_line(r.err);
  EXPECT_EQ(json::parse(r.err)["error"], "config");
}

TEST(Cli, EscapeExitsThree) {
  const fs::path d = scratch("escape");
  const fs::path cfg =
      write_config(d, {{"backend", "ode"}, {"simulate", {{"x0", {200.0, 0.0, 0.0}}, {"horizon", 5.0}}}});
  const auto r = run_cli({"--config", cfg.string(), "--out", d.string(), "simulate"});
  EXPECT_EQ(r.code, kExitNumerical);
  expect_error_line(r.err);
  EXPECT_EQ(json::parse(r.err)["kind"], "Escape");
}

TEST(Cli, FixtureFailsOnlyItsTarget) {
  const fs::path d = scratch("fixture");
  const fs::path cfg = write_config(d, {{"conditions", {{"fixture", "narrow-cone"}, {"h3_samples", 200000}}}});
  const auto r = run_cli({"--config", cfg.string(), "--out", d.string(), "--workers", "4", "check-conditions"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = read_json(d / "conditions.json");
  const ConditionReport rep = condition_report_from_json(j);
  EXPECT_TRUE(rep.l3.pass);
  EXPECT_TRUE(rep.h1.pass);
  EXPECT_FALSE(rep.h2.pass);
  EXPECT_TRUE(rep.h3.pass);
  EXPECT_EQ(to_json(rep), j);
  EXPECT_TRUE(fs::exists(d / "h3.csv"));
}

TEST(Cli, SmallSweep) {
  const fs::path d = scratch("sweep");
  const fs::path cfg = write_config(d, {{"sweep", {{"epsilons", {0.05, 0.0}}}},
                                        {"measure", {{"seeds", 4}, {"length", 2000}, {"burn_in", 100}}}});
  const auto r = run_cli({"--config", cfg.string(), "--out", d.string(), "stability-sweep"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = read_json(d / "sweep.json");
  EXPECT_EQ(j["schema"], "implorenz.sweep/1");
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][1]["epsilon"], 0.0);
  EXPECT_EQ(j["rows"][1]["distance"], 0.0);
  EXPECT_GT(j["rows"][0]["distance"].get<double>(), 0.0);
  const std::string svg = slurp(d / "sweep_distance.svg");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "sweep.csv"));
}

TEST(Cli, MeasureIsIndependentOfWorkers) {
  const fs::path d = scratch("measure");
  const fs::path cfg = write_config(
      d, {{"impulse", {{"epsilon", 0.05}}}, {"measure", {{"seeds", 6}, {"length", 3000}, {"burn_in", 100}}}});
  const auto a = run_cli({"--config", cfg.string(), "--out", (d / "w1").string(), "--workers", "1", "measure"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  const auto b = run_cli({"--config", cfg.string(), "--out", (d / "w2").string(), "--workers", "2", "measure"});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(slurp(d / "w1" / "measure.json"), slurp(d / "w2" / "measure.json"));
  EXPECT_EQ(slurp(d / "w1" / "measure.bin"), slurp(d / "w2" / "measure.bin"));
}

TEST(Cli, EntropyAddsOracleAtZeroEpsilon) {
  const fs::path d = scratch("entropy");
  const fs::path cfg = write_config(d, {{"measure", {{"seeds", 4}, {"length", 5000}, {"burn_in", 100}}},
                                        {"entropy", {{"oracle_samples", 200000}}}});
  const auto r = run_cli({"--config", cfg.string(), "--out", d.string(), "entropy"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = read_json(d / "entropy.json");
  EXPECT_EQ(j["schema"], "implorenz.entropy/1");
  ASSERT_TRUE(j.contains("oracle"));
  EXPECT_LT(j["oracle"]["relative_difference"].get<double>(), 0.05);
}

TEST(Cli, BasinsAndSectionMap) {
  const fs::path d = scratch("basins");
  const fs::path cfg = write_config(d, {{"measure", {{"seeds", 20}, {"length", 5000}, {"burn_in", 100}}},
                                        {"section_map", {{"points", 50}}}});
  ASSERT_EQ(run_cli({"--config", cfg.string(), "--out", d.string(), "basins"}).code, kExitOk);
  EXPECT_EQ(read_json(d / "basins.json")["schema"], "implorenz.basins/1");
  ASSERT_EQ(run_cli({"--config", cfg.string(), "--out", d.string(), "section-map"}).code, kExitOk);
  EXPECT_EQ(read_json(d / "section_map.json")["schema"], "implorenz.section-map/1");
}

TEST(Io, BinaryPointsRoundTrip) {
  const fs::path d = scratch("binary");
  const std::vector<SectionPoint> pts{{0.1, -0.2}, {1.0, 1.0}, {-1e-300, 0.5}};
  const std::vector<double> w{0.25, 0.5, 0.25};
  io::write_points_binary(d / "p.bin", pts, w);
  std::vector<SectionPoint> back;
  std::vector<double> wb;
  io::read_points_binary(d / "p.bin", back, wb);
  EXPECT_EQ(back, pts);
  EXPECT_EQ(wb, w);
  EXPECT_EQ(fs::file_size(d / "p.bin"), 3 * 3 * sizeof(double));
}

TEST(Io, CsvRejectsRaggedRows) {
  const fs::path d = scratch("csv");
  io::CsvWriter csv(d / "x.csv", {"a", "b"});
  csv << 1.0;
  EXPECT_THROW(csv.end_row(), std::logic_error);
}
