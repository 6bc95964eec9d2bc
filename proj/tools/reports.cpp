#include "reports.hpp"

#include <cmath>
#include <limits>

namespace implorenz::cli {

using nlohmann::json;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

namespace {

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::vector<double> numbers_from(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(number_from(x));
  return v;
}

}  // namespace

json to_json(const ConditionReport& r) {
  json h3_measure = json::array(), h3_upper = json::array();
  for (std::size_t n = 0; n < r.h3.measure.size(); ++n) {
    h3_measure.push_back(numbers(r.h3.measure[n]));
    json row = json::array();
    for (bool b : r.h3.upper_bound[n]) row.push_back(b);
    h3_upper.push_back(row);
  }
  json h6 = json::array();
  for (const auto& row : r.h6)
    h6.push_back({{"r", row.r}, {"lambda_u", number(row.lambda_u)}, {"lambda_s", number(row.lambda_s)}});
  return {
      {"schema", kConditionsSchema},
      {"label", r.label},
      {"all_pass", r.all_pass},
      {"L3",
       {{"Hy", number(r.l3.Hy)},
        {"Gx_inv", number(r.l3.Gx_inv)},
        {"Gx_inv_Hx", number(r.l3.Gx_inv_Hx)},
        {"Gy", number(r.l3.Gy)},
        {"slack_Hy", number(r.l3.slack_Hy)},
        {"slack_Gx_inv", number(r.l3.slack_Gx_inv)},
        {"slack_second", number(r.l3.slack_second)},
        {"slack_third", number(r.l3.slack_third)},
        {"grid", r.l3.grid},
        {"grid_converged", r.l3.grid_converged},
        {"pass", r.l3.pass}}},
      {"H1",
       {{"A", number(r.h1.A)},
        {"alpha", number(r.h1.alpha)},
        {"r2", number(r.h1.r2)},
        {"log_spread", number(r.h1.log_spread)},
        {"samples", r.h1.samples},
        {"fitted", r.h1.fitted},
        {"pass", r.h1.pass}}},
      {"H2",
       {{"half_angle_deg", r.h2.half_angle_deg},
        {"lambda_u", number(r.h2.lambda_u)},
        {"lambda_s", number(r.h2.lambda_s)},
        {"lambda_min", number(r.h2.lambda_min)},
        {"escape_rate", number(r.h2.escape_rate)},
        {"samples", r.h2.samples},
        {"pass", r.h2.pass}}},
      {"H3",
       {{"eps_grid", r.h3.eps_grid},
        {"n_grid", r.h3.n_grid},
        {"measure", h3_measure},
        {"upper_bound", h3_upper},
        {"beta", numbers(r.h3.beta)},
        {"B", numbers(r.h3.B)},
        {"r2", numbers(r.h3.r2)},
        {"beta_mean", number(r.h3.beta_mean)},
        {"B_max", number(r.h3.B_max)},
        {"beta_spread", number(r.h3.beta_spread)},
        {"samples", r.h3.samples},
        {"stable", r.h3.stable},
        {"pass", r.h3.pass}}},
      {"H6", h6},
  };
}

ConditionReport condition_report_from_json(const json& j) {
  if (j.at("schema").get<std::string>() != kConditionsSchema)
    throw std::invalid_argument("not a condition report");
  ConditionReport r;
  r.label = j.at("label").get<std::string>();
  r.all_pass = j.at("all_pass").get<bool>();
  const json& l3 = j.at("L3");
  r.l3.Hy = number_from(l3.at("Hy"));
  r.l3.Gx_inv = number_from(l3.at("Gx_inv"));
  r.l3.Gx_inv_Hx = number_from(l3.at("Gx_inv_Hx"));
  r.l3.Gy = number_from(l3.at("Gy"));
  r.l3.slack_Hy = number_from(l3.at("slack_Hy"));
  r.l3.slack_Gx_inv = number_from(l3.at("slack_Gx_inv"));
  r.l3.slack_second = number_from(l3.at("slack_second"));
  r.l3.slack_third = number_from(l3.at("slack_third"));
  r.l3.grid = l3.at("grid").get<std::size_t>();
  r.l3.grid_converged = l3.at("grid_converged").get<bool>();
  r.l3.pass = l3.at("pass").get<bool>();
  const json& h1 = j.at("H1");
  r.h1.A = number_from(h1.at("A"));
  r.h1.alpha = number_from(h1.at("alpha"));
  r.h1.r2 = number_from(h1.at("r2"));
  r.h1.log_spread = number_from(h1.at("log_spread"));
  r.h1.samples = h1.at("samples").get<std::size_t>();
  r.h1.fitted = h1.at("fitted").get<bool>();
  r.h1.pass = h1.at("pass").get<bool>();
  const json& h2 = j.at("H2");
  r.h2.half_angle_deg = h2.at("half_angle_deg").get<double>();
  r.h2.lambda_u = number_from(h2.at("lambda_u"));
  r.h2.lambda_s = number_from(h2.at("lambda_s"));
  r.h2.lambda_min = number_from(h2.at("lambda_min"));
  r.h2.escape_rate = number_from(h2.at("escape_rate"));
  r.h2.samples = h2.at("samples").get<std::size_t>();
  r.h2.pass = h2.at("pass").get<bool>();
  const json& h3 = j.at("H3");
  r.h3.eps_grid = h3.at("eps_grid").get<std::vector<double>>();
  r.h3.n_grid = h3.at("n_grid").get<std::vector<int>>();
  for (const auto& row : h3.at("measure")) r.h3.measure.push_back(numbers_from(row));
  for (const auto& row : h3.at("upper_bound")) r.h3.upper_bound.push_back(row.get<std::vector<bool>>());
  r.h3.beta = numbers_from(h3.at("beta"));
  r.h3.B = numbers_from(h3.at("B"));
  r.h3.r2 = numbers_from(h3.at("r2"));
  r.h3.beta_mean = number_from(h3.at("beta_mean"));
  r.h3.B_max = number_from(h3.at("B_max"));
  r.h3.beta_spread = number_from(h3.at("beta_spread"));
  r.h3.samples = h3.at("samples").get<std::size_t>();
  r.h3.stable = h3.at("stable").get<bool>();
  r.h3.pass = h3.at("pass").get<bool>();
  for (const auto& row : j.at("H6"))
    r.h6.push_back({row.at("r").get<double>(), number_from(row.at("lambda_u")), number_from(row.at("lambda_s"))});
  return r;
}

json to_json(const EntropyReport& r) {
  return {{"epsilon", r.epsilon},
          {"h_map", number(r.h_map)},
          {"h_map_stderr", number(r.h_map_stderr)},
          {"mean_roof", number(r.mean_roof)},
          {"mean_roof_stderr", number(r.mean_roof_stderr)},
          {"h_flow", number(r.h_flow)},
          {"h_flow_stderr", number(r.h_flow_stderr)},
          {"steps", r.steps},
          {"cone_escapes", r.cone_escapes},
          {"failed_seeds", r.failed_seeds}};
}

json to_json(const BasinReport& r) {
  json clusters = json::array();
  for (const auto& c : r.clusters)
    clusters.push_back({{"size", c.members.size()},
                        {"fraction", c.fraction},
                        {"spread", number(c.spread)},
                        {"separation", number(c.separation)},
                        {"accepted", c.accepted},
                        {"centroid", numbers(c.centroid)}});
  return {{"s", r.s},
          {"seeds", r.seeds},
          {"failed_seeds", r.failed_seeds},
          {"coverage", r.coverage},
          {"tol", r.tol},
          {"clusters", clusters}};
}

json to_json(const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json e = to_json(row.entropy);
    e["epsilon"] = row.epsilon;
    rows.push_back({{"epsilon", row.epsilon},
                    {"ok", row.ok},
                    {"error", row.error},
                    {"distance", number(row.distance.distance)},
                    {"distance_stderr", number(row.distance.standard_error)},
                    {"distance_argmax", row.distance.argmax},
                    {"dh_flow", number(row.dh)},
                    {"dh_flow_stderr", number(row.dh_stderr)},
                    {"entropy", e}});
  }
  return {{"schema", kSweepSchema},
          {"rows", rows},
          {"distance_monotone", {{"pass", r.distance_monotone.pass}, {"margins", numbers(r.distance_monotone.margins)}}},
          {"entropy_monotone", {{"pass", r.entropy_monotone.pass}, {"margins", numbers(r.entropy_monotone.margins)}}},
          {"distance_ratio", number(r.distance_ratio)}};
}

}  // namespace implorenz::cli
