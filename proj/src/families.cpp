#include "implorenz/families.hpp"

#include <cmath>
#include <numbers>

#include "implorenz/errors.hpp"

namespace implorenz {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kMaxDegree = 32;
}  // namespace

TestFamily::TestFamily(int degree) : degree_(degree) {
  if (degree < 0 || degree > kMaxDegree) throw ConfigError("test family degree must lie in [0, 32]");
  for (int j = 0; j <= degree; ++j)
    for (int k = 0; k <= degree; ++k) terms_.push_back({false, j, k});
  for (int j = 1; j <= degree; ++j)
    for (int k = 1; k <= degree; ++k) terms_.push_back({true, j, k});
}

std::string TestFamily::id() const { return "trig-d" + std::to_string(degree_); }

void TestFamily::eval(double u, double v, std::span<double> out) const {
  double cu[kMaxDegree + 1], su[kMaxDegree + 1], cv[kMaxDegree + 1];
  for (int j = 0; j <= degree_; ++j) {
    cu[j] = std::cos(j * kPi * u);
    su[j] = std::sin(j * kPi * u);
    cv[j] = std::cos(j * kPi * v);
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& t = terms_[i];
    out[i] = (t.sine ? su[t.j] : cu[t.j]) * cv[t.k];
  }
}

std::vector<double> TestFamily::eval(const SectionPoint& p) const {
  std::vector<double> out(size());
  eval(p.u, p.v, out);
  return out;
}

double TestFamily::lipschitz(std::size_t i) const {
  const Term& t = terms_.at(i);
  return kPi * (t.j + t.k);
}

std::string TestFamily::describe(std::size_t i) const {
  const Term& t = terms_.at(i);
  return std::string(t.sine ? "sin" : "cos") + "(" + std::to_string(t.j) + "pi u)cos(" +
         std::to_string(t.k) + "pi v)";
}

FlowFamily::FlowFamily(int degree) : section_(degree) {}

std::string FlowFamily::id() const { return "flow-" + section_.id(); }

void FlowFamily::eval(double u, double v, double h, std::span<double> out) const {
  const std::size_t n = section_.size();
  double base[(kMaxDegree + 1) * (kMaxDegree + 1) * 2];
  section_.eval(u, v, std::span<double>(base, n));
  const double c = std::cos(kPi * h / 2), s = std::sin(kPi * h / 2);
  for (std::size_t i = 0; i < n; ++i) {
    out[3 * i] = base[i];
    out[3 * i + 1] = base[i] * c;
    out[3 * i + 2] = base[i] * s;
  }
}

void FlowFamily::add_height_integral(double u, double v, double h1, double h2,
                                     std::span<double> out) const {
  const std::size_t n = section_.size();
  double base[(kMaxDegree + 1) * (kMaxDegree + 1) * 2];
  section_.eval(u, v, std::span<double>(base, n));
  const double w = h2 - h1;
  const double ic = (2 / kPi) * (std::sin(kPi * h2 / 2) - std::sin(kPi * h1 / 2));
  const double is = (2 / kPi) * (std::cos(kPi * h1 / 2) - std::cos(kPi * h2 / 2));
  for (std::size_t i = 0; i < n; ++i) {
    out[3 * i] += base[i] * w;
    out[3 * i + 1] += base[i] * ic;
    out[3 * i + 2] += base[i] * is;
  }
}

void FlowFamily::lorenz_coords(const Point3& p, double& u, double& v, double& h) {
  u = static_cast<double>(p[0]) / 20.0;
  v = static_cast<double>(p[1]) / 27.0;
  h = static_cast<double>(p[2]) / 13.5;
}

}  // namespace implorenz
