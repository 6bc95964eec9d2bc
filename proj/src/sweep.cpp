#include "implorenz/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "implorenz/errors.hpp"
#include "implorenz/poincare.hpp"

namespace implorenz {

SweepFactory geometric_sweep_factory(const GeoParams& geo, const ImpulseSpec& base) {
  return [geo, base](double eps) {
    ImpulseSpec spec = base;
    spec.epsilon = eps;
    GeoImpulsiveSystem sys(geo, spec);
    SweepPoint pt;
    pt.arc = std::make_shared<GeoArcModel>(sys, FlowFamily(4));
    pt.jet = [sys](const SectionPoint& z) { return sys.tilde_F_jet(z); };
    return pt;
  };
}

SweepFactory ode_sweep_factory(const OdeImpulsiveSystem& base, double arc_dt) {
  return [base, arc_dt](double eps) {
    ImpulseSpec spec = base.spec();
    spec.epsilon = eps;
    OdeImpulsiveSystem sys(base.flow(), base.chart(), spec);
    SweepPoint pt;
    pt.arc = std::make_shared<OdeArcModel>(sys, FlowFamily(4), arc_dt);
    auto poincare = std::make_shared<OdePoincare>(sys);
    pt.jet = [poincare](const SectionPoint& z) { return poincare->tilde_F_Y_jet(z); };
    return pt;
  };
}

namespace {

// value[i] must not exceed value[i-1] by more than 2 se[i].
MonotoneCheck monotone(const std::vector<double>& value, const std::vector<double>& se,
                       const std::vector<bool>& ok) {
  MonotoneCheck m;
  m.pass = true;
  for (std::size_t i = 1; i < value.size(); ++i) {
    if (!ok[i] || !ok[i - 1]) {
      m.margins.push_back(std::nan(""));
      m.pass = false;
      continue;
    }
    const double margin = value[i - 1] + 2.0 * se[i] - value[i];
    m.margins.push_back(margin);
    if (!(margin >= 0)) m.pass = false;
  }
  return m;
}

}  // namespace

SweepResult stability_sweep(const SweepFactory& factory, const SweepSettings& settings) {
  settings.orbits.validate();
  std::vector<double> eps = settings.epsilons;
  if (std::find(eps.begin(), eps.end(), 0.0) == eps.end()) eps.push_back(0.0);
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());

  SweepResult out;
  out.rows.resize(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    SweepRow& row = out.rows[i];
    row.epsilon = eps[i];
    try {
      const SweepPoint pt = factory(eps[i]);
      EntropySettings es;
      es.orbits = settings.orbits;
      es.align = settings.align;
      es.cone = settings.cone;
      const ArcModel& arc = *pt.arc;
      row.entropy = entropy_map(pt.jet, [&arc](const SectionPoint& z) { return arc.roof(z); }, es);
      row.entropy.epsilon = eps[i];
      row.lift = streaming_lift(arc, settings.orbits, 0.0).lift;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }

  const SweepRow& ref = out.rows.back();
  std::vector<double> d, d_se, dh, dh_se;
  std::vector<bool> ok;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    SweepRow& row = out.rows[i];
    if (row.ok && ref.ok) {
      row.distance = weak_star_estimate(row.lift.nu, ref.lift.nu);
      row.dh = row.entropy.h_flow - ref.entropy.h_flow;
      row.dh_stderr = &row == &ref ? 0.0 : h_flow_difference_stderr(row.entropy, ref.entropy);
    }
    ok.push_back(row.ok && ref.ok);
    d.push_back(row.distance.distance);
    dh.push_back(std::abs(row.dh));
    // The sequence step compares consecutive rows, so the relevant spread is
    // that of their difference.
    if (i == 0) {
      d_se.push_back(0);
      dh_se.push_back(0);
    } else {
      const SweepRow& prev = out.rows[i - 1];
      d_se.push_back(std::hypot(row.distance.standard_error, prev.distance.standard_error));
      dh_se.push_back(row.ok && prev.ok ? h_flow_difference_stderr(row.entropy, prev.entropy) : 0.0);
    }
  }
  out.distance_monotone = monotone(d, d_se, ok);
  out.entropy_monotone = monotone(dh, dh_se, ok);
  if (out.rows.size() >= 3 && out.rows.front().ok) {
    const double first = out.rows.front().distance.distance;
    const double last = out.rows[out.rows.size() - 2].distance.distance;
    out.distance_ratio = first > 0 ? last / first : std::nan("");
  }
  return out;
}

}  // namespace implorenz
