#include "implorenz/entropy.hpp"

#include <cmath>
#include <numbers>

#include "implorenz/errors.hpp"
#include "implorenz/parallel.hpp"
#include "stats.hpp"

namespace implorenz {

bool UnstableCone::contains(const Vec2& w) const {
  const double t = std::tan(half_angle_deg * std::numbers::pi / 180.0);
  return std::abs(w.y()) <= t * std::abs(w.x());
}

TangentStep tangent_step(const TangentFrame& frame, const SectionJetMap& map, const UnstableCone& cone) {
  if (std::abs(frame.base.u) < kSingularGuard)
    throw NumericalError(ErrorKind::SingularInput, "tangent frame on the singular line");
  const MapJet j = map(frame.base);
  const Vec2 w = j.jacobian * frame.dir;
  const double stretch = w.norm();
  TangentStep out;
  out.frame.base = j.image;
  out.frame.dir = w / stretch;
  out.log_stretch = std::log(stretch);
  out.frame.log_sum = frame.log_sum + out.log_stretch;
  out.frame.steps = frame.steps + 1;
  out.in_cone = cone.contains(out.frame.dir);
  return out;
}

EntropyReport entropy_flow(double h_map, double h_map_stderr, double mean_roof, double mean_roof_stderr) {
  if (!(mean_roof > 0)) throw NumericalError(ErrorKind::DegenerateRoof, "mean roof is not positive");
  EntropyReport r;
  r.h_map = h_map;
  r.h_map_stderr = h_map_stderr;
  r.mean_roof = mean_roof;
  r.mean_roof_stderr = mean_roof_stderr;
  r.h_flow = h_map / mean_roof;
  const double a = h_map != 0 ? h_map_stderr / h_map : 0.0;
  const double b = mean_roof_stderr / mean_roof;
  r.h_flow_stderr = std::abs(r.h_flow) * std::sqrt(a * a + b * b);
  return r;
}

namespace {

struct SeedEntropy {
  bool ok = false;
  double log_sum = 0, roof_sum = 0, count = 0;
  std::size_t escapes = 0;
};

}  // namespace

EntropyReport entropy_map(const SectionJetMap& map, const std::function<double(const SectionPoint&)>& roof,
                          const EntropySettings& settings) {
  const OrbitSettings& os = settings.orbits;
  os.validate();
  std::vector<SeedEntropy> per(os.seeds);
  parallel_for(os.seeds, os.workers, [&](std::size_t slot) {
    const std::size_t index = os.first_seed + slot;
    SeedEntropy& se = per[slot];
    auto rng = seeded_rng(os.master_seed ^ 0x5eedf00dULL, index);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    TangentFrame f;
    f.base = random_start(os.master_seed, index);
    try {
      for (std::size_t i = 0; i < os.burn_in; ++i) f.base = map(f.base).image;
      const double a0 = angle(rng);
      f.dir = Vec2(std::cos(a0), std::sin(a0));
      auto align = [&] {
        for (std::size_t i = 0; i < settings.align; ++i) f = tangent_step(f, map, settings.cone).frame;
      };
      align();
      for (std::size_t n = 0; n < os.length; ++n) {
        const double r = roof(f.base);
        const TangentStep st = tangent_step(f, map, settings.cone);
        se.log_sum += st.log_stretch;
        se.roof_sum += r;
        se.count += 1;
        f = st.frame;
        if (!st.in_cone) {
          ++se.escapes;
          align();
        }
      }
      se.ok = true;
    } catch (const NumericalError&) {
      se.ok = false;
    }
  });

  std::vector<std::vector<double>> log_num, roof_num;
  std::vector<double> counts, roofs;
  EntropyReport rep;
  for (std::size_t slot = 0; slot < per.size(); ++slot) {
    const auto& se = per[slot];
    if (!se.ok) {
      ++rep.failed_seeds;
      continue;
    }
    log_num.push_back({se.log_sum});
    roof_num.push_back({se.roof_sum});
    counts.push_back(se.count);
    roofs.push_back(se.roof_sum);
    rep.seeds.push_back(os.first_seed + slot);
    rep.log_sums.push_back(se.log_sum);
    rep.roof_sums.push_back(se.roof_sum);
    rep.counts.push_back(se.count);
    rep.steps += static_cast<std::size_t>(se.count);
    rep.cone_escapes += se.escapes;
  }
  if (counts.empty()) throw NumericalError(ErrorKind::DegenerateRoof, "every entropy orbit failed");
  const auto h = detail::ratio_estimate(log_num, counts);
  const auto r = detail::ratio_estimate(roof_num, counts);
  EntropyReport flow = entropy_flow(h.values[0], h.stderrs[0], r.values[0], r.stderrs[0]);
  rep.h_map = flow.h_map;
  rep.h_map_stderr = flow.h_map_stderr;
  rep.mean_roof = flow.mean_roof;
  rep.mean_roof_stderr = flow.mean_roof_stderr;
  rep.h_flow = flow.h_flow;
  rep.h_flow_stderr = flow.h_flow_stderr;
  return rep;
}

double h_flow_difference_stderr(const EntropyReport& a, const EntropyReport& b) {
  auto influence = [](const EntropyReport& r) {
    std::vector<std::vector<double>> num;
    for (double l : r.log_sums) num.push_back({l});
    return detail::ratio_estimate(num, r.roof_sums).influence;
  };
  if (!a.seeds.empty() && a.seeds == b.seeds) {
    const auto ia = influence(a), ib = influence(b);
    std::vector<double> d(ia.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = ia[i][0] - ib[i][0];
    return detail::stderr_from_influence(d);
  }
  return std::hypot(a.h_flow_stderr, b.h_flow_stderr);
}

OracleResult quotient_entropy_oracle(const GeoParams& p, std::size_t n, std::uint64_t seed,
                                     std::size_t burn_in) {
  if (n < 100) throw ConfigError("oracle orbit needs at least 100 points");
  auto rng = seeded_rng(seed, 0x0e1ac1eULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double u = 0;
  while (std::abs(u) < 1e-6) u = uni(rng);
  auto step = [&](double x) {
    const double a = std::abs(x);
    const double y = p.c * std::pow(a, p.alpha) - 1.0;
    return x > 0 ? y : -y;
  };
  for (std::size_t i = 0; i < burn_in; ++i) u = step(u);
  const double log_ca = std::log(p.c * p.alpha);
  constexpr std::size_t kBatches = 50;
  const std::size_t per_batch = n / kBatches;
  std::vector<double> batch(kBatches, 0.0);
  double sum = 0, sum_nl = 0;
  std::size_t used = 0;
  for (std::size_t b = 0; b < kBatches; ++b) {
    for (std::size_t i = 0; i < per_batch; ++i) {
      const double a = std::max(std::abs(u), kAbsUFloor);
      const double nl = -std::log(a);
      const double g = log_ca - (p.alpha - 1.0) * nl;
      batch[b] += g;
      sum += g;
      sum_nl += nl;
      ++used;
      u = step(u);
      if (u == 0) u = 1e-15;
    }
    batch[b] /= static_cast<double>(per_batch);
  }
  OracleResult out;
  out.n = used;
  out.h = sum / used;
  out.mean_neg_log_u = sum_nl / used;
  out.mean_roof = p.r0 + out.mean_neg_log_u / p.lambda1;
  double ss = 0;
  for (double x : batch) ss += (x - out.h) * (x - out.h);
  out.h_stderr = std::sqrt(ss / (kBatches - 1.0) / kBatches);
  return out;
}

}  // namespace implorenz
