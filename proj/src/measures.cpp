#include "implorenz/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "implorenz/errors.hpp"
#include "implorenz/parallel.hpp"
#include "stats.hpp"

namespace implorenz {

void OrbitSettings::validate() const {
  if (seeds < 1) throw ConfigError("orbit settings need at least one seed");
  if (length < 1) throw ConfigError("orbit length must be positive");
  if (stride < 1) throw ConfigError("orbit stride must be positive");
}

SectionPoint random_start(std::uint64_t master, std::size_t seed_index) {
  auto rng = seeded_rng(master, seed_index);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (;;) {
    const SectionPoint z{uni(rng), uni(rng)};
    if (std::abs(z.u) >= kSingularGuard) return z;
  }
}

std::vector<SeedStatus> sample_orbits(
    const SectionMap& map, const OrbitSettings& settings,
    const std::function<void(std::size_t, const SectionPoint&)>& visit) {
  settings.validate();
  std::vector<SeedStatus> status(settings.seeds);
  parallel_for(settings.seeds, settings.workers, [&](std::size_t slot) {
    SeedStatus& st = status[slot];
    st.index = settings.first_seed + slot;
    SectionPoint z = random_start(settings.master_seed, st.index);
    try {
      for (std::size_t i = 0; i < settings.burn_in; ++i) z = map(z);
      for (std::size_t n = 0; n < settings.length; ++n) {
        visit(slot, z);
        ++st.samples;
        for (std::size_t k = 0; k < settings.stride; ++k) z = map(z);
      }
    } catch (const NumericalError& e) {
      st.ok = false;
      st.error = e.what();
    }
  });
  return status;
}

BirkhoffResult birkhoff_map_average(const SectionMap& map, const SectionPoint& x0, std::size_t n,
                                    const TestFamily& fam, std::size_t burn_in) {
  if (n < 1) throw ConfigError("Birkhoff average needs n >= 1");
  if (std::abs(x0.u) < kSingularGuard)
    throw NumericalError(ErrorKind::SingularInput, "start point inside the singular guard band");
  BirkhoffResult out;
  out.values.assign(fam.size(), 0.0);
  std::vector<double> tmp(fam.size());
  SectionPoint z = x0;
  try {
    for (std::size_t i = 0; i < burn_in; ++i) z = map(z);
    for (std::size_t i = 0; i < n; ++i) {
      fam.eval(z.u, z.v, tmp);
      for (std::size_t k = 0; k < tmp.size(); ++k) out.values[k] += tmp[k];
      ++out.completed;
      if (i + 1 < n) z = map(z);
    }
  } catch (const NumericalError& e) {
    out.truncated = true;
    out.error = e.what();
  }
  if (out.completed > 0)
    for (double& v : out.values) v /= static_cast<double>(out.completed);
  return out;
}

std::size_t EmpiricalMeasure::failed_seeds() const {
  return std::count_if(seeds.begin(), seeds.end(), [](const SeedStatus& s) { return !s.ok; });
}

EmpiricalMeasure empirical_invariant_measure(const SectionMap& map, const OrbitSettings& settings) {
  std::vector<std::vector<SectionPoint>> per_seed(settings.seeds);
  for (auto& v : per_seed) v.reserve(settings.length);
  EmpiricalMeasure mu;
  mu.seeds = sample_orbits(map, settings,
                           [&](std::size_t slot, const SectionPoint& z) { per_seed[slot].push_back(z); });
  mu.burn_in = settings.burn_in;
  mu.length = settings.length;
  mu.stride = settings.stride;
  for (std::size_t s = 0; s < per_seed.size(); ++s) {
    if (!mu.seeds[s].ok) continue;
    mu.seed_offsets.push_back(mu.points.size());
    mu.points.insert(mu.points.end(), per_seed[s].begin(), per_seed[s].end());
  }
  mu.weights.assign(mu.points.size(), mu.points.empty() ? 0.0 : 1.0 / mu.points.size());
  return mu;
}

namespace {

/// Block boundaries [begin, end) of each seed in an empirical measure.
std::vector<std::pair<std::size_t, std::size_t>> seed_blocks(const EmpiricalMeasure& mu) {
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  if (mu.seed_offsets.empty()) {
    if (!mu.points.empty()) blocks.emplace_back(0, mu.points.size());
    return blocks;
  }
  for (std::size_t i = 0; i < mu.seed_offsets.size(); ++i) {
    const std::size_t end = i + 1 < mu.seed_offsets.size() ? mu.seed_offsets[i + 1] : mu.points.size();
    blocks.emplace_back(mu.seed_offsets[i], end);
  }
  return blocks;
}

void fill_evaluation(MeasureEvaluation& m, const std::vector<std::vector<double>>& num,
                     const std::vector<double>& den, std::vector<std::size_t> seeds) {
  auto r = detail::ratio_estimate(num, den);
  m.values = std::move(r.values);
  m.stderrs = std::move(r.stderrs);
  m.influence = std::move(r.influence);
  m.seeds = std::move(seeds);
}

}  // namespace

MeasureEvaluation integrate(const EmpiricalMeasure& mu, const TestFamily& fam) {
  const auto blocks = seed_blocks(mu);
  std::vector<std::vector<double>> num(blocks.size(), std::vector<double>(fam.size(), 0.0));
  std::vector<double> den(blocks.size(), 0.0);
  std::vector<double> tmp(fam.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i = blocks[b].first; i < blocks[b].second; ++i) {
      fam.eval(mu.points[i].u, mu.points[i].v, tmp);
      const double w = mu.weights.empty() ? 1.0 : mu.weights[i];
      for (std::size_t j = 0; j < tmp.size(); ++j) num[b][j] += w * tmp[j];
      den[b] += w;
    }
  }
  MeasureEvaluation out;
  out.family = fam.id();
  std::vector<std::size_t> ids;
  for (const auto& st : mu.seeds)
    if (st.ok) ids.push_back(st.index);
  if (ids.size() != blocks.size()) ids.clear();
  fill_evaluation(out, num, den, std::move(ids));
  return out;
}

double weak_star_distance(const MeasureEvaluation& m1, const MeasureEvaluation& m2) {
  if (m1.family != m2.family || m1.values.size() != m2.values.size())
    throw NumericalError(ErrorKind::FamilyMismatch,
                         "measure evaluations use different test families (" + m1.family + " vs " +
                             m2.family + ")");
  double d = 0;
  for (std::size_t j = 0; j < m1.values.size(); ++j)
    d = std::max(d, std::abs(m1.values[j] - m2.values[j]));
  return d;
}

double pushforward_defect(const EmpiricalMeasure& mu, const SectionMap& map, const TestFamily& fam) {
  std::vector<double> acc(fam.size(), 0.0), a(fam.size()), b(fam.size());
  double wsum = 0;
  for (std::size_t i = 0; i < mu.points.size(); ++i) {
    const SectionPoint& z = mu.points[i];
    SectionPoint fz;
    try {
      fz = map(z);
    } catch (const NumericalError&) {
      continue;
    }
    fam.eval(z.u, z.v, a);
    fam.eval(fz.u, fz.v, b);
    const double w = mu.weights.empty() ? 1.0 : mu.weights[i];
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w * (b[j] - a[j]);
    wsum += w;
  }
  double d = 0;
  for (double v : acc) d = std::max(d, std::abs(v) / wsum);
  return d;
}

// ------------------------------------------------------------------ basins

SeedAverages per_seed_averages(const SectionMap& map, const TestFamily& fam,
                               const OrbitSettings& settings) {
  std::vector<std::vector<double>> sums(settings.seeds, std::vector<double>(fam.size(), 0.0));
  std::vector<std::vector<double>> scratch(settings.seeds, std::vector<double>(fam.size()));
  const auto status = sample_orbits(map, settings, [&](std::size_t slot, const SectionPoint& z) {
    auto& tmp = scratch[slot];
    fam.eval(z.u, z.v, tmp);
    auto& s = sums[slot];
    for (std::size_t j = 0; j < tmp.size(); ++j) s[j] += tmp[j];
  });
  SeedAverages out;
  for (std::size_t slot = 0; slot < status.size(); ++slot) {
    if (!status[slot].ok || status[slot].samples == 0) {
      ++out.failed;
      continue;
    }
    for (double& v : sums[slot]) v /= static_cast<double>(status[slot].samples);
    out.seed_index.push_back(status[slot].index);
    out.rows.push_back(std::move(sums[slot]));
  }
  return out;
}

namespace {

double sup_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

BasinReport cluster_basins(const std::vector<std::vector<double>>& rows, double tol,
                           std::size_t failed_seeds) {
  if (rows.size() < 2) throw ConfigError("basin clustering needs at least two seeds");
  if (!(tol > 0)) throw ConfigError("clustering cutoff must be positive");
  const std::size_t n = rows.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (sup_dist(rows[i], rows[j]) <= tol) {
        const std::size_t a = find_root(parent, i), b = find_root(parent, j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }

  std::vector<Cluster> clusters;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find_root(parent, i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(clusters.size());
      clusters.emplace_back();
    }
    clusters[slot[r]].members.push_back(i);
  }
  const std::size_t k = rows[0].size();
  for (auto& c : clusters) {
    c.centroid.assign(k, 0.0);
    for (std::size_t i : c.members)
      for (std::size_t j = 0; j < k; ++j) c.centroid[j] += rows[i][j];
    for (double& v : c.centroid) v /= static_cast<double>(c.members.size());
    for (std::size_t i : c.members) c.spread = std::max(c.spread, sup_dist(rows[i], c.centroid));
    c.fraction = static_cast<double>(c.members.size()) / static_cast<double>(n);
  }
  for (std::size_t a = 0; a < clusters.size(); ++a)
    for (std::size_t b = 0; b < clusters.size(); ++b)
      if (a != b)
        clusters[a].separation =
            std::min(clusters[a].separation, sup_dist(clusters[a].centroid, clusters[b].centroid));
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const Cluster& x, const Cluster& y) { return x.members.size() > y.members.size(); });

  BasinReport rep;
  rep.tol = tol;
  rep.seeds = n + failed_seeds;
  rep.failed_seeds = failed_seeds;
  const std::size_t min_size =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(0.005 * static_cast<double>(n))));
  std::size_t covered = 0;
  for (auto& c : clusters) {
    c.accepted = c.members.size() >= min_size && c.separation > 3 * c.spread;
    if (c.accepted) {
      ++rep.s;
      covered += c.members.size();
    }
  }
  rep.coverage = static_cast<double>(covered) / static_cast<double>(n);
  rep.clusters = std::move(clusters);
  return rep;
}

BasinProbe basin_probe(const SectionMap& map, const TestFamily& fam, const OrbitSettings& settings,
                       double tol) {
  BasinProbe probe;
  const auto a = per_seed_averages(map, fam, settings);
  probe.base = cluster_basins(a.rows, tol, a.failed);
  OrbitSettings twice = settings;
  twice.seeds = 2 * settings.seeds;
  const auto b = per_seed_averages(map, fam, twice);
  probe.doubled = cluster_basins(b.rows, tol, b.failed);
  probe.stable = probe.base.s == probe.doubled.s;
  return probe;
}

// ------------------------------------------------------ suspension lift

GeoArcModel::GeoArcModel(GeoImpulsiveSystem sys, FlowFamily fam)
    : sys_(std::move(sys)), fam_(std::move(fam)) {}

double GeoArcModel::roof(const SectionPoint& z) const { return sys_.roof_Y(z); }

SectionPoint GeoArcModel::next(const SectionPoint& z) const { return sys_.tilde_F(z); }

void GeoArcModel::integrate_state(const SuspensionState& x, double a, double b,
                                  std::span<double> out) const {
  const double s0 = sys_.spec().s0;
  SectionPoint base = x.base;
  double h0 = x.height;
  double t = 0;
  while (t < b) {
    const double len = geo_R(base, sys_.geo()) - h0;
    const double lo = std::max(a, t), hi = std::min(b, t + len);
    if (hi > lo) fam_.add_height_integral(base.u, base.v, h0 + (lo - t), h0 + (hi - t), out);
    t += len;
    if (t >= b) break;
    base = sys_.tilde_F(base);
    h0 = s0;
  }
}

void GeoArcModel::integrate(const SectionPoint& z, double a, double b, std::span<double> out) const {
  integrate_state({z, sys_.spec().s0}, a, b, out);
}

OdeArcModel::OdeArcModel(OdeImpulsiveSystem sys, FlowFamily fam, double dt)
    : sys_(std::move(sys)), fam_(std::move(fam)), dt_(dt) {
  if (!(dt > 0) || dt > 0.01) throw ConfigError("quadrature step must lie in (0, 0.01]");
}

double OdeArcModel::roof(const SectionPoint& z) const {
  const Point3 p = sys_.chart().from_section(z);
  return static_cast<double>(sys_.flow().flow_to_section(p, sys_.chart()).flight_time - sys_.spec().s0);
}

SectionPoint OdeArcModel::next(const SectionPoint& z) const {
  const Point3 p = sys_.chart().from_section(z);
  return displace(sys_.flow().flow_to_section(p, sys_.chart()).coords, sys_.spec()).section();
}

void OdeArcModel::integrate_state(const Point3& x, double a, double b, std::span<double> out) const {
  const std::size_t k = fam_.size();
  struct Sample {
    double t;
    std::size_t seg;
    std::vector<double> vals;
  };
  std::vector<Sample> samples;
  auto eval = [&](const Point3& p) {
    double u, v, h;
    FlowFamily::lorenz_coords(p, u, v, h);
    std::vector<double> vals(k);
    fam_.eval(u, v, h, vals);
    return vals;
  };
  const auto tr = sys_.trajectory(x, b, dt_, [&](Real t, const Point3& p, std::size_t seg) {
    samples.push_back({static_cast<double>(t), seg, eval(p)});
  });
  if (tr.no_return)
    throw NumericalError(ErrorKind::NoReturn, "arc reached the stable manifold of the origin");
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const Sample& p = samples[i];
    const Sample& q = samples[i + 1];
    if (p.seg != q.seg || !(q.t > p.t)) continue;
    const double lo = std::max(a, p.t), hi = std::min(b, q.t);
    if (!(hi > lo)) continue;
    const double wl = (lo - p.t) / (q.t - p.t), wh = (hi - p.t) / (q.t - p.t);
    for (std::size_t j = 0; j < k; ++j) {
      const double fl = p.vals[j] + wl * (q.vals[j] - p.vals[j]);
      const double fh = p.vals[j] + wh * (q.vals[j] - p.vals[j]);
      out[j] += 0.5 * (fl + fh) * (hi - lo);
    }
  }
}

void OdeArcModel::integrate(const SectionPoint& z, double a, double b, std::span<double> out) const {
  const Point3 x = sys_.flow().integrate(sys_.chart().from_section(z), sys_.spec().s0);
  integrate_state(x, a, b, out);
}

namespace {

/// Per-block accumulators for the lift and the invariance defect.
struct LiftBlock {
  std::vector<double> nu_num, defect_num, scratch;
  double roof_sum = 0, roof_sq = 0;
  std::size_t samples = 0, skipped = 0;

  explicit LiftBlock(std::size_t k) : nu_num(k, 0.0), defect_num(k, 0.0), scratch(k) {}

  void add(const ArcModel& model, const SectionPoint& z, double s, bool want_nu, bool want_defect) {
    double r;
    try {
      if (std::abs(z.u) < kSingularGuard)
        throw NumericalError(ErrorKind::SingularInput, "singular sample");
      r = model.roof(z);
      if (want_nu) {
        std::fill(scratch.begin(), scratch.end(), 0.0);
        model.integrate(z, 0.0, r, scratch);
        for (std::size_t j = 0; j < scratch.size(); ++j) nu_num[j] += scratch[j];
      }
      if (want_defect && s > 0) {
        // int_s^{s+R} - int_0^R = int_R^{R+s} - int_0^s
        std::fill(scratch.begin(), scratch.end(), 0.0);
        model.integrate(z, r, r + s, scratch);
        for (std::size_t j = 0; j < scratch.size(); ++j) defect_num[j] += scratch[j];
        std::fill(scratch.begin(), scratch.end(), 0.0);
        model.integrate(z, 0.0, s, scratch);
        for (std::size_t j = 0; j < scratch.size(); ++j) defect_num[j] -= scratch[j];
      }
    } catch (const NumericalError&) {
      ++skipped;
      return;
    }
    roof_sum += r;
    roof_sq += r * r;
    ++samples;
  }
};

void finish_lift(const std::vector<LiftBlock>& blocks, const std::vector<std::size_t>& ids,
                 const ArcModel& model, LiftResult* lift, InvarianceDefect* defect) {
  std::vector<std::vector<double>> nu_num, def_num;
  std::vector<double> den;
  std::vector<std::size_t> used;
  std::size_t samples = 0, skipped = 0;
  double rs = 0, rsq = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (b.samples == 0) continue;
    if (i < ids.size()) used.push_back(ids[i]);
    nu_num.push_back(b.nu_num);
    def_num.push_back(b.defect_num);
    den.push_back(b.roof_sum);
    samples += b.samples;
    skipped += b.skipped;
    rs += b.roof_sum;
    rsq += b.roof_sq;
  }
  if (samples == 0) throw NumericalError(ErrorKind::DegenerateRoof, "no usable samples for the lift");
  if (lift) {
    lift->nu.family = model.family().id();
    fill_evaluation(lift->nu, nu_num, den, used.size() == den.size() ? used : std::vector<std::size_t>{});
    lift->samples = samples;
    lift->skipped = skipped;
    lift->mean_roof = rs / samples;
    // Blocks are independent seeds; use their roof sums for the error.
    double ss = 0;
    for (const auto& b : blocks)
      if (b.samples) {
        const double e = b.roof_sum - lift->mean_roof * b.samples;
        ss += e * e;
      }
    lift->mean_roof_stderr =
        den.size() > 1 ? std::sqrt(ss * den.size() / (den.size() - 1.0)) / samples
                       : std::sqrt(std::max(0.0, rsq / samples - lift->mean_roof * lift->mean_roof) / samples);
  }
  if (defect) {
    auto r = detail::ratio_estimate(def_num, den);
    defect->defects = std::move(r.values);
    defect->stderrs = std::move(r.stderrs);
    defect->samples = samples;
    defect->max_defect = 0;
    for (std::size_t j = 0; j < defect->defects.size(); ++j)
      if (std::abs(defect->defects[j]) > defect->max_defect) {
        defect->max_defect = std::abs(defect->defects[j]);
        defect->argmax = j;
      }
  }
}

std::vector<std::size_t> ok_seed_ids(const EmpiricalMeasure& mu) {
  std::vector<std::size_t> ids;
  for (const auto& st : mu.seeds)
    if (st.ok) ids.push_back(st.index);
  return ids;
}

std::vector<LiftBlock> lift_blocks(const EmpiricalMeasure& mu, const ArcModel& model, double s,
                                   bool want_nu, bool want_defect, int workers) {
  const auto ranges = seed_blocks(mu);
  std::vector<LiftBlock> blocks(ranges.size(), LiftBlock(model.family().size()));
  parallel_for(ranges.size(), workers, [&](std::size_t b) {
    for (std::size_t i = ranges[b].first; i < ranges[b].second; ++i)
      blocks[b].add(model, mu.points[i], s, want_nu, want_defect);
  });
  return blocks;
}

}  // namespace

LiftResult suspension_lift(const EmpiricalMeasure& mu, const ArcModel& model, int workers) {
  LiftResult out;
  finish_lift(lift_blocks(mu, model, 0.0, true, false, workers), ok_seed_ids(mu), model, &out,
              nullptr);
  return out;
}

InvarianceDefect flow_invariance_defect(const EmpiricalMeasure& mu, const ArcModel& model, double s,
                                        int workers) {
  if (s < 0 || s > 5) throw ConfigError("invariance shift must lie in [0, 5]");
  InvarianceDefect out;
  finish_lift(lift_blocks(mu, model, s, false, true, workers), ok_seed_ids(mu), model, nullptr,
              &out);
  return out;
}

StreamingLift streaming_lift(const ArcModel& model, const OrbitSettings& settings, double s) {
  if (s < 0 || s > 5) throw ConfigError("invariance shift must lie in [0, 5]");
  std::vector<LiftBlock> blocks(settings.seeds, LiftBlock(model.family().size()));
  StreamingLift out;
  out.seeds = sample_orbits([&](const SectionPoint& z) { return model.next(z); }, settings,
                            [&](std::size_t slot, const SectionPoint& z) {
                              blocks[slot].add(model, z, s, true, true);
                            });
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!out.seeds[i].ok) blocks[i] = LiftBlock(model.family().size());
    ids.push_back(out.seeds[i].index);
  }
  finish_lift(blocks, ids, model, &out.lift, s > 0 ? &out.defect : nullptr);
  return out;
}

std::vector<double> birkhoff_flow_average(const ArcModel& model, const SectionPoint& z, double T) {
  if (!(T > 0)) throw ConfigError("flow average needs T > 0");
  std::vector<double> out(model.family().size(), 0.0);
  model.integrate(z, 0.0, T, out);
  for (double& v : out) v /= T;
  return out;
}

FlowAverage birkhoff_flow_average(const ArcModel& model, const OrbitSettings& settings, double T) {
  settings.validate();
  std::vector<std::vector<double>> rows(settings.seeds);
  std::vector<char> ok(settings.seeds, 0);
  parallel_for(settings.seeds, settings.workers, [&](std::size_t slot) {
    SectionPoint z = random_start(settings.master_seed, settings.first_seed + slot);
    try {
      for (std::size_t i = 0; i < settings.burn_in; ++i) z = model.next(z);
      rows[slot] = birkhoff_flow_average(model, z, T);
      ok[slot] = 1;
    } catch (const NumericalError&) {
    }
  });
  FlowAverage out;
  const std::size_t k = model.family().size();
  out.values.assign(k, 0.0);
  out.stderrs.assign(k, std::numeric_limits<double>::quiet_NaN());
  std::size_t n = 0;
  for (std::size_t s = 0; s < rows.size(); ++s)
    if (ok[s]) {
      ++n;
      for (std::size_t j = 0; j < k; ++j) out.values[j] += rows[s][j];
    }
  out.trajectories = n;
  if (n == 0) return out;
  for (double& v : out.values) v /= static_cast<double>(n);
  if (n > 1) {
    for (std::size_t j = 0; j < k; ++j) {
      double ss = 0;
      for (std::size_t s = 0; s < rows.size(); ++s)
        if (ok[s]) ss += (rows[s][j] - out.values[j]) * (rows[s][j] - out.values[j]);
      out.stderrs[j] = std::sqrt(ss / (n - 1.0) / n);
    }
  }
  return out;
}

}  // namespace implorenz

namespace implorenz {

double difference_stderr(const MeasureEvaluation& m1, const MeasureEvaluation& m2, std::size_t j) {
  if (!m1.seeds.empty() && m1.seeds == m2.seeds && m1.influence.size() == m1.seeds.size() &&
      m2.influence.size() == m2.seeds.size()) {
    std::vector<double> d(m1.seeds.size());
    for (std::size_t b = 0; b < d.size(); ++b) d[b] = m1.influence[b][j] - m2.influence[b][j];
    return detail::stderr_from_influence(d);
  }
  const double a = m1.stderrs.at(j), b = m2.stderrs.at(j);
  return std::sqrt(a * a + b * b);
}

DistanceEstimate weak_star_estimate(const MeasureEvaluation& m1, const MeasureEvaluation& m2) {
  DistanceEstimate out;
  out.distance = weak_star_distance(m1, m2);
  for (std::size_t j = 0; j < m1.values.size(); ++j)
    if (std::abs(m1.values[j] - m2.values[j]) == out.distance) {
      out.argmax = j;
      break;
    }
  out.standard_error = m1.values.empty() ? 0.0 : difference_stderr(m1, m2, out.argmax);
  return out;
}

}  // namespace implorenz
