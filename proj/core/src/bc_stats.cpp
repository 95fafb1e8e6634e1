#include "bclab/bc_stats.hpp"

#include <algorithm>
#include <cmath>

#include "bclab/fit.hpp"
#include "bclab/rng.hpp"

namespace bclab {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::uint64_t HitTrace::S_at(std::uint64_t n) const {
  auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), n);
  if (it == checkpoints.end() || *it != n) throw IndexError("no checkpoint recorded at n");
  return S[static_cast<std::size_t>(it - checkpoints.begin())];
}

double HitTrace::E_at(std::uint64_t n) const {
  auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), n);
  if (it == checkpoints.end() || *it != n) throw IndexError("no checkpoint recorded at n");
  return E[static_cast<std::size_t>(it - checkpoints.begin())];
}

std::vector<std::uint64_t> make_checkpoints(std::uint64_t i0, std::uint64_t n,
                                            std::uint64_t stride) {
  std::vector<std::uint64_t> cps;
  if (stride > 0) {
    for (std::uint64_t c = i0; c < n; c += stride) cps.push_back(c);
  } else {
    double c = static_cast<double>(std::max<std::uint64_t>(i0, 2));
    while (c < static_cast<double>(n)) {
      cps.push_back(static_cast<std::uint64_t>(std::ceil(c)));
      c *= 1.5;
    }
    for (std::uint64_t d = 10; d <= n && d != 0; d *= 10) {
      if (d >= i0) cps.push_back(d);
      if (d > n / 10) break;
    }
  }
  cps.push_back(n);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  while (!cps.empty() && cps.front() < i0) cps.erase(cps.begin());
  return cps;
}

HitTrace run_hits(const MapSystem& map, const TargetSchedule& targets, const Orbit& orbit) {
  const std::uint64_t n = orbit.length;
  const std::uint64_t i0 = targets.first_index();
  if (targets.last_index() < n)
    throw ConfigError("run_hits: schedule shorter than the orbit");
  if (n < i0) throw ConfigError("run_hits: orbit shorter than the schedule start");

  HitTrace trace;
  trace.seed = orbit.seed;
  trace.orbit_index = orbit.seed_index;
  trace.first_index = i0;
  trace.checkpoints = make_checkpoints(i0, n, orbit.checkpoint_stride);
  trace.S.reserve(trace.checkpoints.size());
  trace.E.reserve(trace.checkpoints.size());

  std::uint64_t S = 0;
  double E = 0.0;
  std::uint64_t last_hit = 0;
  std::size_t next_cp = 0;

  auto consume = [&](std::uint64_t i, bool hit, double mu) {
    E += mu;
    if (hit) {
      ++S;
      last_hit = i;
    }
    if (next_cp < trace.checkpoints.size() && trace.checkpoints[next_cp] == i) {
      trace.S.push_back(S);
      trace.E.push_back(E);
      ++next_cp;
    }
  };

  if (map.kind() == MapKind::iid_control) {
    CounterRng rng(orbit.seed, Stream::iid_hits, orbit.seed_index);
    for (std::uint64_t i = i0; i <= n; ++i) {
      double mu = targets.measure(i);
      consume(i, rng.next_unit() < mu, mu);
    }
  } else {
    OrbitStream stream(map, orbit);
    bool hit = false;
    if (i0 == 0) {
      double mu = targets.measure_and_test(0, stream.current(), &hit);
      consume(0, hit, mu);
    }
    for (std::uint64_t i = 1; i <= n; ++i) {
      double x = stream.step();
      if (i >= i0) {
        double mu = targets.measure_and_test(i, x, &hit);
        consume(i, hit, mu);
      }
    }
  }

  // Checkpoints below i0 were stripped by make_checkpoints; every remaining
  // one is visited, so the arrays are full here.
  trace.total_hits = S;
  trace.last_hit = last_hit;
  return trace;
}

double expected_hits(const TargetSchedule& targets, std::uint64_t n) {
  const std::uint64_t i0 = targets.first_index();
  if (n < i0) return 0.0;
  double E = 0.0;
  std::uint64_t hi = std::min(n, targets.last_index());
  for (std::uint64_t i = i0; i <= hi; ++i) E += targets.measure(i);
  return E;
}

EnsembleSummary sbc_report(std::span<const HitTrace> traces) {
  if (traces.size() < 2) throw ConfigError("sbc_report: need at least 2 traces");
  EnsembleSummary s;
  s.n = traces.front().final_n();
  s.first_index = traces.front().first_index;
  s.E_final = traces.front().final_E();

  std::vector<std::size_t> order(traces.size());
  for (std::size_t k = 0; k < traces.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return traces[a].orbit_index < traces[b].orbit_index;
  });

  double sum_sq = 0.0, sum_sq_ratio = 0.0;
  std::uint64_t half = s.first_index + (s.n - s.first_index) / 2;
  std::uint64_t decade = s.n / 10;
  std::size_t plateaus = 0, active = 0;
  for (std::size_t k : order) {
    const HitTrace& t = traces[k];
    s.final_ratios.push_back(t.final_ratio());
    s.last_hits.push_back(t.last_hit);
    s.orbit_index.push_back(t.orbit_index);
    double dev = static_cast<double>(t.final_S()) - t.final_E();
    sum_sq += dev * dev;
    if (t.final_E() > 0.0) sum_sq_ratio += (dev * dev) / (t.final_E() * t.final_E());
    if (t.last_hit <= half) ++plateaus;
    if (t.last_hit > decade) ++active;
  }
  double count = static_cast<double>(traces.size());
  s.median_ratio = median_of(s.final_ratios);
  s.mean_sq_deviation = sum_sq / count;
  s.variance_ratio = sum_sq_ratio / count;
  s.plateau_fraction = static_cast<double>(plateaus) / count;
  s.active_fraction = static_cast<double>(active) / count;
  return s;
}

EnsembleSummary merge(const EnsembleSummary& a, const EnsembleSummary& b) {
  if (a.final_ratios.empty()) return b;
  if (b.final_ratios.empty()) return a;
  EnsembleSummary s;
  s.n = a.n;
  s.first_index = a.first_index;
  s.E_final = a.E_final;

  // Merge the per-orbit rows in orbit-index order, then recompute the
  // aggregate fields from the pooled rows; this makes merge associative
  // and commutative by construction.
  std::size_t ia = 0, ib = 0;
  auto take = [&](const EnsembleSummary& src, std::size_t i) {
    s.final_ratios.push_back(src.final_ratios[i]);
    s.last_hits.push_back(src.last_hits[i]);
    s.orbit_index.push_back(src.orbit_index[i]);
  };
  while (ia < a.orbit_index.size() || ib < b.orbit_index.size()) {
    if (ib >= b.orbit_index.size() ||
        (ia < a.orbit_index.size() && a.orbit_index[ia] <= b.orbit_index[ib])) {
      take(a, ia++);
    } else {
      take(b, ib++);
    }
  }

  double count = static_cast<double>(s.final_ratios.size());
  double na = static_cast<double>(a.final_ratios.size());
  double nb = static_cast<double>(b.final_ratios.size());
  s.median_ratio = median_of(s.final_ratios);
  s.mean_sq_deviation = (a.mean_sq_deviation * na + b.mean_sq_deviation * nb) / count;
  s.variance_ratio = (a.variance_ratio * na + b.variance_ratio * nb) / count;
  std::uint64_t half = s.first_index + (s.n - s.first_index) / 2;
  std::uint64_t decade = s.n / 10;
  std::size_t plateaus = 0, active = 0;
  for (std::uint64_t lh : s.last_hits) {
    if (lh <= half) ++plateaus;
    if (lh > decade) ++active;
  }
  s.plateau_fraction = static_cast<double>(plateaus) / count;
  s.active_fraction = static_cast<double>(active) / count;
  return s;
}

VarianceRatio variance_ratio(std::span<const HitTrace> traces, std::uint64_t n) {
  VarianceRatio v;
  v.traces = traces.size();
  v.wide_confidence = traces.size() < 30;
  if (traces.empty()) return v;
  double sum = 0.0;
  for (const HitTrace& t : traces) {
    double S = static_cast<double>(t.S_at(n));
    double E = t.E_at(n);
    if (E > 0.0) sum += (S - E) * (S - E) / (E * E);
  }
  v.value = sum / static_cast<double>(traces.size());
  return v;
}

SprindzukReport sprindzuk_monitor(std::span<const HitTrace> traces, double epsilon) {
  if (traces.empty()) throw ConfigError("sprindzuk_monitor: no traces");
  const HitTrace& ref = traces.front();
  for (const HitTrace& t : traces) {
    if (t.checkpoints != ref.checkpoints)
      throw ConfigError("sprindzuk_monitor: traces disagree on checkpoints");
  }
  SprindzukReport rep;
  rep.epsilon = epsilon;
  const double activation = std::exp(1.0);

  std::vector<std::size_t> active_idx;
  for (std::size_t c = 0; c < ref.checkpoints.size(); ++c) {
    if (ref.E[c] >= activation) {
      active_idx.push_back(c);
      rep.active_checkpoints.push_back(ref.checkpoints[c]);
    }
  }
  if (active_idx.empty()) return rep;  // monitor inactive everywhere

  std::vector<double> per_orbit_max(traces.size(), 0.0);
  std::vector<double> column(traces.size());
  for (std::size_t j = 0; j < active_idx.size(); ++j) {
    std::size_t c = active_idx[j];
    double theta = ref.E[c];
    double bound = std::sqrt(theta) * std::pow(std::log(theta), 1.5 + epsilon);
    for (std::size_t k = 0; k < traces.size(); ++k) {
      const HitTrace& t = traces[k];
      double dev = std::abs(static_cast<double>(t.S[c]) - t.E[c]);
      double c_req = dev / bound;
      column[k] = c_req;
      per_orbit_max[k] = std::max(per_orbit_max[k], c_req);
    }
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    std::size_t m = sorted.size() / 2;
    rep.median_required_C.push_back(sorted.size() % 2 == 1 ? sorted[m]
                                                           : 0.5 * (sorted[m - 1] + sorted[m]));
  }

  std::vector<double> sorted_max = per_orbit_max;
  std::sort(sorted_max.begin(), sorted_max.end());
  std::size_t q = static_cast<std::size_t>(
      std::ceil(0.99 * static_cast<double>(sorted_max.size())));
  q = std::min(std::max<std::size_t>(q, 1), sorted_max.size());
  rep.fitted_C = sorted_max[q - 1];

  // Growth test over the trailing half of the active checkpoints.
  std::size_t start = active_idx.size() / 2;
  std::vector<double> lx, ly;
  for (std::size_t j = start; j < active_idx.size(); ++j) {
    double med = rep.median_required_C[j];
    if (med > 0.0) {
      lx.push_back(std::log(ref.E[active_idx[j]]));
      ly.push_back(std::log(med));
    }
  }
  if (lx.size() >= 3) {
    rep.growth_slope = linear_fit(lx, ly).slope;
    rep.growing = rep.growth_slope > 0.15;
  }
  return rep;
}

}  // namespace bclab
