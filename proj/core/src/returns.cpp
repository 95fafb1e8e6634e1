#include "bclab/returns.hpp"

#include <algorithm>
#include <cmath>

namespace bclab {

ReturnSample first_return_times(const MapSystem& map, const SetSpec& set, std::size_t samples,
                                std::uint64_t orbit_budget, std::uint64_t seed,
                                std::uint64_t seed_index, std::uint64_t burn_in) {
  if (samples < 1) throw ConfigError("first_return_times: need samples >= 1");
  ReturnSample out;
  out.set = set;
  out.mu_exact = set.exact_measure(map);
  out.taus.reserve(samples);

  Orbit orbit;
  orbit.length = 0;  // stepped manually below
  orbit.seed = seed;
  orbit.seed_index = seed_index;
  orbit.burn_in = (map.kind() == MapKind::lsv) ? burn_in : 0;
  OrbitStream stream(map, orbit);
  const Domain& dom = map.domain();

  std::uint64_t visits = 0;
  std::uint64_t last_visit = 0;
  bool seen = false;
  if (set.contains(dom, stream.current())) {
    visits = 1;
    last_visit = 0;
    seen = true;
  }
  std::uint64_t step = 0;
  while (step < orbit_budget && out.taus.size() < samples) {
    ++step;
    double x = stream.step();
    if (set.contains(dom, x)) {
      ++visits;
      if (seen) out.taus.push_back(step - last_visit);
      last_visit = step;
      seen = true;
    }
  }
  out.orbit_steps = step;
  out.visits = visits;
  out.mu_hat = step > 0 ? static_cast<double>(visits) / static_cast<double>(step) : 0.0;
  out.partial = out.taus.size() < samples;
  return out;
}

DistributionReport ks_exponential(const ReturnSample& sample, double t_star) {
  DistributionReport rep;
  rep.t_star = t_star;
  rep.samples = sample.taus.size();
  rep.low_power = rep.samples < 1000;
  if (sample.taus.empty()) return rep;

  double mu = sample.mu_hat;
  double mu_kac = sample.mu_exact > 0.0 ? sample.mu_exact : sample.mu_hat;
  std::vector<double> t(sample.taus.size());
  double sum_tau = 0.0;
  for (std::size_t k = 0; k < sample.taus.size(); ++k) {
    t[k] = static_cast<double>(sample.taus[k]) * mu;
    sum_tau += static_cast<double>(sample.taus[k]);
  }
  std::sort(t.begin(), t.end());
  double n = static_cast<double>(t.size());
  rep.mean_normalized = mu * sum_tau / n;
  rep.kac_mean = mu_kac * sum_tau / n;

  double d = 0.0;
  std::size_t below = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    double F = 1.0 - std::exp(-t[k]);
    double lo = static_cast<double>(k) / n;
    double hi = static_cast<double>(k + 1) / n;
    d = std::max(d, std::max(std::abs(F - lo), std::abs(hi - F)));
    if (t[k] < t_star) ++below;
  }
  rep.ks_distance = d;
  rep.small_t_mass = static_cast<double>(below) / n;
  return rep;
}

ShortReturnReport short_return_mass(const MapSystem& map, const SetSpec& set, std::uint64_t i,
                                    double k_exponent, std::uint64_t orbit_length,
                                    std::uint64_t seed, std::uint64_t burn_in) {
  if (i < 2) throw ConfigError("short_return_mass: need i >= 2");
  ShortReturnReport rep;
  double li = std::log(static_cast<double>(i));
  rep.r_max = static_cast<std::uint64_t>(std::ceil(std::pow(li, k_exponent)));
  rep.r_max = std::max<std::uint64_t>(rep.r_max, 1);
  rep.mass.assign(rep.r_max, 0.0);

  // Visit times of the set along one orbit; joint hits counted through a
  // sliding window of width r_max.
  std::vector<std::uint64_t> visit_times;
  Orbit orbit;
  orbit.length = 0;
  orbit.seed = seed;
  orbit.burn_in = (map.kind() == MapKind::lsv) ? burn_in : 0;
  OrbitStream stream(map, orbit);
  const Domain& dom = map.domain();
  if (set.contains(dom, stream.current())) visit_times.push_back(0);
  for (std::uint64_t step = 1; step <= orbit_length; ++step) {
    double x = stream.step();
    if (set.contains(dom, x)) visit_times.push_back(step);
  }

  std::vector<std::uint64_t> joint(rep.r_max, 0);
  for (std::size_t a = 0; a < visit_times.size(); ++a) {
    for (std::size_t b = a + 1; b < visit_times.size(); ++b) {
      std::uint64_t gap = visit_times[b] - visit_times[a];
      if (gap > rep.r_max) break;
      ++joint[gap - 1];
    }
  }

  double L = static_cast<double>(orbit_length);
  rep.mu_hat = static_cast<double>(visit_times.size()) / L;
  std::uint64_t best = 0;
  for (std::uint64_t r = 1; r <= rep.r_max; ++r) {
    rep.mass[r - 1] = static_cast<double>(joint[r - 1]) / L;
    if (joint[r - 1] > best) {
      best = joint[r - 1];
      rep.argmax_r = r;
    }
  }
  rep.max_mass = static_cast<double>(best) / L;
  rep.max_mass_ucb = 3.0 / L;  // Poisson 95% upper bound on a zero count
  rep.unresolved = (best == 0);

  double n_i = static_cast<double>(i);
  double effective = rep.unresolved ? rep.max_mass_ucb : rep.max_mass;
  rep.eta_hat = -std::log(effective * n_i) / li;
  rep.short_returns_not_rare = rep.mu_hat > 0.0 && rep.max_mass >= 0.5 * rep.mu_hat;
  return rep;
}

std::vector<DistributionReport> return_law_sweep(const MapSystem& map, double p,
                                                 const std::vector<double>& radii,
                                                 std::size_t samples,
                                                 std::uint64_t orbit_budget,
                                                 std::uint64_t seed) {
  if (radii.empty()) throw ConfigError("return_law_sweep: no radii");
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (radii[k] >= radii[k - 1]) throw ConfigError("return_law_sweep: radii must decrease");
  }
  std::vector<DistributionReport> reports;
  reports.reserve(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    ReturnSample s = first_return_times(map, SetSpec::ball(p, radii[k]), samples,
                                        orbit_budget, seed, k);
    reports.push_back(ks_exponential(s));
  }
  return reports;
}

}  // namespace bclab
