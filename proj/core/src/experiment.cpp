#include "bclab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "bclab/fit.hpp"
#include "bclab/io.hpp"
#include "bclab/returns.hpp"
#include "bclab/rng.hpp"
#include "json.hpp"

namespace bclab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kArtifactVersion[] = "0.1.0";

std::string trace_name(std::uint64_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trace_%05llu.csv", static_cast<unsigned long long>(k));
  return buf;
}

void emit(RunManifest& manifest, const fs::path& dir, const std::string& rel,
          const std::string& body) {
  write_text_file(dir / rel, body);
  manifest.files.push_back(FileEntry{rel, fnv1a64_hex(body), body.size()});
}

void emit_trace(RunManifest& manifest, const fs::path& dir, const std::string& rel,
                const HitTrace& trace) {
  emit(manifest, dir, rel, trace_csv_body(trace));
}

CheckResult check_range(const std::string& name, double value, double lo, double hi) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.requirement = "in [" + fmt_g17(lo) + ", " + fmt_g17(hi) + "]";
  c.pass = value >= lo && value <= hi;
  return c;
}

CheckResult check_below(const std::string& name, double value, double limit) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.requirement = "< " + fmt_g17(limit);
  c.pass = value < limit;
  return c;
}

CheckResult check_at_least(const std::string& name, double value, double limit) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.requirement = ">= " + fmt_g17(limit);
  c.pass = value >= limit;
  return c;
}

CheckResult check_flag(const std::string& name, bool flag, const std::string& requirement) {
  CheckResult c;
  c.name = name;
  c.value = flag ? 1.0 : 0.0;
  c.requirement = requirement;
  c.pass = flag;
  return c;
}

MapSystem make_map(const ExperimentConfig& cfg) {
  switch (cfg.map_kind) {
    case MapKind::lsv: return MapSystem::lsv(cfg.alpha);
    case MapKind::chmv: return MapSystem::chmv(cfg.gamma);
    case MapKind::doubling: return MapSystem::doubling();
    case MapKind::iid_control: return MapSystem::iid_control();
  }
  throw ConfigError("unknown map kind");
}

MeasureSchedule make_schedule(const ExperimentConfig& cfg) {
  std::uint64_t off = cfg.schedule_offset;
  switch (cfg.schedule_kind) {
    case ScheduleKind::power: return MeasureSchedule::power(cfg.schedule_gamma, off ? off : 1);
    case ScheduleKind::log_over_i: return MeasureSchedule::log_over_i(off ? off : 3);
    case ScheduleKind::harmonic: return MeasureSchedule::harmonic(off ? off : 1);
    case ScheduleKind::i_log_i: return MeasureSchedule::i_log_i(off ? off : 2);
    case ScheduleKind::explicit_list:
      throw ConfigError("explicit schedules are not expressible in config text");
  }
  throw ConfigError("unknown schedule kind");
}

double pick_center(const ExperimentConfig& cfg, const MapSystem& map) {
  if (!cfg.center_random) return cfg.center;
  CounterRng rng(cfg.master_seed, Stream::center);
  return rng.next_in(map.domain().lo, map.domain().hi);
}

std::uint64_t sub_seed(const ExperimentConfig& cfg, Stream purpose, std::uint64_t index) {
  return CounterRng::derive_key(cfg.master_seed, static_cast<std::uint64_t>(purpose), index);
}

std::vector<HitTrace> run_hit_ensemble(const MapSystem& map, const TargetSchedule& targets,
                                       const ExperimentConfig& cfg, int workers) {
  std::vector<HitTrace> traces(cfg.ensemble);
  parallel_for_indexed(cfg.ensemble, workers, [&](std::uint64_t k) {
    Orbit orbit;
    orbit.length = cfg.orbit_length;
    orbit.seed = cfg.master_seed;
    orbit.seed_index = k;
    orbit.burn_in = cfg.burn_in;
    traces[k] = run_hits(map, targets, orbit);
  });
  return traces;
}

/// The pure geometric checkpoint subsequence ceil(max(i0,2) * 1.5^k) < n.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t i0, std::uint64_t n) {
  std::vector<std::uint64_t> cps;
  double c = static_cast<double>(std::max<std::uint64_t>(i0, 2));
  while (c < static_cast<double>(n)) {
    std::uint64_t v = static_cast<std::uint64_t>(std::ceil(c));
    if (cps.empty() || v != cps.back()) cps.push_back(v);
    c *= 1.5;
  }
  return cps;
}

/// Fraction of orbits whose S strictly increases across the last three
/// geometric checkpoints.
double strict_growth_fraction(std::span<const HitTrace> traces) {
  if (traces.empty()) return 0.0;
  const HitTrace& ref = traces.front();
  auto geo = geometric_checkpoints(ref.first_index, ref.final_n());
  if (geo.size() < 3) return 0.0;
  std::uint64_t n1 = geo[geo.size() - 3], n2 = geo[geo.size() - 2], n3 = geo.back();
  std::size_t good = 0;
  for (const HitTrace& t : traces) {
    if (t.S_at(n1) < t.S_at(n2) && t.S_at(n2) < t.S_at(n3)) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(traces.size());
}

/// Fraction of orbits with zero hits in (n_lo, n].
double zero_hit_fraction(std::span<const HitTrace> traces, std::uint64_t n_lo) {
  std::size_t quiet = 0;
  for (const HitTrace& t : traces) {
    if (t.last_hit <= n_lo) ++quiet;
  }
  return traces.empty() ? 0.0 : static_cast<double>(quiet) / static_cast<double>(traces.size());
}

json summary_json(const ExperimentConfig& cfg, const EnsembleSummary& s,
                  const SprindzukReport* sprindzuk) {
  json j;
  j["preset"] = to_string(cfg.preset);
  j["n"] = s.n;
  j["ensemble"] = s.final_ratios.size();
  j["first_index"] = s.first_index;
  j["E_final"] = s.E_final;
  j["median_ratio"] = s.median_ratio;
  j["variance_ratio"] = s.variance_ratio;
  j["mean_sq_deviation"] = s.mean_sq_deviation;
  j["plateau_fraction"] = s.plateau_fraction;
  j["active_fraction"] = s.active_fraction;
  j["zero_one_consistent"] = s.zero_one_consistent();
  j["ratios"] = s.final_ratios;
  j["last_hits"] = s.last_hits;
  if (sprindzuk) {
    j["sprindzuk"] = {{"fitted_C", sprindzuk->fitted_C},
                      {"growth_slope", sprindzuk->growth_slope},
                      {"growing", sprindzuk->growing},
                      {"epsilon", sprindzuk->epsilon}};
  }
  return j;
}

struct KimBand {
  std::vector<double> grid_n;
  std::vector<double> n_mu;
  double slope = 0.0;
  double c_hat = 1.0;
};

/// Empirical n * mu(A_n) over a quarter-decade grid n in [10, 316],
/// measured along one invariant-measure orbit of the lsv map. Flat and
/// positive when mu(A_n) ~ C/n.
///
/// The grid stops where the estimator stays resolvable: mass near the
/// neutral fixed point arrives in rare long sojourns, so the effective
/// sample count is the number of entries, about L * width(n)/2. At
/// L = 4e8 the n = 316 sets still see ~1e2 entries; width(1e4) = 1e-10
/// would need L ~ 1e12.
KimBand kim_band_measurement(const MapSystem& map, double alpha, std::uint64_t length,
                             std::uint64_t seed) {
  KimBand band;
  for (double e = 1.0; e <= 2.51; e += 0.25) band.grid_n.push_back(std::round(std::pow(10.0, e)));
  std::vector<double> widths;
  double expo = -1.0 / (1.0 - alpha);
  for (double n : band.grid_n) widths.push_back(std::pow(n, expo));
  std::vector<std::uint64_t> counts(widths.size(), 0);
  Orbit orbit;
  orbit.length = length;
  orbit.seed = seed;
  orbit.burn_in = 10000;
  iterate(map, orbit, [&](std::uint64_t k, double x) {
    if (k == 0) return;
    for (std::size_t w = 0; w < widths.size(); ++w) {
      if (x < widths[w]) ++counts[w];
      else break;  // widths decrease with n
    }
  });
  std::vector<double> lx, ly;
  for (std::size_t w = 0; w < widths.size(); ++w) {
    double mu = static_cast<double>(counts[w]) / static_cast<double>(length);
    band.n_mu.push_back(band.grid_n[w] * mu);
    if (counts[w] > 0) {
      lx.push_back(std::log(band.grid_n[w]));
      ly.push_back(std::log(band.n_mu[w]));
    }
  }
  if (lx.size() >= 2) band.slope = linear_fit(lx, ly).slope;
  std::vector<double> sorted = band.n_mu;
  std::sort(sorted.begin(), sorted.end());
  band.c_hat = sorted[sorted.size() / 2];
  return band;
}

// ---------------------------------------------------------------------------
// Preset executors
// ---------------------------------------------------------------------------

void exec_hit_preset(const ExperimentConfig& cfg, const fs::path& dir, int workers,
                     RunManifest& manifest) {
  MapSystem map = make_map(cfg);
  json extra;

  std::shared_ptr<const BackwardSequences> seq;
  TargetSchedule targets = [&]() -> TargetSchedule {
    switch (cfg.construction) {
      case TargetConstruction::kim_interval: {
        KimBand band = kim_band_measurement(map, cfg.alpha, 400000000,
                                            sub_seed(cfg, Stream::calibration, 0));
        extra["kim_band"] = {{"grid_n", band.grid_n},
                             {"n_mu", band.n_mu},
                             {"slope", band.slope},
                             {"c_hat", band.c_hat}};
        return TargetSchedule::kim_family(cfg.alpha, band.c_hat, cfg.orbit_length);
      }
      case TargetConstruction::chmv_interval:
      case TargetConstruction::chmv_b_interval: {
        seq = std::make_shared<BackwardSequences>(
            chmv_backward_sequence(cfg.gamma, cfg.orbit_length));
        return cfg.construction == TargetConstruction::chmv_interval
                   ? TargetSchedule::chmv_family(seq)
                   : TargetSchedule::chmv_b_family(seq);
      }
      case TargetConstruction::calibrated_ball: {
        if (map.kind() == MapKind::iid_control) {
          // The control process has no phase space; hits are Bernoulli draws
          // against the schedule measure, targets are only bookkeeping.
          return TargetSchedule::analytic_ball(MapSystem::doubling(), 0.0, make_schedule(cfg));
        }
        double center = pick_center(cfg, map);
        extra["center"] = center;
        bool empirical = cfg.calibration == "empirical" ||
                         (cfg.calibration == "auto" && !map.has_exact_measure());
        if (empirical) {
          return TargetSchedule::calibrated_ball(map, center, make_schedule(cfg),
                                                 cfg.orbit_length, cfg.calibration_length,
                                                 sub_seed(cfg, Stream::calibration, 0));
        }
        return TargetSchedule::analytic_ball(map, center, make_schedule(cfg));
      }
      case TargetConstruction::explicit_intervals:
        throw ConfigError("explicit interval targets are not expressible in config text");
    }
    throw ConfigError("unknown target construction");
  }();

  std::vector<HitTrace> traces = run_hit_ensemble(map, targets, cfg, workers);
  for (std::uint64_t k = 0; k < traces.size(); ++k)
    emit_trace(manifest, dir, trace_name(k), traces[k]);
  if (traces.size() < 2) {
    if (!extra.is_null()) emit(manifest, dir, "summary.json", extra.dump(2) + "\n");
    return;
  }

  EnsembleSummary summary = sbc_report(traces);
  SprindzukReport sprindzuk = sprindzuk_monitor(traces);
  auto& checks = manifest.checks;

  switch (cfg.preset) {
    case Preset::thm1:
      checks.push_back(check_range("median_ratio", summary.median_ratio, 0.95, 1.05));
      checks.push_back(check_below("variance_ratio", summary.variance_ratio, 0.05));
      checks.push_back(check_below("sprindzuk_fitted_C", sprindzuk.fitted_C, 5.0 + 1e-12));
      checks.push_back(check_flag("sprindzuk_not_growing", !sprindzuk.growing,
                                  "required C does not grow with n"));
      break;
    case Preset::thm2:
      checks.push_back(check_range("median_ratio", summary.median_ratio, 0.6, 1.4));
      checks.push_back(check_at_least("strict_growth_fraction",
                                      strict_growth_fraction(traces), 0.9));
      break;
    case Preset::prop1_expanding: {
      checks.push_back(check_range("median_ratio", summary.median_ratio, 0.6, 1.4));
      double pooled = 0.0;
      for (const HitTrace& t : traces)
        if (t.last_hit > t.final_n() / 10) pooled += 1.0;
      checks.push_back(check_at_least("orbits_hitting_final_decade", pooled, 1.0));
      break;
    }
    case Preset::kim_counterexample: {
      checks.push_back(check_at_least("zero_hit_fraction_last_two_decades",
                                      zero_hit_fraction(traces, cfg.orbit_length / 100), 0.9));
      const auto& band = extra["kim_band"];
      double lo = 1e300, hi = 0.0;
      for (double v : band["n_mu"].get<std::vector<double>>()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      checks.push_back(check_range("band_min_n_mu", lo, 0.05, 10.0));
      checks.push_back(check_range("band_max_n_mu", hi, 0.05, 10.0));
      checks.push_back(check_range("band_loglog_slope", band["slope"].get<double>(),
                                   -0.25, 0.25));
      break;
    }
    case Preset::chmv_counterexample: {
      checks.push_back(check_at_least("E_final", summary.E_final, 50.0));
      checks.push_back(check_at_least("zero_hit_fraction_last_decade",
                                      zero_hit_fraction(traces, cfg.orbit_length / 10), 0.9));
      double tail = seq->b_tail_beyond(std::min<std::uint64_t>(10000, seq->max_index()));
      extra["b_tail_beyond_1e4"] = tail;
      checks.push_back(check_below("b_tail_beyond_1e4", tail, 1e-3));
      break;
    }
    case Preset::iid_baseline: {
      checks.push_back(check_range("median_ratio", summary.median_ratio, 0.98, 1.02));
      // Closed form for independent indicators: sum p(1-p) / E^2.
      double sp = 0.0, e = 0.0;
      for (std::uint64_t i = targets.first_index(); i <= cfg.orbit_length; ++i) {
        double p = targets.measure(i);
        sp += p * (1.0 - p);
        e += p;
      }
      double v_closed = sp / (e * e);
      extra["variance_ratio_closed_form"] = v_closed;
      double tol = 3.0 * std::sqrt(2.0) * v_closed /
                   std::sqrt(static_cast<double>(traces.size()));
      checks.push_back(check_range("variance_ratio_vs_closed_form", summary.variance_ratio,
                                   v_closed - tol, v_closed + tol));
      break;
    }
    case Preset::custom:
      break;
    default:
      break;
  }

  json j = summary_json(cfg, summary, &sprindzuk);
  if (!extra.is_null()) j["extra"] = extra;
  emit(manifest, dir, "summary.json", j.dump(2) + "\n");
}

void exec_thm3_returns(const ExperimentConfig& cfg, const fs::path& dir, int workers,
                       RunManifest& manifest) {
  MapSystem map = make_map(cfg);
  if (map.kind() != MapKind::doubling)
    throw ConfigError("thm3_returns runs on the doubling map");
  double center = pick_center(cfg, map);
  std::vector<double> radii;
  for (int e = 8; e <= 14; ++e) radii.push_back(std::ldexp(1.0, -e));
  const std::size_t samples = 10000;

  std::vector<ReturnSample> samples_out(radii.size());
  parallel_for_indexed(radii.size(), workers, [&](std::uint64_t k) {
    double mu = 2.0 * radii[k];
    auto budget = static_cast<std::uint64_t>(4.0 * static_cast<double>(samples) / mu);
    samples_out[k] = first_return_times(map, SetSpec::ball(center, radii[k]), samples,
                                        budget, sub_seed(cfg, Stream::returns, k), k);
  });

  json per_radius = json::array();
  std::vector<DistributionReport> reports;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    DistributionReport rep = ks_exponential(samples_out[k]);
    reports.push_back(rep);
    char name[32];
    std::snprintf(name, sizeof(name), "returns_r%02d.csv", 8 + static_cast<int>(k));
    std::string body = "tau,normalized\n";
    for (std::uint64_t tau : samples_out[k].taus) {
      body += std::to_string(tau);
      body += ',';
      body += fmt_g17(static_cast<double>(tau) * samples_out[k].mu_hat);
      body += '\n';
    }
    emit(manifest, dir, name, body);
    per_radius.push_back({{"radius", radii[k]},
                          {"ks_distance", rep.ks_distance},
                          {"kac_mean", rep.kac_mean},
                          {"mean_normalized", rep.mean_normalized},
                          {"small_t_mass", rep.small_t_mass},
                          {"samples", rep.samples},
                          {"partial", samples_out[k].partial}});
  }

  // Periodic-center negative control: the fixed point 0 of the doubling map.
  ReturnSample control = first_return_times(map, SetSpec::ball(0.0, std::ldexp(1.0, -12)),
                                            samples, 1ull << 30,
                                            sub_seed(cfg, Stream::returns, 100), 100);
  DistributionReport control_rep = ks_exponential(control);

  auto& checks = manifest.checks;
  checks.push_back(check_below("ks_smallest_radius", reports.back().ks_distance, 0.08));
  double worst_kac_dev = 0.0;
  for (const auto& rep : reports)
    worst_kac_dev = std::max(worst_kac_dev, std::abs(rep.kac_mean - 1.0));
  checks.push_back(check_below("kac_mean_worst_deviation", worst_kac_dev, 0.05 + 1e-12));
  checks.push_back(check_at_least("periodic_center_small_t_mass",
                                  control_rep.small_t_mass, 0.2 + 1e-12));

  json j;
  j["preset"] = to_string(cfg.preset);
  j["center"] = center;
  j["per_radius"] = per_radius;
  j["control"] = {{"center", 0.0},
                  {"radius", std::ldexp(1.0, -12)},
                  {"ks_distance", control_rep.ks_distance},
                  {"small_t_mass", control_rep.small_t_mass},
                  {"kac_mean", control_rep.kac_mean}};
  emit(manifest, dir, "returns_report.json", j.dump(2) + "\n");
}

void exec_thm4_short(const ExperimentConfig& cfg, const fs::path& dir, int workers,
                     RunManifest& manifest) {
  MapSystem map = make_map(cfg);
  auto& checks = manifest.checks;
  json extra;

  // Closed-form cross-check: B = [0, 2^-10) under doubling has
  // mu(B cap T^-1 B) = mu(B)/2 exactly.
  {
    const double width = std::ldexp(1.0, -10);
    const std::uint64_t L = 100000000;
    ShortReturnReport rep =
        short_return_mass(map, SetSpec::interval(Interval{0.0, width}), 10, 1.0, L,
                          sub_seed(cfg, Stream::returns, 201));
    double expect = 0.5 * width;
    double sigma = std::sqrt(expect * (1.0 - expect) / static_cast<double>(L));
    checks.push_back(check_range("analytic_identity_mass_r1", rep.mass.at(0),
                                 expect - 3.0 * sigma, expect + 3.0 * sigma));
    extra["analytic_identity"] = {{"mass_r1", rep.mass.at(0)}, {"expected", expect},
                                  {"sigma", sigma}};
  }

  // Generic center, i = 1e3, k = 5.
  const std::uint64_t i_probe = 1000;
  const double k_probe = 5.0;
  {
    double mu = 1.0 / (static_cast<double>(i_probe) * std::log(static_cast<double>(i_probe)));
    double center = pick_center(cfg, map);
    ShortReturnReport rep =
        short_return_mass(map, SetSpec::ball(center, 0.5 * mu), i_probe, k_probe, 100000000,
                          sub_seed(cfg, Stream::returns, 202));
    checks.push_back(check_at_least("generic_eta_hat", rep.eta_hat, 1e-12));
    checks.push_back(check_flag("generic_short_returns_rare", !rep.short_returns_not_rare,
                                "max mass well below mu(B)/2"));
    extra["generic"] = {{"center", center},       {"eta_hat", rep.eta_hat},
                        {"max_mass", rep.max_mass}, {"argmax_r", rep.argmax_r},
                        {"mu_hat", rep.mu_hat},     {"unresolved", rep.unresolved}};
  }

  // Negative control: lsv ball around the neutral fixed point 0; the orbit
  // lingers there, so the retained mass at short lags stays comparable to
  // mu(B) itself.
  {
    MapSystem lsv = MapSystem::lsv(0.6);
    auto radii = calibrate_radii(lsv, 0.0, MeasureSchedule::i_log_i(2), i_probe, 10000000,
                                 sub_seed(cfg, Stream::calibration, 203));
    double r = radii.back();
    ShortReturnReport rep = short_return_mass(lsv, SetSpec::ball(0.0, r), i_probe, k_probe,
                                              100000000, sub_seed(cfg, Stream::returns, 204));
    checks.push_back(check_flag("lsv_control_short_returns_not_rare",
                                rep.short_returns_not_rare,
                                "max mass >= mu(B)/2 (eta <= 0 surrogate)"));
    extra["lsv_control"] = {{"radius", r},
                            {"eta_hat", rep.eta_hat},
                            {"max_mass", rep.max_mass},
                            {"mu_hat", rep.mu_hat},
                            {"mass_r1", rep.mass.at(0)}};
  }

  // SBC ensemble with the 1/(i log i) schedule.
  double center = pick_center(cfg, map);
  TargetSchedule targets = TargetSchedule::analytic_ball(map, center, make_schedule(cfg));
  std::vector<HitTrace> traces = run_hit_ensemble(map, targets, cfg, workers);
  for (std::uint64_t k = 0; k < traces.size(); ++k)
    emit_trace(manifest, dir, trace_name(k), traces[k]);
  EnsembleSummary summary = sbc_report(traces);
  checks.push_back(check_at_least("strict_growth_fraction", strict_growth_fraction(traces), 0.9));

  json j = summary_json(cfg, summary, nullptr);
  j["extra"] = extra;
  emit(manifest, dir, "summary.json", j.dump(2) + "\n");
}

}  // namespace

std::string RunManifest::to_json() const {
  json j;
  j["artifact_version"] = artifact_version;
  j["preset"] = preset;
  j["config_hash"] = config_hash;
  j["config_text"] = config_text;
  j["master_seed"] = master_seed;
  j["workers_used"] = workers_used;
  json blocks_j = json::array();
  for (const auto& b : blocks)
    blocks_j.push_back({{"worker", b.worker}, {"begin", b.begin}, {"end", b.end}});
  j["worker_blocks"] = blocks_j;
  json files_j = json::array();
  for (const auto& f : files)
    files_j.push_back({{"path", f.path}, {"fnv1a64", f.digest}, {"bytes", f.bytes}});
  j["files"] = files_j;
  json checks_j = json::array();
  for (const auto& c : checks)
    checks_j.push_back({{"name", c.name},
                        {"value", c.value},
                        {"requirement", c.requirement},
                        {"pass", c.pass}});
  j["checks"] = checks_j;
  j["wall_clock_sec"] = wall_clock_sec;
  j["output_dir"] = output_dir;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  json j = json::parse(text);
  RunManifest m;
  m.artifact_version = j.at("artifact_version").get<std::string>();
  m.preset = j.at("preset").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.config_text = j.at("config_text").get<std::string>();
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.workers_used = j.at("workers_used").get<int>();
  for (const auto& b : j.at("worker_blocks")) {
    WorkerBlock wb;
    wb.worker = b.at("worker").get<int>();
    wb.begin = b.at("begin").get<std::uint64_t>();
    wb.end = b.at("end").get<std::uint64_t>();
    m.blocks.push_back(wb);
  }
  for (const auto& f : j.at("files")) {
    FileEntry e;
    e.path = f.at("path").get<std::string>();
    e.digest = f.at("fnv1a64").get<std::string>();
    e.bytes = f.at("bytes").get<std::uint64_t>();
    m.files.push_back(e);
  }
  for (const auto& c : j.at("checks")) {
    CheckResult r;
    r.name = c.at("name").get<std::string>();
    r.value = c.at("value").get<double>();
    r.requirement = c.at("requirement").get<std::string>();
    r.pass = c.at("pass").get<bool>();
    m.checks.push_back(r);
  }
  m.wall_clock_sec = j.at("wall_clock_sec").get<double>();
  m.output_dir = j.at("output_dir").get<std::string>();
  return m;
}

RunManifest run_experiment(const ExperimentConfig& config) {
  config.validate();
  int workers = resolve_worker_count(config.workers);

  fs::path dir(config.output_dir);
  fs::create_directories(dir);
  // A stale manifest must not survive a failed run.
  fs::remove(dir / "manifest.json");

  RunManifest manifest;
  manifest.artifact_version = kArtifactVersion;
  manifest.preset = to_string(config.preset);
  manifest.config_hash = config.hash();
  manifest.config_text = config.render();
  manifest.master_seed = config.master_seed;
  manifest.workers_used = workers;
  manifest.blocks = partition_blocks(config.ensemble, workers);
  manifest.output_dir = config.output_dir;

  auto t0 = std::chrono::steady_clock::now();
  if (config.ensemble == 0) {
    // Nothing to run; an empty manifest is a valid outcome.
    write_text_file(dir / "manifest.json", manifest.to_json());
    return manifest;
  }
  switch (config.preset) {
    case Preset::thm3_returns:
      exec_thm3_returns(config, dir, workers, manifest);
      break;
    case Preset::thm4_short:
      exec_thm4_short(config, dir, workers, manifest);
      break;
    default:
      exec_hit_preset(config, dir, workers, manifest);
      break;
  }
  auto t1 = std::chrono::steady_clock::now();
  manifest.wall_clock_sec = std::chrono::duration<double>(t1 - t0).count();

  write_text_file(dir / "manifest.json", manifest.to_json());
  return manifest;
}

namespace {

struct ParsedTrace {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> ratios;
};

ParsedTrace parse_trace_csv(const std::string& body) {
  ParsedTrace t;
  std::istringstream in(body);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    t.checkpoints.push_back(std::stoull(cell));
    std::getline(row, cell, ',');  // S
    std::getline(row, cell, ',');  // E
    std::getline(row, cell, ',');
    t.ratios.push_back(std::stod(cell));
  }
  return t;
}

}  // namespace

ReportResult report(const fs::path& run_dir) {
  ReportResult res;
  std::ostringstream out;
  fs::path manifest_path = run_dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    res.missing.push_back(manifest_path.string());
    res.text = "report error, missing files:\n  " + manifest_path.string() + "\n";
    return res;
  }
  RunManifest manifest = RunManifest::from_json(read_text_file(manifest_path));

  for (const auto& f : manifest.files) {
    if (!fs::exists(run_dir / f.path)) res.missing.push_back(f.path);
  }
  if (!res.missing.empty()) {
    out << "report error, missing files:\n";
    for (const auto& f : res.missing) out << "  " << f << "\n";
    res.text = out.str();
    return res;
  }

  out << "preset " << manifest.preset << "  (config " << manifest.config_hash << ")\n";
  out << "workers " << manifest.workers_used << ", wall clock " << manifest.wall_clock_sec
      << " s, " << manifest.files.size() << " output files\n";

  if (manifest.files.empty() && manifest.checks.empty()) {
    out << "nothing to report\n";
    res.ok = true;
    res.text = out.str();
    return res;
  }

  // Plot-ready ratio series from the per-orbit traces.
  std::vector<ParsedTrace> traces;
  for (const auto& f : manifest.files) {
    if (f.path.rfind("trace_", 0) == 0) {
      traces.push_back(parse_trace_csv(read_text_file(run_dir / f.path)));
    }
  }
  if (!traces.empty()) {
    std::string body = "checkpoint,median_ratio,q10,q90\n";
    const auto& cps = traces.front().checkpoints;
    for (std::size_t c = 0; c < cps.size(); ++c) {
      std::vector<double> col;
      for (const auto& t : traces)
        if (c < t.ratios.size()) col.push_back(t.ratios[c]);
      std::sort(col.begin(), col.end());
      auto q = [&](double p) {
        return col[std::min(col.size() - 1,
                            static_cast<std::size_t>(p * static_cast<double>(col.size())))];
      };
      body += std::to_string(cps[c]);
      body += ',';
      body += fmt_g17(col.size() % 2 == 1 ? col[col.size() / 2]
                                          : 0.5 * (col[col.size() / 2 - 1] + col[col.size() / 2]));
      body += ',';
      body += fmt_g17(q(0.10));
      body += ',';
      body += fmt_g17(q(0.90));
      body += '\n';
    }
    write_text_file(run_dir / "ratio_series.csv", body);
    out << "wrote ratio_series.csv (" << traces.size() << " orbits)\n";
  }

  // Plot-ready empirical CDFs for return-time runs.
  for (const auto& f : manifest.files) {
    if (f.path.rfind("returns_r", 0) != 0 || f.path.find(".csv") == std::string::npos) continue;
    std::istringstream in(read_text_file(run_dir / f.path));
    std::string line;
    std::getline(in, line);
    std::vector<double> t;
    while (std::getline(in, line)) {
      auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      t.push_back(std::stod(line.substr(comma + 1)));
    }
    std::sort(t.begin(), t.end());
    std::string body = "t,ecdf,exponential\n";
    for (std::size_t k = 0; k < t.size(); ++k) {
      body += fmt_g17(t[k]);
      body += ',';
      body += fmt_g17(static_cast<double>(k + 1) / static_cast<double>(t.size()));
      body += ',';
      body += fmt_g17(1.0 - std::exp(-t[k]));
      body += '\n';
    }
    std::string cdf_name = "cdf_" + f.path.substr(8);
    write_text_file(run_dir / cdf_name, body);
    out << "wrote " << cdf_name << "\n";
  }

  if (manifest.checks.empty()) {
    out << "no embedded checks for this preset\n";
  } else {
    out << "checks:\n";
    for (const auto& c : manifest.checks) {
      out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << " = "
          << fmt_g17(c.value) << "  (" << c.requirement << ")\n";
    }
  }
  res.ok = manifest.all_checks_pass();
  res.text = out.str();
  return res;
}

}  // namespace bclab
