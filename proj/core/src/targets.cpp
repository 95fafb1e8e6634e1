#include "bclab/targets.hpp"

#include <algorithm>
#include <cmath>

#include "bclab/fit.hpp"
#include "json.hpp"

namespace bclab {

namespace {

// Schedule measures are probabilities for maps whose reference measure has
// total mass 1; chmv measures are arc lengths on [-1,1], total mass 2.
double measure_scale(const MapSystem& map) {
  return map.kind() == MapKind::chmv ? 2.0 : 1.0;
}

}  // namespace

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::power: return "power";
    case ScheduleKind::log_over_i: return "log_over_i";
    case ScheduleKind::harmonic: return "harmonic";
    case ScheduleKind::i_log_i: return "i_log_i";
    case ScheduleKind::explicit_list: return "explicit";
  }
  return "?";
}

std::string to_string(TargetConstruction c) {
  switch (c) {
    case TargetConstruction::calibrated_ball: return "calibrated_ball";
    case TargetConstruction::kim_interval: return "kim_interval";
    case TargetConstruction::chmv_interval: return "chmv_interval";
    case TargetConstruction::chmv_b_interval: return "chmv_b_interval";
    case TargetConstruction::explicit_intervals: return "explicit_intervals";
  }
  return "?";
}

MeasureSchedule MeasureSchedule::power(double gamma, std::uint64_t offset) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ConfigError("power schedule: exponent must lie in (0,1)");
  if (offset < 1) throw ConfigError("schedule offset must be >= 1");
  MeasureSchedule s;
  s.kind_ = ScheduleKind::power;
  s.gamma_ = gamma;
  s.offset_ = offset;
  return s;
}

MeasureSchedule MeasureSchedule::log_over_i(std::uint64_t offset) {
  if (offset < 3) throw ConfigError("log_over_i schedule: offset must be >= 3 ((log i)/i peaks at e)");
  MeasureSchedule s;
  s.kind_ = ScheduleKind::log_over_i;
  s.offset_ = offset;
  return s;
}

MeasureSchedule MeasureSchedule::harmonic(std::uint64_t offset) {
  if (offset < 1) throw ConfigError("schedule offset must be >= 1");
  MeasureSchedule s;
  s.kind_ = ScheduleKind::harmonic;
  s.offset_ = offset;
  return s;
}

MeasureSchedule MeasureSchedule::i_log_i(std::uint64_t offset) {
  if (offset < 2) throw ConfigError("i_log_i schedule: offset must be >= 2 to keep log i > 0");
  MeasureSchedule s;
  s.kind_ = ScheduleKind::i_log_i;
  s.offset_ = offset;
  return s;
}

MeasureSchedule MeasureSchedule::explicit_values(std::vector<double> values,
                                                 std::uint64_t offset) {
  if (offset < 1) throw ConfigError("schedule offset must be >= 1");
  if (values.empty()) throw ConfigError("explicit schedule: no values");
  MeasureSchedule s;
  s.kind_ = ScheduleKind::explicit_list;
  s.offset_ = offset;
  s.values_ = std::move(values);
  return s;
}

Interval kim_interval(double alpha, std::uint64_t n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("kim_interval: alpha outside (0,1)");
  if (n < 1) throw ConfigError("kim_interval: n must be >= 1");
  double width = std::pow(static_cast<double>(n), -1.0 / (1.0 - alpha));
  return Interval{0.0, width};
}

Interval chmv_interval(const BackwardSequences& seq, std::uint64_t n) {
  if (n > seq.max_index()) throw IndexError("chmv_interval: index beyond computed sequence");
  return Interval{-1.0, seq.a[n]};
}

std::vector<double> calibrate_radii(const MapSystem& map, double center,
                                    const MeasureSchedule& schedule, std::uint64_t i_max,
                                    std::uint64_t calibration_length, std::uint64_t seed,
                                    std::uint64_t burn_in) {
  if (i_max < schedule.offset()) throw ConfigError("calibrate_radii: i_max below schedule offset");
  const double scale = measure_scale(map);
  const double full = map.domain().length();

  std::vector<double> dists;
  dists.reserve(calibration_length);
  Orbit orbit;
  orbit.length = calibration_length;
  orbit.seed = seed;
  orbit.burn_in = (map.kind() == MapKind::lsv) ? burn_in : 0;
  const Domain& dom = map.domain();
  iterate(map, orbit, [&](std::uint64_t k, double x) {
    if (k > 0) dists.push_back(dom.distance(x, center));
  });
  std::sort(dists.begin(), dists.end());

  const double n = static_cast<double>(dists.size());
  double mu_min = schedule.measure(i_max) / scale;
  if (mu_min < 1.0 && mu_min * n < 100.0)
    throw CalibrationError("calibration orbit too short to resolve the smallest target measure");

  std::vector<double> radii(i_max - schedule.offset() + 1);
  double running_min = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = schedule.offset(); i <= i_max; ++i) {
    double frac = schedule.measure(i) / scale;
    double r;
    if (frac >= 1.0) {
      r = full;  // full-measure ball covers the space
    } else {
      auto k = static_cast<std::size_t>(std::llround(frac * n));
      k = std::min(k, dists.size() - 1);
      r = dists[k];
    }
    running_min = std::min(running_min, r);
    radii[i - schedule.offset()] = running_min;
  }
  return radii;
}

TargetSchedule TargetSchedule::calibrated_ball(const MapSystem& map, double center,
                                               MeasureSchedule schedule, std::uint64_t i_max,
                                               std::uint64_t calibration_length,
                                               std::uint64_t seed) {
  TargetSchedule t;
  t.construction_ = TargetConstruction::calibrated_ball;
  t.domain_ = map.domain();
  t.center_ = center;
  t.radii_ = calibrate_radii(map, center, schedule, i_max, calibration_length, seed);
  t.first_ = schedule.offset();
  t.last_ = i_max;
  t.schedule_ = std::move(schedule);
  return t;
}

TargetSchedule TargetSchedule::analytic_ball(const MapSystem& map, double center,
                                             MeasureSchedule schedule) {
  if (!map.has_exact_measure())
    throw ConfigError("analytic_ball: map has no closed-form invariant measure");
  TargetSchedule t;
  t.construction_ = TargetConstruction::calibrated_ball;
  t.domain_ = map.domain();
  t.center_ = center;
  t.first_ = schedule.offset();
  t.last_ = schedule.last_index();
  t.analytic_full_measure_ = map.domain().length();
  t.schedule_ = std::move(schedule);
  return t;
}

TargetSchedule TargetSchedule::kim_family(double alpha, double measure_constant,
                                          std::uint64_t i_max) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("kim_family: alpha outside (0,1)");
  if (!(measure_constant > 0.0)) throw ConfigError("kim_family: measure constant must be positive");
  if (i_max < 1) throw ConfigError("kim_family: i_max must be >= 1");
  TargetSchedule t;
  t.construction_ = TargetConstruction::kim_interval;
  t.domain_ = Domain{0.0, 1.0};
  t.kim_alpha_ = alpha;
  t.kim_constant_ = measure_constant;
  t.first_ = 1;
  t.last_ = i_max;
  t.kim_widths_.resize(i_max);
  double expo = -1.0 / (1.0 - alpha);
  for (std::uint64_t n = 1; n <= i_max; ++n)
    t.kim_widths_[n - 1] = std::pow(static_cast<double>(n), expo);
  return t;
}

TargetSchedule TargetSchedule::chmv_family(std::shared_ptr<const BackwardSequences> seq) {
  if (!seq || seq->max_index() < 1) throw ConfigError("chmv_family: empty backward sequence");
  TargetSchedule t;
  t.construction_ = TargetConstruction::chmv_interval;
  t.domain_ = Domain{-1.0, 1.0};
  t.first_ = 0;
  t.last_ = seq->max_index();
  t.seq_ = std::move(seq);
  return t;
}

TargetSchedule TargetSchedule::chmv_b_family(std::shared_ptr<const BackwardSequences> seq) {
  if (!seq || seq->max_index() < 1) throw ConfigError("chmv_b_family: empty backward sequence");
  TargetSchedule t;
  t.construction_ = TargetConstruction::chmv_b_interval;
  t.domain_ = Domain{-1.0, 1.0};
  t.first_ = 1;
  t.last_ = seq->max_index();
  t.seq_ = std::move(seq);
  return t;
}

TargetSchedule TargetSchedule::explicit_intervals(std::vector<Interval> sets,
                                                  std::vector<double> measures,
                                                  std::uint64_t offset) {
  if (sets.empty() || sets.size() != measures.size())
    throw ConfigError("explicit_intervals: sets/measures size mismatch");
  TargetSchedule t;
  t.construction_ = TargetConstruction::explicit_intervals;
  t.domain_ = Domain{0.0, 1.0};
  t.first_ = offset;
  t.last_ = offset + sets.size() - 1;
  t.sets_ = std::move(sets);
  t.measures_ = std::move(measures);
  return t;
}

bool TargetSchedule::nested(std::uint64_t i_hi) const {
  i_hi = std::min(i_hi, last_);
  for (std::uint64_t i = first_; i < i_hi; ++i) {
    switch (construction_) {
      case TargetConstruction::calibrated_ball:
        if (radius(i + 1) > radius(i)) return false;
        break;
      case TargetConstruction::kim_interval:
        if (kim_widths_[i + 1 - first_] > kim_widths_[i - first_]) return false;
        break;
      case TargetConstruction::chmv_interval:
        if (seq_->a[i + 1] > seq_->a[i]) return false;
        break;
      case TargetConstruction::chmv_b_interval:
        if (seq_->b[i + 1] > seq_->b[i]) return false;
        break;
      case TargetConstruction::explicit_intervals: {
        const Interval& outer = sets_[i - first_];
        const Interval& inner = sets_[i + 1 - first_];
        if (inner.lo < outer.lo || inner.hi > outer.hi) return false;
        break;
      }
    }
  }
  return true;
}

std::string TargetSchedule::to_json() const {
  nlohmann::json j;
  j["construction"] = to_string(construction_);
  j["first_index"] = first_;
  if (last_ != std::numeric_limits<std::uint64_t>::max()) j["last_index"] = last_;
  j["domain"] = {domain_.lo, domain_.hi};
  if (schedule_) {
    nlohmann::json s;
    s["kind"] = to_string(schedule_->kind());
    s["offset"] = schedule_->offset();
    if (schedule_->kind() == ScheduleKind::power) s["gamma"] = schedule_->gamma();
    if (schedule_->kind() == ScheduleKind::explicit_list) s["values"] = schedule_->values();
    j["schedule"] = s;
  }
  switch (construction_) {
    case TargetConstruction::calibrated_ball:
      j["center"] = center_;
      if (!radii_.empty()) j["radii"] = radii_;
      else j["radii_rule"] = "exact_acip";
      break;
    case TargetConstruction::kim_interval:
      j["alpha"] = kim_alpha_;
      j["measure_constant"] = kim_constant_;
      break;
    case TargetConstruction::chmv_interval:
    case TargetConstruction::chmv_b_interval:
      j["gamma"] = seq_->gamma;
      break;
    case TargetConstruction::explicit_intervals: {
      nlohmann::json sets = nlohmann::json::array();
      for (const auto& s : sets_) sets.push_back({s.lo, s.hi});
      j["sets"] = sets;
      j["measures"] = measures_;
      break;
    }
  }
  return j.dump(2);
}

TargetSchedule TargetSchedule::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::string construction = j.at("construction").get<std::string>();

  auto parse_schedule = [&]() -> MeasureSchedule {
    const auto& s = j.at("schedule");
    std::string kind = s.at("kind").get<std::string>();
    std::uint64_t offset = s.at("offset").get<std::uint64_t>();
    if (kind == "power") return MeasureSchedule::power(s.at("gamma").get<double>(), offset);
    if (kind == "log_over_i") return MeasureSchedule::log_over_i(offset);
    if (kind == "harmonic") return MeasureSchedule::harmonic(offset);
    if (kind == "i_log_i") return MeasureSchedule::i_log_i(offset);
    if (kind == "explicit")
      return MeasureSchedule::explicit_values(s.at("values").get<std::vector<double>>(), offset);
    throw ConfigError("unknown schedule kind: " + kind);
  };

  if (construction == "calibrated_ball") {
    TargetSchedule t;
    t.construction_ = TargetConstruction::calibrated_ball;
    auto dom = j.at("domain").get<std::vector<double>>();
    t.domain_ = Domain{dom.at(0), dom.at(1)};
    t.center_ = j.at("center").get<double>();
    t.schedule_ = parse_schedule();
    t.first_ = j.at("first_index").get<std::uint64_t>();
    t.last_ = j.contains("last_index") ? j.at("last_index").get<std::uint64_t>()
                                       : std::numeric_limits<std::uint64_t>::max();
    if (j.contains("radii")) t.radii_ = j.at("radii").get<std::vector<double>>();
    else t.analytic_full_measure_ = t.domain_.length();
    return t;
  }
  if (construction == "kim_interval") {
    return kim_family(j.at("alpha").get<double>(), j.at("measure_constant").get<double>(),
                      j.at("last_index").get<std::uint64_t>());
  }
  if (construction == "chmv_interval" || construction == "chmv_b_interval") {
    auto seq = std::make_shared<BackwardSequences>(
        chmv_backward_sequence(j.at("gamma").get<double>(), j.at("last_index").get<std::uint64_t>()));
    return construction == "chmv_interval" ? chmv_family(seq) : chmv_b_family(seq);
  }
  if (construction == "explicit_intervals") {
    std::vector<Interval> sets;
    for (const auto& s : j.at("sets")) sets.push_back(Interval{s.at(0), s.at(1)});
    return explicit_intervals(std::move(sets), j.at("measures").get<std::vector<double>>(),
                              j.at("first_index").get<std::uint64_t>());
  }
  throw ConfigError("unknown target construction: " + construction);
}

AnnulusEstimate annulus_measure_estimate(const MapSystem& map, double p, double r, double eps,
                                         std::uint64_t orbit_length, std::uint64_t seed,
                                         std::uint64_t burn_in) {
  AnnulusEstimate est;
  est.samples = orbit_length;
  if (eps <= 0.0) return est;  // empty annulus
  Orbit orbit;
  orbit.length = orbit_length;
  orbit.seed = seed;
  orbit.burn_in = (map.kind() == MapKind::lsv) ? burn_in : 0;
  const Domain& dom = map.domain();
  std::uint64_t hits = 0;
  iterate(map, orbit, [&](std::uint64_t k, double x) {
    if (k == 0) return;
    double d = dom.distance(x, p);
    if (d > r && d < r + eps) ++hits;
  });
  est.hits = hits;
  est.measure = static_cast<double>(hits) / static_cast<double>(orbit_length);
  est.unresolved = (hits == 0);
  return est;
}

DeltaFit fit_annulus_delta(const MapSystem& map, double p, double eps_lo, double eps_hi,
                           std::size_t grid, std::uint64_t orbit_length, std::uint64_t seed,
                           std::uint64_t burn_in) {
  if (!(eps_lo > 0.0 && eps_hi > eps_lo) || grid < 2)
    throw ConfigError("fit_annulus_delta: need 0 < eps_lo < eps_hi and grid >= 2");
  DeltaFit fit;
  double ratio = std::pow(eps_hi / eps_lo, 1.0 / static_cast<double>(grid - 1));
  // One orbit, all annuli counted in the same pass.
  std::vector<double> eps(grid);
  std::vector<std::uint64_t> hits(grid, 0);
  for (std::size_t k = 0; k < grid; ++k) eps[k] = eps_lo * std::pow(ratio, static_cast<double>(k));
  Orbit orbit;
  orbit.length = orbit_length;
  orbit.seed = seed;
  orbit.burn_in = (map.kind() == MapKind::lsv) ? burn_in : 0;
  const Domain& dom = map.domain();
  iterate(map, orbit, [&](std::uint64_t j, double x) {
    if (j == 0) return;
    double d = dom.distance(x, p);
    for (std::size_t k = 0; k < grid; ++k) {
      if (d > eps[k] && d < 2.0 * eps[k]) ++hits[k];
    }
  });
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < grid; ++k) {
    fit.eps.push_back(eps[k]);
    double m = static_cast<double>(hits[k]) / static_cast<double>(orbit_length);
    fit.measure.push_back(m);
    if (hits[k] >= 20) {
      lx.push_back(std::log(eps[k]));
      ly.push_back(std::log(m));
    }
  }
  fit.points_used = lx.size();
  if (lx.size() >= 2) {
    fit.delta_hat = linear_fit(lx, ly).slope;
    fit.available = true;
  }
  return fit;
}

}  // namespace bclab
