#include "bclab/config.hpp"

#include <cmath>
#include <sstream>

#include "bclab/io.hpp"

namespace bclab {

std::string to_string(Preset p) {
  switch (p) {
    case Preset::thm1: return "thm1";
    case Preset::thm2: return "thm2";
    case Preset::thm3_returns: return "thm3_returns";
    case Preset::thm4_short: return "thm4_short";
    case Preset::kim_counterexample: return "kim_counterexample";
    case Preset::chmv_counterexample: return "chmv_counterexample";
    case Preset::prop1_expanding: return "prop1_expanding";
    case Preset::iid_baseline: return "iid_baseline";
    case Preset::custom: return "custom";
  }
  return "?";
}

Preset preset_from_string(const std::string& name) {
  for (Preset p : all_presets()) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown preset: " + name);
}

std::vector<Preset> all_presets() {
  return {Preset::thm1,
          Preset::thm2,
          Preset::thm3_returns,
          Preset::thm4_short,
          Preset::kim_counterexample,
          Preset::chmv_counterexample,
          Preset::prop1_expanding,
          Preset::iid_baseline,
          Preset::custom};
}

std::string preset_description(Preset p) {
  switch (p) {
    case Preset::thm1:
      return "doubling map, schedule i^-1/2, calibrated balls: SBC ratio, variance "
             "ratio and error-term monitor";
    case Preset::thm2:
      return "doubling map, schedule (log i)/i at n=1e8: SBC ratio and unbounded hit growth";
    case Preset::thm3_returns:
      return "doubling map return-law sweep: K-S vs 1-e^-t, Kac mean, periodic-center control";
    case Preset::thm4_short:
      return "doubling map, schedule 1/(i log i): short-return masses and hit growth";
    case Preset::kim_counterexample:
      return "lsv map with targets [0, n^{-1/(1-alpha)}): divergent measure sum, finite hits";
    case Preset::chmv_counterexample:
      return "chmv map with targets (-1, a_-n): divergent length sum, finite hits";
    case Preset::prop1_expanding:
      return "doubling map, harmonic ball schedule: SBC on a uniformly expanding baseline";
    case Preset::iid_baseline:
      return "independent Bernoulli control with p_i = i^-1/2: validates the estimators";
    case Preset::custom:
      return "fully user-specified run, no embedded checks";
  }
  return "";
}

namespace {

MapKind map_kind_from(const std::string& s) {
  if (s == "lsv") return MapKind::lsv;
  if (s == "chmv") return MapKind::chmv;
  if (s == "doubling") return MapKind::doubling;
  if (s == "iid_control") return MapKind::iid_control;
  throw ConfigError("unknown map kind: " + s);
}

ScheduleKind schedule_kind_from(const std::string& s) {
  if (s == "power") return ScheduleKind::power;
  if (s == "log_over_i") return ScheduleKind::log_over_i;
  if (s == "harmonic") return ScheduleKind::harmonic;
  if (s == "i_log_i") return ScheduleKind::i_log_i;
  if (s == "explicit") return ScheduleKind::explicit_list;
  throw ConfigError("unknown schedule kind: " + s);
}

TargetConstruction construction_from(const std::string& s) {
  if (s == "calibrated_ball") return TargetConstruction::calibrated_ball;
  if (s == "kim_interval") return TargetConstruction::kim_interval;
  if (s == "chmv_interval") return TargetConstruction::chmv_interval;
  if (s == "chmv_b_interval") return TargetConstruction::chmv_b_interval;
  if (s == "explicit_intervals") return TargetConstruction::explicit_intervals;
  throw ConfigError("unknown target construction: " + s);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw ConfigError("");
    return d;
  } catch (...) {
    throw ConfigError("bad number for " + key + ": " + v);
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    // Accept scientific notation for counts (1e7 etc.).
    double d = std::stod(v, &used);
    if (used != v.size() || d < 0 || d != std::floor(d) || d > 1.8e18)
      throw ConfigError("");
    return static_cast<std::uint64_t>(d);
  } catch (...) {
    throw ConfigError("bad count for " + key + ": " + v);
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::preset_defaults(Preset p) {
  ExperimentConfig c;
  c.preset = p;
  switch (p) {
    case Preset::thm1:
      c.map_kind = MapKind::doubling;
      c.schedule_kind = ScheduleKind::power;
      c.schedule_gamma = 0.5;
      c.construction = TargetConstruction::calibrated_ball;
      c.calibration = "empirical";
      c.calibration_length = 10000000;
      c.ensemble = 64;
      c.orbit_length = 1000000;
      break;
    case Preset::thm2:
      c.map_kind = MapKind::doubling;
      c.schedule_kind = ScheduleKind::log_over_i;
      c.construction = TargetConstruction::calibrated_ball;
      c.ensemble = 16;
      c.orbit_length = 100000000;
      break;
    case Preset::thm3_returns:
      c.map_kind = MapKind::doubling;
      c.ensemble = 1;
      c.orbit_length = 100000000;  // per-radius orbit budget
      break;
    case Preset::thm4_short:
      c.map_kind = MapKind::doubling;
      c.schedule_kind = ScheduleKind::i_log_i;
      c.construction = TargetConstruction::calibrated_ball;
      c.ensemble = 16;
      c.orbit_length = 100000000;
      break;
    case Preset::kim_counterexample:
      c.map_kind = MapKind::lsv;
      c.alpha = 0.6;
      c.construction = TargetConstruction::kim_interval;
      c.ensemble = 64;
      c.orbit_length = 10000000;
      c.burn_in = 10000;
      break;
    case Preset::chmv_counterexample:
      c.map_kind = MapKind::chmv;
      c.gamma = 3.0;
      c.construction = TargetConstruction::chmv_interval;
      c.ensemble = 64;
      c.orbit_length = 10000000;
      break;
    case Preset::prop1_expanding:
      c.map_kind = MapKind::doubling;
      c.schedule_kind = ScheduleKind::harmonic;
      c.schedule_offset = 2;
      c.construction = TargetConstruction::calibrated_ball;
      c.ensemble = 32;
      c.orbit_length = 10000000;
      break;
    case Preset::iid_baseline:
      c.map_kind = MapKind::iid_control;
      c.schedule_kind = ScheduleKind::power;
      c.schedule_gamma = 0.5;
      c.ensemble = 256;
      c.orbit_length = 1000000;
      break;
    case Preset::custom:
      break;
  }
  return c;
}

std::string ExperimentConfig::render() const {
  std::ostringstream out;
  out << "preset = " << to_string(preset) << "\n\n";
  out << "[map]\n";
  out << "kind = " << to_string(map_kind) << "\n";
  out << "alpha = " << fmt_g17(alpha) << "\n";
  out << "gamma = " << fmt_g17(gamma) << "\n\n";
  out << "[schedule]\n";
  out << "kind = " << to_string(schedule_kind) << "\n";
  out << "gamma = " << fmt_g17(schedule_gamma) << "\n";
  out << "offset = " << schedule_offset << "\n\n";
  out << "[targets]\n";
  out << "construction = " << to_string(construction) << "\n";
  out << "center = " << (center_random ? std::string("random") : fmt_g17(center)) << "\n";
  out << "calibration = " << calibration << "\n";
  out << "calibration_length = " << calibration_length << "\n";
  out << "kim_constant = " << fmt_g17(kim_constant) << "\n\n";
  out << "[run]\n";
  out << "ensemble = " << ensemble << "\n";
  out << "orbit_length = " << orbit_length << "\n";
  out << "burn_in = " << burn_in << "\n";
  out << "master_seed = " << master_seed << "\n";
  out << "workers = " << workers << "\n";
  out << "output_dir = " << output_dir << "\n";
  return out.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string dotted = section.empty() ? key : section + "." + key;
    c.set(dotted, value);
  }
  return c;
}

void ExperimentConfig::set(const std::string& dotted_key, const std::string& value) {
  const std::string& k = dotted_key;
  if (k == "preset") { preset = preset_from_string(value); return; }
  if (k == "map.kind") { map_kind = map_kind_from(value); return; }
  if (k == "map.alpha") { alpha = parse_double(value, k); return; }
  if (k == "map.gamma") { gamma = parse_double(value, k); return; }
  if (k == "schedule.kind") { schedule_kind = schedule_kind_from(value); return; }
  if (k == "schedule.gamma") { schedule_gamma = parse_double(value, k); return; }
  if (k == "schedule.offset") { schedule_offset = parse_u64(value, k); return; }
  if (k == "targets.construction") { construction = construction_from(value); return; }
  if (k == "targets.center") {
    if (value == "random") {
      center_random = true;
      center = 0.0;
    } else {
      center_random = false;
      center = parse_double(value, k);
    }
    return;
  }
  if (k == "targets.calibration") {
    if (value != "auto" && value != "empirical" && value != "analytic")
      throw ConfigError("targets.calibration must be auto, empirical or analytic");
    calibration = value;
    return;
  }
  if (k == "targets.calibration_length") { calibration_length = parse_u64(value, k); return; }
  if (k == "targets.kim_constant") { kim_constant = parse_double(value, k); return; }
  if (k == "run.ensemble") { ensemble = parse_u64(value, k); return; }
  if (k == "run.orbit_length") { orbit_length = parse_u64(value, k); return; }
  if (k == "run.burn_in") { burn_in = parse_u64(value, k); return; }
  if (k == "run.master_seed") { master_seed = parse_u64(value, k); return; }
  if (k == "run.workers") { workers = static_cast<int>(parse_u64(value, k)); return; }
  if (k == "run.output_dir") { output_dir = value; return; }
  throw ConfigError("unknown config key: " + k);
}

void ExperimentConfig::validate() const {
  if (map_kind == MapKind::lsv && !(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("map.alpha must lie in (0,1) for the lsv map");
  if (map_kind == MapKind::chmv && !(gamma > 1.0))
    throw ConfigError("map.gamma must exceed 1 for the chmv map");
  if (schedule_kind == ScheduleKind::power &&
      !(schedule_gamma > 0.0 && schedule_gamma < 1.0))
    throw ConfigError("schedule.gamma must lie in (0,1) for the power schedule");
  if (construction == TargetConstruction::kim_interval && map_kind != MapKind::lsv)
    throw ConfigError("kim_interval targets require the lsv map");
  if ((construction == TargetConstruction::chmv_interval ||
       construction == TargetConstruction::chmv_b_interval) &&
      map_kind != MapKind::chmv)
    throw ConfigError("chmv targets require the chmv map");
  if (!(kim_constant > 0.0)) throw ConfigError("targets.kim_constant must be positive");
  if (calibration != "auto" && calibration != "empirical" && calibration != "analytic")
    throw ConfigError("targets.calibration must be auto, empirical or analytic");
  if (calibration == "analytic" && map_kind == MapKind::lsv &&
      construction == TargetConstruction::calibrated_ball)
    throw ConfigError("analytic radii are unavailable for the lsv map");
  if (workers < 0) throw ConfigError("run.workers must be >= 0");
  if (orbit_length < 1) throw ConfigError("run.orbit_length must be >= 1");
  if (output_dir.empty()) throw ConfigError("run.output_dir must not be empty");
}

std::string ExperimentConfig::hash() const { return fnv1a64_hex(render()); }

}  // namespace bclab
