#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bclab/maps.hpp"
#include "bclab/targets.hpp"

namespace bclab {

enum class Preset {
  thm1,
  thm2,
  thm3_returns,
  thm4_short,
  kim_counterexample,
  chmv_counterexample,
  prop1_expanding,
  iid_baseline,
  custom,
};

std::string to_string(Preset p);
Preset preset_from_string(const std::string& name);
std::vector<Preset> all_presets();
std::string preset_description(Preset p);

/// Full experiment specification. A config determines its run completely:
/// re-running the same config reproduces byte-identical numerical outputs,
/// at any worker count.
///
/// Text form is line-based `key = value` grouped in [sections]; see
/// render()/parse(). The CLI exposes overrides as --set section.key=value.
struct ExperimentConfig {
  Preset preset = Preset::custom;

  // [map]
  MapKind map_kind = MapKind::doubling;
  double alpha = 0.6;   // lsv
  double gamma = 3.0;   // chmv

  // [schedule]
  ScheduleKind schedule_kind = ScheduleKind::power;
  double schedule_gamma = 0.5;  // power exponent
  std::uint64_t schedule_offset = 0;  // 0 = kind default

  // [targets]
  TargetConstruction construction = TargetConstruction::calibrated_ball;
  bool center_random = true;  // seeded generic center
  double center = 0.0;        // used when !center_random
  /// Ball radii: "auto" uses the closed-form invariant measure when the map
  /// has one and empirical quantile calibration otherwise; "empirical" and
  /// "analytic" force the choice.
  std::string calibration = "auto";
  std::uint64_t calibration_length = 10000000;
  double kim_constant = 1.0;

  // [run]
  std::uint64_t ensemble = 16;
  std::uint64_t orbit_length = 1000000;
  std::uint64_t burn_in = 0;
  std::uint64_t master_seed = 20260809;
  int workers = 0;  // 0 = auto (hardware), env BCLAB_WORKERS overrides
  std::string output_dir = "out";

  static ExperimentConfig preset_defaults(Preset p);
  static ExperimentConfig parse(const std::string& text);

  /// Canonical text rendering; parse(render(c)) == c.
  std::string render() const;
  /// Applies one "section.key=value" (or "preset=value") override.
  void set(const std::string& dotted_key, const std::string& value);
  /// Throws ConfigError on invalid parameter combinations.
  void validate() const;
  /// FNV-1a digest of the canonical rendering.
  std::string hash() const;

  bool operator==(const ExperimentConfig&) const = default;
};

}  // namespace bclab
