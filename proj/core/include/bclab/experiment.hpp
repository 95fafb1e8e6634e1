#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bclab/bc_stats.hpp"
#include "bclab/config.hpp"
#include "bclab/parallel.hpp"

namespace bclab {

struct CheckResult {
  std::string name;
  double value = 0.0;
  std::string requirement;
  bool pass = false;
};

struct FileEntry {
  std::string path;  // relative to the output directory
  std::string digest;
  std::uint64_t bytes = 0;
};

/// Record of one experiment run: configuration digest, seed derivation,
/// worker partition, output inventory with content digests, and the
/// embedded acceptance checks of the preset.
struct RunManifest {
  std::string artifact_version;
  std::string preset;
  std::string config_hash;
  std::string config_text;
  std::uint64_t master_seed = 0;
  int workers_used = 0;
  std::vector<WorkerBlock> blocks;
  std::vector<FileEntry> files;
  std::vector<CheckResult> checks;
  double wall_clock_sec = 0.0;
  std::string output_dir;

  bool all_checks_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

/// Executes the configured preset across the ensemble, writes per-orbit
/// trace CSVs, the ensemble summary JSON and manifest.json into the output
/// directory, and returns the manifest. Per-orbit randomness is derived
/// from (master seed, orbit index), never from scheduling, so outputs are
/// byte-identical at any worker count.
RunManifest run_experiment(const ExperimentConfig& config);

struct ReportResult {
  bool ok = false;
  std::vector<std::string> missing;  ///< inventory gaps, when !ok
  std::string text;                  ///< human-readable summary
};

/// Aggregates a finished run: verifies the manifest's file inventory,
/// prints the embedded check lines and writes plot-ready CSVs
/// (ratio_series.csv; per-radius return CDFs when present).
ReportResult report(const std::filesystem::path& run_dir);

}  // namespace bclab
