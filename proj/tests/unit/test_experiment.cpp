#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <map>

#include "bclab/experiment.hpp"
#include "bclab/io.hpp"

using namespace bclab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "bclab_test" / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_custom(const std::string& out) {
  ExperimentConfig cfg = ExperimentConfig::preset_defaults(Preset::custom);
  cfg.ensemble = 6;
  cfg.orbit_length = 20000;
  cfg.master_seed = 314159;
  cfg.output_dir = out;
  cfg.workers = 1;
  return cfg;
}

std::map<std::string, std::string> digests(const RunManifest& m) {
  std::map<std::string, std::string> d;
  for (const auto& f : m.files) d[f.path] = f.digest;
  return d;
}

}  // namespace

TEST_CASE("a run writes the inventory it declares") {
  fs::path dir = fresh_dir("inventory");
  RunManifest m = run_experiment(small_custom(dir.string()));
  CHECK(m.files.size() == 7);  // 6 traces + summary.json
  for (const auto& f : m.files) {
    fs::path p = dir / f.path;
    REQUIRE(fs::exists(p));
    CHECK(fnv1a64_hex(read_text_file(p)) == f.digest);
  }
  CHECK(fs::exists(dir / "manifest.json"));
  RunManifest loaded = RunManifest::from_json(read_text_file(dir / "manifest.json"));
  CHECK(loaded.config_hash == m.config_hash);
  CHECK(loaded.files.size() == m.files.size());
  CHECK(m.checks.empty());  // custom preset embeds no checks
}

TEST_CASE("same config twice gives identical digests") {
  fs::path a = fresh_dir("rerun_a"), b = fresh_dir("rerun_b");
  ExperimentConfig ca = small_custom(a.string());
  ExperimentConfig cb = small_custom(b.string());
  RunManifest ma = run_experiment(ca);
  RunManifest mb = run_experiment(cb);
  CHECK(digests(ma) == digests(mb));
}

TEST_CASE("environment overrides the configured worker count") {
  setenv("BCLAB_WORKERS", "3", 1);
  CHECK(resolve_worker_count(1) == 3);
  CHECK(resolve_worker_count(0) == 3);
  setenv("BCLAB_WORKERS", "zero", 1);
  CHECK_THROWS_AS(resolve_worker_count(1), ConfigError);
  unsetenv("BCLAB_WORKERS");
  CHECK(resolve_worker_count(2) == 2);
}

TEST_CASE("worker count does not change the numbers") {
  unsetenv("BCLAB_WORKERS");
  fs::path a = fresh_dir("workers_1"), b = fresh_dir("workers_4");
  ExperimentConfig ca = small_custom(a.string());
  ExperimentConfig cb = small_custom(b.string());
  cb.workers = 4;
  RunManifest ma = run_experiment(ca);
  RunManifest mb = run_experiment(cb);
  CHECK(ma.workers_used == 1);
  CHECK(mb.workers_used == 4);
  CHECK(digests(ma) == digests(mb));
  CHECK(mb.blocks.size() == 4);
}

TEST_CASE("empty ensemble yields an empty manifest without error") {
  fs::path dir = fresh_dir("empty");
  ExperimentConfig cfg = small_custom(dir.string());
  cfg.ensemble = 0;
  RunManifest m = run_experiment(cfg);
  CHECK(m.files.empty());
  CHECK(m.checks.empty());
  CHECK(m.all_checks_pass());
  ReportResult rep = report(dir);
  CHECK(rep.ok);
  CHECK(rep.text.find("nothing to report") != std::string::npos);
}

TEST_CASE("invalid configs fail before any compute") {
  ExperimentConfig cfg = small_custom("should_not_exist_dir");
  cfg.map_kind = MapKind::lsv;
  cfg.alpha = 1.7;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  CHECK_FALSE(fs::exists("should_not_exist_dir"));
}

TEST_CASE("report flags missing files") {
  fs::path dir = fresh_dir("gaps");
  run_experiment(small_custom(dir.string()));
  fs::remove(dir / "trace_00003.csv");
  ReportResult rep = report(dir);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.missing.size() == 1);
  CHECK(rep.missing[0] == "trace_00003.csv");
  CHECK(rep.text.find("trace_00003.csv") != std::string::npos);
}

TEST_CASE("report aggregates traces into a ratio series") {
  fs::path dir = fresh_dir("series");
  run_experiment(small_custom(dir.string()));
  ReportResult rep = report(dir);
  CHECK(rep.ok);
  CHECK(fs::exists(dir / "ratio_series.csv"));
  std::string body = read_text_file(dir / "ratio_series.csv");
  CHECK(body.rfind("checkpoint,median_ratio,q10,q90\n", 0) == 0);
}

TEST_CASE("csv writers emit the documented schemas") {
  fs::path dir = fresh_dir("csv");
  fs::create_directories(dir);

  CorrelationCurve curve;
  curve.lags = {0, 1};
  curve.estimate = {0.5, 0.001};
  curve.stderr_ = {0.0001, 0.0002};
  write_correlation_csv(curve, dir / "curve.csv");
  std::string body = read_text_file(dir / "curve.csv");
  CHECK(body.rfind("lag,estimate,stderr\n", 0) == 0);
  CHECK(body.find("0,0.5,0.0001") != std::string::npos);

  ReturnSample sample;
  sample.mu_hat = 0.25;
  sample.taus = {4, 8};
  write_returns_csv(sample, dir / "returns.csv");
  body = read_text_file(dir / "returns.csv");
  CHECK(body == "tau,normalized\n4,1\n8,2\n");

  HitTrace t;
  t.checkpoints = {2, 10};
  t.S = {1, 5};
  t.E = {0.5, 4.0};
  write_trace_csv(t, dir / "trace.csv");
  body = read_text_file(dir / "trace.csv");
  CHECK(body == "checkpoint,S,E,ratio\n2,1,0.5,2\n10,5,4,1.25\n");
}

TEST_CASE("manifest json round-trips") {
  fs::path dir = fresh_dir("manifest_rt");
  RunManifest m = run_experiment(small_custom(dir.string()));
  RunManifest back = RunManifest::from_json(m.to_json());
  CHECK(back.config_hash == m.config_hash);
  CHECK(back.master_seed == m.master_seed);
  CHECK(back.files.size() == m.files.size());
  CHECK(back.blocks.size() == m.blocks.size());
  CHECK(back.output_dir == m.output_dir);
}
