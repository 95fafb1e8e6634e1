#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bclab/bc_stats.hpp"
#include "bclab/correlations.hpp"
#include "bclab/returns.hpp"

namespace bclab {

/// Shortest round-trip decimal rendering of a double ("%.17g"), so CSV
/// bytes are a pure function of the values.
std::string fmt_g17(double v);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& body);
std::string read_text_file(const std::filesystem::path& path);

/// Per-orbit trace: header checkpoint,S,E,ratio.
std::string trace_csv_body(const HitTrace& trace);
void write_trace_csv(const HitTrace& trace, const std::filesystem::path& path);

/// Correlation curve: header lag,estimate,stderr.
void write_correlation_csv(const CorrelationCurve& curve, const std::filesystem::path& path);

/// Return sample: header tau,normalized (normalized by the same-run mu_hat).
void write_returns_csv(const ReturnSample& sample, const std::filesystem::path& path);

}  // namespace bclab
