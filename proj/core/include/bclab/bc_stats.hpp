#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bclab/maps.hpp"
#include "bclab/targets.hpp"

namespace bclab {

/// Hit counters of one orbit against one target schedule, sampled at
/// checkpoints. S is the number of indices i <= n with T^i x in B_i, E the
/// partial sum of schedule measures over the same indices.
struct HitTrace {
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::uint64_t> S;
  std::vector<double> E;
  std::uint64_t seed = 0;
  std::uint64_t orbit_index = 0;
  std::uint64_t first_index = 0;   ///< i0 of the schedule
  std::uint64_t last_hit = 0;      ///< largest hit index, 0 if no hits
  std::uint64_t total_hits = 0;

  std::uint64_t final_n() const { return checkpoints.empty() ? 0 : checkpoints.back(); }
  std::uint64_t final_S() const { return S.empty() ? 0 : S.back(); }
  double final_E() const { return E.empty() ? 0.0 : E.back(); }
  double final_ratio() const { return final_E() > 0.0 ? final_S() / final_E() : 0.0; }
  /// S at a recorded checkpoint; throws IndexError if n was not recorded.
  std::uint64_t S_at(std::uint64_t n) const;
  double E_at(std::uint64_t n) const;
};

/// Geometric checkpoint grid ceil(i0 * 1.5^k), augmented with the powers of
/// ten in range and the final index. A nonzero stride gives a linear grid
/// i0, i0+stride, ... instead.
std::vector<std::uint64_t> make_checkpoints(std::uint64_t i0, std::uint64_t n,
                                            std::uint64_t stride = 0);

/// Runs one orbit against the schedule: at every index i in
/// [schedule.first_index(), orbit.length] records whether T^i x lies in B_i
/// (step 0 is the starting point). For the iid_control map the indicator is
/// an independent Bernoulli draw with success probability mu_i instead.
/// Checkpoints follow orbit.checkpoint_stride (0 = geometric).
HitTrace run_hits(const MapSystem& map, const TargetSchedule& targets, const Orbit& orbit);

/// Partial sum of schedule measures over [first_index, n].
double expected_hits(const TargetSchedule& targets, std::uint64_t n);

/// Ensemble statistics of a set of hit traces. Pure fold of the per-orbit
/// data: merging partial summaries and summarizing the union produce the
/// same result.
struct EnsembleSummary {
  std::uint64_t n = 0;
  std::uint64_t first_index = 0;
  double E_final = 0.0;
  std::vector<double> final_ratios;        // ordered by orbit index
  std::vector<std::uint64_t> last_hits;    // ordered by orbit index
  std::vector<std::uint64_t> orbit_index;  // sorted ascending
  double median_ratio = 0.0;
  double mean_sq_deviation = 0.0;  ///< mean of (S_n - E_n)^2
  double variance_ratio = 0.0;     ///< mean of (S_n - E_n)^2 / E_n^2
  double plateau_fraction = 0.0;   ///< orbits with no hit in the final half of [i0, n]
  double active_fraction = 0.0;    ///< orbits with a hit in the final decade (n/10, n]

  /// Zero-one sanity: an ensemble should be nearly unanimous; close to a
  /// 50/50 split flags an undersized experiment rather than a theorem
  /// violation.
  bool zero_one_consistent(double quorum = 0.9) const {
    return active_fraction >= quorum || plateau_fraction >= quorum;
  }
};

EnsembleSummary sbc_report(std::span<const HitTrace> traces);
EnsembleSummary merge(const EnsembleSummary& a, const EnsembleSummary& b);

struct VarianceRatio {
  double value = 0.0;
  std::size_t traces = 0;
  bool wide_confidence = false;  ///< fewer than 30 traces
};

/// Ensemble estimate of E (S_n - E_n)^2 / E_n^2 at a recorded checkpoint.
VarianceRatio variance_ratio(std::span<const HitTrace> traces, std::uint64_t n);

/// Error-term monitor: checks |S_n - E_n| <= C sqrt(theta) log^{3/2+eps}(theta)
/// with h_k = mu_k (so theta = E_n) across checkpoints. The monitor is
/// active where theta >= e, keeping the polylog factor >= 1. fitted_C is
/// the 99th percentile over orbits of the per-orbit max required C; the
/// growth test fits log(median required C) against log(theta) over the
/// trailing half of the active checkpoints.
struct SprindzukReport {
  double epsilon = 0.0;
  double fitted_C = 0.0;
  double growth_slope = 0.0;
  bool growing = false;
  std::vector<std::uint64_t> active_checkpoints;
  std::vector<double> median_required_C;

  bool pass(double c_threshold) const { return !growing && fitted_C <= c_threshold; }
};

SprindzukReport sprindzuk_monitor(std::span<const HitTrace> traces, double epsilon = 0.01);

}  // namespace bclab
