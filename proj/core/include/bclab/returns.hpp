#pragma once

#include <cstdint>
#include <vector>

#include "bclab/maps.hpp"
#include "bclab/targets.hpp"

namespace bclab {

/// A fixed target set for return-time statistics: a circle ball or an
/// explicit interval.
struct SetSpec {
  enum class Kind { ball, interval };
  Kind kind = Kind::ball;
  double center = 0.0;
  double radius = 0.0;
  Interval iv;

  static SetSpec ball(double center, double radius) {
    SetSpec s;
    s.kind = Kind::ball;
    s.center = center;
    s.radius = radius;
    return s;
  }
  static SetSpec interval(Interval v) {
    SetSpec s;
    s.kind = Kind::interval;
    s.iv = v;
    return s;
  }

  bool contains(const Domain& d, double x) const {
    return kind == Kind::ball ? d.distance(x, center) < radius : iv.contains(x);
  }
  /// Closed-form measure when the map's acip is Lebesgue; negative otherwise.
  double exact_measure(const MapSystem& map) const {
    if (!map.has_exact_measure()) return -1.0;
    return kind == Kind::ball ? map.exact_ball_measure(radius) : iv.length();
  }
};

/// First-return times into a fixed set, sampled as the gaps between
/// consecutive visits along one long orbit (the post-return point is
/// mu_B-distributed in the ergodic limit).
struct ReturnSample {
  SetSpec set;
  std::vector<std::uint64_t> taus;
  double mu_hat = 0.0;    ///< Birkhoff estimate of mu(B) from the same run
  double mu_exact = -1.0; ///< closed-form mu(B) when available
  std::uint64_t orbit_steps = 0;
  std::uint64_t visits = 0;
  bool partial = false;   ///< budget exhausted before the requested sample count
};

ReturnSample first_return_times(const MapSystem& map, const SetSpec& set,
                                std::size_t samples, std::uint64_t orbit_budget,
                                std::uint64_t seed, std::uint64_t seed_index = 0,
                                std::uint64_t burn_in = 10000);

/// Distribution diagnostics of normalized return times t = tau * mu(B).
/// The K-S distance is taken against 1 - e^-t with the same-run estimate
/// mu_hat (nominal-measure error would otherwise dominate the statistic);
/// the Kac mean uses the closed-form measure when one exists, making
/// mean(tau) * mu(B) = 1 a genuine test rather than an identity.
struct DistributionReport {
  double ks_distance = 1.0;
  double mean_normalized = 0.0;  ///< mean of tau * mu_hat
  double kac_mean = 0.0;         ///< mean of tau * mu_exact (falls back to mu_hat)
  double small_t_mass = 0.0;     ///< empirical F(t_star)
  double t_star = 0.1;
  std::size_t samples = 0;
  bool low_power = false;  ///< fewer than 1e3 samples
};

DistributionReport ks_exponential(const ReturnSample& sample, double t_star = 0.1);

/// Short-return mass estimates mu(B cap T^-r B) for r = 1..ceil((log i)^k).
struct ShortReturnReport {
  std::vector<double> mass;  ///< indexed by r-1
  std::uint64_t r_max = 0;
  double max_mass = 0.0;
  std::uint64_t argmax_r = 0;
  double mu_hat = 0.0;
  double max_mass_ucb = 0.0;  ///< Poisson 95% upper bound when nothing was seen
  double eta_hat = 0.0;       ///< -log(max * i)/log i; from the UCB when unresolved
  bool unresolved = false;    ///< zero joint hits at every r
  /// max mass comparable to mu(B) itself; the signature of a neutral fixed
  /// point retaining the set (a failed short-return bound shows up here,
  /// not as a negative eta_hat, since mass <= mu(B) <= 1/i forces
  /// eta_hat >= 0).
  bool short_returns_not_rare = false;
};

ShortReturnReport short_return_mass(const MapSystem& map, const SetSpec& set, std::uint64_t i,
                                    double k_exponent, std::uint64_t orbit_length,
                                    std::uint64_t seed, std::uint64_t burn_in = 10000);

/// Runs first_return_times + ks_exponential for each radius (decreasing)
/// around p and reports the per-radius diagnostics.
std::vector<DistributionReport> return_law_sweep(const MapSystem& map, double p,
                                                 const std::vector<double>& radii,
                                                 std::size_t samples,
                                                 std::uint64_t orbit_budget,
                                                 std::uint64_t seed);

}  // namespace bclab
