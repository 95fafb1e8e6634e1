#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bclab/maps.hpp"
#include "bclab/targets.hpp"

namespace bclab {

struct MollifiedObservable;

/// Piecewise-linear observable on a circle domain. Breakpoints are sorted
/// in [lo, hi); the segment from the last breakpoint back to the first
/// wraps through the seam, so the function is continuous on the circle.
/// The Lipschitz constant is the exact maximum slope over the pieces.
class Observable {
 public:
  static Observable piecewise_linear(std::vector<double> xs, std::vector<double> ys,
                                     Domain domain);
  /// PL interpolant of f on a uniform grid of `pieces` segments.
  static Observable sampled(const std::function<double(double)>& f, std::size_t pieces,
                            Domain domain);
  static Observable constant(double value, Domain domain);
  static Observable linear_combination(double a, const Observable& f, double b,
                                       const Observable& g);

  /// PL approximation of the indicator of `set`: 1 on the set, 0 at circle
  /// distance >= slack from it, linear ramps in between. Lipschitz constant
  /// 1/slack. If the collar covers the complement the constant 1 is
  /// returned with the saturated flag.
  static MollifiedObservable mollified_indicator(Interval set, double slack, Domain domain);

  double operator()(double x) const;
  double lipschitz_constant() const;
  bool is_constant() const {
    for (double y : ys_)
      if (y != ys_.front()) return false;
    return true;
  }
  const Domain& domain() const { return domain_; }
  const std::vector<double>& breakpoints() const { return xs_; }
  const std::vector<double>& values() const { return ys_; }

  /// Estimator-filled cache of the Birkhoff mean. Not synchronized: share
  /// an Observable across threads read-only, or give each estimator its
  /// own copy.
  mutable std::optional<double> mean_hint;

 private:
  Observable() = default;
  std::vector<double> xs_, ys_;
  Domain domain_{0.0, 1.0};
};

struct MollifiedObservable {
  Observable fn;
  bool saturated = false;  ///< collar wrapped around; fn is the constant 1
};

/// Convenience free function matching the operation name.
inline MollifiedObservable mollify_indicator(Interval set, double slack, Domain domain) {
  return Observable::mollified_indicator(set, slack, domain);
}

struct DecayFit {
  enum class Model { poly, exponential };
  Model model = Model::poly;
  double exponent = 0.0;  ///< c(m) ~ m^-exponent   (poly)
  double base = 0.0;      ///< c(m) ~ base^m        (exponential)
  double residual_norm = 0.0;
  std::size_t lags_used = 0;
  bool available = false;
};

/// Lag-indexed correlation estimates E(phi . psi o T^m) - E(phi) E(psi)
/// with replicate-based standard errors.
struct CorrelationCurve {
  std::vector<int> lags;
  std::vector<double> estimate;
  std::vector<double> stderr_;
  std::size_t replicates = 0;
  bool no_error_bars = false;  ///< fewer than 2 replicates
  DecayFit fit;
};

/// Overlapping-window Birkhoff estimate of the correlations at the given
/// lags, one orbit per replicate, point estimate and standard error from
/// the replicate spread.
CorrelationCurve estimate_correlation(const MapSystem& map, const Observable& phi,
                                      const Observable& psi, std::vector<int> lags,
                                      std::uint64_t samples, std::size_t replicates,
                                      std::uint64_t seed, std::uint64_t burn_in = 10000);

/// Least-squares decay fit on the lags with |estimate| > 2 stderr:
/// log|c| vs log m (poly) or vs m (exponential). Needs at least 5
/// significant lags, otherwise returns available = false.
DecayFit fit_decay_rate(const CorrelationCurve& curve, DecayFit::Model model);

}  // namespace bclab
