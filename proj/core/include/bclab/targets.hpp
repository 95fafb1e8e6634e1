#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bclab/maps.hpp"

namespace bclab {

/// A half-open interval [lo, hi) in domain coordinates.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x < hi; }
};

enum class ScheduleKind { power, log_over_i, harmonic, i_log_i, explicit_list };

std::string to_string(ScheduleKind kind);

/// Prescribed target-measure sequence mu_i, positive and non-increasing
/// from its start offset. Offsets default to the first index where the
/// formula is defined and monotone: (log i)/i peaks at i = e, so that kind
/// starts at 3; 1/(i log i) starts at 2.
class MeasureSchedule {
 public:
  static MeasureSchedule power(double gamma, std::uint64_t offset = 1);
  static MeasureSchedule log_over_i(std::uint64_t offset = 3);
  static MeasureSchedule harmonic(std::uint64_t offset = 1);
  static MeasureSchedule i_log_i(std::uint64_t offset = 2);
  static MeasureSchedule explicit_values(std::vector<double> values, std::uint64_t offset = 1);

  ScheduleKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  std::uint64_t offset() const { return offset_; }
  /// Largest valid index; unbounded for analytic kinds.
  std::uint64_t last_index() const {
    return kind_ == ScheduleKind::explicit_list
               ? offset_ + values_.size() - 1
               : std::numeric_limits<std::uint64_t>::max();
  }

  double measure(std::uint64_t i) const {
    if (i < offset_) throw IndexError("schedule index below start offset");
    double n = static_cast<double>(i);
    switch (kind_) {
      case ScheduleKind::power: return std::pow(n, -gamma_);
      case ScheduleKind::log_over_i: return std::log(n) / n;
      case ScheduleKind::harmonic: return 1.0 / n;
      case ScheduleKind::i_log_i: return 1.0 / (n * std::log(n));
      case ScheduleKind::explicit_list:
        if (i > last_index()) throw IndexError("schedule index beyond explicit values");
        return values_[i - offset_];
    }
    return 0.0;
  }

  const std::vector<double>& values() const { return values_; }

 private:
  MeasureSchedule() = default;
  ScheduleKind kind_ = ScheduleKind::harmonic;
  double gamma_ = 0.0;
  std::uint64_t offset_ = 1;
  std::vector<double> values_;
};

/// One-sided shrinking interval [0, n^{-1/(1-alpha)}).
Interval kim_interval(double alpha, std::uint64_t n);

/// Circle arc (-1, a_{-n}) of the chmv backward sequence, reported as a
/// half-open interval; its length on the [-1,1] scale is 1 + a_{-n}.
Interval chmv_interval(const BackwardSequences& seq, std::uint64_t n);

/// Empirical radius calibration: r_i is the mu_i-quantile of the distances
/// d(T^j x, p) along one long orbit, post-processed to be non-increasing,
/// so that the empirical measure of B(p, r_i) matches mu_i up to sampling
/// error. Throws CalibrationError when the orbit cannot resolve the
/// smallest measure (fewer than 100 points inside the smallest ball).
std::vector<double> calibrate_radii(const MapSystem& map, double center,
                                    const MeasureSchedule& schedule, std::uint64_t i_max,
                                    std::uint64_t calibration_length, std::uint64_t seed,
                                    std::uint64_t burn_in = 10000);

enum class TargetConstruction {
  calibrated_ball,
  kim_interval,
  chmv_interval,
  chmv_b_interval,
  explicit_intervals,
};

std::string to_string(TargetConstruction c);

/// A sequence of nested target sets B_i with a measure schedule.
/// Immutable after construction; membership tests are plain interval /
/// circle-arc comparisons.
class TargetSchedule {
 public:
  /// Balls B(center, r_i) with empirically calibrated radii.
  static TargetSchedule calibrated_ball(const MapSystem& map, double center,
                                        MeasureSchedule schedule, std::uint64_t i_max,
                                        std::uint64_t calibration_length, std::uint64_t seed);
  /// Balls with radii from the closed-form invariant measure (doubling and
  /// chmv, whose acip is Lebesgue); exact at every index, so usable at
  /// scales no calibration orbit could resolve.
  static TargetSchedule analytic_ball(const MapSystem& map, double center,
                                      MeasureSchedule schedule);
  /// A_n = [0, n^{-1/(1-alpha)}) with nominal measure measure_constant / n.
  static TargetSchedule kim_family(double alpha, double measure_constant, std::uint64_t i_max);
  /// A_n = (-1, a_{-n}); measures are arc lengths 1 + a_{-n} on the [-1,1]
  /// scale (the chmv map preserves Lebesgue measure).
  static TargetSchedule chmv_family(std::shared_ptr<const BackwardSequences> seq);
  /// Entrance intervals (0, b_n).
  static TargetSchedule chmv_b_family(std::shared_ptr<const BackwardSequences> seq);
  static TargetSchedule explicit_intervals(std::vector<Interval> sets,
                                           std::vector<double> measures,
                                           std::uint64_t offset = 1);

  TargetConstruction construction() const { return construction_; }
  std::uint64_t first_index() const { return first_; }
  std::uint64_t last_index() const { return last_; }
  double center() const { return center_; }
  const MeasureSchedule* measure_schedule() const {
    return schedule_ ? &*schedule_ : nullptr;
  }

  double measure(std::uint64_t i) const {
    check_index_(i);
    switch (construction_) {
      case TargetConstruction::calibrated_ball: return schedule_->measure(i);
      case TargetConstruction::kim_interval: return kim_constant_ / static_cast<double>(i);
      case TargetConstruction::chmv_interval: return 1.0 + seq_->a[i];
      case TargetConstruction::chmv_b_interval: return seq_->b[i];
      case TargetConstruction::explicit_intervals: return measures_[i - first_];
    }
    return 0.0;
  }

  bool contains(std::uint64_t i, double x) const {
    check_index_(i);
    switch (construction_) {
      case TargetConstruction::calibrated_ball:
        return domain_.distance(x, center_) < radius(i);
      case TargetConstruction::kim_interval:
        return x >= 0.0 && x < kim_widths_[i - first_];
      case TargetConstruction::chmv_interval:
        return x > -1.0 && x < seq_->a[i];
      case TargetConstruction::chmv_b_interval:
        return x > 0.0 && x < seq_->b[i];
      case TargetConstruction::explicit_intervals:
        return sets_[i - first_].contains(x);
    }
    return false;
  }

  /// Ball radius at index i (calibrated or analytic).
  double radius(std::uint64_t i) const {
    if (construction_ != TargetConstruction::calibrated_ball)
      throw ConfigError("radius: schedule is not a ball family");
    if (!radii_.empty()) return radii_[i - first_];
    double mu = schedule_->measure(i);
    return mu >= analytic_full_measure_ ? domain_.length() : 0.5 * mu;
  }

  /// Single-pass measure + membership, evaluating mu_i once. This is the
  /// hot path of hit counting.
  double measure_and_test(std::uint64_t i, double x, bool* hit) const {
    check_index_(i);
    switch (construction_) {
      case TargetConstruction::calibrated_ball: {
        double mu = schedule_->measure(i);
        double r = !radii_.empty()
                       ? radii_[i - first_]
                       : (mu >= analytic_full_measure_ ? domain_.length() : 0.5 * mu);
        *hit = domain_.distance(x, center_) < r;
        return mu;
      }
      case TargetConstruction::kim_interval:
        *hit = x >= 0.0 && x < kim_widths_[i - first_];
        return kim_constant_ / static_cast<double>(i);
      case TargetConstruction::chmv_interval:
        *hit = x > -1.0 && x < seq_->a[i];
        return 1.0 + seq_->a[i];
      case TargetConstruction::chmv_b_interval:
        *hit = x > 0.0 && x < seq_->b[i];
        return seq_->b[i];
      case TargetConstruction::explicit_intervals:
        *hit = sets_[i - first_].contains(x);
        return measures_[i - first_];
    }
    *hit = false;
    return 0.0;
  }

  /// Exact nesting check B_{i+1} subset of B_i over [first, i_hi].
  bool nested(std::uint64_t i_hi) const;

  std::string to_json() const;
  static TargetSchedule from_json(const std::string& text);

 private:
  TargetSchedule() = default;
  void check_index_(std::uint64_t i) const {
    if (i < first_ || i > last_) throw IndexError("target index out of range");
  }

  TargetConstruction construction_ = TargetConstruction::explicit_intervals;
  Domain domain_{0.0, 1.0};
  std::optional<MeasureSchedule> schedule_;
  std::shared_ptr<const BackwardSequences> seq_;
  std::vector<double> radii_;       // calibrated balls
  std::vector<Interval> sets_;      // explicit
  std::vector<double> measures_;    // explicit
  std::vector<double> kim_widths_;  // kim family
  double center_ = 0.0;
  double kim_alpha_ = 0.0;
  double kim_constant_ = 1.0;
  double analytic_full_measure_ = std::numeric_limits<double>::infinity();
  std::uint64_t first_ = 1;
  std::uint64_t last_ = std::numeric_limits<std::uint64_t>::max();
};

struct AnnulusEstimate {
  double measure = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  bool unresolved = false;  ///< zero hits; the estimate is only an upper bound
};

/// Birkhoff estimate of mu{ x : r < d(x, p) < r + eps }.
AnnulusEstimate annulus_measure_estimate(const MapSystem& map, double p, double r, double eps,
                                         std::uint64_t orbit_length, std::uint64_t seed,
                                         std::uint64_t burn_in = 10000);

struct DeltaFit {
  double delta_hat = 0.0;
  std::vector<double> eps;
  std::vector<double> measure;
  std::size_t points_used = 0;
  bool available = false;
};

/// Fits the annulus-measure exponent: measures of the annuli [eps, 2 eps)
/// around p are regressed as log(measure) vs log(eps) over a geometric
/// grid. Probing at r = eps targets the regime where the bound
/// mu(annulus) < eps^delta is tight.
DeltaFit fit_annulus_delta(const MapSystem& map, double p, double eps_lo, double eps_hi,
                           std::size_t grid, std::uint64_t orbit_length, std::uint64_t seed,
                           std::uint64_t burn_in = 10000);

}  // namespace bclab
