#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bclab/errors.hpp"
#include "bclab/rng.hpp"

namespace bclab {

enum class MapKind { lsv, chmv, doubling, iid_control };

std::string to_string(MapKind kind);

/// Coordinate range of a map's phase space. All four systems live on a
/// circle: lsv and doubling on [0,1) with 0 and 1 identified, chmv on
/// [-1,1) with -1 and 1 identified.
struct Domain {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool contains(double x, double slack = 0.0) const {
    return x >= lo - slack && x <= hi + slack;
  }
  /// Circle distance between two points of the domain.
  double distance(double a, double b) const {
    double d = std::abs(a - b);
    return std::min(d, length() - d);
  }
  /// Map x into [lo, hi).
  double wrap(double x) const {
    if (x >= hi) return x - length();
    if (x < lo) return x + length();
    return x;
  }
};

/// An interval dynamical system: branch structure, pointwise evaluation and
/// branch inversion.
///
/// Supported kinds:
///  - lsv(alpha):   x(1 + 2^a x^a) on [0,1/2), 2x-1 on [1/2,1]; neutral fixed
///                  point at 0, invariant density ~ C x^-a near 0.
///  - chmv(gamma):  implicitly defined odd circle map on [-1,1]; the left
///                  branch equation x = (1+T)^g/(2g) inverts in closed form,
///                  the right branch equation x = T + (1-T)^g/(2g) is solved
///                  by safeguarded Newton/bisection. Preserves Lebesgue
///                  measure; neutral fixed point at the identified endpoint.
///  - doubling():   2x mod 1; Lebesgue-invariant calibration baseline.
///  - iid_control(): no dynamics; hit counting draws independent Bernoulli
///                  indicators instead (classical-lemma control process).
class MapSystem {
 public:
  static MapSystem lsv(double alpha);
  static MapSystem chmv(double gamma, double inversion_tol = 1e-13);
  static MapSystem doubling();
  static MapSystem iid_control();

  MapKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double inversion_tol() const { return inversion_tol_; }

  /// One application of T. For iid_control this is the identity.
  double eval(double x) const;

  /// Measure of a ball B(p, r), when the invariant measure is known in
  /// closed form (doubling: Lebesgue probability, measure 2r; chmv:
  /// Lebesgue arc length on the [-1,1] scale, measure 2r). Negative return
  /// means "not available" (lsv, iid_control).
  double exact_ball_measure(double r) const;
  /// Inverse of exact_ball_measure; negative when not available.
  double exact_ball_radius(double mu) const;
  bool has_exact_measure() const { return kind_ == MapKind::doubling || kind_ == MapKind::chmv; }

  // Closed-form branch inverses of the chmv map; branch numbering runs
  // left to right in x. Branches 1 [0,c] and 4 [-1,-c] cover image [-1,0];
  // branches 2 [c,1] and 3 [-c,0] cover image [0,1], where c = 1/(2g).
  double chmv_inv_branch1(double y) const { return half_c_() * pow_gamma(1.0 + y); }
  double chmv_inv_branch2(double y) const { return y + half_c_() * pow_gamma(1.0 - y); }
  double chmv_inv_branch3(double y) const { return -half_c_() * pow_gamma(1.0 - y); }
  double chmv_inv_branch4(double y) const { return y - half_c_() * pow_gamma(1.0 + y); }

  /// y^gamma with a fast path for small integer gamma.
  double pow_gamma(double y) const {
    switch (int_gamma_) {
      case 2: return y * y;
      case 3: return y * y * y;
      case 4: { double s = y * y; return s * s; }
      default: return std::pow(y, gamma_);
    }
  }

 private:
  MapSystem() = default;
  double half_c_() const { return 0.5 / gamma_; }
  double root_gamma_(double y) const {
    switch (int_gamma_) {
      case 2: return std::sqrt(y);
      case 3: return std::cbrt(y);
      default: return std::pow(y, 1.0 / gamma_);
    }
  }
  double eval_chmv_nonneg_(double x) const;

  MapKind kind_ = MapKind::doubling;
  Domain domain_{0.0, 1.0};
  double alpha_ = 0.0;
  double gamma_ = 0.0;
  double inversion_tol_ = 1e-13;
  double two_pow_alpha_ = 0.0;
  int int_gamma_ = 0;  // 0 when gamma is not a small integer
};

/// LSV map evaluation: x(1 + 2^a x^a) on [0,1/2), 2x-1 on [1/2,1].
double eval_lsv(double alpha, double x);

/// chmv map evaluation (see MapSystem::chmv).
double eval_chmv(double gamma, double x, double inversion_tol = 1e-13);

/// Doubling map evaluation, 2x mod 1 on [0,1).
inline double eval_doubling(double x) {
  double y = 2.0 * x;
  return y >= 1.0 ? y - 1.0 : y;
}

/// One step of the i.i.d. control process: 1 with probability p.
inline bool iid_control_step(double p, CounterRng& rng) {
  if (p < 0.0 || p > 1.0) throw ConfigError("iid_control_step: p outside [0,1]");
  return rng.next_unit() < p;
}

/// Backward sequences of the chmv map: a[i] = a_{-i} are the successive
/// preimages of a_0 = -1/(2g) along the outer left branch, b[i] (i>=1) the
/// matching entrance intervals, with a[i] + b[i] = a[i-1] held exactly.
/// tau = 1/(gamma-1) is the polynomial rate exponent.
struct BackwardSequences {
  double gamma = 0.0;
  double tau = 0.0;
  std::vector<double> a;  // size n+1, a[0] = -1/(2 gamma)
  std::vector<double> b;  // size n+1, b[0] unused (0)

  std::uint64_t max_index() const { return a.empty() ? 0 : a.size() - 1; }
  /// Exact tail sum of b beyond index n (telescoping): 1 + a[n].
  double b_tail_beyond(std::uint64_t n) const { return 1.0 + a.at(n); }
};

/// Computes the backward sequences by the explicit recursion
/// a_{i+1} = a_i - (1/(2g)) (1 + a_i)^g, b_{i+1} = a_i - a_{i+1}.
BackwardSequences chmv_backward_sequence(double gamma, std::uint64_t n);

/// Direct preimage of y on the outer left branch (-1, -1/(2g)), obtained by
/// bisecting the forward map. Independent of the recursion above; used to
/// cross-validate it.
double chmv_root_solved_preimage(const MapSystem& chmv, double y);

struct AsymptoticsRow {
  std::uint64_t n = 0;
  double ratio_a = 0.0;  ///< (1+a_n) / [(2 g tau)^tau n^-tau]
  double ratio_b = 0.0;  ///< b_n / [(1/(2g)) (2 g tau)^(g tau) (n-1)^(-g tau)], n >= 2
};

/// Ratios of the computed sequences to their predicted power laws, sampled
/// on a geometric index grid. Both columns should approach 1.
std::vector<AsymptoticsRow> chmv_asymptotics_report(const BackwardSequences& seq);

/// Orbit specification. Deterministic: the same (map, orbit) pair always
/// produces the identical trajectory, regardless of worker scheduling.
struct Orbit {
  std::uint64_t length = 0;
  std::uint64_t seed = 0;
  std::uint64_t seed_index = 0;   ///< orbit index within an ensemble
  std::uint64_t burn_in = 0;      ///< steps discarded before statistics
  std::uint64_t checkpoint_stride = 0;  ///< 0 = geometric checkpoints
  bool random_start = true;       ///< sample x0 from the reference measure
  double x0 = 0.0;                ///< initial point when !random_start
};

/// Streaming orbit iterator.
///
/// Generic (random-start) doubling orbits are represented as a sliding
/// 64-bit window over a seeded i.i.d. bit stream: plain floating-point
/// iteration of 2x mod 1 sheds one mantissa bit per step and reaches the
/// fixed point 0 within 53 steps, which is the orbit of a dyadic rational,
/// not of a typical point. Explicit initial points use plain evaluation for
/// every map (the true orbit of that representable number).
class OrbitStream {
 public:
  OrbitStream(const MapSystem& map, const Orbit& orbit)
      : map_(&map),
        bits_(orbit.seed, Stream::orbit_bits, orbit.seed_index),
        bitstream_(map.kind() == MapKind::doubling && orbit.random_start) {
    CounterRng init(orbit.seed, Stream::orbit_init, orbit.seed_index);
    if (bitstream_) {
      window_ = bits_.next_u64();
      x_ = window_to_point_();
    } else if (orbit.random_start) {
      const Domain& d = map.domain();
      x_ = init.next_in(d.lo, d.hi);
    } else {
      x_ = orbit.x0;
    }
    for (std::uint64_t k = 0; k < orbit.burn_in; ++k) step();
  }

  double current() const { return x_; }

  double step() {
    if (bitstream_) {
      if (reserve_left_ == 0) {
        reserve_ = bits_.next_u64();
        reserve_left_ = 64;
      }
      window_ = (window_ << 1) | (reserve_ >> 63);
      reserve_ <<= 1;
      --reserve_left_;
      x_ = window_to_point_();
      return x_;
    }
    x_ = map_->eval(x_);
    const Domain& d = map_->domain();
    if (!d.contains(x_, 1e-12))
      throw NumericError("orbit escaped the domain", x_);
    x_ = d.wrap(x_);
    return x_;
  }

 private:
  double window_to_point_() const {
    return static_cast<double>(window_ >> 11) * 0x1.0p-53;
  }

  const MapSystem* map_;
  CounterRng bits_;
  double x_ = 0.0;
  bool bitstream_ = false;
  std::uint64_t window_ = 0;
  std::uint64_t reserve_ = 0;
  int reserve_left_ = 0;
};

/// Applies the map orbit.length times. The visitor is called with
/// (step index, point) for every index 0..length, where index 0 is the
/// starting point (after burn-in) and step k holds T^k of it. Returns the
/// final point.
template <class Visitor>
double iterate(const MapSystem& map, const Orbit& orbit, Visitor&& visit) {
  OrbitStream stream(map, orbit);
  visit(std::uint64_t{0}, stream.current());
  for (std::uint64_t k = 1; k <= orbit.length; ++k) {
    visit(k, stream.step());
  }
  return stream.current();
}

inline double iterate(const MapSystem& map, const Orbit& orbit) {
  return iterate(map, orbit, [](std::uint64_t, double) {});
}

}  // namespace bclab
