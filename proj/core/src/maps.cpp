#include "bclab/maps.hpp"

#include <algorithm>
#include <cmath>

namespace bclab {

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::lsv: return "lsv";
    case MapKind::chmv: return "chmv";
    case MapKind::doubling: return "doubling";
    case MapKind::iid_control: return "iid_control";
  }
  return "?";
}

MapSystem MapSystem::lsv(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("lsv: alpha must lie in (0,1), got " + std::to_string(alpha));
  MapSystem m;
  m.kind_ = MapKind::lsv;
  m.domain_ = Domain{0.0, 1.0};
  m.alpha_ = alpha;
  m.two_pow_alpha_ = std::exp2(alpha);
  return m;
}

MapSystem MapSystem::chmv(double gamma, double inversion_tol) {
  if (!(gamma > 1.0))
    throw ConfigError("chmv: gamma must exceed 1, got " + std::to_string(gamma));
  if (!(inversion_tol > 0.0)) throw ConfigError("chmv: inversion tolerance must be positive");
  MapSystem m;
  m.kind_ = MapKind::chmv;
  m.domain_ = Domain{-1.0, 1.0};
  m.gamma_ = gamma;
  m.inversion_tol_ = inversion_tol;
  double r = std::round(gamma);
  if (r == gamma && r >= 2.0 && r <= 4.0) m.int_gamma_ = static_cast<int>(r);
  return m;
}

MapSystem MapSystem::doubling() {
  MapSystem m;
  m.kind_ = MapKind::doubling;
  m.domain_ = Domain{0.0, 1.0};
  return m;
}

MapSystem MapSystem::iid_control() {
  MapSystem m;
  m.kind_ = MapKind::iid_control;
  m.domain_ = Domain{0.0, 1.0};
  return m;
}

double eval_lsv(double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("eval_lsv: alpha outside (0,1)");
  if (x < 0.5) return x * (1.0 + std::exp2(alpha) * std::pow(x, alpha));
  return 2.0 * x - 1.0;
}

// Right-branch equation g(T) = T + (1-T)^gamma/(2 gamma) is strictly
// increasing on [0,1] (g' >= 1/2), so a bracketed Newton iteration cannot
// escape and bisection fallback always makes progress.
double MapSystem::eval_chmv_nonneg_(double x) const {
  const double c = half_c_();
  if (x <= c) {
    // closed-form inversion of x = (1+T)^gamma / (2 gamma)
    return root_gamma_(2.0 * gamma_ * x) - 1.0;
  }
  double lo = 0.0, hi = 1.0;
  double t = x - c * pow_gamma(1.0 - x);  // one fixed-point sweep as a first guess
  if (t < lo || t > hi) t = 0.5 * (lo + hi);
  double f = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    f = t + c * pow_gamma(1.0 - t) - x;
    if (std::abs(f) <= inversion_tol_) return t;
    if (f > 0.0) hi = t; else lo = t;
    double fp = 1.0 - 0.5 * pow_gamma(1.0 - t) / (1.0 - t);  // g' = 1 - (1-T)^{g-1}/2
    double tn = (1.0 - t > 0.0 && fp > 0.0) ? t - f / fp : t;
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    t = tn;
  }
  throw NumericError("chmv right-branch inversion did not converge", f);
}

double MapSystem::eval(double x) const {
  switch (kind_) {
    case MapKind::lsv:
      return x < 0.5 ? x * (1.0 + two_pow_alpha_ * std::pow(x, alpha_)) : 2.0 * x - 1.0;
    case MapKind::chmv:
      return x >= 0.0 ? eval_chmv_nonneg_(x) : -eval_chmv_nonneg_(-x);
    case MapKind::doubling:
      return eval_doubling(x);
    case MapKind::iid_control:
      return x;
  }
  return x;
}

double eval_chmv(double gamma, double x, double inversion_tol) {
  return MapSystem::chmv(gamma, inversion_tol).eval(x);
}

double MapSystem::exact_ball_measure(double r) const {
  if (!has_exact_measure()) return -1.0;
  double full = domain_.length();
  return std::min(2.0 * r, full);
}

double MapSystem::exact_ball_radius(double mu) const {
  if (!has_exact_measure()) return -1.0;
  return 0.5 * mu;
}

BackwardSequences chmv_backward_sequence(double gamma, std::uint64_t n) {
  if (!(gamma > 1.0)) throw ConfigError("chmv_backward_sequence: gamma must exceed 1");
  if (n < 1) throw ConfigError("chmv_backward_sequence: need n >= 1");
  MapSystem map = MapSystem::chmv(gamma);
  BackwardSequences seq;
  seq.gamma = gamma;
  seq.tau = 1.0 / (gamma - 1.0);
  seq.a.resize(n + 1);
  seq.b.assign(n + 1, 0.0);
  const double c = 0.5 / gamma;
  seq.a[0] = -c;
  for (std::uint64_t i = 0; i < n; ++i) {
    double prev = seq.a[i];
    double next = prev - c * map.pow_gamma(1.0 + prev);
    // b stored as the exact difference so a[i+1] + b[i+1] == a[i] holds
    // bit-for-bit (Sterbenz: consecutive terms are within a factor of two).
    seq.a[i + 1] = next;
    seq.b[i + 1] = prev - next;
  }
  return seq;
}

double chmv_root_solved_preimage(const MapSystem& chmv, double y) {
  // Bisection of the forward map on the branch (-1, -1/(2g)) -> (-1, 0).
  double lo = -1.0, hi = -0.5 / chmv.gamma();
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) return mid;
    if (chmv.eval(mid) < y) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<AsymptoticsRow> chmv_asymptotics_report(const BackwardSequences& seq) {
  if (seq.max_index() < 10)
    throw ConfigError("chmv_asymptotics_report: need sequence length >= 10");
  const double g = seq.gamma, tau = seq.tau;
  const double lead_a = std::pow(2.0 * g * tau, tau);
  const double lead_b = (0.5 / g) * std::pow(2.0 * g * tau, g * tau);
  std::vector<AsymptoticsRow> rows;
  std::uint64_t n = 2;
  while (n <= seq.max_index()) {
    AsymptoticsRow row;
    row.n = n;
    row.ratio_a = (1.0 + seq.a[n]) / (lead_a * std::pow(static_cast<double>(n), -tau));
    row.ratio_b = seq.b[n] / (lead_b * std::pow(static_cast<double>(n - 1), -g * tau));
    rows.push_back(row);
    std::uint64_t next = n * 2;
    if (next == n) break;
    n = next;
  }
  if (rows.empty() || rows.back().n != seq.max_index()) {
    AsymptoticsRow row;
    std::uint64_t m = seq.max_index();
    row.n = m;
    row.ratio_a = (1.0 + seq.a[m]) / (lead_a * std::pow(static_cast<double>(m), -tau));
    row.ratio_b = seq.b[m] / (lead_b * std::pow(static_cast<double>(m - 1), -g * tau));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bclab
