#include "bclab/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bclab/fit.hpp"

namespace bclab {

Observable Observable::piecewise_linear(std::vector<double> xs, std::vector<double> ys,
                                        Domain domain) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ConfigError("piecewise_linear: need >= 2 matching breakpoints");
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw ConfigError("piecewise_linear: breakpoints must be sorted");
  if (xs.front() < domain.lo || xs.back() >= domain.hi)
    throw ConfigError("piecewise_linear: breakpoints outside the domain");
  Observable o;
  o.xs_ = std::move(xs);
  o.ys_ = std::move(ys);
  o.domain_ = domain;
  return o;
}

Observable Observable::sampled(const std::function<double(double)>& f, std::size_t pieces,
                               Domain domain) {
  if (pieces < 2) throw ConfigError("sampled: need >= 2 pieces");
  std::vector<double> xs(pieces), ys(pieces);
  double h = domain.length() / static_cast<double>(pieces);
  for (std::size_t k = 0; k < pieces; ++k) {
    xs[k] = domain.lo + h * static_cast<double>(k);
    ys[k] = f(xs[k]);
  }
  return piecewise_linear(std::move(xs), std::move(ys), domain);
}

Observable Observable::constant(double value, Domain domain) {
  double mid = domain.lo + 0.5 * domain.length();
  return piecewise_linear({domain.lo, mid}, {value, value}, domain);
}

Observable Observable::linear_combination(double a, const Observable& f, double b,
                                          const Observable& g) {
  std::vector<double> xs;
  xs.reserve(f.xs_.size() + g.xs_.size());
  xs.insert(xs.end(), f.xs_.begin(), f.xs_.end());
  xs.insert(xs.end(), g.xs_.begin(), g.xs_.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> ys(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) ys[k] = a * f(xs[k]) + b * g(xs[k]);
  return piecewise_linear(std::move(xs), std::move(ys), f.domain_);
}

MollifiedObservable Observable::mollified_indicator(Interval set, double slack,
                                                    Domain domain) {
  if (!(slack > 0.0)) throw ConfigError("mollified_indicator: slack must be positive");
  double len = set.length();
  if (len + 2.0 * slack >= domain.length()) {
    return MollifiedObservable{constant(1.0, domain), true};
  }
  std::map<double, double> pts;
  pts[domain.wrap(set.lo - slack)] = 0.0;
  pts[domain.wrap(set.lo)] = 1.0;
  // hi is the excluded endpoint of the half-open set; the ramp starts there
  pts[domain.wrap(set.hi)] = 1.0;
  pts[domain.wrap(set.hi + slack)] = 0.0;
  if (pts.size() != 4)
    throw ConfigError("mollified_indicator: degenerate breakpoints");
  std::vector<double> xs, ys;
  for (const auto& [x, y] : pts) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return MollifiedObservable{piecewise_linear(std::move(xs), std::move(ys), domain), false};
}

double Observable::operator()(double x) const {
  x = domain_.wrap(x);
  double L = domain_.length();
  // Wrapping segment from the last breakpoint through the seam to the first.
  if (x < xs_.front() || x >= xs_.back()) {
    double span = xs_.front() + L - xs_.back();
    double off = x >= xs_.back() ? x - xs_.back() : x + L - xs_.back();
    double t = off / span;
    return ys_.back() + t * (ys_.front() - ys_.back());
  }
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t j = static_cast<std::size_t>(it - xs_.begin());
  double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
  return ys_[j - 1] + t * (ys_[j] - ys_[j - 1]);
}

double Observable::lipschitz_constant() const {
  double L = domain_.length();
  double worst = 0.0;
  for (std::size_t j = 1; j < xs_.size(); ++j) {
    worst = std::max(worst, std::abs(ys_[j] - ys_[j - 1]) / (xs_[j] - xs_[j - 1]));
  }
  double span = xs_.front() + L - xs_.back();
  if (span > 0.0) worst = std::max(worst, std::abs(ys_.front() - ys_.back()) / span);
  return worst;
}

CorrelationCurve estimate_correlation(const MapSystem& map, const Observable& phi,
                                      const Observable& psi, std::vector<int> lags,
                                      std::uint64_t samples, std::size_t replicates,
                                      std::uint64_t seed, std::uint64_t burn_in) {
  if (lags.empty()) throw ConfigError("estimate_correlation: no lags");
  if (replicates < 1) throw ConfigError("estimate_correlation: need >= 1 replicate");
  std::sort(lags.begin(), lags.end());
  int max_lag = lags.back();
  if (max_lag < 0 || static_cast<std::uint64_t>(max_lag) >= samples)
    throw ConfigError("estimate_correlation: lags must lie in [0, samples)");

  CorrelationCurve curve;
  curve.lags = lags;
  curve.replicates = replicates;
  curve.no_error_bars = replicates < 2;

  // A constant observable is uncorrelated with everything by algebra;
  // return the identity rather than its rounded shadow.
  if (phi.is_constant() || psi.is_constant()) {
    curve.estimate.assign(lags.size(), 0.0);
    curve.stderr_.assign(lags.size(), 0.0);
    return curve;
  }

  std::vector<std::vector<double>> per_rep(lags.size());
  std::vector<double> ring(static_cast<std::size_t>(max_lag) + 1, 0.0);

  for (std::size_t rep = 0; rep < replicates; ++rep) {
    Orbit orbit;
    orbit.length = samples - 1;  // positions 0..samples-1
    orbit.seed = seed;
    orbit.seed_index = rep + 1;
    orbit.burn_in = (map.kind() == MapKind::lsv) ? burn_in : 0;
    // Per-lag windowed sums: the means are taken over exactly the indices
    // entering the product sum, so a constant observable gives 0 exactly
    // and the lag-0 estimate is the plain sample covariance.
    std::vector<double> sum_prod(lags.size(), 0.0);
    std::vector<double> sum_phi_w(lags.size(), 0.0);
    std::vector<double> sum_psi_w(lags.size(), 0.0);
    OrbitStream stream(map, orbit);
    double x = stream.current();
    for (std::uint64_t j = 0; j < samples; ++j) {
      if (j > 0) x = stream.step();
      double fx = phi(x);
      double gx = psi(x);
      ring[j % ring.size()] = fx;
      for (std::size_t li = 0; li < lags.size(); ++li) {
        auto m = static_cast<std::uint64_t>(lags[li]);
        if (j >= m) {
          double f_lagged = ring[(j - m) % ring.size()];
          sum_prod[li] += f_lagged * gx;
          sum_phi_w[li] += f_lagged;
          sum_psi_w[li] += gx;
        }
      }
    }
    if (!lags.empty() && lags.front() == 0) {
      double n = static_cast<double>(samples);
      phi.mean_hint = sum_phi_w.front() / n;
      psi.mean_hint = sum_psi_w.front() / n;
    }
    for (std::size_t li = 0; li < lags.size(); ++li) {
      double cnt = static_cast<double>(samples - static_cast<std::uint64_t>(lags[li]));
      per_rep[li].push_back(sum_prod[li] / cnt -
                            (sum_phi_w[li] / cnt) * (sum_psi_w[li] / cnt));
    }
  }

  for (std::size_t li = 0; li < lags.size(); ++li) {
    const auto& v = per_rep[li];
    double mean = 0.0;
    for (double c : v) mean += c;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double c : v) var += (c - mean) * (c - mean);
    double se = v.size() > 1
                    ? std::sqrt(var / (static_cast<double>(v.size() - 1) *
                                       static_cast<double>(v.size())))
                    : 0.0;
    curve.estimate.push_back(mean);
    curve.stderr_.push_back(se);
  }
  return curve;
}

DecayFit fit_decay_rate(const CorrelationCurve& curve, DecayFit::Model model) {
  DecayFit fit;
  fit.model = model;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < curve.lags.size(); ++k) {
    int m = curve.lags[k];
    double c = std::abs(curve.estimate[k]);
    if (m < 1 || c <= 2.0 * curve.stderr_[k] || c <= 0.0) continue;
    xs.push_back(model == DecayFit::Model::poly ? std::log(static_cast<double>(m))
                                                : static_cast<double>(m));
    ys.push_back(std::log(c));
  }
  fit.lags_used = xs.size();
  if (xs.size() < 5) return fit;  // too few significant lags
  LinearFit lf = linear_fit(xs, ys);
  if (model == DecayFit::Model::poly) {
    fit.exponent = -lf.slope;
  } else {
    fit.base = std::exp(lf.slope);
  }
  fit.residual_norm = lf.residual_norm;
  fit.available = true;
  return fit;
}

}  // namespace bclab
