#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bclab/correlations.hpp"
#include "bclab/rng.hpp"

using namespace bclab;

namespace {
const Domain kUnit{0.0, 1.0};
}

TEST_CASE("mollified indicator: ramp geometry and Lipschitz constant") {
  auto [fn, saturated] = mollify_indicator(Interval{0.2, 0.4}, 0.1, kUnit);
  CHECK_FALSE(saturated);
  CHECK(fn(0.3) == 1.0);
  CHECK(fn(0.45) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fn(0.55) == 0.0);
  CHECK(fn(0.2) == 1.0);
  CHECK(fn(0.15) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fn.lipschitz_constant() == doctest::Approx(10.0).epsilon(1e-12));

  // sandwich: 1_set <= f <= 1_{set + slack collar}
  for (int k = 0; k <= 1000; ++k) {
    double x = k / 1000.0;
    double f = fn(x);
    CHECK(f >= -1e-15);
    CHECK(f <= 1.0 + 1e-15);
    if (x >= 0.2 && x < 0.4) CHECK(f == 1.0);
    if (x < 0.1 || x > 0.5) CHECK(f == 0.0);
  }
}

TEST_CASE("mollified indicator across the circle seam") {
  auto m = mollify_indicator(Interval{0.9, 0.95}, 0.05, kUnit);
  CHECK_FALSE(m.saturated);
  CHECK(m.fn(0.92) == 1.0);
  CHECK(m.fn(0.975) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(m.fn(0.875) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(m.fn(0.2) == 0.0);
  CHECK(m.fn(0.0) == 0.0);
}

TEST_CASE("mollifier saturates when the collar covers the complement") {
  auto m = mollify_indicator(Interval{0.1, 0.9}, 0.2, kUnit);
  CHECK(m.saturated);
  CHECK(m.fn(0.0) == 1.0);
  CHECK(m.fn(0.5) == 1.0);
}

TEST_CASE("sampled observables interpolate the function") {
  Observable pl = Observable::sampled(
      [](double x) { return std::cos(2.0 * std::numbers::pi * x); }, 300, kUnit);
  CHECK(pl(0.25) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(pl(0.0) == 1.0);
  for (int k = 0; k < 300; ++k) {
    double x = (k + 0.5) / 300.0;
    CHECK(std::abs(pl(x) - std::cos(2.0 * std::numbers::pi * x)) < 6e-5);
  }
}

TEST_CASE("correlation estimates: constant observable vanishes exactly") {
  MapSystem map = MapSystem::doubling();
  Observable c = Observable::constant(0.7, kUnit);
  Observable psi = Observable::sampled(
      [](double x) { return std::cos(2.0 * std::numbers::pi * x); }, 64, kUnit);
  CorrelationCurve curve = estimate_correlation(map, c, psi, {0, 1, 2, 5}, 20000, 3, 77);
  for (double est : curve.estimate) CHECK(est == 0.0);
}

TEST_CASE("lag-0 estimate is the sample covariance") {
  MapSystem map = MapSystem::doubling();
  Observable phi = Observable::sampled(
      [](double x) { return std::cos(2.0 * std::numbers::pi * x); }, 64, kUnit);
  Observable psi = Observable::sampled([](double x) { return x * (1.0 - x); }, 64, kUnit);
  const std::uint64_t N = 5000;
  CorrelationCurve curve = estimate_correlation(map, phi, psi, {0}, N, 1, 123);
  CHECK(curve.no_error_bars);

  // replay the replicate orbit and accumulate the covariance directly
  Orbit orbit;
  orbit.length = N - 1;
  orbit.seed = 123;
  orbit.seed_index = 1;
  std::vector<double> a, b;
  iterate(map, orbit, [&](std::uint64_t, double x) {
    a.push_back(phi(x));
    b.push_back(psi(x));
  });
  double ma = 0, mb = 0;
  for (std::uint64_t j = 0; j < N; ++j) {
    ma += a[j];
    mb += b[j];
  }
  ma /= static_cast<double>(N);
  mb /= static_cast<double>(N);
  double cov = 0;
  for (std::uint64_t j = 0; j < N; ++j) cov += a[j] * b[j];
  cov = cov / static_cast<double>(N) - ma * mb;
  CHECK(curve.estimate[0] == doctest::Approx(cov).epsilon(1e-12));
}

TEST_CASE("bilinearity on a shared orbit") {
  MapSystem map = MapSystem::doubling();
  Observable f1 = Observable::sampled(
      [](double x) { return std::cos(2.0 * std::numbers::pi * x); }, 64, kUnit);
  Observable f2 = Observable::sampled([](double x) { return x * (1.0 - x); }, 80, kUnit);
  Observable psi = Observable::sampled(
      [](double x) { return std::sin(2.0 * std::numbers::pi * x); }, 64, kUnit);
  Observable combo = Observable::linear_combination(1.5, f1, -2.0, f2);

  std::vector<int> lags{0, 1, 3};
  auto ca = estimate_correlation(map, combo, psi, lags, 20000, 2, 99);
  auto c1 = estimate_correlation(map, f1, psi, lags, 20000, 2, 99);
  auto c2 = estimate_correlation(map, f2, psi, lags, 20000, 2, 99);
  for (std::size_t k = 0; k < lags.size(); ++k) {
    CHECK(ca.estimate[k] ==
          doctest::Approx(1.5 * c1.estimate[k] - 2.0 * c2.estimate[k]).epsilon(1e-9));
  }
}

TEST_CASE("decay fits recover synthetic rates") {
  CorrelationCurve poly;
  for (int m = 1; m <= 15; ++m) {
    poly.lags.push_back(m);
    poly.estimate.push_back(std::pow(static_cast<double>(m), -2.0));
    poly.stderr_.push_back(1e-9);
  }
  DecayFit pf = fit_decay_rate(poly, DecayFit::Model::poly);
  CHECK(pf.available);
  CHECK(pf.exponent == doctest::Approx(2.0).epsilon(0.005));

  CorrelationCurve expo;
  for (int m = 1; m <= 15; ++m) {
    expo.lags.push_back(m);
    expo.estimate.push_back(std::pow(0.5, m));
    expo.stderr_.push_back(1e-12);
  }
  DecayFit ef = fit_decay_rate(expo, DecayFit::Model::exponential);
  CHECK(ef.available);
  CHECK(ef.base == doctest::Approx(0.5).epsilon(0.005));

  // too few significant lags -> unavailable, flagged
  CorrelationCurve noisy;
  for (int m = 1; m <= 10; ++m) {
    noisy.lags.push_back(m);
    noisy.estimate.push_back(1e-6);
    noisy.stderr_.push_back(1.0);
  }
  CHECK_FALSE(fit_decay_rate(noisy, DecayFit::Model::poly).available);
}

TEST_CASE("chmv correlations decay polynomially (diagnostic)") {
  // The observable hugs the neutral fixed point at the identified endpoint,
  // where the polynomial rate saturates. The early lags sit in a long
  // pre-asymptotic plateau, so the fit uses lags >= 50; the expected
  // exponent is tau = 1/(gamma-1) = 1/2, checked with the wide diagnostic
  // band tau +- 0.5.
  MapSystem map = MapSystem::chmv(3.0);
  Domain dom{-1.0, 1.0};
  auto m = mollify_indicator(Interval{0.7, 1.0}, 0.05, dom);
  std::vector<int> lags{55, 90, 148, 244, 400, 660, 1090, 1800, 3000};
  CorrelationCurve c = estimate_correlation(map, m.fn, m.fn, lags, 4000000, 8, 777);
  DecayFit fit = fit_decay_rate(c, DecayFit::Model::poly);
  REQUIRE(fit.available);
  CHECK(fit.exponent >= 0.0);
  CHECK(fit.exponent <= 1.0);
  CHECK(fit.exponent == doctest::Approx(0.5).epsilon(0.4));
}

TEST_CASE("mollifier mean sits between set measure and collar measure") {
  // under Lebesgue (doubling), E f = |set| + slack exactly (two half ramps)
  MapSystem map = MapSystem::doubling();
  auto m = mollify_indicator(Interval{0.2, 0.4}, 0.05, kUnit);
  estimate_correlation(map, m.fn, m.fn, {0}, 2000000, 4, 55);
  REQUIRE(m.fn.mean_hint.has_value());
  double mean = *m.fn.mean_hint;
  CHECK(mean >= 0.2 - 0.003);
  CHECK(mean <= 0.2 + 0.05 + 0.003);
  CHECK(mean == doctest::Approx(0.25).epsilon(0.02));
}
