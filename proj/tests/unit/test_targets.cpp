#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "bclab/fit.hpp"
#include "bclab/rng.hpp"
#include "bclab/targets.hpp"

using namespace bclab;

TEST_CASE("schedule measures") {
  CHECK(MeasureSchedule::power(0.5).measure(4) == 0.5);
  CHECK(MeasureSchedule::harmonic().measure(10) == 0.1);
  CHECK(MeasureSchedule::i_log_i().measure(8) ==
        doctest::Approx(0.06011229337037348).epsilon(1e-14));  // 1/(8 ln 8)
  CHECK(MeasureSchedule::log_over_i().measure(3) == doctest::Approx(std::log(3.0) / 3.0));

  CHECK_THROWS_AS(MeasureSchedule::power(0.5).measure(0), IndexError);
  CHECK_THROWS_AS(MeasureSchedule::i_log_i().measure(1), IndexError);
  CHECK_THROWS_AS(MeasureSchedule::power(1.0), ConfigError);
  CHECK_THROWS_AS(MeasureSchedule::log_over_i(2), ConfigError);  // peaks at e

  for (auto s : {MeasureSchedule::power(0.3), MeasureSchedule::log_over_i(),
                 MeasureSchedule::harmonic(), MeasureSchedule::i_log_i()}) {
    double prev = s.measure(s.offset());
    CHECK(prev > 0.0);
    for (std::uint64_t i = s.offset() + 1; i < s.offset() + 500; ++i) {
      double mu = s.measure(i);
      CHECK(mu > 0.0);
      CHECK(mu <= prev);
      prev = mu;
    }
  }
}

TEST_CASE("kim intervals") {
  Interval a = kim_interval(0.5, 16);
  CHECK(a.lo == 0.0);
  CHECK(a.hi == 0.00390625);  // 16^-2 exactly
  CHECK(kim_interval(0.3, 1).hi == 1.0);
  for (std::uint64_t n = 1; n < 200; ++n) {
    CHECK(kim_interval(0.4, n + 1).hi < kim_interval(0.4, n).hi);  // nesting
  }
}

TEST_CASE("chmv intervals") {
  BackwardSequences seq = chmv_backward_sequence(3.0, 100);
  Interval a0 = chmv_interval(seq, 0);
  CHECK(a0.lo == -1.0);
  CHECK(a0.hi == doctest::Approx(-1.0 / 6.0));
  CHECK(1.0 + a0.hi == doctest::Approx(5.0 / 6.0));
  CHECK(1.0 + chmv_interval(seq, 1).hi == doctest::Approx(955.0 / 1296.0).epsilon(1e-14));
  for (std::uint64_t n = 0; n < 100; ++n)
    CHECK(chmv_interval(seq, n + 1).hi < chmv_interval(seq, n).hi);
  CHECK_THROWS_AS(chmv_interval(seq, 101), IndexError);
}

TEST_CASE("calibrated radii on the doubling map match mu/2") {
  MapSystem map = MapSystem::doubling();
  auto radii = calibrate_radii(map, 0.37, MeasureSchedule::power(0.5), 64, 1000000, 11);
  for (std::uint64_t i : {4, 16, 64}) {
    double expect = 0.5 * std::pow(static_cast<double>(i), -0.5);
    CHECK(radii[i - 1] == doctest::Approx(expect).epsilon(0.05));
  }
  CHECK(std::is_sorted(radii.rbegin(), radii.rend()));  // non-increasing
}

TEST_CASE("calibration error when the orbit cannot resolve the smallest ball") {
  MapSystem map = MapSystem::doubling();
  // mu(1000) = 1e-3, orbit of 10000 points -> ~10 points inside
  CHECK_THROWS_AS(
      calibrate_radii(map, 0.37, MeasureSchedule::harmonic(), 1000, 10000, 11),
      CalibrationError);
}

TEST_CASE("full-measure schedule covers the space") {
  MapSystem map = MapSystem::doubling();
  auto schedule = MeasureSchedule::explicit_values({1.0, 1.0, 1.0});
  TargetSchedule t = TargetSchedule::calibrated_ball(map, 0.37, schedule, 3, 100000, 11);
  CounterRng rng(3, Stream::orbit_init, 0);
  for (int k = 0; k < 1000; ++k) CHECK(t.contains(1, rng.next_unit()));
}

TEST_CASE("lsv radii scale like mu^{1/(1-alpha)} at the neutral point") {
  MapSystem map = MapSystem::lsv(0.6);
  auto radii = calibrate_radii(map, 0.0, MeasureSchedule::power(0.5), 4096, 10000000, 12);
  std::vector<double> lmu, lr;
  for (std::uint64_t i = 16; i <= 4096; i *= 4) {
    lmu.push_back(std::log(std::pow(static_cast<double>(i), -0.5)));
    lr.push_back(std::log(radii[i - 1]));
  }
  double slope = linear_fit(lmu, lr).slope;
  CHECK(slope == doctest::Approx(2.5).epsilon(0.10));  // 1/(1-alpha)
}

TEST_CASE("calibrated measures validate against an independent orbit") {
  MapSystem map = MapSystem::doubling();
  const std::uint64_t i_max = 200, L = 1000000;
  auto schedule = MeasureSchedule::harmonic(2);
  TargetSchedule t = TargetSchedule::calibrated_ball(map, 0.618, schedule, i_max, L, 21);

  Orbit validation;
  validation.length = L;
  validation.seed =
      CounterRng::derive_key(21, static_cast<std::uint64_t>(Stream::validation), 0);
  std::vector<double> dists;
  dists.reserve(L);
  iterate(map, validation, [&](std::uint64_t k, double x) {
    if (k > 0) dists.push_back(map.domain().distance(x, 0.618));
  });
  std::sort(dists.begin(), dists.end());

  std::size_t good = 0, total = 0;
  for (std::uint64_t i = 2; i <= i_max; ++i) {
    double mu = schedule.measure(i);
    auto below = std::lower_bound(dists.begin(), dists.end(), t.radius(i)) - dists.begin();
    double mu_hat = static_cast<double>(below) / static_cast<double>(L);
    double se = std::sqrt(mu * (1.0 - mu) / static_cast<double>(L));
    ++total;
    if (std::abs(mu_hat - mu) <= 3.0 * se) ++good;
  }
  CHECK(static_cast<double>(good) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("analytic ball radii and single-pass membership") {
  MapSystem map = MapSystem::doubling();
  TargetSchedule t = TargetSchedule::analytic_ball(map, 0.25, MeasureSchedule::power(0.5));
  CHECK(t.radius(16) == 0.125);  // mu/2
  CHECK(t.nested(5000));
  CounterRng rng(4, Stream::orbit_init, 0);
  for (int k = 0; k < 2000; ++k) {
    std::uint64_t i = 1 + (rng.next_u64() % 100000);
    double x = rng.next_unit();
    bool hit = false;
    double mu = t.measure_and_test(i, x, &hit);
    CHECK(mu == t.measure(i));
    CHECK(hit == t.contains(i, x));
  }
  CHECK_THROWS_AS(TargetSchedule::analytic_ball(MapSystem::lsv(0.5), 0.0,
                                                MeasureSchedule::power(0.5)),
                  ConfigError);
}

TEST_CASE("target schedules serialize and round-trip") {
  MapSystem map = MapSystem::doubling();
  TargetSchedule t =
      TargetSchedule::calibrated_ball(map, 0.37, MeasureSchedule::power(0.5), 64, 1000000, 11);
  TargetSchedule back = TargetSchedule::from_json(t.to_json());
  CounterRng rng(5, Stream::orbit_init, 0);
  for (int k = 0; k < 500; ++k) {
    std::uint64_t i = 1 + (rng.next_u64() % 64);
    double x = rng.next_unit();
    CHECK(back.measure(i) == t.measure(i));
    CHECK(back.contains(i, x) == t.contains(i, x));
  }

  TargetSchedule kim = TargetSchedule::kim_family(0.6, 1.25, 1000);
  TargetSchedule kim_back = TargetSchedule::from_json(kim.to_json());
  CHECK(kim_back.measure(7) == kim.measure(7));
  CHECK(kim_back.contains(9, 0.001) == kim.contains(9, 0.001));

  auto seq = std::make_shared<BackwardSequences>(chmv_backward_sequence(3.0, 50));
  TargetSchedule chmv = TargetSchedule::chmv_family(seq);
  TargetSchedule chmv_back = TargetSchedule::from_json(chmv.to_json());
  CHECK(chmv_back.measure(13) == chmv.measure(13));
  CHECK(chmv.nested(50));

  TargetSchedule b_fam = TargetSchedule::chmv_b_family(seq);
  CHECK(b_fam.measure(1) == doctest::Approx(125.0 / 1296.0));
  CHECK(b_fam.contains(1, 0.05));
  CHECK_FALSE(b_fam.contains(1, -0.05));
  CHECK(b_fam.nested(50));
}

TEST_CASE("annulus estimates") {
  MapSystem map = MapSystem::doubling();
  const std::uint64_t L = 1000000;
  AnnulusEstimate est = annulus_measure_estimate(map, 0.41, 0.1, 0.01, L, 31);
  double se = std::sqrt(0.02 * 0.98 / static_cast<double>(L));
  CHECK(est.measure == doctest::Approx(0.02).epsilon(3.0 * se / 0.02));
  CHECK_FALSE(est.unresolved);

  CHECK(annulus_measure_estimate(map, 0.41, 0.1, 0.0, L, 31).measure == 0.0);

  // circle distance never exceeds 1/2, so this annulus is empty
  AnnulusEstimate empty = annulus_measure_estimate(map, 0.41, 0.5, 0.01, 10000, 31);
  CHECK(empty.measure == 0.0);
  CHECK(empty.unresolved);
}

TEST_CASE("divergent schedules keep growing: E_4n vs E_n") {
  auto partial = [](const MeasureSchedule& s, std::uint64_t n) {
    double e = 0.0;
    for (std::uint64_t i = s.offset(); i <= n; ++i) e += s.measure(i);
    return e;
  };
  const std::uint64_t n = 10000;

  // power: E_n ~ c n^{1-g}, so E_4n / E_n -> 4^{1-g}
  for (double g : {0.3, 0.5, 0.7}) {
    auto s = MeasureSchedule::power(g);
    double ratio = partial(s, 4 * n) / partial(s, n);
    CHECK(ratio >= std::pow(4.0, 1.0 - g) * 0.95);
  }
  // harmonic: E_4n - E_n -> log 4
  auto h = MeasureSchedule::harmonic();
  CHECK(partial(h, 4 * n) - partial(h, n) == doctest::Approx(std::log(4.0)).epsilon(0.01));
  // log_over_i: E_n ~ (log n)^2 / 2
  auto l = MeasureSchedule::log_over_i();
  double lr = partial(l, 4 * n) / partial(l, n);
  double expect = std::pow(std::log(4.0 * n), 2.0) / std::pow(std::log(static_cast<double>(n)), 2.0);
  CHECK(lr == doctest::Approx(expect).epsilon(0.05));
  // i_log_i: E_4n - E_n -> log log 4n - log log n > 0
  auto ill = MeasureSchedule::i_log_i();
  CHECK(partial(ill, 4 * n) - partial(ill, n) > 0.0);
}

TEST_CASE("annulus exponent fit on the doubling map") {
  DeltaFit fit = fit_annulus_delta(MapSystem::doubling(), 0.3183, 1e-3, 1e-2, 6, 1000000, 32);
  CHECK(fit.available);
  CHECK(fit.delta_hat == doctest::Approx(1.0).epsilon(0.05));
}
