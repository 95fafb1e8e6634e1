#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bclab/maps.hpp"
#include "bclab/rng.hpp"

using namespace bclab;

namespace {

// Residual of the defining branch equation at the computed image.
double chmv_residual(const MapSystem& map, double x) {
  double ax = std::abs(x);
  double T = map.eval(ax);
  double c = 0.5 / map.gamma();
  double back = ax <= c ? c * map.pow_gamma(1.0 + T) : T + c * map.pow_gamma(1.0 - T);
  return std::abs(back - ax);
}

}  // namespace

TEST_CASE("lsv evaluation") {
  CHECK(eval_lsv(0.5, 0.5) == 0.0);            // right branch at the junction
  CHECK(eval_lsv(0.3, 0.0) == 0.0);            // indifferent fixed point
  CHECK(eval_lsv(0.5, 0.25) ==
        doctest::Approx(0.4267766952966369).epsilon(1e-15));  // 0.25(1 + sqrt(2) sqrt(0.25))
  // right branch coincides with the shifted doubling branch
  for (double x : {0.5, 0.6, 0.75, 0.99, 1.0}) CHECK(eval_lsv(0.7, x) == 2.0 * x - 1.0);
  CHECK_THROWS_AS(eval_lsv(1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(MapSystem::lsv(0.0), ConfigError);
}

TEST_CASE("chmv evaluation") {
  MapSystem map = MapSystem::chmv(3.0);
  CHECK(map.eval(1.0 / 6.0) == doctest::Approx(0.0).epsilon(1e-13));  // branch junction
  CHECK(map.eval(1.0) == 1.0);                                        // endpoint fixed point
  CHECK(map.eval(1.0 / 12.0) ==
        doctest::Approx(std::cbrt(0.5) - 1.0).epsilon(1e-15));  // closed-form left branch
  CHECK_THROWS_AS(MapSystem::chmv(1.0), ConfigError);
}

TEST_CASE("chmv odd symmetry is exact") {
  MapSystem map = MapSystem::chmv(2.5);
  CounterRng rng(5, Stream::orbit_init, 0);
  for (int k = 0; k < 1000; ++k) {
    double x = rng.next_in(0.0, 1.0);
    CHECK(map.eval(-x) == -map.eval(x));
  }
}

TEST_CASE("chmv branch inversion residual stays within tolerance") {
  MapSystem map = MapSystem::chmv(3.0);
  CounterRng rng(6, Stream::orbit_init, 0);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    double x = rng.next_in(-1.0, 1.0);
    worst = std::max(worst, chmv_residual(map, x));
  }
  CHECK(worst <= map.inversion_tol());

  MapSystem frac = MapSystem::chmv(2.7);  // non-integer exponent path
  for (int k = 0; k < 2000; ++k) {
    double x = rng.next_in(-1.0, 1.0);
    CHECK(chmv_residual(frac, x) <= frac.inversion_tol());
  }
}

TEST_CASE("chmv preserves Lebesgue measure (branch-wise preimage lengths)") {
  MapSystem map = MapSystem::chmv(3.0);
  CounterRng rng(7, Stream::orbit_init, 0);
  for (int k = 0; k < 100; ++k) {
    double y1 = rng.next_in(-1.0, 1.0);
    double y2 = rng.next_in(-1.0, 1.0);
    if (y2 < y1) std::swap(y1, y2);
    // branches 1 and 4 invert the [-1,0] part, branches 2 and 3 the [0,1]
    // part; all four branch inverses are increasing
    double lo_neg = std::min(y1, 0.0), hi_neg = std::min(y2, 0.0);
    double lo_pos = std::max(y1, 0.0), hi_pos = std::max(y2, 0.0);
    double total = (map.chmv_inv_branch1(hi_neg) - map.chmv_inv_branch1(lo_neg)) +
                   (map.chmv_inv_branch4(hi_neg) - map.chmv_inv_branch4(lo_neg)) +
                   (map.chmv_inv_branch2(hi_pos) - map.chmv_inv_branch2(lo_pos)) +
                   (map.chmv_inv_branch3(hi_pos) - map.chmv_inv_branch3(lo_pos));
    CHECK(total == doctest::Approx(y2 - y1).epsilon(1e-12));
  }
}

TEST_CASE("doubling evaluation") {
  CHECK(eval_doubling(0.0) == 0.0);
  CHECK(eval_doubling(0.75) == 0.5);
  CHECK(eval_doubling(1.0 / 3.0) == 2.0 / 3.0);
}

TEST_CASE("iterate: explicit starting points") {
  Orbit orbit;
  orbit.random_start = false;

  orbit.x0 = 0.1;
  orbit.length = 3;
  CHECK(iterate(MapSystem::doubling(), orbit) == 0.8);  // 0.2, 0.4, 0.8

  orbit.length = 0;
  CHECK(iterate(MapSystem::doubling(), orbit) == 0.1);

  orbit.x0 = 0.25;
  orbit.length = 1;
  CHECK(iterate(MapSystem::lsv(0.5), orbit) ==
        doctest::Approx(0.4267766952966369).epsilon(1e-15));

  // visitor sees (index, point) for indices 0..length
  std::vector<double> pts;
  orbit.x0 = 0.1;
  orbit.length = 3;
  iterate(MapSystem::doubling(), orbit, [&](std::uint64_t k, double x) {
    CHECK(k == pts.size());
    pts.push_back(x);
  });
  CHECK(pts.size() == 4);
  CHECK(pts[0] == 0.1);
  CHECK(pts[3] == 0.8);
}

TEST_CASE("generic doubling orbits never collapse to the fixed point") {
  Orbit orbit;
  orbit.seed = 99;
  orbit.length = 10000;
  MapSystem map = MapSystem::doubling();
  OrbitStream a(map, orbit), b(map, orbit);
  int zeros = 0;
  for (int k = 0; k < 10000; ++k) {
    double xa = a.step();
    CHECK(xa == b.step());  // deterministic in the seed
    CHECK(xa >= 0.0);
    CHECK(xa < 1.0);
    if (xa == 0.0) ++zeros;
  }
  CHECK(zeros == 0);  // plain FP iteration would be stuck at 0 after 53 steps

  Orbit other = orbit;
  other.seed = 100;
  OrbitStream c(map, other);
  int same = 0;
  for (int k = 0; k < 100; ++k)
    if (a.step() == c.step()) ++same;
  CHECK(same == 0);
}

TEST_CASE("iid control step") {
  CounterRng rng(11, Stream::iid_hits, 0);
  for (int k = 0; k < 100; ++k) {
    CHECK_FALSE(iid_control_step(0.0, rng));
    CHECK(iid_control_step(1.0, rng));
  }
  int hits = 0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) hits += iid_control_step(0.5, rng) ? 1 : 0;
  double frac = static_cast<double>(hits) / n;
  CHECK(std::abs(frac - 0.5) < 3.0 * std::sqrt(0.25 / n));  // 0.5 +- 0.0015 at 3 sigma
  CHECK_THROWS_AS(iid_control_step(1.5, rng), ConfigError);
}

TEST_CASE("backward sequences: exact values and identities") {
  BackwardSequences seq = chmv_backward_sequence(3.0, 1000);
  CHECK(seq.tau == 0.5);
  CHECK(seq.a[0] == doctest::Approx(-1.0 / 6.0).epsilon(1e-16));
  CHECK(seq.a[1] == doctest::Approx(-341.0 / 1296.0).epsilon(1e-15));
  CHECK(seq.b[1] == doctest::Approx(125.0 / 1296.0).epsilon(1e-15));

  for (std::size_t i = 1; i <= 1000; ++i) {
    CHECK(seq.a[i] + seq.b[i] == seq.a[i - 1]);  // exact, not approximate
    CHECK(seq.a[i] < seq.a[i - 1]);
    if (i >= 2) CHECK(seq.b[i] < seq.b[i - 1]);
    CHECK(seq.a[i] > -1.0);
    CHECK(seq.b[i] > 0.0);
  }

  // forward map sends b_i back to a_{i-1}
  MapSystem map = MapSystem::chmv(3.0);
  for (std::size_t i = 1; i <= 100; ++i) {
    CHECK(map.eval(seq.b[i]) == doctest::Approx(seq.a[i - 1]).epsilon(1e-11));
  }
}

TEST_CASE("backward recursion agrees with root-solved preimages") {
  MapSystem map = MapSystem::chmv(3.0);
  BackwardSequences seq = chmv_backward_sequence(3.0, 100);
  for (std::size_t i = 0; i < 100; ++i) {
    double direct = chmv_root_solved_preimage(map, seq.a[i]);
    CHECK(std::abs(direct - seq.a[i + 1]) < 1e-10);
  }
}

TEST_CASE("backward sequence tails: divergent a-part, convergent b-part") {
  BackwardSequences seq = chmv_backward_sequence(3.0, 100000);
  // telescoping: sum of b beyond N equals 1 + a_N exactly
  double partial = 0.0;
  for (std::size_t i = 20001; i <= 100000; ++i) partial += seq.b[i];
  CHECK(partial == doctest::Approx(seq.a[20000] - seq.a[100000]).epsilon(1e-12));
  CHECK(seq.b_tail_beyond(100000) < seq.b_tail_beyond(20000));
  CHECK(seq.b_tail_beyond(100000) == 1.0 + seq.a[100000]);

  // the n^{-1/2} law: (1 + a_{4n}) / (1 + a_n) -> 1/2
  double ratio = (1.0 + seq.a[100000]) / (1.0 + seq.a[25000]);
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.02));

  // partial sums of (1 + a_n) keep growing
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 1; i <= 10000; ++i) s1 += 1.0 + seq.a[i];
  s2 = s1;
  for (std::size_t i = 10001; i <= 100000; ++i) s2 += 1.0 + seq.a[i];
  CHECK(s2 > 2.5 * s1);
}

TEST_CASE("asymptotic ratios approach 1") {
  BackwardSequences seq = chmv_backward_sequence(3.0, 10000);
  auto rows = chmv_asymptotics_report(seq);
  CHECK(rows.size() >= 10);
  // predicted leading constant (2 gamma tau)^tau = sqrt(3)
  CHECK(std::pow(2.0 * 3.0 * 0.5, 0.5) == doctest::Approx(std::sqrt(3.0)));
  const AsymptoticsRow& last = rows.back();
  CHECK(last.n == 10000);
  CHECK(last.ratio_a == doctest::Approx(1.0).epsilon(0.05));
  CHECK(last.ratio_b == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(chmv_asymptotics_report(chmv_backward_sequence(3.0, 5)), ConfigError);
}
