// Copyright 2026 The membrane authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "membrane/disk_oracle.hpp"
#include "membrane/rng.hpp"
#include "test_util.hpp"

using namespace membrane;
using oracle::bessel_I;
using oracle::bessel_I_prime_at_1;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * std::numbers::pi;

// published reference values of the modified Bessel functions at 1
constexpr double kI0At1 = 1.2660658777520084;
constexpr double kI1At1 = 0.5651591039924851;
constexpr double kI2At1 = 0.13574766976703830;
}  // namespace

TEST_CASE("bessel series basics") {
  CHECK(bessel_I(0, 0.0) == 1.0);
  CHECK(bessel_I(1, 0.0) == 0.0);
  CHECK(bessel_I(0, 1.0) == doctest::Approx(kI0At1).epsilon(1e-14));
  CHECK(bessel_I(1, 1.0) == doctest::Approx(kI1At1).epsilon(1e-14));
  CHECK(bessel_I(2, 1.0) == doctest::Approx(kI2At1).epsilon(1e-14));
  CHECK(bessel_I_prime_at_1(0) == doctest::Approx(kI1At1).epsilon(1e-14));
  CHECK(bessel_I_prime_at_1(1) ==
        doctest::Approx(0.5 * (kI0At1 + kI2At1)).epsilon(1e-14));
}

TEST_CASE("I_0 satisfies the radial equation u'' + u'/r = u") {
  const double h = 1e-4;
  for (double r : {0.4, 0.9, 1.7}) {
    const double u = bessel_I(0, r);
    const double up = (bessel_I(0, r + h) - bessel_I(0, r - h)) / (2 * h);
    const double upp =
        (bessel_I(0, r + h) - 2 * u + bessel_I(0, r - h)) / (h * h);
    CHECK(upp + up / r == doctest::Approx(u).epsilon(1e-7));
  }
}

TEST_CASE("solve_disk for f = 1: trace and J against quadrature") {
  oracle::FourierLoad load;
  load.a0 = 1.0;
  const oracle::OracleSolution sol = oracle::solve_disk(load);
  CHECK(sol.u0 == doctest::Approx(kI0At1 / kI1At1).epsilon(1e-13));
  CHECK(sol.j_value == doctest::Approx(kTwoPi * kI0At1 / kI1At1).epsilon(1e-13));

  const double j_quad = testutil::integrate_circle(
      [&](double theta) { return load.value(theta) * sol.trace(theta); });
  CHECK(sol.j_value == doctest::Approx(j_quad).epsilon(1e-11));
}

TEST_CASE("solve_disk for f = cos theta against quadrature") {
  oracle::FourierLoad load;
  load.a = {1.0};
  load.b = {0.0};
  const oracle::OracleSolution sol = oracle::solve_disk(load);
  const double expected = kPi * kI1At1 / (0.5 * (kI0At1 + kI2At1));
  CHECK(sol.j_value == doctest::Approx(expected).epsilon(1e-13));
  const double j_quad = testutil::integrate_circle(
      [&](double theta) { return load.value(theta) * sol.trace(theta); });
  CHECK(sol.j_value == doctest::Approx(j_quad).epsilon(1e-11));
}

TEST_CASE("zero load gives zero solution and zero J") {
  const oracle::OracleSolution sol = oracle::solve_disk({});
  CHECK(sol.j_value == 0.0);
  CHECK(sol.u0 == 0.0);
}

TEST_CASE("Parseval consistency for random loads") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    oracle::FourierLoad load;
    load.a0 = rng.uniform(-1.0, 1.0);
    for (int n = 0; n < 32; ++n) {
      load.a.push_back(rng.uniform(-1.0, 1.0) / (n + 1.0));
      load.b.push_back(rng.uniform(-1.0, 1.0) / (n + 1.0));
    }
    const oracle::OracleSolution sol = oracle::solve_disk(load);
    const double j_quad = testutil::integrate_circle(
        [&](double theta) { return load.value(theta) * sol.trace(theta); });
    CHECK(std::abs(sol.j_value - j_quad) <= 1e-10 * std::max(1.0, sol.j_value));
  }
}

TEST_CASE("mode multipliers strictly decrease up to n = 64") {
  double prev = bessel_I(0, 1.0) / bessel_I_prime_at_1(0);
  for (int n = 1; n <= 64; ++n) {
    const double mult = bessel_I(n, 1.0) / bessel_I_prime_at_1(n);
    CHECK(mult > 0.0);
    CHECK(mult < prev);
    prev = mult;
  }
}

TEST_CASE("arc_fourier closed forms") {
  SUBCASE("full circle") {
    const oracle::FourierLoad load = oracle::arc_fourier(
        arc_region(0.0, kTwoPi, kTwoPi), 8);
    CHECK(load.a0 == doctest::Approx(1.0));
    for (int n = 0; n < 8; ++n) {
      CHECK(load.a[n] == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(load.b[n] == doctest::Approx(0.0).epsilon(1e-14));
    }
  }
  SUBCASE("empty region") {
    const oracle::FourierLoad load =
        oracle::arc_fourier(arc_region(0.0, 0.0, kTwoPi), 8);
    CHECK(load.a0 == 0.0);
  }
  SUBCASE("arc of length pi centered at 0, against quadrature") {
    const BoundaryRegion region = arc_region(0.0, kPi, kTwoPi);
    const oracle::FourierLoad load = oracle::arc_fourier(region, 16);
    CHECK(load.a0 == doctest::Approx(0.5).epsilon(1e-14));
    for (int n = 1; n <= 16; ++n) {
      CHECK(load.a[n - 1] ==
            doctest::Approx(2.0 * std::sin(n * kPi / 2) / (n * kPi)).epsilon(1e-13));
      CHECK(load.b[n - 1] == doctest::Approx(0.0).epsilon(1e-13));
      // quadrature extraction of the same coefficients: the indicator makes
      // the integral a sum over the intervals, each integrated exactly
      double a_quad = 0.0, b_quad = 0.0;
      for (const ArcInterval& iv : region.intervals()) {
        a_quad += testutil::integrate(
                      [&](double t) { return std::cos(n * t); }, iv.s_begin,
                      iv.s_end) / kPi;
        b_quad += testutil::integrate(
                      [&](double t) { return std::sin(n * t); }, iv.s_begin,
                      iv.s_end) / kPi;
      }
      CHECK(load.a[n - 1] == doctest::Approx(a_quad).epsilon(1e-12));
      CHECK(load.b[n - 1] == doctest::Approx(b_quad).epsilon(1e-12));
    }
  }
}

TEST_CASE("best_arc_search prefers the single arc") {
  const oracle::ArcSearchResult result = oracle::best_arc_search(kPi, 40, 11);
  CHECK(result.best_index == 0);
  for (std::size_t k = 1; k < result.table.size(); ++k)
    CHECK(result.table[0].j_value > result.table[k].j_value);

  // explicit two-arc comparison: two pi/2 arcs diametrically opposite
  const std::pair<double, double> ivs[] = {{-kPi / 4, kPi / 4},
                                           {3 * kPi / 4, 5 * kPi / 4}};
  const double j_split =
      oracle::indicator_J(BoundaryRegion::from_intervals(kTwoPi, ivs));
  CHECK(result.table[0].j_value > j_split);
}

TEST_CASE("single-arc J is rotation invariant") {
  const double j0 = oracle::indicator_J(arc_region(0.0, 1.0, kTwoPi));
  for (double c : {0.7, 2.9, 5.5}) {
    const double jc = oracle::indicator_J(arc_region(c, 1.0, kTwoPi));
    CHECK(jc == doctest::Approx(j0).epsilon(1e-12));
  }
}

TEST_CASE("two-arc J converges to the single-arc J as the split vanishes") {
  const double a_total = kPi / 2;
  const double j_single = oracle::indicator_J(arc_region(0.0, a_total, kTwoPi));
  double prev_gap = 1e300;
  for (double frac : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
    const double len2 = frac * a_total;
    const double len1 = a_total - len2;
    const std::pair<double, double> ivs[] = {
        {0.0, len1}, {kPi, kPi + len2}};
    const double j_two =
        oracle::indicator_J(BoundaryRegion::from_intervals(kTwoPi, ivs));
    const double gap = std::abs(j_single - j_two);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.05 * j_single);
}
