// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "phantom.hpp"
#include "rng.hpp"

using namespace geotomo;

TEST_CASE("peaks phantom readings") {
  const Phantom p(PhantomParams::peaks());
  CHECK(p.sound_speed({0.2, 0.4}) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(p.sound_speed({-1.0 / 3, -1.0 / 3}) == doctest::Approx(0.85).epsilon(1e-15));
  CHECK(p.sound_speed({0.5, -0.5}) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(p.refractive_index({0.2, 0.4}) == doctest::Approx(1.0 / 1.2));

  SUBCASE("unit speed off every support") {
    SplitMix64 rng(1);
    int checked = 0;
    while (checked < 500) {
      const Vec2 x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
      bool inside = false;
      for (const Bump& b : p.params().bumps) inside |= norm(x - b.center) < b.radius;
      if (inside) continue;
      CHECK(p.sound_speed(x) == 1.0);
      ++checked;
    }
  }
  SUBCASE("bumps vanish continuously at the support edge") {
    for (const Bump& b : p.params().bumps)
      for (double eps : {1e-3, 1e-5}) {
        const Vec2 x = b.center + Vec2{b.radius - eps, 0.0};
        CHECK(std::abs(p.sound_speed(x) - 1.0) < 1e-20 + std::abs(b.amplitude) * 1e-3);
        CHECK(bump_value(b, BumpProfile::Normalized, b.center + Vec2{0.0, b.radius}) == 0.0);
      }
  }
}

TEST_CASE("literal bump profile is small at the center") {
  const Bump b{{0.2, 0.4}, 0.25, 0.2};
  const double v = bump_value(b, BumpProfile::Literal, b.center);
  CHECK(v == doctest::Approx(0.2 * std::exp(-1.0 / 0.25)));
  CHECK(v < 0.01);
}

TEST_CASE("sampled peaks gradient is flat at a bump center") {
  const Phantom p(PhantomParams::peaks());
  const ScalarField coarse = p.sample_speed(GridSpec(40));
  const ScalarField fine = p.sample_speed(GridSpec(200));
  // offset into the neighbouring cells on both sides to average the one-sided slopes
  auto centered = [](const ScalarField& f, Vec2 c) {
    const double e = 1e-9;
    return 0.5 * (f.gradient(c + Vec2{e, e}) + f.gradient(c - Vec2{e, e}));
  };
  const Vec2 gc = centered(coarse, {0.2, 0.4});
  const Vec2 gf = centered(fine, {0.2, 0.4});
  CHECK(norm(gf) < 1e-3);
  CHECK(norm(gf) <= norm(gc) + 1e-12);
  // away from the center the sampled gradient tracks central differences of c;
  // at a cell center the bilinear slope is itself a central difference
  const Vec2 x{0.3025, 0.4525};
  const double e = 1e-6;
  const Vec2 exact{(p.sound_speed(x + Vec2{e, 0}) - p.sound_speed(x - Vec2{e, 0})) / (2 * e),
                   (p.sound_speed(x + Vec2{0, e}) - p.sound_speed(x - Vec2{0, e})) / (2 * e)};
  CHECK(norm(fine.gradient(x) - exact) < 1e-3 * norm(exact));
}

TEST_CASE("constant curvature phantom") {
  const Phantom p(PhantomParams::constant_curvature(1.2, 2.0));
  CHECK(p.sound_speed({0.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(p.sound_speed({1.0, 0.0}) == doctest::Approx(2.8496).epsilon(1e-12));
  CHECK(p.sound_speed({0.0, -1.0}) == doctest::Approx(2.8496).epsilon(1e-12));
  SplitMix64 rng(2);
  for (int k = 0; k < 100; ++k) {
    const double r = rng.uniform01();
    const double a = rng.uniform(0, 2 * std::numbers::pi);
    CHECK(p.sound_speed({r * std::cos(a), r * std::sin(a)}) ==
          doctest::Approx(p.sound_speed({r, 0.0})).epsilon(1e-13));
  }
}

TEST_CASE("ring term") {
  const Vec2 c{0.0, 0.0};
  CHECK(ring_value(0.3, 0.1, c, {0.7, 0.0}) == doctest::Approx(-0.3).epsilon(1e-14));
  CHECK(ring_value(0.3, 0.1, c, {0.0, 0.65}) == doctest::Approx(0.3 * std::cos(6.5 * std::numbers::pi)).epsilon(1e-12));
  for (double r : {0.0, 0.3, 0.59, 0.81, 0.95}) CHECK(ring_value(0.3, 0.1, c, {r, 0.0}) == 0.0);

  const Phantom ring0(PhantomParams::ring_peaks(0.0));
  const Phantom peaks(PhantomParams::peaks());
  SplitMix64 rng(3);
  for (int k = 0; k < 300; ++k) {
    const Vec2 x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    CHECK(ring0.sound_speed(x) == peaks.sound_speed(x));
  }
  const Phantom ring(PhantomParams::ring_peaks());
  CHECK(ring.sound_speed({0.0, 0.7}) == doctest::Approx(1.0 - ring.params().ring_amplitude));
}

TEST_CASE("phantom parameter validation") {
  auto params = PhantomParams::peaks();
  params.bumps[0].amplitude = -1.5;
  CHECK_THROWS_AS(Phantom{params}, Error);
  params = PhantomParams::peaks();
  params.bumps[0].radius = 5.0;
  CHECK_THROWS_AS(Phantom{params}, Error);
  params = PhantomParams::peaks();
  params.bumps[1].radius = 0.0;
  CHECK_THROWS_AS(Phantom{params}, Error);
  CHECK_THROWS_AS(Phantom{PhantomParams::constant_curvature(1.2, 0.0)}, Error);
}

TEST_CASE("sampled fields") {
  const Phantom p(PhantomParams::peaks());
  const GridSpec g(10);
  const ScalarField c = p.sample_speed(g);
  const ScalarField n = p.sample_index(g);
  CHECK(c.at(2, 4) == doctest::Approx(1.2).epsilon(1e-15));
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    CHECK(c.values()[k] == p.sound_speed(g.node(k)));
    CHECK(n.values()[k] == doctest::Approx(1.0 / c.values()[k]).epsilon(1e-15));
  }
}
