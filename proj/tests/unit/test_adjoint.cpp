// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "adjoint.hpp"
#include "error.hpp"
#include "phantom.hpp"
#include "rng.hpp"

using namespace geotomo;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec2 unit(double a) { return {std::cos(a), std::sin(a)}; }

ScalarField flat(int q = 10) { return ScalarField::constant(GridSpec(q), 1.0); }
ScalarField peaks_index(int q = 10) { return Phantom(PhantomParams::peaks()).sample_index(GridSpec(q)); }

ForwardResult trace_all(const ScalarField& n, int nx, int nxi) {
  return forward_nonlinear(n, std::make_shared<const RaySet>(nx, nxi), IntegratorControl{});
}

Sinogram constant_omega(const GeodesicSet& g, double value) {
  Sinogram s = Sinogram::zeros(g.rays, SinogramKind::Predicted);
  for (std::size_t k = 0; k < s.size(); ++k)
    if (g.traces[k]) {
      s.valid[k] = 1;
      s.tof[k] = value;
    }
  return s;
}

// Dense resampling of the Hermite interpolant at parameter step 1e-4 per
// segment; crossings of the line through y are located by linear
// interpolation between resampled points.
std::optional<double> dense_line_offset(const GeodesicTrace& t, Vec2 y, Vec2 theta_perp) {
  const Vec2 normal = perp(theta_perp);
  std::optional<double> best;
  for (std::size_t k = 1; k < t.samples.size(); ++k) {
    Vec2 prev = t.samples[k - 1].state.x;
    for (int q = 1; q <= 10000; ++q) {
      const Vec2 cur = hermite_position(t.samples[k - 1], t.samples[k], q / 10000.0);
      const double a = dot(prev - y, normal), b = dot(cur - y, normal);
      if ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0)) {
        const double w = a == b ? 0.0 : a / (a - b);
        const double tau = dot(prev + w * (cur - prev) - y, theta_perp);
        if (!best || std::abs(tau) < std::abs(*best)) best = tau;
      }
      prev = cur;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("line offset on straight traces") {
  const GeodesicTrace d = integrate(flat(), {0.0, 1.0}, {0.0, -1.0}, IntegratorControl{});
  const auto on = trace_line_offset(d, {0.0, 0.3}, {1.0, 0.0});
  REQUIRE(on);
  CHECK(std::abs(*on) < 1e-14);
  const auto off = trace_line_offset(d, {0.1, 0.3}, {1.0, 0.0});
  REQUIRE(off);
  CHECK(*off == doctest::Approx(-0.1).epsilon(1e-12));
  const auto slanted = trace_line_offset(d, Vec2{0.0, 0.2} + 0.1 * unit(0.3), unit(0.3));
  REQUIRE(slanted);
  CHECK(*slanted == doctest::Approx(-0.1).epsilon(1e-9));
  CHECK_FALSE(trace_line_offset(d, {0.1, 0.0}, {0.0, 1.0}));
}

TEST_CASE("line offset on curved traces matches dense resampling") {
  const ScalarField n = Phantom(PhantomParams::constant_curvature()).sample_index(GridSpec(10));
  SplitMix64 rng(31);
  int compared = 0;
  for (int k = 0; k < 60; ++k) {
    const double a = rng.uniform(0, kTwoPi);
    const GeodesicTrace t = integrate(n, unit(a), unit(a + std::numbers::pi + rng.uniform(-1.2, 1.2)), IntegratorControl{});
    const Vec2 y{rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)};
    const Vec2 theta_perp = unit(rng.uniform(0, kTwoPi));
    const auto fast = trace_line_offset(t, y, theta_perp);
    const auto slow = dense_line_offset(t, y, theta_perp);
    CHECK(fast.has_value() == slow.has_value());
    if (fast && slow) {
      CHECK(*fast == doctest::Approx(*slow).epsilon(1e-7).scale(1.0));
      ++compared;
    }
  }
  CHECK(compared > 20);
}

TEST_CASE("nearest tangent index") {
  const ForwardResult fwd = trace_all(flat(), 16, 16);
  const GeodesicSet& g = fwd.geodesics;
  const RaySet& rays = *g.rays;
  SUBCASE("point on a stored chord") {
    for (int j = 1; j <= 16; ++j) {
      const auto& t = g.traces[rays.index(3, j)];
      if (!t) continue;
      const NearestTrace hit = nearest_tangent_index(g, 3, t->samples[t->samples.size() / 2].state.x);
      CHECK(hit.j == j);
      CHECK(hit.distance < 1e-15);
    }
  }
  SUBCASE("ties go to the smaller index") {
    GeodesicSet twins = g;
    const std::size_t a = rays.index(2, 11), b = rays.index(2, 12);
    REQUIRE(twins.traces[a]);
    twins.traces[b] = twins.traces[a];
    for (int j = 1; j <= 16; ++j)
      if (j != 11 && j != 12) twins.traces[rays.index(2, j)].reset();
    CHECK(nearest_tangent_index(twins, 2, {0.1, -0.2}).j == 11);
  }
  SUBCASE("agrees with an exhaustive distance scan") {
    const ForwardResult curved = trace_all(peaks_index(), 16, 16);
    SplitMix64 rng(33);
    for (int k = 0; k < 60; ++k) {
      const Vec2 y{rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)};
      const int i = 1 + static_cast<int>(rng.uniform(0, 16));
      double best = std::numeric_limits<double>::infinity(), second = best;
      int best_j = 0;
      for (int j = 1; j <= 16; ++j) {
        const auto& t = curved.geodesics.traces[rays.index(i, j)];
        if (!t) continue;
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t s = 1; s < t->samples.size(); ++s) {
          const Vec2 p = t->samples[s - 1].state.x, q = t->samples[s].state.x;
          for (int m = 0; m <= 200; ++m) d = std::min(d, norm(y - (p + (m / 200.0) * (q - p))));
        }
        if (d < best) {
          second = best;
          best = d;
          best_j = j;
        } else {
          second = std::min(second, d);
        }
      }
      const NearestTrace hit = nearest_tangent_index(curved.geodesics, i, y);
      CHECK(hit.distance <= best + 1e-12);
      if (second - best > 1e-3) CHECK(hit.j == best_j);
    }
  }
  SUBCASE("source without traces") {
    GeodesicSet empty = g;
    for (int j = 1; j <= 16; ++j) empty.traces[rays.index(5, j)].reset();
    try {
      nearest_tangent_index(empty, 5, {0.0, 0.0});
      FAIL("expected NoValidTrace");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoValidTrace);
    }
  }
}

TEST_CASE("backprojection closed forms") {
  for (int nt : {60, 90, 120}) {
    const ForwardResult fwd = trace_all(flat(), nt, nt);
    BackprojectionConfig cfg;
    cfg.directions = nt;
    CHECK(std::abs(backproject(constant_omega(fwd.geodesics, 1.0), fwd.geodesics, {0.0, 0.0}, cfg) - kTwoPi) < 1e-3);
    const Sinogram zero = constant_omega(fwd.geodesics, 0.0);
    SplitMix64 rng(nt);
    for (int k = 0; k < 20; ++k)
      CHECK(backproject(zero, fwd.geodesics, {rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)}, cfg) == 0.0);
  }
}

TEST_CASE("backprojection of a constant is bounded by the unit-weight sum") {
  const ForwardResult fwd = trace_all(flat(), 40, 40);
  BackprojectionConfig cfg;
  cfg.directions = 40;
  cfg.weight = WeightMode::Unit;
  const Sinogram one = constant_omega(fwd.geodesics, 1.0);
  SplitMix64 rng(41);
  for (int k = 0; k < 20; ++k) {
    const Vec2 y{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const double v = backproject(one, fwd.geodesics, y, cfg);
    CHECK(v <= kTwoPi + 1e-12);
    CHECK(v > 0.9 * kTwoPi);
  }
}

TEST_CASE("backprojection input checks") {
  const ForwardResult a = trace_all(flat(), 12, 12);
  const ForwardResult b = trace_all(flat(), 12, 16);
  BackprojectionConfig cfg;
  CHECK_THROWS_AS(backproject(constant_omega(b.geodesics, 1.0), a.geodesics, {0, 0}, cfg), Error);
  cfg.directions = 3;
  CHECK_THROWS_AS(backproject(constant_omega(a.geodesics, 1.0), a.geodesics, {0, 0}, cfg), Error);
}

TEST_CASE("weight floor") {
  CHECK(clamped_projection_weight(0.0) == 1.0);
  CHECK(clamped_projection_weight(0.6) == doctest::Approx(1.25));
  CHECK(clamped_projection_weight(1.0) == doctest::Approx(1000.0));
  CHECK(clamped_projection_weight(1.0, 0.01) == doctest::Approx(10.0));
  BackprojectionConfig cfg;
  CHECK(cfg.resolved_weight_floor() == 1e-6);
  cfg.weight_floor = 0.0;
  cfg.directions = 40;
  CHECK(cfg.resolved_weight_floor() == doctest::Approx(std::pow(std::sin(std::numbers::pi / 40), 2)));
}

TEST_CASE("trace density near a point") {
  const ForwardResult fwd = trace_all(flat(), 20, 20);
  CHECK(fraction_of_traces_near(fwd.geodesics, {0.0, 0.0}, 2.0) == 1.0);
  CHECK(fraction_of_traces_near(fwd.geodesics, {5.0, 5.0}, 0.1) == 0.0);
  const double f = fraction_of_traces_near(fwd.geodesics, {0.0, 0.0}, 0.15);
  CHECK(f > 0.0);
  CHECK(f < 1.0);
  // straight chords: within 0.15 of the origin exactly when |offset| <= 0.15
  std::size_t near = 0, total = 0;
  for (std::size_t k = 0; k < fwd.geodesics.traces.size(); ++k) {
    if (!fwd.geodesics.traces[k]) continue;
    const RayEntry& e = (*fwd.geodesics.rays)[k];
    ++total;
    near += std::abs(cross(e.source, e.direction)) <= 0.15;
  }
  CHECK(f == doctest::Approx(static_cast<double>(near) / total));
}

TEST_CASE("dot-product test") {
  AdjointTestSetup setup;
  setup.zero_omega = true;
  const AdjointTestReport zero = adjoint_dot_test(flat(), setup);
  CHECK(zero.discrepancy == 0.0);
  CHECK(zero.ray_pairing == 0.0);
  CHECK(zero.node_pairing == 0.0);

  setup.zero_omega = false;
  const AdjointTestReport r = adjoint_dot_test(flat(), setup);
  CHECK(r.discrepancy <= 0.05);
  CHECK(r.norm_rf > 0.0);
  CHECK(r.norm_omega > 0.0);
  const AdjointTestReport again = adjoint_dot_test(flat(), setup, 3);
  CHECK(again.ray_pairing == r.ray_pairing);
  CHECK(again.node_pairing == r.node_pairing);
}
