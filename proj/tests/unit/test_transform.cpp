// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "phantom.hpp"
#include "transform.hpp"

using namespace geotomo;

namespace {

ScalarField peaks_index(int q = 10) { return Phantom(PhantomParams::peaks()).sample_index(GridSpec(q)); }

double relative_gap(const Sinogram& a, const Sinogram& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a.valid[k]) continue;
    num += (a.tof[k] - b.tof[k]) * (a.tof[k] - b.tof[k]);
    den += a.tof[k] * a.tof[k];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("ray set geometry") {
  const RaySet big(100, 100);
  CHECK(big.size() == 10000);

  const RaySet r(8, 12);
  CHECK(r[0].source.x == 0.0);
  CHECK(r[0].source.y == 1.0);
  CHECK(r[0].direction.x == doctest::Approx(-1.0));
  CHECK(std::abs(r[0].direction.y) < 1e-15);
  CHECK_FALSE(r[0].inward);
  CHECK(r.index(1, 1) == 0);
  CHECK(r.index(9, 1) == r.index(1, 1));
  CHECK(r.index(0, 0) == r.index(8, 12));
  CHECK(r.ray_measure() == doctest::Approx(4 * std::numbers::pi * std::numbers::pi / 96));

  std::size_t inward = 0;
  for (const RayEntry& e : r.entries()) {
    CHECK(norm(e.source) == doctest::Approx(1.0));
    CHECK(norm(e.direction) == doctest::Approx(1.0));
    const double d = dot(e.source, e.direction);
    if (std::abs(d) < 1e-12)
      CHECK_FALSE(e.inward);  // tangent
    else
      CHECK(e.inward == (d < 0.0));
    CHECK(e.source == r[r.index(e.i, 1)].source);
    inward += e.inward;
  }
  CHECK(r.inward_count() == inward);
  CHECK_THROWS_AS(RaySet(3, 10), Error);
}

TEST_CASE("flat field sinogram is the chord length") {
  const ScalarField one = ScalarField::constant(GridSpec(10), 1.0);
  auto rays = std::make_shared<const RaySet>(20, 20);
  const ForwardResult fwd = forward_nonlinear(one, rays, IntegratorControl{});
  CHECK(fwd.geodesics.failed_rays == 0);
  CHECK(fwd.sinogram.valid_count() == fwd.geodesics.trace_count());
  for (std::size_t k = 0; k < rays->size(); ++k) {
    const RayEntry& e = (*rays)[k];
    if (!e.inward) {
      CHECK_FALSE(fwd.sinogram.valid[k]);
      CHECK(fwd.sinogram.tof[k] == 0.0);
      continue;
    }
    const double s = cross(e.source, e.direction);
    CHECK(fwd.sinogram.tof[k] == doctest::Approx(2.0 * std::sqrt(1.0 - s * s)).epsilon(1e-6));
  }
  SUBCASE("reversed rays carry the same time") {
    const int n = 20;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const std::size_t k = rays->index(i, j);
        if (!fwd.sinogram.valid[k]) continue;
        const std::size_t back = rays->index(i + 2 * (j - 1), n / 2 - j + 2);
        REQUIRE(fwd.sinogram.valid[back]);
        CHECK(fwd.sinogram.tof[back] == doctest::Approx(fwd.sinogram.tof[k]).epsilon(1e-9));
      }
  }
}

TEST_CASE("diameter through the negative bump") {
  const ScalarField n = peaks_index(10);
  const double r = std::sqrt(0.5);
  const GeodesicTrace t = integrate(n, {r, r}, {-r, -r}, IntegratorControl{});
  double n_max = 0.0;
  for (int k = 0; k <= 1000; ++k) n_max = std::max(n_max, n.eval(Vec2{r, r} * (1.0 - k / 500.0)));
  CHECK(t.tof < 2.0 * n_max);
  CHECK(std::abs(t.tof - 2.0) > 1e-3);

  // dense quadrature of n along the traced path, resampled at ~1e-4 arc length
  double dense = 0.0;
  for (std::size_t k = 1; k < t.samples.size(); ++k) {
    const TraceSample& a = t.samples[k - 1];
    const TraceSample& b = t.samples[k];
    const int m = std::max(1, static_cast<int>(std::ceil(norm(b.state.x - a.state.x) / 1e-4)));
    Vec2 prev = a.state.x;
    for (int q = 1; q <= m; ++q) {
      const Vec2 cur = hermite_position(a, b, static_cast<double>(q) / m);
      dense += n.eval(0.5 * (prev + cur)) * norm(cur - prev);
      prev = cur;
    }
  }
  CHECK(t.tof == doctest::Approx(dense).epsilon(1e-5));
}

TEST_CASE("linearized operator") {
  const ScalarField n = peaks_index(10);
  auto rays = std::make_shared<const RaySet>(24, 24);
  const ForwardResult fwd = forward_nonlinear(n, rays, IntegratorControl{});

  std::vector<double> zeros(n.spec().node_count(), 0.0);
  const Sinogram z = forward_linearized(ScalarField(n.spec(), zeros, false), fwd.geodesics);
  for (double v : z.tof) CHECK(v == 0.0);

  const Sinogram self = forward_linearized(n, fwd.geodesics);
  for (std::size_t k = 0; k < rays->size(); ++k) {
    CHECK(self.valid[k] == fwd.sinogram.valid[k]);
    if (self.valid[k]) CHECK(std::abs(self.tof[k] - fwd.sinogram.tof[k]) < 1e-6);
  }

  const ScalarField one = ScalarField::constant(n.spec(), 1.0);
  const ForwardResult flat = forward_nonlinear(one, rays, IntegratorControl{});
  const Sinogram chords = forward_linearized(one, flat.geodesics);
  for (std::size_t k = 0; k < rays->size(); ++k) {
    if (!chords.valid[k]) continue;
    const RayEntry& e = (*rays)[k];
    CHECK(chords.tof[k] == doctest::Approx(-2.0 * dot(e.source, e.direction)).epsilon(1e-9));
  }
}

TEST_CASE("results do not depend on the worker count") {
  const ScalarField n = peaks_index(10);
  auto rays = std::make_shared<const RaySet>(16, 16);
  const ForwardResult a = forward_nonlinear(n, rays, IntegratorControl{}, 1);
  const ForwardResult b = forward_nonlinear(n, rays, IntegratorControl{}, 5);
  CHECK(a.sinogram.tof == b.sinogram.tof);
  CHECK(forward_linearized(n, a.geodesics, 1).tof == forward_linearized(n, a.geodesics, 3).tof);
}

TEST_CASE("relative noise") {
  const ScalarField n = peaks_index(10);
  auto rays = std::make_shared<const RaySet>(16, 16);
  const Sinogram clean = forward_nonlinear(n, rays, IntegratorControl{}).sinogram;
  CHECK(add_noise(clean, 0.0, 5).tof == clean.tof);
  const Sinogram noisy = add_noise(clean, 0.1, 5);
  CHECK(relative_gap(clean, noisy) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(add_noise(clean, 0.1, 5).tof == noisy.tof);
  CHECK(add_noise(clean, 0.1, 6).tof != noisy.tof);
  for (std::size_t k = 0; k < clean.size(); ++k)
    if (!clean.valid[k]) CHECK(noisy.tof[k] == 0.0);
  CHECK(noisy.kind == SinogramKind::Noisy);

  Sinogram blank = Sinogram::zeros(rays, SinogramKind::Exact);
  for (std::size_t k = 0; k < blank.size(); ++k) blank.valid[k] = (*rays)[k].inward;
  try {
    add_noise(blank, 0.1, 1);
    FAIL("expected DegenerateScale");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateScale);
  }
  CHECK_THROWS_AS(add_noise(clean, -0.1, 1), Error);
}

TEST_CASE("sinogram CSV") {
  const ScalarField n = peaks_index(10);
  auto rays = std::make_shared<const RaySet>(12, 10);
  const ForwardResult fwd = forward_nonlinear(n, rays, IntegratorControl{});
  std::stringstream ss;
  write_sinogram_csv(fwd.sinogram, ss);
  const std::string text = ss.str();
  CHECK(text.rfind("i,j,x1,x2,xi1,xi2,tof,valid\n", 0) == 0);
  const Sinogram back = read_sinogram_csv(ss);
  CHECK(back.rays->sources() == 12);
  CHECK(back.rays->directions() == 10);
  CHECK(back.tof == fwd.sinogram.tof);
  CHECK(back.valid == fwd.sinogram.valid);

  auto code_of = [](const std::string& t) {
    std::istringstream in(t);
    try {
      read_sinogram_csv(in);
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("accepted malformed sinogram");
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of("") == ErrorCode::Format);
  CHECK(code_of("a,b\n") == ErrorCode::Format);
  const std::size_t second_row = text.find('\n', text.find('\n') + 1) + 1;
  CHECK(code_of(text.substr(0, second_row)) == ErrorCode::Format);
  // first ray is tangential, so it may not be flagged valid or carry a time
  std::string bad = text;
  const std::size_t row = text.find('\n') + 1;
  const std::size_t end = text.find('\n', row);
  std::string line = text.substr(row, end - row);
  bad.replace(row, line.size(), line.substr(0, line.rfind(',')) + ",1");
  CHECK(code_of(bad) == ErrorCode::Format);
  bad = text;
  bad.replace(row, line.size(), line.substr(0, line.rfind(',', line.rfind(',') - 1)) + ",0.5,0");
  CHECK(code_of(bad) == ErrorCode::Format);
}

TEST_CASE("trace CSV") {
  const ScalarField n = peaks_index(10);
  auto rays = std::make_shared<const RaySet>(8, 8);
  const ForwardResult fwd = forward_nonlinear(n, rays, IntegratorControl{});
  std::vector<std::size_t> ids;
  std::size_t rows = 0;
  for (std::size_t k = 0; k < rays->size(); ++k)
    if (fwd.geodesics.traces[k]) {
      ids.push_back(k);
      rows += fwd.geodesics.traces[k]->samples.size();
    }
  std::stringstream ss;
  write_traces_csv(fwd.geodesics, ids, ss);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "ray_id,t,x1,x2,xi1,xi2,z");
  std::size_t count = 0;
  while (std::getline(ss, line)) ++count;
  CHECK(count == rows);
  const std::size_t bad[] = {rays->size()};
  CHECK_THROWS_AS(write_traces_csv(fwd.geodesics, bad, ss), Error);
}
