// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "error.hpp"
#include "field.hpp"
#include "field_io.hpp"
#include "rng.hpp"

using namespace geotomo;

namespace {

ScalarField random_field(int q, std::uint64_t seed, double lo = 0.5, double hi = 1.5) {
  GridSpec g(q);
  SplitMix64 rng(seed);
  std::vector<double> v(g.node_count());
  for (auto& x : v) x = rng.uniform(lo, hi);
  return ScalarField(g, std::move(v));
}

}  // namespace

TEST_CASE("grid layout and disk membership") {
  GridSpec g(10);
  CHECK(g.step() == doctest::Approx(0.1));
  CHECK(g.node_count() == 441);
  CHECK(g.index(-10, -10) == 0);
  CHECK(g.index(-10, -9) == 1);
  CHECK(g.index(10, 10) == 440);
  for (std::size_t k = 0; k < g.node_count(); ++k) CHECK(g.index(g.node_i(k), g.node_j(k)) == k);
  CHECK_THROWS_AS(GridSpec(0), Error);
}

TEST_CASE("disk census matches a brute-force lattice count") {
  for (int q : {1, 2, 5, 10, 20, 37}) {
    GridSpec g(q);
    std::size_t brute = 0;
    for (int i = -q; i <= q; ++i)
      for (int j = -q; j <= q; ++j)
        if (static_cast<long>(i) * i + static_cast<long>(j) * j <= static_cast<long>(q) * q)
          ++brute;
    CHECK(g.disk_nodes().size() == brute);
  }
  CHECK(GridSpec(10).disk_nodes().size() == 317);
}

TEST_CASE("bilinear evaluation") {
  const ScalarField f = random_field(5, 7);
  const GridSpec& g = f.spec();
  SUBCASE("interpolates node values") {
    for (int i = -5; i <= 5; ++i)
      for (int j = -5; j <= 5; ++j) CHECK(f.eval(g.node(i, j)) == doctest::Approx(f.at(i, j)).epsilon(1e-14));
  }
  SUBCASE("cell center is the corner mean") {
    for (int i = -5; i < 5; ++i)
      for (int j = -5; j < 5; ++j) {
        const double mean = 0.25 * (f.at(i, j) + f.at(i + 1, j) + f.at(i, j + 1) + f.at(i + 1, j + 1));
        CHECK(f.eval(g.node(i, j) + Vec2{0.1, 0.1}) == doctest::Approx(mean).epsilon(1e-14));
      }
  }
  SUBCASE("outside value") {
    CHECK(f.eval({2.0, 2.0}) == 1.0);
    CHECK(f.eval({-1.5, 0.0}) == 1.0);
    CHECK(f.gradient({2.0, 2.0}) == Vec2{0.0, 0.0});
  }
}

TEST_CASE("bilinear gradient") {
  GridSpec g(8);
  SUBCASE("constant field") {
    const ScalarField f = ScalarField::constant(g, 1.7);
    SplitMix64 rng(3);
    for (int k = 0; k < 200; ++k) {
      const Vec2 p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
      CHECK(f.gradient(p) == Vec2{0.0, 0.0});
    }
  }
  SUBCASE("linear field reproduces its slope") {
    std::vector<double> v(g.node_count());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 2.0 + g.node(k).x;
    const ScalarField f(g, std::move(v));
    SplitMix64 rng(4);
    for (int k = 0; k < 200; ++k) {
      const Vec2 p{rng.uniform(-0.99, 0.99), rng.uniform(-0.99, 0.99)};
      const Vec2 d = f.gradient(p);
      CHECK(d.x == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(d.y) < 1e-12);
    }
  }
  SUBCASE("matches central differences inside a cell") {
    const ScalarField f = random_field(8, 11);
    SplitMix64 rng(5);
    const double e = 1e-6;
    for (int k = 0; k < 200; ++k) {
      // stay off cell edges so the difference quotient sees a single cell
      const int i = static_cast<int>(rng.uniform(-8, 8));
      const int j = static_cast<int>(rng.uniform(-8, 8));
      const Vec2 p = g.node(i, j) + Vec2{0.125 * (0.1 + 0.8 * rng.uniform01()), 0.125 * (0.1 + 0.8 * rng.uniform01())};
      const Vec2 d = f.gradient(p);
      CHECK(d.x == doctest::Approx((f.eval(p + Vec2{e, 0}) - f.eval(p - Vec2{e, 0})) / (2 * e)).epsilon(1e-6));
      CHECK(d.y == doctest::Approx((f.eval(p + Vec2{0, e}) - f.eval(p - Vec2{0, e})) / (2 * e)).epsilon(1e-6));
    }
  }
}

TEST_CASE("construction guards") {
  GridSpec g(2);
  std::vector<double> v(g.node_count(), 1.0);
  v[3] = 0.0;
  CHECK_THROWS_AS(ScalarField(g, v), Error);
  try {
    ScalarField bad(g, v);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Positivity);
  }
  CHECK_NOTHROW(ScalarField(g, v, false));
  v[3] = std::nan("");
  try {
    ScalarField bad(g, v, false);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(5, 1.0)), Error);
}

TEST_CASE("reciprocal and hash") {
  const ScalarField f = random_field(4, 9);
  const ScalarField r = f.reciprocal();
  for (std::size_t k = 0; k < f.values().size(); ++k) CHECK(r.values()[k] == 1.0 / f.values()[k]);
  CHECK(f.content_hash() == random_field(4, 9).content_hash());
  CHECK(f.content_hash() != random_field(4, 10).content_hash());
}

TEST_CASE("field CSV round trip is bit exact") {
  const ScalarField f = random_field(6, 21, 1e-3, 1e3);
  std::stringstream ss;
  write_field_csv(f, ss);
  const ScalarField back = read_field_csv(ss);
  CHECK(back.spec() == f.spec());
  for (std::size_t k = 0; k < f.values().size(); ++k) CHECK(back.values()[k] == f.values()[k]);
}

TEST_CASE("field CSV rejects malformed input") {
  auto code_of = [](const std::string& text, bool positive = true) {
    std::istringstream in(text);
    try {
      read_field_csv(in, positive);
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("no error for: " << text);
    return ErrorCode::InvalidArgument;
  };
  std::ostringstream good;
  write_field_csv(ScalarField::constant(GridSpec(1), 1.0), good);
  const std::string text = good.str();

  std::string nonpositive = text;
  nonpositive.replace(nonpositive.rfind(",1\n"), 3, ",0\n");
  CHECK(code_of(nonpositive) == ErrorCode::Positivity);

  std::string missing = text.substr(0, text.rfind("1,1,"));
  CHECK(code_of(missing) == ErrorCode::Format);
  CHECK(code_of("") == ErrorCode::Format);
  CHECK(code_of("0.5,3\n") == ErrorCode::Format);
  CHECK(code_of(text + "2,2,1\n") == ErrorCode::Format);
  CHECK_THROWS_AS(read_field_csv(std::filesystem::path("/nonexistent/field.csv")), Error);
}
