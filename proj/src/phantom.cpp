// SPDX-License-Identifier: Apache-2.0
#include "phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace geotomo {

PhantomParams PhantomParams::peaks() {
  PhantomParams p;
  p.kind = PhantomKind::Peaks;
  p.bumps = {
      {{1.0 / 5.0, 2.0 / 5.0}, 1.0 / 4.0, 1.0 / 5.0},
      {{-1.0 / 3.0, -1.0 / 3.0}, 1.0 / 5.0, -3.0 / 20.0},
      {{1.0 / 2.0, -1.0 / 2.0}, 1.0 / 6.0, 1.0 / 10.0},
  };
  return p;
}

PhantomParams PhantomParams::constant_curvature(double d, double R) {
  PhantomParams p;
  p.kind = PhantomKind::ConstantCurvature;
  p.curvature_d = d;
  p.curvature_R = R;
  return p;
}

PhantomParams PhantomParams::ring_peaks(double ring_amplitude) {
  PhantomParams p = peaks();
  p.kind = PhantomKind::RingPeaks;
  p.ring_amplitude = ring_amplitude;
  return p;
}

double bump_value(const Bump& bump, BumpProfile profile, Vec2 x) noexcept {
  const double d = norm(x - bump.center);
  const double r = bump.radius;
  if (d >= r) return 0.0;
  if (profile == BumpProfile::Literal) return bump.amplitude * std::exp(-1.0 / (r - d));
  return bump.amplitude * std::exp(1.0 - r * r / (r * r - d * d));
}

double ring_value(double amplitude, double radius, Vec2 center, Vec2 x) noexcept {
  const double d = norm(x - center);
  if (d < 1.0 - 4.0 * radius || d > 1.0 - 2.0 * radius) return 0.0;
  return amplitude * std::cos(std::numbers::pi * d / radius);
}

namespace {

double speed_unchecked(const PhantomParams& p, Vec2 x) {
  if (p.kind == PhantomKind::ConstantCurvature) {
    const double r2 = norm2(x);
    if (r2 > 1.0) return 1.0;
    const double R2 = p.curvature_R * p.curvature_R;
    const double t = R2 + p.curvature_d * p.curvature_d * r2;
    return 1.0 + t * t / (4.0 * R2);
  }
  double c = 1.0;
  for (const Bump& b : p.bumps) c += bump_value(b, p.profile, x);
  if (p.kind == PhantomKind::RingPeaks)
    c += ring_value(p.ring_amplitude, p.ring_radius, p.ring_center, x);
  return c;
}

void validate(const PhantomParams& p) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (p.kind == PhantomKind::ConstantCurvature) {
    if (!(p.curvature_d > 0.0) || !(p.curvature_R > 0.0))
      bad("curvature phantom requires d > 0 and R > 0");
    return;
  }
  double lower_bound = 1.0;
  for (const Bump& b : p.bumps) {
    if (!(b.radius > 0.0)) bad("bump radius must be positive");
    if (!(b.amplitude > -1.0))
      throw Error(ErrorCode::Positivity,
                  "bump amplitude " + std::to_string(b.amplitude) + " must exceed -1");
    if (norm(b.center) + b.radius > 1.0 + 1e-12) bad("bump support must lie inside the unit disk");
    lower_bound += std::min(0.0, b.amplitude);
  }
  if (p.kind == PhantomKind::RingPeaks) {
    if (!(p.ring_radius > 0.0 && p.ring_radius < 0.25)) bad("ring radius must lie in (0, 1/4)");
    lower_bound -= std::abs(p.ring_amplitude);
  }
  if (lower_bound > 0.0) return;
  // Overlapping negative terms may still leave c > 0; check on a dense lattice
  // plus every bump center.
  double min_c = 1.0;
  for (const Bump& b : p.bumps) min_c = std::min(min_c, speed_unchecked(p, b.center));
  constexpr int kSamples = 1000;
  for (int a = -kSamples; a <= kSamples; ++a)
    for (int b = -kSamples; b <= kSamples; ++b) {
      Vec2 x{a / static_cast<double>(kSamples), b / static_cast<double>(kSamples)};
      if (norm2(x) <= 1.0) min_c = std::min(min_c, speed_unchecked(p, x));
    }
  if (!(min_c > 0.0))
    throw Error(ErrorCode::Positivity,
                "phantom sound speed reaches " + std::to_string(min_c) + " <= 0");
}

}  // namespace

Phantom::Phantom(PhantomParams params) : params_(std::move(params)) { validate(params_); }

double Phantom::sound_speed(Vec2 x) const noexcept { return speed_unchecked(params_, x); }

ScalarField Phantom::sample_speed(const GridSpec& grid) const {
  std::vector<double> values(grid.node_count());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = sound_speed(grid.node(k));
  return ScalarField(grid, std::move(values));
}

ScalarField Phantom::sample_index(const GridSpec& grid) const {
  return sample_speed(grid).reciprocal();
}

}  // namespace geotomo
