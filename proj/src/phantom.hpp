// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "field.hpp"
#include "vec2.hpp"

namespace geotomo {

enum class PhantomKind { Peaks, ConstantCurvature, RingPeaks };

/// Radial profile of a compactly supported bump.
///  - Normalized: amplitude * exp(1 - r^2 / (r^2 - d^2)); equals the amplitude
///    at the center and vanishes smoothly at distance r.
///  - Literal: amplitude * exp(-1 / (r - d)); tiny at the center for r < 1.
enum class BumpProfile { Normalized, Literal };

struct Bump {
  Vec2 center;
  double radius = 0.0;
  double amplitude = 0.0;
};

struct PhantomParams {
  PhantomKind kind = PhantomKind::Peaks;
  std::vector<Bump> bumps;
  BumpProfile profile = BumpProfile::Normalized;
  double curvature_d = 1.2;
  double curvature_R = 2.0;
  double ring_radius = 0.1;
  Vec2 ring_center{0.0, 0.0};
  // No reference value exists for the ring amplitude; 0.1 is our default.
  double ring_amplitude = 0.1;

  /// Three bumps at (1/5,2/5), (-1/3,-1/3), (1/2,-1/2) with radii 1/4, 1/5,
  /// 1/6 and amplitudes 1/5, -3/20, 1/10.
  static PhantomParams peaks();
  static PhantomParams constant_curvature(double d = 1.2, double R = 2.0);
  static PhantomParams ring_peaks(double ring_amplitude = 0.1);
};

double bump_value(const Bump& bump, BumpProfile profile, Vec2 x) noexcept;

/// Cosine annulus term: amplitude * cos(pi |x - center| / r) on
/// 1 - 4r <= |x - center| <= 1 - 2r, zero elsewhere.
double ring_value(double amplitude, double radius, Vec2 center, Vec2 x) noexcept;

/// Sound speed phantom c(x); c = 1 outside all supports. Parameters are
/// validated on construction (Error(InvalidArgument) / Error(Positivity)).
class Phantom {
 public:
  explicit Phantom(PhantomParams params);

  const PhantomParams& params() const noexcept { return params_; }

  double sound_speed(Vec2 x) const noexcept;
  double refractive_index(Vec2 x) const noexcept { return 1.0 / sound_speed(x); }

  ScalarField sample_speed(const GridSpec& grid) const;
  ScalarField sample_index(const GridSpec& grid) const;

 private:
  PhantomParams params_;
};

}  // namespace geotomo
