// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "field.hpp"
#include "vec2.hpp"

namespace geotomo {

/// Position, tangent and accumulated time of flight along a characteristic.
struct RayState {
  Vec2 x;
  Vec2 xi;
  double z = 0.0;
};

/// Controls for the adaptive RK4 integrator (step doubling with local
/// extrapolation). The tolerance bounds the step-doubling error per unit of
/// curve parameter, so it also bounds the accumulated error over a ray.
/// Defaults: safety 0.9, initial step 0.025, tolerance 1e-6.
struct IntegratorControl {
  double safety = 0.9;
  double initial_step = 0.025;
  double tolerance = 1e-6;
  std::size_t max_steps = 100000;

  double min_step() const noexcept { return initial_step / 4096.0; }
  double max_step() const noexcept { return 4.0 * initial_step; }
};

struct TraceSample {
  double t = 0.0;
  RayState state;
};

/// Sampled geodesic from a boundary inflow point to its exit point.
struct GeodesicTrace {
  std::vector<TraceSample> samples;  // first = start state, last = exit state
  Vec2 start_point;
  Vec2 start_direction;
  Vec2 exit_point;
  Vec2 exit_tangent;
  double tof = 0.0;
  /// Launch direction was not strictly inward: zero-length ray with tof 0.
  bool degenerate = false;
  /// Steps accepted at the minimum step size although the error estimate
  /// still exceeded the tolerance (kinks of the bilinear gradient).
  std::size_t forced_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Right-hand side of the characteristic system for the conformal metric
/// n^2 |dx|^2:
///   x' = xi,
///   xi'_i = -(2 xi_i <xi, grad n> - d_i n |xi|^2) / n,
///   z' = n |xi|   (metric speed; equals n for a Euclidean unit tangent).
RayState ode_rhs(const ScalarField& n, const RayState& state) noexcept;

/// One classical RK4 step of size h.
RayState rk4_step(const ScalarField& n, const RayState& state, double h) noexcept;

/// Traces the geodesic launched from x0 (|x0| = 1 within 1e-12) with
/// direction xi0 (normalized to Euclidean unit length) until it leaves the
/// closed unit disk. A launch direction with <xi0, x0> >= 0 yields a
/// degenerate trace with tof 0. Throws Error(MaxSteps) if the step budget is
/// exhausted and Error(InvalidArgument) for a start off the circle or xi0 = 0.
GeodesicTrace integrate(const ScalarField& n, Vec2 x0, Vec2 xi0, const IntegratorControl& ctrl);

/// Cubic Hermite interpolation of the position between two consecutive
/// samples, s in [0, 1]. Uses x' = xi at both ends.
Vec2 hermite_position(const TraceSample& a, const TraceSample& b, double s) noexcept;

/// Euclidean phase function: <y, theta_perp>.
double euclidean_phase(Vec2 y, Vec2 theta) noexcept;

struct BoundaryPhasePoint {
  Vec2 x;
  Vec2 xi;
};

/// Euclidean geodesic projection (s theta + sqrt(1 - s^2) theta_perp, theta_perp).
/// Throws Error(OutOfDisk) for |s| >= 1.
BoundaryPhasePoint euclidean_projection(Vec2 theta, double s);

/// Jacobian of the Euclidean projection, 1 / sqrt(1 - s^2). Throws
/// Error(OutOfDisk) for |s| >= 1.
double euclidean_projection_weight(double s);

}  // namespace geotomo
