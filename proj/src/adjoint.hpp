// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "field.hpp"
#include "geodesic.hpp"
#include "transform.hpp"

namespace geotomo {

/// Jacobian substitute in the theta sum.
enum class WeightMode {
  Euclidean,  // 1 / sqrt(1 - <y, theta_perp>^2), clamped near |s| = 1
  Unit,       // 1
};

/// Which neighbouring rays are visited while bracketing y.
enum class BracketMode {
  /// Step the source index and shift the tangent index so that the launch
  /// angle stays fixed; for N_x = N_xi this is the exact parallel-beam family.
  ParallelFamily,
  /// Step the source index with the tangent index held fixed.
  FixedTangent,
};

struct BackprojectionConfig {
  int directions = 60;  // N_theta
  WeightMode weight = WeightMode::Euclidean;
  BracketMode bracket = BracketMode::ParallelFamily;
  /// Interpolate towards zero when no bracketing geodesic exists; otherwise
  /// the nearest geodesic's value is used as is.
  bool fade_to_zero = true;
  /// Lower bound on 1 - s^2 inside the weight. 0 selects sin^2(pi / N_theta),
  /// the offset resolution of the direction sum.
  double weight_floor = 1e-6;

  double resolved_weight_floor() const noexcept;
};

/// Weight substitute 1 / sqrt(1 - s^2) with 1 - s^2 bounded below by `floor`.
double clamped_projection_weight(double s, double floor = 1e-6) noexcept;

/// Distance from y to the polyline through the trace samples.
double point_trace_distance(const GeodesicTrace& trace, Vec2 y) noexcept;

/// Fraction of the stored traces whose polyline comes within `radius` of
/// `center`; 0 for an empty set.
double fraction_of_traces_near(const GeodesicSet& geodesics, Vec2 center, double radius) noexcept;

/// Signed offset tau with trace(t) = y + tau * theta_perp, located on the
/// Hermite interpolant of the trace. Among several crossings the one with the
/// smallest |tau| is returned; nullopt if the trace never meets the line.
std::optional<double> trace_line_offset(const GeodesicTrace& trace, Vec2 y,
                                        Vec2 theta_perp) noexcept;

struct NearestTrace {
  int j = 0;  // 1-based tangent index
  double distance = 0.0;
};

/// Tangent index of the trace from source i (1-based) closest to y; ties go
/// to the smaller j. Throws Error(NoValidTrace) if source i has no trace.
NearestTrace nearest_tangent_index(const GeodesicSet& geodesics, int source, Vec2 y);

/// Approximate adjoint R_a^* omega at a single point y of the unit disk.
double backproject(const Sinogram& omega, const GeodesicSet& geodesics, Vec2 y,
                   const BackprojectionConfig& cfg);

/// Backprojection at every grid node inside the closed unit disk; nodes
/// outside are 0. Returned as an unconstrained field on `grid`.
ScalarField backproject_nodes(const Sinogram& omega, const GeodesicSet& geodesics,
                              const GridSpec& grid, const BackprojectionConfig& cfg,
                              int workers = 0);

struct AdjointTestReport {
  double ray_pairing = 0.0;   // <R f, omega> with the ray measure
  double node_pairing = 0.0;  // <f, R^* omega> with the node measure h^2
  double norm_rf = 0.0;
  double norm_omega = 0.0;
  double discrepancy = 0.0;   // |ray - node| / (||Rf|| ||omega||), 0 if omega == 0
};

struct AdjointTestSetup {
  int sources = 60;
  int ray_directions = 60;
  BackprojectionConfig backprojection;
  IntegratorControl integrator;
  std::uint64_t seed = 1;
  bool zero_omega = false;
  /// f is supported on nodes with |y| <= support_radius.
  double support_radius = 0.8;
};

/// Dot-product test of the discrete pair (R_a, R_a^*) for the geodesics of
/// `n`: f uniform [0, 1) on nodes within support_radius (0 elsewhere), omega uniform [0, 1) on
/// valid rays, both drawn from SplitMix64(seed).
AdjointTestReport adjoint_dot_test(const ScalarField& n, const AdjointTestSetup& setup,
                                   int workers = 0);

}  // namespace geotomo
