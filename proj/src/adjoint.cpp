// SPDX-License-Identifier: Apache-2.0
#include "adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace geotomo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kExactHit = 1e-9;

double point_segment_distance2(Vec2 p, Vec2 a, Vec2 b) noexcept {
  const Vec2 ab = b - a;
  const double len2 = norm2(ab);
  double u = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return norm2(p - (a + u * ab));
}

}  // namespace

double clamped_projection_weight(double s, double floor) noexcept {
  return 1.0 / std::sqrt(std::max(1.0 - s * s, floor));
}

double BackprojectionConfig::resolved_weight_floor() const noexcept {
  if (weight_floor > 0.0) return weight_floor;
  const double r = std::sin(std::numbers::pi / std::max(directions, 1));
  return r * r;
}

double point_trace_distance(const GeodesicTrace& trace, Vec2 y) noexcept {
  const auto& s = trace.samples;
  if (s.size() == 1) return norm(y - s[0].state.x);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < s.size(); ++k)
    best = std::min(best, point_segment_distance2(y, s[k - 1].state.x, s[k].state.x));
  return std::sqrt(best);
}

double fraction_of_traces_near(const GeodesicSet& geodesics, Vec2 center, double radius) noexcept {
  std::size_t total = 0, near = 0;
  for (const auto& t : geodesics.traces) {
    if (!t) continue;
    ++total;
    if (point_trace_distance(*t, center) <= radius) ++near;
  }
  return total == 0 ? 0.0 : static_cast<double>(near) / static_cast<double>(total);
}

std::optional<double> trace_line_offset(const GeodesicTrace& trace, Vec2 y,
                                        Vec2 theta_perp) noexcept {
  const auto& s = trace.samples;
  const Vec2 normal = perp(theta_perp);
  auto side = [&](Vec2 p) { return dot(p - y, normal); };
  std::optional<double> best;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const TraceSample& a = s[k - 1];
    const TraceSample& b = s[k];
    double ga = side(a.state.x);
    const double gb = side(b.state.x);
    if ((ga > 0.0 && gb > 0.0) || (ga < 0.0 && gb < 0.0)) continue;
    Vec2 hit;
    if (ga == 0.0) {
      hit = a.state.x;
    } else if (gb == 0.0) {
      hit = b.state.x;
    } else {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = side(hermite_position(a, b, mid));
        if ((gm > 0.0) == (ga > 0.0)) {
          lo = mid;
          ga = gm;
        } else {
          hi = mid;
        }
      }
      hit = hermite_position(a, b, 0.5 * (lo + hi));
    }
    const double tau = dot(hit - y, theta_perp);
    if (!best || std::abs(tau) < std::abs(*best)) best = tau;
  }
  return best;
}

NearestTrace nearest_tangent_index(const GeodesicSet& geodesics, int source, Vec2 y) {
  const RaySet& rays = *geodesics.rays;
  NearestTrace best{0, std::numeric_limits<double>::infinity()};
  for (int j = 1; j <= rays.directions(); ++j) {
    const auto& t = geodesics.traces[rays.index(source, j)];
    if (!t) continue;
    const double d = point_trace_distance(*t, y);
    if (d < best.distance) best = {j, d};
  }
  if (best.j == 0)
    throw Error(ErrorCode::NoValidTrace, "source " + std::to_string(source) + " has no trace");
  return best;
}

namespace {

// Contribution w_m for one direction theta.
double direction_value(const Sinogram& omega, const GeodesicSet& geodesics, Vec2 y, Vec2 theta,
                       const BackprojectionConfig& cfg) {
  const RaySet& rays = *geodesics.rays;
  const int nx = rays.sources();
  const int nxi = rays.directions();
  const Vec2 theta_perp = perp(theta);

  // Euclidean inflow point of the line through y with direction theta.
  const double b = dot(y, theta);
  const double disc = std::max(0.0, b * b + 1.0 - norm2(y));
  const Vec2 xe = y - (b + std::sqrt(disc)) * theta;
  double angle = std::atan2(xe.x, xe.y);
  if (angle < 0.0) angle += kTwoPi;
  const int source = static_cast<int>(std::lround(angle / (kTwoPi / nx))) % nx + 1;

  auto value_of = [&](int i, int j) { return omega.tof[rays.index(i, j)]; };

  // y is the source point itself: every trace from it has distance zero, so
  // the trace is chosen by launch direction instead.
  if (norm(y - rays[rays.index(source, 1)].source) < kExactHit) {
    int best_j = 0;
    double best_cos = -2.0;
    for (int j = 1; j <= nxi; ++j) {
      if (!geodesics.traces[rays.index(source, j)]) continue;
      const double c = dot(rays[rays.index(source, j)].direction, theta);
      if (c > best_cos) {
        best_cos = c;
        best_j = j;
      }
    }
    return best_j == 0 ? 0.0 : value_of(source, best_j);
  }

  NearestTrace nearest;
  try {
    nearest = nearest_tangent_index(geodesics, source, y);
  } catch (const Error&) {
    return 0.0;
  }
  if (nearest.distance < kExactHit) return value_of(source, nearest.j);

  const auto tau0 = trace_line_offset(*geodesics.traces[rays.index(source, nearest.j)], y,
                                      theta_perp);
  if (!tau0) return cfg.fade_to_zero ? 0.0 : value_of(source, nearest.j);

  // tau < 0: the geodesic passes on the -theta_perp side of y, so step the
  // source forward; tau > 0: step backward.
  const int step = *tau0 < 0.0 ? 1 : -1;
  const double s_offset = dot(y, theta_perp);
  const double euclid_spacing = (kTwoPi / nx) * std::sqrt(std::max(0.0, 1.0 - s_offset * s_offset));

  double tau_prev = *tau0;
  double w_prev = value_of(source, nearest.j);
  double spacing = euclid_spacing;
  const int max_steps = std::max(1, nx / 2);
  for (int k = 1; k <= max_steps; ++k) {
    const int i = source + step * k;
    int j = nearest.j;
    if (cfg.bracket == BracketMode::ParallelFamily)
      j = nearest.j - static_cast<int>(std::lround(static_cast<double>(step * k) * nxi / nx));
    const auto& t = geodesics.traces[rays.index(i, j)];
    if (!t) break;
    const auto tau = trace_line_offset(*t, y, theta_perp);
    if (!tau) break;
    const double w = value_of(i, j);
    const bool crossed = step > 0 ? *tau >= 0.0 : *tau <= 0.0;
    if (crossed) {
      const double da = std::abs(tau_prev), db = std::abs(*tau);
      if (da + db == 0.0) return w_prev;
      return (w_prev * db + w * da) / (da + db);
    }
    spacing = std::abs(*tau - tau_prev);
    tau_prev = *tau;
    w_prev = w;
  }
  // Unbracketed: interpolate towards a virtual zero-valued neighbour one
  // spacing further along the search direction.
  if (!cfg.fade_to_zero) return w_prev;
  if (!(spacing > 0.0)) return 0.0;
  return w_prev * std::max(0.0, 1.0 - std::abs(tau_prev) / spacing);
}

}  // namespace

double backproject(const Sinogram& omega, const GeodesicSet& geodesics, Vec2 y,
                   const BackprojectionConfig& cfg) {
  if (cfg.directions < 4)
    throw Error(ErrorCode::InvalidArgument, "backprojection needs at least 4 directions");
  if (!geodesics.rays || omega.rays.get() != geodesics.rays.get()) {
    if (!geodesics.rays || !omega.rays || omega.rays->sources() != geodesics.rays->sources() ||
        omega.rays->directions() != geodesics.rays->directions())
      throw Error(ErrorCode::InvalidArgument, "sinogram and geodesics use different ray sets");
  }
  const double floor = cfg.resolved_weight_floor();
  double sum = 0.0;
  for (int m = 1; m <= cfg.directions; ++m) {
    const double phi = kTwoPi * (m - 1) / cfg.directions;
    const Vec2 theta{std::cos(phi), std::sin(phi)};
    const double w = direction_value(omega, geodesics, y, theta, cfg);
    if (w == 0.0) continue;
    const double weight = cfg.weight == WeightMode::Euclidean
                              ? clamped_projection_weight(dot(y, perp(theta)), floor)
                              : 1.0;
    sum += w * weight;
  }
  return kTwoPi / cfg.directions * sum;
}

ScalarField backproject_nodes(const Sinogram& omega, const GeodesicSet& geodesics,
                              const GridSpec& grid, const BackprojectionConfig& cfg,
                              int workers) {
  const auto nodes = grid.disk_nodes();
  std::vector<double> values(grid.node_count(), 0.0);
  parallel_for(nodes.size(), workers, [&](std::size_t k) {
    values[nodes[k]] = backproject(omega, geodesics, grid.node(nodes[k]), cfg);
  });
  return ScalarField(grid, std::move(values), false);
}

AdjointTestReport adjoint_dot_test(const ScalarField& n, const AdjointTestSetup& setup,
                                   int workers) {
  auto rays = std::make_shared<const RaySet>(setup.sources, setup.ray_directions);
  const ForwardResult fwd = forward_nonlinear(n, rays, setup.integrator, workers);
  const GeodesicSet& geodesics = fwd.geodesics;
  const GridSpec& grid = n.spec();

  SplitMix64 rng(setup.seed);
  std::vector<double> f_values(grid.node_count(), 0.0);
  for (std::size_t k = 0; k < f_values.size(); ++k)
    if (norm(grid.node(k)) <= setup.support_radius) f_values[k] = rng.uniform01();
  const ScalarField f(grid, std::move(f_values), false);

  Sinogram omega = Sinogram::zeros(rays, SinogramKind::Predicted);
  for (std::size_t k = 0; k < omega.size(); ++k) {
    if (!geodesics.traces[k]) continue;
    omega.valid[k] = 1;
    omega.tof[k] = setup.zero_omega ? 0.0 : rng.uniform01();
  }

  const Sinogram rf = forward_linearized(f, geodesics, workers);
  const ScalarField bp = backproject_nodes(omega, geodesics, grid, setup.backprojection, workers);

  AdjointTestReport r;
  const double ray_w = rays->ray_measure();
  double ss_rf = 0.0, ss_om = 0.0;
  for (std::size_t k = 0; k < omega.size(); ++k) {
    if (!omega.valid[k]) continue;
    r.ray_pairing += rf.tof[k] * omega.tof[k];
    ss_rf += rf.tof[k] * rf.tof[k];
    ss_om += omega.tof[k] * omega.tof[k];
  }
  r.ray_pairing *= ray_w;
  r.norm_rf = std::sqrt(ray_w * ss_rf);
  r.norm_omega = std::sqrt(ray_w * ss_om);
  const double h2 = grid.step() * grid.step();
  for (std::size_t k : grid.disk_nodes()) r.node_pairing += f.values()[k] * bp.values()[k];
  r.node_pairing *= h2;
  const double scale = r.norm_rf * r.norm_omega;
  r.discrepancy = scale > 0.0 ? std::abs(r.ray_pairing - r.node_pairing) / scale : 0.0;
  return r;
}

}  // namespace geotomo
