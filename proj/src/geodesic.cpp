// SPDX-License-Identifier: Apache-2.0
#include "geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace geotomo {

namespace {

RayState axpy(const RayState& s, double a, const RayState& d) noexcept {
  return {s.x + a * d.x, s.xi + a * d.xi, s.z + a * d.z};
}

double max_abs_diff(const RayState& a, const RayState& b) noexcept {
  return std::max({std::abs(a.x.x - b.x.x), std::abs(a.x.y - b.x.y), std::abs(a.xi.x - b.xi.x),
                   std::abs(a.xi.y - b.xi.y), std::abs(a.z - b.z)});
}

// Hermite basis on [0, 1].
struct Hermite {
  double h00, h10, h01, h11;
  static Hermite at(double s) noexcept {
    const double s2 = s * s, s3 = s2 * s;
    return {2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s, -2 * s3 + 3 * s2, s3 - s2};
  }
  static Hermite derivative_at(double s) noexcept {
    const double s2 = s * s;
    return {6 * s2 - 6 * s, 3 * s2 - 4 * s + 1, -6 * s2 + 6 * s, 3 * s2 - 2 * s};
  }
};

}  // namespace

namespace {

RayState rhs_from(const FieldSample& f, const RayState& state) noexcept {
  const Vec2 xi = state.xi;
  const double xi2 = norm2(xi);
  const double proj = dot(xi, f.gradient);
  const double inv_n = 1.0 / f.value;
  const Vec2 accel{-inv_n * (2.0 * xi.x * proj - f.gradient.x * xi2),
                   -inv_n * (2.0 * xi.y * proj - f.gradient.y * xi2)};
  return {xi, accel, f.value * std::sqrt(xi2)};
}

template <class Rhs>
RayState rk4(Rhs&& rhs, const RayState& s, double h) {
  const RayState k1 = rhs(s);
  const RayState k2 = rhs(axpy(s, 0.5 * h, k1));
  const RayState k3 = rhs(axpy(s, 0.5 * h, k2));
  const RayState k4 = rhs(axpy(s, h, k3));
  return {s.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.xi + (h / 6.0) * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi),
          s.z + (h / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z)};
}

}  // namespace

RayState ode_rhs(const ScalarField& n, const RayState& state) noexcept {
  return rhs_from(n.sample(state.x), state);
}

RayState rk4_step(const ScalarField& n, const RayState& s, double h) noexcept {
  return rk4([&](const RayState& x) { return ode_rhs(n, x); }, s, h);
}

Vec2 hermite_position(const TraceSample& a, const TraceSample& b, double s) noexcept {
  const double dt = b.t - a.t;
  const Hermite w = Hermite::at(s);
  return w.h00 * a.state.x + (w.h10 * dt) * a.state.xi + w.h01 * b.state.x +
         (w.h11 * dt) * b.state.xi;
}

namespace {

// Exit state on the Hermite interpolant between an interior sample `a` and
// the first exterior sample `b`, located by bisection on |x|^2 - 1.
TraceSample locate_exit(const ScalarField& n, const TraceSample& a, const TraceSample& b) {
  auto g = [&](double s) { return norm2(hermite_position(a, b, s)) - 1.0; };
  double lo = 0.0, hi = 1.0;
  double s = 0.5;
  constexpr int kMaxBisections = 60;
  for (int it = 0; it < kMaxBisections; ++it) {
    s = 0.5 * (lo + hi);
    const double gs = g(s);
    if (std::abs(gs) < 1e-14) break;
    if (gs > 0.0) hi = s; else lo = s;
    if ((hi - lo) * (b.t - a.t) < 1e-15) {
      s = 0.5 * (lo + hi);
      break;
    }
  }
  const double dt = b.t - a.t;
  const Hermite w = Hermite::at(s);
  const Hermite dw = Hermite::derivative_at(s);

  TraceSample out;
  out.t = a.t + s * dt;
  out.state.x = hermite_position(a, b, s);
  out.state.xi = (dw.h00 / dt) * a.state.x + dw.h10 * a.state.xi + (dw.h01 / dt) * b.state.x +
                 dw.h11 * b.state.xi;
  const double za = n.eval(a.state.x) * norm(a.state.xi);
  const double zb = n.eval(b.state.x) * norm(b.state.xi);
  out.state.z = w.h00 * a.state.z + w.h10 * dt * za + w.h01 * b.state.z + w.h11 * dt * zb;
  return out;
}

}  // namespace

GeodesicTrace integrate(const ScalarField& n, Vec2 x0, Vec2 xi0, const IntegratorControl& ctrl) {
  if (std::abs(norm(x0) - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "launch point must lie on the unit circle");
  const double xi_len = norm(xi0);
  if (!(xi_len > 0.0) || !std::isfinite(xi_len))
    throw Error(ErrorCode::InvalidArgument, "launch direction must be nonzero");
  if (!(ctrl.initial_step > 0.0) || !(ctrl.tolerance > 0.0) || !(ctrl.safety > 0.0))
    throw Error(ErrorCode::InvalidArgument, "integrator controls must be positive");

  GeodesicTrace trace;
  trace.start_point = x0;
  trace.start_direction = (1.0 / xi_len) * xi0;
  TraceSample current{0.0, {x0, trace.start_direction, 0.0}};
  trace.samples.push_back(current);

  if (dot(trace.start_direction, x0) >= 0.0) {
    trace.degenerate = true;
    trace.exit_point = x0;
    trace.exit_tangent = trace.start_direction;
    return trace;
  }

  const GridSpec& grid = n.spec();
  const double cell_size = grid.step();
  const int q = grid.half_resolution();
  // Points this close to a cell edge (in grid units) count as on it.
  constexpr double kSnap = 1e-12;
  const double edge_slack = 0.25 * kSnap * cell_size;
  constexpr int kMaxRedo = 8;
  // Direction components below this count as parallel to a grid line.
  constexpr double kSlide = 1e-10;
  constexpr int kNoLine = std::numeric_limits<int>::min();

  const double h_min = ctrl.min_step();
  const double h_max = ctrl.max_step();
  double h = std::clamp(ctrl.initial_step, h_min, h_max);
  std::size_t steps = 0;

  // Each step integrates the bilinear polynomial of the cell it starts in, so
  // the right-hand side is smooth within a step. A step that leaves the cell is
  // shortened to end on the cell edge; the gradient jump across the edge would
  // otherwise cost a local error of order h at every crossing.
  while (true) {
    if (++steps > ctrl.max_steps)
      throw Error(ErrorCode::MaxSteps, "geodesic exceeded " + std::to_string(ctrl.max_steps) +
                                           " integrator steps");
    GridSpec::Cell cell = grid.cell_toward(current.state.x, current.state.xi, kSnap);
    // Travel along an interior grid line: the normal derivative jumps across
    // it, so rounding noise would otherwise pick the side. When both sides
    // bend the ray the same way it follows that side; when both pull it back
    // onto the line it slides along it; when both push it away it leaves
    // through the lower cell, the same tie-break the field uses on edges.
    const Vec2 dir = (1.0 / norm(current.state.xi)) * current.state.xi;
    auto line_index = [&](double x, double d) {
      const double t = x * q;
      const double r = std::round(t);
      const bool on = std::abs(t - r) <= kSnap && std::abs(d) <= kSlide && std::abs(r) < q;
      return on ? static_cast<int>(r) : kNoLine;
    };
    const int line_x = line_index(current.state.x.x, dir.x);
    const int line_y = line_index(current.state.x.y, dir.y);
    auto sample = [&](Vec2 x) {
      if (line_x == kNoLine && line_y == kNoLine) return n.sample_cell(x, cell);
      const bool vertical = line_x != kNoLine;
      const FieldSample lower = n.sample_cell(
          x, vertical ? GridSpec::Cell{line_x - 1, cell.j} : GridSpec::Cell{cell.i, line_y - 1});
      const FieldSample upper = n.sample_cell(
          x, vertical ? GridSpec::Cell{line_x, cell.j} : GridSpec::Cell{cell.i, line_y});
      const double gl = vertical ? lower.gradient.x : lower.gradient.y;
      const double gu = vertical ? upper.gradient.x : upper.gradient.y;
      if (gl >= 0.0 && gu > 0.0) return upper;
      if (gl < 0.0 && gu <= 0.0) return lower;
      if (gl < 0.0 && gu > 0.0) return lower;
      FieldSample slide = upper;
      (vertical ? slide.gradient.x : slide.gradient.y) = 0.0;
      return slide;
    };
    auto rhs = [&](const RayState& st) { return rhs_from(sample(st.x), st); };
    // Signed distance outside the current cell; boundary cells extend beyond
    // the grid, where only exit overshoot lands.
    auto overshoot = [&](Vec2 x) {
      const double lo_x = cell.i == -q ? -HUGE_VAL : cell.i * cell_size;
      const double hi_x = cell.i == q - 1 ? HUGE_VAL : (cell.i + 1) * cell_size;
      const double lo_y = cell.j == -q ? -HUGE_VAL : cell.j * cell_size;
      const double hi_y = cell.j == q - 1 ? HUGE_VAL : (cell.j + 1) * cell_size;
      return std::max({lo_x - x.x, x.x - hi_x, lo_y - x.y, x.y - hi_y});
    };

    double h_try = h;
    bool truncated = false;
    bool switched = false;
    double err = 0.0;
    TraceSample next;
    // Step-doubling pair with local extrapolation; `err` receives the estimate.
    auto step = [&](double dt, double& estimate) {
      const RayState full = rk4(rhs, current.state, dt);
      const RayState half = rk4(rhs, rk4(rhs, current.state, 0.5 * dt), 0.5 * dt);
      estimate = max_abs_diff(full, half);
      return RayState{half.x + (1.0 / 15.0) * (half.x - full.x),
                      half.xi + (1.0 / 15.0) * (half.xi - full.xi), half.z + (half.z - full.z) / 15.0};
    };
    for (int redo = 0;; ++redo) {
      next = {current.t + h_try, step(h_try, err)};
      const bool at_floor = h_try <= h_min * (1.0 + 1e-12);
      if (err > ctrl.tolerance * std::max(h_try, h_min) && !at_floor) break;
      if (overshoot(next.state.x) <= edge_slack || redo == kMaxRedo) break;
      // Edge crossing on the Hermite interpolant of the trial step. The start
      // may sit a rounding error outside the cell, which is not a crossing.
      const double base = std::max(0.0, overshoot(current.state.x));
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (overshoot(hermite_position(current, next, mid)) > base ? hi : lo) = mid;
      }
      if (lo * h_try < 1e-14) {
        // The ray sits on an edge and bends into the neighbouring cell: redo
        // the step there. If it bends straight back it slides along the edge
        // and either polynomial serves.
        if (switched) break;
        const Vec2 ahead = hermite_position(current, next, 0.5);
        cell = grid.cell_toward(ahead, ahead - current.state.x, kSnap);
        switched = true;
        continue;
      }
      h_try *= lo;
      truncated = true;
    }

    const bool at_floor = h_try <= h_min * (1.0 + 1e-12);
    // Error per unit step: the local error is O(h^5), so err / h scales as h^4.
    // Steps cut short at an edge are judged at the floor step, below which
    // rounding dominates the estimate.
    const double allowed = ctrl.tolerance * std::max(h_try, h_min);
    double factor = err > 0.0 ? ctrl.safety * std::pow(allowed / err, 0.25) : 4.0;
    factor = std::min(factor, 4.0);

    if (err <= allowed || at_floor) {
      if (err > allowed) ++trace.forced_steps;
      if (norm2(next.state.x) > 1.0) {
        TraceSample exit = locate_exit(n, current, next);
        // The interpolant fixes the exit parameter; re-integrating to it gives
        // the state the integrator's accuracy, and Newton polishes |x| = 1.
        double t_exit = exit.t;
        for (int it = 0; it < 4; ++it) {
          double unused = 0.0;
          exit = {t_exit, step(t_exit - current.t, unused)};
          const double g = norm2(exit.state.x) - 1.0;
          const double dg = 2.0 * dot(exit.state.x, exit.state.xi);
          if (std::abs(g) <= 1e-15 || !(dg > 0.0)) break;
          t_exit -= g / dg;
        }
        trace.samples.push_back(exit);
        trace.exit_point = exit.state.x;
        trace.exit_tangent = exit.state.xi;
        trace.tof = exit.state.z;
        return trace;
      }
      trace.samples.push_back(next);
      current = next;
      // A step cut short at an edge says little about the next step size.
      if (!truncated) h = std::clamp(h * factor, h_min, h_max);
    } else {
      ++trace.rejected_steps;
      h = std::clamp(h_try * std::min(factor, 0.9), h_min, h_max);
    }
  }
}

double euclidean_phase(Vec2 y, Vec2 theta) noexcept { return dot(y, perp(theta)); }

BoundaryPhasePoint euclidean_projection(Vec2 theta, double s) {
  if (!(std::abs(s) < 1.0))
    throw Error(ErrorCode::OutOfDisk, "projection offset must satisfy |s| < 1");
  const Vec2 tp = perp(theta);
  return {s * theta + std::sqrt(1.0 - s * s) * tp, tp};
}

double euclidean_projection_weight(double s) {
  if (!(std::abs(s) < 1.0))
    throw Error(ErrorCode::OutOfDisk, "projection offset must satisfy |s| < 1");
  return 1.0 / std::sqrt(1.0 - s * s);
}

}  // namespace geotomo
