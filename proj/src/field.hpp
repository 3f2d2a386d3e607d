// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vec2.hpp"

namespace geotomo {

/// Equally spaced grid h = 1/Q on [-1,1]^2 with nodes (i*h, j*h),
/// i, j in {-Q, ..., Q}.
class GridSpec {
 public:
  explicit GridSpec(int half_resolution);

  int half_resolution() const noexcept { return q_; }
  double step() const noexcept { return h_; }
  int nodes_per_axis() const noexcept { return 2 * q_ + 1; }
  std::size_t node_count() const noexcept {
    auto n = static_cast<std::size_t>(nodes_per_axis());
    return n * n;
  }

  /// Flat index of node (i, j); storage is row-major in i, then j.
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i + q_) * static_cast<std::size_t>(nodes_per_axis()) +
           static_cast<std::size_t>(j + q_);
  }
  int node_i(std::size_t flat) const noexcept {
    return static_cast<int>(flat / static_cast<std::size_t>(nodes_per_axis())) - q_;
  }
  int node_j(std::size_t flat) const noexcept {
    return static_cast<int>(flat % static_cast<std::size_t>(nodes_per_axis())) - q_;
  }
  Vec2 node(int i, int j) const noexcept { return {i * h_, j * h_}; }
  Vec2 node(std::size_t flat) const noexcept { return node(node_i(flat), node_j(flat)); }

  /// True when node (i, j) lies in the closed unit disk (exact integer test).
  bool in_disk(int i, int j) const noexcept { return i * i + j * j <= q_ * q_; }
  bool in_disk(std::size_t flat) const noexcept { return in_disk(node_i(flat), node_j(flat)); }

  /// Flat indices of all nodes in the closed unit disk, in storage order.
  std::vector<std::size_t> disk_nodes() const;

  /// Cell (by its lower-left node) containing p. A point within `snap` grid
  /// units of a grid line belongs to the cell that `dir` points into. Clamped
  /// to the grid.
  struct Cell {
    int i = 0;
    int j = 0;
    friend bool operator==(Cell, Cell) = default;
  };
  Cell cell_toward(Vec2 p, Vec2 dir, double snap = 1e-9) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int q_;
  double h_;
};

/// Value and gradient of the bilinear interpolant at one point.
struct FieldSample {
  double value = 0.0;
  Vec2 gradient;
};

/// Node values on a GridSpec, bilinearly interpolated inside [-1,1]^2 and
/// equal to outside_value() beyond it. Immutable after construction.
class ScalarField {
 public:
  static constexpr double kOutsideValue = 1.0;

  /// Throws Error(Positivity) if any value is <= 0 and Error(NonFinite) for
  /// NaN/Inf, unless require_positive is false (used for backprojections and
  /// signed updates).
  ScalarField(GridSpec spec, std::vector<double> values, bool require_positive = true);

  static ScalarField constant(GridSpec spec, double value);

  const GridSpec& spec() const noexcept { return spec_; }
  std::span<const double> values() const noexcept { return values_; }
  double at(int i, int j) const noexcept { return values_[spec_.index(i, j)]; }
  double outside_value() const noexcept { return kOutsideValue; }

  double eval(Vec2 p) const noexcept;

  /// Gradient of the interpolant. On shared cell edges the gradient of the
  /// cell with the smallest (i, j) is used; zero outside [-1,1]^2.
  Vec2 gradient(Vec2 p) const noexcept;

  FieldSample sample(Vec2 p) const noexcept;
  /// Bilinear polynomial of one cell, extended beyond the cell and ignoring
  /// the outside value. Smooth in p, which adaptive integrators rely on.
  FieldSample sample_cell(Vec2 p, GridSpec::Cell cell) const noexcept;

  /// Pointwise reciprocal at the nodes (c <-> n).
  ScalarField reciprocal() const;

  /// FNV-1a hash of the node values; identifies the generator of a geodesic set.
  std::uint64_t content_hash() const noexcept;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

}  // namespace geotomo
