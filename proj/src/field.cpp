// SPDX-License-Identifier: Apache-2.0
#include "field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "error.hpp"

namespace geotomo {

GridSpec::GridSpec(int half_resolution) : q_(half_resolution), h_(0.0) {
  if (half_resolution < 1)
    throw Error(ErrorCode::InvalidArgument,
                "grid half-resolution Q must be >= 1, got " + std::to_string(half_resolution));
  h_ = 1.0 / static_cast<double>(half_resolution);
}

std::vector<std::size_t> GridSpec::disk_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < node_count(); ++k)
    if (in_disk(k)) out.push_back(k);
  return out;
}

GridSpec::Cell GridSpec::cell_toward(Vec2 p, Vec2 dir, double snap) const noexcept {
  auto axis = [this, snap](double x, double d) {
    const double t = x * q_;
    const double r = std::round(t);
    int k = static_cast<int>(std::floor(t));
    if (std::abs(t - r) <= snap) k = static_cast<int>(r) - (d < 0.0 ? 1 : 0);
    return std::clamp(k, -q_, q_ - 1);
  };
  return {axis(p.x, dir.x), axis(p.y, dir.y)};
}

ScalarField::ScalarField(GridSpec spec, std::vector<double> values, bool require_positive)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.node_count())
    throw Error(ErrorCode::InvalidArgument,
                "field expects " + std::to_string(spec_.node_count()) + " node values, got " +
                    std::to_string(values_.size()));
  for (std::size_t k = 0; k < values_.size(); ++k) {
    double v = values_[k];
    if (!std::isfinite(v))
      throw Error(ErrorCode::NonFinite, "non-finite node value at (" +
                                            std::to_string(spec_.node_i(k)) + "," +
                                            std::to_string(spec_.node_j(k)) + ")");
    if (require_positive && !(v > 0.0))
      throw Error(ErrorCode::Positivity, "node value " + std::to_string(v) + " at (" +
                                             std::to_string(spec_.node_i(k)) + "," +
                                             std::to_string(spec_.node_j(k)) + ") is not positive");
  }
}

ScalarField ScalarField::constant(GridSpec spec, double value) {
  return ScalarField(spec, std::vector<double>(spec.node_count(), value), value > 0.0);
}

namespace {

struct CellCoords {
  int i0;     // lower-left node index along r
  int j0;     // lower-left node index along s
  double u;   // local coordinate in [0, 1]
  double v;
};

// Cell lookup shared by eval and gradient: ceil(t) - 1 selects, for a point on
// a grid line, the cell below/left of it (the lexicographically smallest).
CellCoords locate(const GridSpec& g, Vec2 p) {
  const int q = g.half_resolution();
  const double fq = static_cast<double>(q);
  const double tr = (p.x + 1.0) * fq;
  const double ts = (p.y + 1.0) * fq;
  int ci = static_cast<int>(std::ceil(tr)) - 1;
  int cj = static_cast<int>(std::ceil(ts)) - 1;
  ci = std::clamp(ci, 0, 2 * q - 1);
  cj = std::clamp(cj, 0, 2 * q - 1);
  return {ci - q, cj - q, tr - ci, ts - cj};
}

bool inside_square(Vec2 p) {
  return p.x >= -1.0 && p.x <= 1.0 && p.y >= -1.0 && p.y <= 1.0;
}

}  // namespace

FieldSample ScalarField::sample(Vec2 p) const noexcept {
  if (!inside_square(p)) return {kOutsideValue, {0.0, 0.0}};
  const CellCoords c = locate(spec_, p);
  const double f00 = at(c.i0, c.j0);
  const double f10 = at(c.i0 + 1, c.j0);
  const double f01 = at(c.i0, c.j0 + 1);
  const double f11 = at(c.i0 + 1, c.j0 + 1);
  const double cross_term = f11 - f10 - f01 + f00;
  const double value = f00 + c.u * (f10 - f00) + c.v * (f01 - f00) + c.u * c.v * cross_term;
  const double inv_h = static_cast<double>(spec_.half_resolution());
  const Vec2 grad{(f10 - f00 + c.v * cross_term) * inv_h, (f01 - f00 + c.u * cross_term) * inv_h};
  return {value, grad};
}

FieldSample ScalarField::sample_cell(Vec2 p, GridSpec::Cell cell) const noexcept {
  const double fq = static_cast<double>(spec_.half_resolution());
  const double u = p.x * fq - cell.i;
  const double v = p.y * fq - cell.j;
  const double f00 = at(cell.i, cell.j);
  const double f10 = at(cell.i + 1, cell.j);
  const double f01 = at(cell.i, cell.j + 1);
  const double f11 = at(cell.i + 1, cell.j + 1);
  const double cross_term = f11 - f10 - f01 + f00;
  const double value = f00 + u * (f10 - f00) + v * (f01 - f00) + u * v * cross_term;
  const Vec2 grad{(f10 - f00 + v * cross_term) * fq, (f01 - f00 + u * cross_term) * fq};
  return {value, grad};
}

double ScalarField::eval(Vec2 p) const noexcept { return sample(p).value; }

Vec2 ScalarField::gradient(Vec2 p) const noexcept { return sample(p).gradient; }

ScalarField ScalarField::reciprocal() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](double v) { return 1.0 / v; });
  return ScalarField(spec_, std::move(out));
}

std::uint64_t ScalarField::content_hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= bytes[k];
      h *= 0x100000001b3ULL;
    }
  };
  const int q = spec_.half_resolution();
  mix(&q, sizeof q);
  mix(values_.data(), values_.size() * sizeof(double));
  return h;
}

}  // namespace geotomo
