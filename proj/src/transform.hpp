// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "field.hpp"
#include "geodesic.hpp"

namespace geotomo {

/// One (source, direction) pair. Indices are 1-based, i over sources and j
/// over directions.
struct RayEntry {
  int i = 0;
  int j = 0;
  Vec2 source;
  Vec2 direction;
  bool inward = false;  // <direction, source> < 0
};

/// Measurement geometry: N_x sources x_i = (sin a_i, cos a_i),
/// a_i = 2 pi (i-1)/N_x, each emitting N_xi directions
/// xi_i^j = (sin b, cos b), b = 2 pi ((i-1)/N_x + (j-1)/N_xi - 1/4).
class RaySet {
 public:
  /// Throws Error(InvalidArgument) unless both counts are >= 4.
  RaySet(int sources, int directions);

  int sources() const noexcept { return nx_; }
  int directions() const noexcept { return nxi_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t inward_count() const noexcept { return inward_count_; }

  std::span<const RayEntry> entries() const noexcept { return entries_; }
  const RayEntry& operator[](std::size_t k) const noexcept { return entries_[k]; }

  /// Flat index, i-major then j, for 1-based (i, j). i is wrapped modulo N_x
  /// and j modulo N_xi.
  std::size_t index(int i, int j) const noexcept;

  /// Per-ray measure of the boundary phase space, (2 pi / N_x)(2 pi / N_xi).
  double ray_measure() const noexcept;

 private:
  int nx_;
  int nxi_;
  std::size_t inward_count_ = 0;
  std::vector<RayEntry> entries_;
};

using RaySetPtr = std::shared_ptr<const RaySet>;

enum class SinogramKind { Exact, Noisy, Predicted };

struct ExitData {
  Vec2 point;
  Vec2 tangent;
};

/// TOF values per ray of a RaySet. Rays with valid == 0 carry tof 0 and are
/// excluded from every norm and residual.
struct Sinogram {
  RaySetPtr rays;
  std::vector<double> tof;
  std::vector<std::uint8_t> valid;
  std::vector<std::optional<ExitData>> exit;  // empty when not recorded
  SinogramKind kind = SinogramKind::Exact;

  static Sinogram zeros(RaySetPtr rays, SinogramKind kind);
  std::size_t size() const noexcept { return tof.size(); }
  std::size_t valid_count() const noexcept;
};

/// Geodesics of one generator field, one slot per ray of the RaySet. Slots of
/// non-inward rays and of rays whose integration failed are empty.
struct GeodesicSet {
  RaySetPtr rays;
  std::vector<std::optional<GeodesicTrace>> traces;
  std::uint64_t generator_hash = 0;
  std::size_t failed_rays = 0;

  std::size_t trace_count() const noexcept;
};

struct ForwardResult {
  Sinogram sinogram;
  GeodesicSet geodesics;
};

/// Nonlinear forward operator: traces every inward ray through n and records
/// its time of flight. Rays exceeding the step budget are left invalid.
ForwardResult forward_nonlinear(const ScalarField& n, RaySetPtr rays,
                                const IntegratorControl& ctrl, int workers = 0);

/// Trapezoidal quadrature of f |x'| along one stored trace.
double integrate_along(const ScalarField& f, const GeodesicTrace& trace) noexcept;

/// Linearized forward operator: integrates f along the frozen geodesics.
Sinogram forward_linearized(const ScalarField& f, const GeodesicSet& geodesics, int workers = 0);

/// Adds i.i.d. uniform [-1, 1] noise on valid rays, rescaled so that
/// ||noise||_2 / ||tof||_2 equals `level`. Throws Error(DegenerateScale) for an
/// all-zero sinogram with level > 0.
Sinogram add_noise(const Sinogram& sino, double level, std::uint64_t seed);

/// Plain l2 norm over rays valid in `mask`.
double valid_norm(std::span<const double> values, std::span<const std::uint8_t> mask) noexcept;

// Sinogram CSV: header "i,j,x1,x2,xi1,xi2,tof,valid", one row per ray in
// i-major, j-minor order.
void write_sinogram_csv(const Sinogram& sino, std::ostream& out);
void write_sinogram_csv(const Sinogram& sino, const std::filesystem::path& path);
Sinogram read_sinogram_csv(std::istream& in);
Sinogram read_sinogram_csv(const std::filesystem::path& path);

// Trace CSV: header "ray_id,t,x1,x2,xi1,xi2,z", one row per sample; ray_id is
// the 0-based flat ray index.
void write_traces_csv(const GeodesicSet& geodesics, std::span<const std::size_t> ray_ids,
                      std::ostream& out);
void write_traces_csv(const GeodesicSet& geodesics, std::span<const std::size_t> ray_ids,
                      const std::filesystem::path& path);

}  // namespace geotomo
