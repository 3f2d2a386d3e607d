// SPDX-License-Identifier: Apache-2.0
#include "transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace geotomo {

RaySet::RaySet(int sources, int directions) : nx_(sources), nxi_(directions) {
  if (sources < 4 || directions < 4)
    throw Error(ErrorCode::InvalidArgument, "ray set needs at least 4 sources and 4 directions");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  entries_.reserve(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(nxi_));
  for (int i = 1; i <= nx_; ++i) {
    const double a = two_pi * (i - 1) / nx_;
    const Vec2 x{std::sin(a), std::cos(a)};
    for (int j = 1; j <= nxi_; ++j) {
      const double b =
          two_pi * (static_cast<double>(i - 1) / nx_ + static_cast<double>(j - 1) / nxi_ - 0.25);
      const Vec2 xi{std::sin(b), std::cos(b)};
      // <xi, x> = sin(2 pi (j-1) / N_xi); decided exactly so that tangent
      // rays never count as inward.
      const bool inward = 2 * (j - 1) > nxi_;
      if (inward) ++inward_count_;
      entries_.push_back({i, j, x, xi, inward});
    }
  }
}

std::size_t RaySet::index(int i, int j) const noexcept {
  const int iw = ((i - 1) % nx_ + nx_) % nx_;
  const int jw = ((j - 1) % nxi_ + nxi_) % nxi_;
  return static_cast<std::size_t>(iw) * static_cast<std::size_t>(nxi_) +
         static_cast<std::size_t>(jw);
}

double RaySet::ray_measure() const noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return (two_pi / nx_) * (two_pi / nxi_);
}

Sinogram Sinogram::zeros(RaySetPtr rays, SinogramKind kind) {
  Sinogram s;
  const std::size_t n = rays->size();
  s.rays = std::move(rays);
  s.tof.assign(n, 0.0);
  s.valid.assign(n, 0);
  s.kind = kind;
  return s;
}

std::size_t Sinogram::valid_count() const noexcept {
  std::size_t c = 0;
  for (auto v : valid) c += v != 0;
  return c;
}

std::size_t GeodesicSet::trace_count() const noexcept {
  std::size_t c = 0;
  for (const auto& t : traces) c += t.has_value();
  return c;
}

ForwardResult forward_nonlinear(const ScalarField& n, RaySetPtr rays,
                                const IntegratorControl& ctrl, int workers) {
  if (!rays) throw Error(ErrorCode::InvalidArgument, "forward_nonlinear: null ray set");
  ForwardResult out;
  out.sinogram = Sinogram::zeros(rays, SinogramKind::Exact);
  out.sinogram.exit.assign(rays->size(), std::nullopt);
  out.geodesics.rays = rays;
  out.geodesics.traces.assign(rays->size(), std::nullopt);
  out.geodesics.generator_hash = n.content_hash();

  std::vector<std::uint8_t> failed(rays->size(), 0);
  parallel_for(rays->size(), workers, [&](std::size_t k) {
    const RayEntry& e = (*rays)[k];
    if (!e.inward) return;
    try {
      GeodesicTrace trace = integrate(n, e.source, e.direction, ctrl);
      out.sinogram.tof[k] = trace.tof;
      out.sinogram.valid[k] = 1;
      out.sinogram.exit[k] = ExitData{trace.exit_point, trace.exit_tangent};
      out.geodesics.traces[k] = std::move(trace);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::MaxSteps) throw;
      failed[k] = 1;
    }
  });
  for (auto f : failed) out.geodesics.failed_rays += f;
  return out;
}

double integrate_along(const ScalarField& f, const GeodesicTrace& trace) noexcept {
  const auto& s = trace.samples;
  if (s.size() < 2) return 0.0;
  // Trace points lie in the closed disk; the exit point may sit an ulp
  // outside the grid square, where f would read its outside value.
  auto value = [&](const TraceSample& p) {
    const Vec2 x{std::clamp(p.state.x.x, -1.0, 1.0), std::clamp(p.state.x.y, -1.0, 1.0)};
    return f.eval(x) * norm(p.state.xi);
  };
  double sum = 0.0;
  double prev = value(s[0]);
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double cur = value(s[k]);
    sum += 0.5 * (prev + cur) * (s[k].t - s[k - 1].t);
    prev = cur;
  }
  return sum;
}

Sinogram forward_linearized(const ScalarField& f, const GeodesicSet& geodesics, int workers) {
  if (!geodesics.rays) throw Error(ErrorCode::InvalidArgument, "forward_linearized: empty set");
  Sinogram out = Sinogram::zeros(geodesics.rays, SinogramKind::Predicted);
  parallel_for(geodesics.traces.size(), workers, [&](std::size_t k) {
    const auto& t = geodesics.traces[k];
    if (!t) return;
    out.tof[k] = integrate_along(f, *t);
    out.valid[k] = 1;
  });
  return out;
}

double valid_norm(std::span<const double> values, std::span<const std::uint8_t> mask) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (mask[k]) s += values[k] * values[k];
  return std::sqrt(s);
}

Sinogram add_noise(const Sinogram& sino, double level, std::uint64_t seed) {
  if (!(level >= 0.0) || !std::isfinite(level))
    throw Error(ErrorCode::InvalidArgument, "noise level must be finite and >= 0");
  Sinogram out = sino;
  out.kind = SinogramKind::Noisy;
  if (level == 0.0) return out;
  const double signal = valid_norm(sino.tof, sino.valid);
  if (!(signal > 0.0))
    throw Error(ErrorCode::DegenerateScale, "cannot scale relative noise on an all-zero sinogram");

  SplitMix64 rng(seed);
  std::vector<double> delta(sino.size(), 0.0);
  for (std::size_t k = 0; k < delta.size(); ++k)
    if (sino.valid[k]) delta[k] = rng.uniform(-1.0, 1.0);
  const double dn = valid_norm(delta, sino.valid);
  if (!(dn > 0.0)) throw Error(ErrorCode::DegenerateScale, "noise draw has zero norm");
  const double scale = level * signal / dn;
  for (std::size_t k = 0; k < delta.size(); ++k)
    if (sino.valid[k]) out.tof[k] += scale * delta[k];
  return out;
}

}  // namespace geotomo
