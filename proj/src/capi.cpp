// SPDX-License-Identifier: Apache-2.0
#include "geotomo/geotomo.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "adjoint.hpp"
#include "error.hpp"
#include "field_io.hpp"
#include "phantom.hpp"
#include "recon.hpp"
#include "transform.hpp"

struct gt_field {
  geotomo::ScalarField value;
};
struct gt_sinogram {
  geotomo::Sinogram value;
};
struct gt_geodesics {
  geotomo::GeodesicSet value;
};
struct gt_recon_result {
  geotomo::ReconResult value;
};

namespace {

using namespace geotomo;

thread_local std::string last_error;

gt_status to_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return GT_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return GT_ERR_IO;
    case ErrorCode::Format: return GT_ERR_FORMAT;
    case ErrorCode::Positivity: return GT_ERR_POSITIVITY;
    case ErrorCode::NonFinite: return GT_ERR_NON_FINITE;
    case ErrorCode::MaxSteps: return GT_ERR_MAX_STEPS;
    case ErrorCode::OutOfDisk: return GT_ERR_OUT_OF_DISK;
    case ErrorCode::DegenerateScale: return GT_ERR_DEGENERATE_SCALE;
    case ErrorCode::NoValidTrace: return GT_ERR_NO_VALID_TRACE;
    case ErrorCode::TooManyInvalidRays: return GT_ERR_TOO_MANY_INVALID_RAYS;
  }
  return GT_ERR_INTERNAL;
}

// Runs `f`, translating every exception into a status and a thread-local
// message. Nothing propagates across the C boundary.
template <class F>
gt_status try_(F&& f) noexcept {
  try {
    f();
    last_error.clear();
    return GT_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return GT_ERR_INTERNAL;
}

template <class T>
T& deref(T* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
  return *p;
}

IntegratorControl to_core(const gt_integrator* in) {
  IntegratorControl c;
  if (!in) return c;
  c.safety = in->safety;
  c.initial_step = in->initial_step;
  c.tolerance = in->tolerance;
  c.max_steps = in->max_steps;
  if (!(c.safety > 0.0 && c.safety <= 1.0) || !(c.initial_step > 0.0) || !(c.tolerance > 0.0) ||
      c.max_steps == 0)
    throw Error(ErrorCode::InvalidArgument, "invalid integrator settings");
  return c;
}

BackprojectionConfig to_core(const gt_backprojection& in) {
  BackprojectionConfig c;
  c.directions = in.directions;
  c.weight = in.unit_weight ? WeightMode::Unit : WeightMode::Euclidean;
  c.bracket = in.fixed_tangent ? BracketMode::FixedTangent : BracketMode::ParallelFamily;
  c.fade_to_zero = in.fade_to_zero != 0;
  c.weight_floor = in.weight_floor;
  if (!(c.weight_floor >= 0.0) || c.weight_floor >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "weight_floor must lie in [0, 1)");
  return c;
}

PhantomParams to_core(const gt_phantom_params& in) {
  PhantomParams p;
  switch (in.kind) {
    case GT_PHANTOM_PEAKS: p.kind = PhantomKind::Peaks; break;
    case GT_PHANTOM_CURVATURE: p.kind = PhantomKind::ConstantCurvature; break;
    case GT_PHANTOM_RING_PEAKS: p.kind = PhantomKind::RingPeaks; break;
    default: throw Error(ErrorCode::InvalidArgument, "unknown phantom kind");
  }
  if (in.bump_count < 0 || in.bump_count > GT_MAX_BUMPS)
    throw Error(ErrorCode::InvalidArgument, "bump_count out of range");
  p.profile = in.literal_profile ? BumpProfile::Literal : BumpProfile::Normalized;
  for (int b = 0; b < in.bump_count; ++b)
    p.bumps.push_back({{in.bump_x[b], in.bump_y[b]}, in.bump_radius[b], in.bump_amplitude[b]});
  p.curvature_d = in.curvature_d;
  p.curvature_R = in.curvature_R;
  p.ring_radius = in.ring_radius;
  p.ring_center = {in.ring_center_x, in.ring_center_y};
  p.ring_amplitude = in.ring_amplitude;
  return p;
}

void check_same_rays(const RaySetPtr& a, const RaySetPtr& b) {
  if (!a || !b || a->sources() != b->sources() || a->directions() != b->directions())
    throw Error(ErrorCode::InvalidArgument, "sinogram and geodesics use different ray sets");
}

std::filesystem::path as_path(const char* p) {
  if (p == nullptr || *p == '\0') throw Error(ErrorCode::InvalidArgument, "path is empty");
  return std::filesystem::path(p);
}

int workers_or_default(int w) {
  if (w < 0) throw Error(ErrorCode::InvalidArgument, "workers must be >= 0");
  return w;
}

}  // namespace

extern "C" {

const char* gt_version(void) { return "0.1.0"; }

const char* gt_status_string(gt_status status) {
  switch (status) {
    case GT_OK: return "ok";
    case GT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GT_ERR_IO: return "i/o error";
    case GT_ERR_FORMAT: return "format error";
    case GT_ERR_POSITIVITY: return "positivity violated";
    case GT_ERR_NON_FINITE: return "non-finite value";
    case GT_ERR_MAX_STEPS: return "step budget exceeded";
    case GT_ERR_OUT_OF_DISK: return "outside the unit disk";
    case GT_ERR_DEGENERATE_SCALE: return "degenerate scale";
    case GT_ERR_NO_VALID_TRACE: return "no valid trace";
    case GT_ERR_TOO_MANY_INVALID_RAYS: return "too many invalid rays";
    case GT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* gt_last_error(void) { return last_error.c_str(); }

// ---- fields -------------------------------------------------------------

gt_status gt_field_create(int half_resolution, const double* values, size_t count,
                          int require_positive, gt_field** out) {
  return try_([&] {
    GridSpec grid(half_resolution);
    if (count != grid.node_count())
      throw Error(ErrorCode::InvalidArgument,
                  "expected " + std::to_string(grid.node_count()) + " values");
    deref(values, "values");
    std::vector<double> v(values, values + count);
    deref(out, "out") = new gt_field{ScalarField(grid, std::move(v), require_positive != 0)};
  });
}

gt_status gt_field_constant(int half_resolution, double value, gt_field** out) {
  return try_([&] {
    deref(out, "out") = new gt_field{ScalarField::constant(GridSpec(half_resolution), value)};
  });
}

void gt_field_destroy(gt_field* field) { delete field; }

gt_status gt_field_info(const gt_field* field, int* half_resolution, size_t* node_count) {
  return try_([&] {
    const auto& f = deref(field, "field").value;
    if (half_resolution) *half_resolution = f.spec().half_resolution();
    if (node_count) *node_count = f.spec().node_count();
  });
}

gt_status gt_field_values(const gt_field* field, double* out, size_t count) {
  return try_([&] {
    const auto v = deref(field, "field").value.values();
    if (count != v.size()) throw Error(ErrorCode::InvalidArgument, "count mismatch");
    std::copy(v.begin(), v.end(), &deref(out, "out"));
  });
}

gt_status gt_field_eval(const gt_field* field, double x, double y, double* value, double* grad_x,
                        double* grad_y) {
  return try_([&] {
    const FieldSample s = deref(field, "field").value.sample({x, y});
    if (value) *value = s.value;
    if (grad_x) *grad_x = s.gradient.x;
    if (grad_y) *grad_y = s.gradient.y;
  });
}

gt_status gt_field_reciprocal(const gt_field* field, gt_field** out) {
  return try_([&] {
    deref(out, "out") = new gt_field{deref(field, "field").value.reciprocal()};
  });
}

gt_status gt_field_deviation(const gt_field* field, double p, double* out) {
  return try_([&] {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
    deref(out, "out") = deviation_power_sum(deref(field, "field").value, p);
  });
}

gt_status gt_field_read_csv(const char* path, int require_positive, gt_field** out) {
  return try_([&] {
    deref(out, "out") = new gt_field{read_field_csv(as_path(path), require_positive != 0)};
  });
}

gt_status gt_field_write_csv(const gt_field* field, const char* path) {
  return try_([&] { write_field_csv(deref(field, "field").value, as_path(path)); });
}

// ---- phantoms -----------------------------------------------------------

gt_status gt_phantom_defaults(gt_phantom_kind kind, gt_phantom_params* out) {
  return try_([&] {
    PhantomParams p;
    switch (kind) {
      case GT_PHANTOM_PEAKS: p = PhantomParams::peaks(); break;
      case GT_PHANTOM_CURVATURE: p = PhantomParams::constant_curvature(); break;
      case GT_PHANTOM_RING_PEAKS: p = PhantomParams::ring_peaks(); break;
      default: throw Error(ErrorCode::InvalidArgument, "unknown phantom kind");
    }
    gt_phantom_params& o = deref(out, "out");
    o = gt_phantom_params{};
    o.kind = kind;
    o.literal_profile = p.profile == BumpProfile::Literal;
    o.bump_count = static_cast<int>(p.bumps.size());
    for (std::size_t b = 0; b < p.bumps.size(); ++b) {
      o.bump_x[b] = p.bumps[b].center.x;
      o.bump_y[b] = p.bumps[b].center.y;
      o.bump_radius[b] = p.bumps[b].radius;
      o.bump_amplitude[b] = p.bumps[b].amplitude;
    }
    o.curvature_d = p.curvature_d;
    o.curvature_R = p.curvature_R;
    o.ring_radius = p.ring_radius;
    o.ring_center_x = p.ring_center.x;
    o.ring_center_y = p.ring_center.y;
    o.ring_amplitude = p.ring_amplitude;
  });
}

gt_status gt_phantom_check(const gt_phantom_params* params) {
  return try_([&] { Phantom(to_core(deref(params, "params"))); });
}

gt_status gt_phantom_speed_at(const gt_phantom_params* params, double x, double y, double* out) {
  return try_([&] {
    const Phantom ph(to_core(deref(params, "params")));
    deref(out, "out") = ph.sound_speed({x, y});
  });
}

gt_status gt_phantom_sample(const gt_phantom_params* params, int half_resolution, int want_index,
                            gt_field** out) {
  return try_([&] {
    const Phantom ph(to_core(deref(params, "params")));
    const GridSpec grid(half_resolution);
    deref(out, "out") =
        new gt_field{want_index ? ph.sample_index(grid) : ph.sample_speed(grid)};
  });
}

// ---- geodesics and forward operators ---------------------------------------

void gt_integrator_defaults(gt_integrator* out) {
  if (!out) return;
  const IntegratorControl c;
  *out = {c.safety, c.initial_step, c.tolerance, c.max_steps};
}

gt_status gt_simulate(const gt_field* n, int sources, int directions,
                      const gt_integrator* integrator, int workers, gt_sinogram** sinogram,
                      gt_geodesics** geodesics) {
  return try_([&] {
    const auto& field = deref(n, "n").value;
    auto rays = std::make_shared<const RaySet>(sources, directions);
    ForwardResult fwd =
        forward_nonlinear(field, rays, to_core(integrator), workers_or_default(workers));
    std::unique_ptr<gt_sinogram> s;
    std::unique_ptr<gt_geodesics> g;
    if (sinogram) s.reset(new gt_sinogram{std::move(fwd.sinogram)});
    if (geodesics) g.reset(new gt_geodesics{std::move(fwd.geodesics)});
    if (sinogram) *sinogram = s.release();
    if (geodesics) *geodesics = g.release();
  });
}

void gt_sinogram_destroy(gt_sinogram* sinogram) { delete sinogram; }

gt_status gt_sinogram_info(const gt_sinogram* sinogram, int* sources, int* directions,
                           size_t* valid_count) {
  return try_([&] {
    const auto& s = deref(sinogram, "sinogram").value;
    if (sources) *sources = s.rays->sources();
    if (directions) *directions = s.rays->directions();
    if (valid_count) *valid_count = s.valid_count();
  });
}

gt_status gt_sinogram_values(const gt_sinogram* sinogram, double* tof, unsigned char* valid,
                             size_t count) {
  return try_([&] {
    const auto& s = deref(sinogram, "sinogram").value;
    if (count != s.size()) throw Error(ErrorCode::InvalidArgument, "count mismatch");
    if (tof) std::copy(s.tof.begin(), s.tof.end(), tof);
    if (valid) std::copy(s.valid.begin(), s.valid.end(), valid);
  });
}

gt_status gt_sinogram_create(int sources, int directions, const double* tof,
                             const unsigned char* valid, size_t count, gt_sinogram** out) {
  return try_([&] {
    auto rays = std::make_shared<const RaySet>(sources, directions);
    if (count != rays->size()) throw Error(ErrorCode::InvalidArgument, "count mismatch");
    deref(tof, "tof");
    deref(valid, "valid");
    Sinogram s = Sinogram::zeros(rays, SinogramKind::Predicted);
    for (std::size_t k = 0; k < count; ++k) {
      if (!std::isfinite(tof[k])) throw Error(ErrorCode::NonFinite, "non-finite tof");
      if (valid[k] && !(*rays)[k].inward)
        throw Error(ErrorCode::InvalidArgument, "ray " + std::to_string(k) + " is not inward");
      if (!valid[k] && tof[k] != 0.0)
        throw Error(ErrorCode::InvalidArgument, "invalid ray " + std::to_string(k) + " has tof != 0");
      s.valid[k] = valid[k] ? 1 : 0;
      s.tof[k] = tof[k];
    }
    deref(out, "out") = new gt_sinogram{std::move(s)};
  });
}

gt_status gt_sinogram_add_noise(const gt_sinogram* sinogram, double level, uint64_t seed,
                                gt_sinogram** out) {
  return try_([&] {
    deref(out, "out") =
        new gt_sinogram{add_noise(deref(sinogram, "sinogram").value, level, seed)};
  });
}

gt_status gt_sinogram_read_csv(const char* path, gt_sinogram** out) {
  return try_([&] {
    deref(out, "out") = new gt_sinogram{read_sinogram_csv(as_path(path))};
  });
}

gt_status gt_sinogram_write_csv(const gt_sinogram* sinogram, const char* path) {
  return try_([&] {
    write_sinogram_csv(deref(sinogram, "sinogram").value,
                       as_path(path));
  });
}

void gt_geodesics_destroy(gt_geodesics* geodesics) { delete geodesics; }

gt_status gt_geodesics_info(const gt_geodesics* geodesics, size_t* trace_count,
                            size_t* failed_rays) {
  return try_([&] {
    const auto& g = deref(geodesics, "geodesics").value;
    if (trace_count) *trace_count = g.trace_count();
    if (failed_rays) *failed_rays = g.failed_rays;
  });
}

gt_status gt_geodesics_tof(const gt_geodesics* geodesics, size_t ray_id, double* out) {
  return try_([&] {
    const auto& g = deref(geodesics, "geodesics").value;
    if (ray_id >= g.traces.size()) throw Error(ErrorCode::InvalidArgument, "ray_id out of range");
    if (!g.traces[ray_id]) throw Error(ErrorCode::NoValidTrace, "ray has no trace");
    deref(out, "out") = g.traces[ray_id]->tof;
  });
}

gt_status gt_geodesics_density(const gt_geodesics* geodesics, double x, double y, double radius,
                               double* out) {
  return try_([&] {
    if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
    deref(out, "out") = fraction_of_traces_near(deref(geodesics, "geodesics").value, {x, y}, radius);
  });
}

gt_status gt_geodesics_write_csv(const gt_geodesics* geodesics, const size_t* ray_ids,
                                 size_t count, const char* path) {
  return try_([&] {
    const auto& g = deref(geodesics, "geodesics").value;
    std::vector<std::size_t> ids;
    if (ray_ids) {
      ids.assign(ray_ids, ray_ids + count);
    } else {
      for (std::size_t k = 0; k < g.traces.size(); ++k)
        if (g.traces[k]) ids.push_back(k);
    }
    write_traces_csv(g, ids, as_path(path));
  });
}

gt_status gt_forward_linearized(const gt_field* f, const gt_geodesics* geodesics, int workers,
                                gt_sinogram** out) {
  return try_([&] {
    deref(out, "out") = new gt_sinogram{forward_linearized(
        deref(f, "f").value, deref(geodesics, "geodesics").value, workers_or_default(workers))};
  });
}

// ---- backprojection -----------------------------------------------------

void gt_backprojection_defaults(gt_backprojection* out) {
  if (!out) return;
  const BackprojectionConfig c;
  *out = {c.directions, 0, 0, c.fade_to_zero ? 1 : 0, c.weight_floor};
}

gt_status gt_backproject_point(const gt_sinogram* omega, const gt_geodesics* geodesics, double x,
                               double y, const gt_backprojection* config, double* out) {
  return try_([&] {
    const auto& w = deref(omega, "omega").value;
    const auto& g = deref(geodesics, "geodesics").value;
    check_same_rays(w.rays, g.rays);
    deref(out, "out") = backproject(w, g, {x, y}, to_core(deref(config, "config")));
  });
}

gt_status gt_backproject_nodes(const gt_sinogram* omega, const gt_geodesics* geodesics,
                               int half_resolution, const gt_backprojection* config, int workers,
                               gt_field** out) {
  return try_([&] {
    const auto& w = deref(omega, "omega").value;
    const auto& g = deref(geodesics, "geodesics").value;
    check_same_rays(w.rays, g.rays);
    deref(out, "out") = new gt_field{backproject_nodes(w, g, GridSpec(half_resolution),
                                                       to_core(deref(config, "config")),
                                                       workers_or_default(workers))};
  });
}

void gt_adjoint_setup_defaults(gt_adjoint_setup* out) {
  if (!out) return;
  const AdjointTestSetup s;
  *out = gt_adjoint_setup{};
  out->sources = s.sources;
  out->ray_directions = s.ray_directions;
  gt_backprojection_defaults(&out->backprojection);
  gt_integrator_defaults(&out->integrator);
  out->seed = s.seed;
  out->zero_omega = s.zero_omega ? 1 : 0;
  out->support_radius = s.support_radius;
  out->workers = 0;
}

gt_status gt_adjoint_test(const gt_field* n, const gt_adjoint_setup* setup,
                          gt_adjoint_report* out) {
  return try_([&] {
    const auto& in = deref(setup, "setup");
    AdjointTestSetup s;
    s.sources = in.sources;
    s.ray_directions = in.ray_directions;
    s.backprojection = to_core(in.backprojection);
    s.integrator = to_core(&in.integrator);
    s.seed = in.seed;
    s.zero_omega = in.zero_omega != 0;
    s.support_radius = in.support_radius;
    const AdjointTestReport r =
        adjoint_dot_test(deref(n, "n").value, s, workers_or_default(in.workers));
    deref(out, "out") = {r.ray_pairing, r.node_pairing, r.norm_rf, r.norm_omega, r.discrepancy};
  });
}

// ---- reconstruction -----------------------------------------------------

void gt_recon_defaults(gt_recon_config* out) {
  if (!out) return;
  const ReconConfig c;
  *out = gt_recon_config{};
  out->alpha = c.alpha;
  out->p = c.p;
  out->mu = c.mu;
  out->line_search = c.line_search ? 1 : 0;
  out->max_halvings = c.max_halvings;
  out->inner_steps = c.inner_steps;
  out->outer_steps = c.outer_steps;
  gt_backprojection_defaults(&out->backprojection);
  out->backprojection.directions = c.backprojection.directions;
  out->backprojection.weight_floor = c.backprojection.weight_floor;
  gt_integrator_defaults(&out->integrator);
  out->max_failed_fraction = c.max_failed_fraction;
  out->workers = 0;
}

gt_status gt_tikhonov_value(const gt_field* f, const gt_geodesics* geodesics,
                            const gt_sinogram* measured, double alpha, double p, double* J,
                            double* data_term, double* penalty_term) {
  return try_([&] {
    if (!(alpha >= 0.0) || !(p >= 1.0))
      throw Error(ErrorCode::InvalidArgument, "need alpha >= 0 and p >= 1");
    const TikhonovValue v =
        tikhonov_value(deref(f, "f").value, deref(geodesics, "geodesics").value,
                       deref(measured, "measured").value, alpha, p);
    if (J) *J = v.J;
    if (data_term) *data_term = v.data_term;
    if (penalty_term) *penalty_term = v.penalty_term;
  });
}

gt_status gt_reconstruct(const gt_field* n0, const gt_sinogram* measured,
                         const gt_recon_config* config, gt_iteration_callback callback,
                         void* user, gt_recon_result** out) {
  return try_([&] {
    const auto& in = deref(config, "config");
    deref(out, "out");
    ReconConfig c;
    c.alpha = in.alpha;
    c.p = in.p;
    c.mu = in.mu;
    c.line_search = in.line_search != 0;
    c.max_halvings = in.max_halvings;
    c.inner_steps = in.inner_steps;
    c.outer_steps = in.outer_steps;
    c.backprojection = to_core(in.backprojection);
    c.integrator = to_core(&in.integrator);
    c.max_failed_fraction = in.max_failed_fraction;
    c.workers = workers_or_default(in.workers);
    IterationObserver observer;
    if (callback) {
      observer = [callback, user](const IterationRecord& r) {
        const gt_iteration_record rec{r.k,         r.alpha,   r.value.J, r.value.data_term,
                                      r.value.penalty_term, r.wall_ms, r.failed_rays};
        callback(&rec, user);
      };
    }
    ReconResult result =
        outer_loop(deref(n0, "n0").value, deref(measured, "measured").value, c, observer);
    *out = new gt_recon_result{std::move(result)};
  });
}

void gt_recon_result_destroy(gt_recon_result* result) { delete result; }

gt_status gt_recon_result_field(const gt_recon_result* result, gt_field** out) {
  return try_([&] {
    deref(out, "out") = new gt_field{deref(result, "result").value.field};
  });
}

gt_status gt_recon_result_geodesics(const gt_recon_result* result, gt_geodesics** out) {
  return try_([&] {
    deref(out, "out") = new gt_geodesics{deref(result, "result").value.geodesics};
  });
}

gt_status gt_recon_result_log(const gt_recon_result* result, gt_iteration_record* records,
                              size_t capacity, size_t* count, int* k_star) {
  return try_([&] {
    const IterationLog& log = deref(result, "result").value.log;
    if (count) *count = log.records.size();
    if (k_star) *k_star = log.k_star;
    if (capacity > 0) deref(records, "records");
    const std::size_t n = std::min(capacity, log.records.size());
    for (std::size_t k = 0; k < n; ++k) {
      const auto& r = log.records[k];
      records[k] = {r.k, r.alpha, r.value.J, r.value.data_term, r.value.penalty_term, r.wall_ms,
                    r.failed_rays};
    }
  });
}

gt_status gt_recon_result_write_log_csv(const gt_recon_result* result, const char* path) {
  return try_([&] {
    write_iteration_log_csv(deref(result, "result").value.log,
                            as_path(path));
  });
}

}  // extern "C"
