/* SPDX-License-Identifier: Apache-2.0 */
/*
 * geotomo: travel-time tomography with geodesic ray transforms.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Every fallible call returns a gt_status; on failure a message describing
 * the error is available from gt_last_error() on the calling thread.
 * Destroy functions accept NULL.
 */
#ifndef GEOTOMO_GEOTOMO_H
#define GEOTOMO_GEOTOMO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GEOTOMO_BUILDING_LIBRARY)
#    define GT_API __declspec(dllexport)
#  else
#    define GT_API __declspec(dllimport)
#  endif
#else
#  define GT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gt_status {
  GT_OK = 0,
  GT_ERR_INVALID_ARGUMENT = 1,
  GT_ERR_IO = 2,
  GT_ERR_FORMAT = 3,
  GT_ERR_POSITIVITY = 4,
  GT_ERR_NON_FINITE = 5,
  GT_ERR_MAX_STEPS = 6,
  GT_ERR_OUT_OF_DISK = 7,
  GT_ERR_DEGENERATE_SCALE = 8,
  GT_ERR_NO_VALID_TRACE = 9,
  GT_ERR_TOO_MANY_INVALID_RAYS = 10,
  GT_ERR_INTERNAL = 99
} gt_status;

typedef struct gt_field gt_field;             /* scalar field on a square grid */
typedef struct gt_sinogram gt_sinogram;       /* time-of-flight data per ray */
typedef struct gt_geodesics gt_geodesics;     /* traced geodesics of one field */
typedef struct gt_recon_result gt_recon_result;

GT_API const char* gt_version(void);
GT_API const char* gt_status_string(gt_status status);
/* Message of the most recent failure on this thread; "" if none. */
GT_API const char* gt_last_error(void);

/* ---- fields ---------------------------------------------------------- */

/* Grid with step h = 1/half_resolution and (2*half_resolution+1)^2 nodes,
 * stored row-major: index = (i+Q)*(2Q+1) + (j+Q) for node (i*h, j*h). */
GT_API gt_status gt_field_create(int half_resolution, const double* values, size_t count,
                                 int require_positive, gt_field** out);
GT_API gt_status gt_field_constant(int half_resolution, double value, gt_field** out);
GT_API void gt_field_destroy(gt_field* field);
GT_API gt_status gt_field_info(const gt_field* field, int* half_resolution, size_t* node_count);
GT_API gt_status gt_field_values(const gt_field* field, double* out, size_t count);
/* Bilinear value and gradient at (x, y); value 1 and zero gradient outside. */
GT_API gt_status gt_field_eval(const gt_field* field, double x, double y, double* value,
                               double* grad_x, double* grad_y);
GT_API gt_status gt_field_reciprocal(const gt_field* field, gt_field** out);
/* Sum over nodes of the closed unit disk of |f - 1|^p. */
GT_API gt_status gt_field_deviation(const gt_field* field, double p, double* out);
GT_API gt_status gt_field_read_csv(const char* path, int require_positive, gt_field** out);
GT_API gt_status gt_field_write_csv(const gt_field* field, const char* path);

/* ---- phantoms -------------------------------------------------------- */

typedef enum gt_phantom_kind {
  GT_PHANTOM_PEAKS = 0,
  GT_PHANTOM_CURVATURE = 1,
  GT_PHANTOM_RING_PEAKS = 2
} gt_phantom_kind;

#define GT_MAX_BUMPS 8

typedef struct gt_phantom_params {
  int kind;             /* gt_phantom_kind */
  int literal_profile;  /* 0: bump equals its amplitude at the center */
  int bump_count;
  double bump_x[GT_MAX_BUMPS];
  double bump_y[GT_MAX_BUMPS];
  double bump_radius[GT_MAX_BUMPS];
  double bump_amplitude[GT_MAX_BUMPS];
  double curvature_d;
  double curvature_R;
  double ring_radius;
  double ring_center_x;
  double ring_center_y;
  double ring_amplitude;
} gt_phantom_params;

GT_API gt_status gt_phantom_defaults(gt_phantom_kind kind, gt_phantom_params* out);
/* Validates the parameters (positivity, support inside the unit disk). */
GT_API gt_status gt_phantom_check(const gt_phantom_params* params);
GT_API gt_status gt_phantom_speed_at(const gt_phantom_params* params, double x, double y,
                                     double* out);
/* Samples the sound speed c (want_index = 0) or n = 1/c (want_index != 0). */
GT_API gt_status gt_phantom_sample(const gt_phantom_params* params, int half_resolution,
                                   int want_index, gt_field** out);

/* ---- geodesics and forward operators --------------------------------- */

typedef struct gt_integrator {
  double safety;
  double initial_step;
  double tolerance;
  size_t max_steps;
} gt_integrator;

GT_API void gt_integrator_defaults(gt_integrator* out);

/* Traces all rays of the (sources x directions) ray set through n. Either
 * output may be NULL. workers = 0 uses all cores. */
GT_API gt_status gt_simulate(const gt_field* n, int sources, int directions,
                             const gt_integrator* integrator, int workers,
                             gt_sinogram** sinogram, gt_geodesics** geodesics);

GT_API void gt_sinogram_destroy(gt_sinogram* sinogram);
GT_API gt_status gt_sinogram_info(const gt_sinogram* sinogram, int* sources, int* directions,
                                  size_t* valid_count);
/* Per-ray values in i-major, j-minor order; either array may be NULL. */
GT_API gt_status gt_sinogram_values(const gt_sinogram* sinogram, double* tof,
                                    unsigned char* valid, size_t count);
/* Replaces the values; rays flagged invalid must carry 0. */
GT_API gt_status gt_sinogram_create(int sources, int directions, const double* tof,
                                    const unsigned char* valid, size_t count, gt_sinogram** out);
/* Uniform noise rescaled to ||noise|| / ||tof|| = level over valid rays. */
GT_API gt_status gt_sinogram_add_noise(const gt_sinogram* sinogram, double level, uint64_t seed,
                                       gt_sinogram** out);
GT_API gt_status gt_sinogram_read_csv(const char* path, gt_sinogram** out);
GT_API gt_status gt_sinogram_write_csv(const gt_sinogram* sinogram, const char* path);

GT_API void gt_geodesics_destroy(gt_geodesics* geodesics);
GT_API gt_status gt_geodesics_info(const gt_geodesics* geodesics, size_t* trace_count,
                                   size_t* failed_rays);
/* Time of flight of ray `ray_id` (0-based flat index); GT_ERR_NO_VALID_TRACE
 * if the ray has no trace. */
GT_API gt_status gt_geodesics_tof(const gt_geodesics* geodesics, size_t ray_id, double* out);
/* Fraction of traces passing within `radius` of (x, y). */
GT_API gt_status gt_geodesics_density(const gt_geodesics* geodesics, double x, double y,
                                      double radius, double* out);
/* ray_ids == NULL writes every trace. */
GT_API gt_status gt_geodesics_write_csv(const gt_geodesics* geodesics, const size_t* ray_ids,
                                        size_t count, const char* path);
/* Integrates f along the stored geodesics. */
GT_API gt_status gt_forward_linearized(const gt_field* f, const gt_geodesics* geodesics,
                                       int workers, gt_sinogram** out);

/* ---- backprojection -------------------------------------------------- */

typedef struct gt_backprojection {
  int directions;      /* N_theta */
  int unit_weight;     /* 0: Euclidean weight 1/sqrt(1 - s^2) */
  int fixed_tangent;   /* 0: bracket along the parallel family */
  int fade_to_zero;    /* interpolate to zero when no bracketing ray exists */
  double weight_floor; /* lower bound on 1 - s^2; 0 selects sin^2(pi/N_theta) */
} gt_backprojection;

GT_API void gt_backprojection_defaults(gt_backprojection* out);
GT_API gt_status gt_backproject_point(const gt_sinogram* omega, const gt_geodesics* geodesics,
                                      double x, double y, const gt_backprojection* config,
                                      double* out);
/* Evaluates at every node of the unit disk of a grid; other nodes are 0. */
GT_API gt_status gt_backproject_nodes(const gt_sinogram* omega, const gt_geodesics* geodesics,
                                      int half_resolution, const gt_backprojection* config,
                                      int workers, gt_field** out);

typedef struct gt_adjoint_setup {
  int sources;
  int ray_directions;
  gt_backprojection backprojection;
  gt_integrator integrator;
  uint64_t seed;
  int zero_omega;
  double support_radius;
  int workers;
} gt_adjoint_setup;

typedef struct gt_adjoint_report {
  double ray_pairing;
  double node_pairing;
  double norm_rf;
  double norm_omega;
  double discrepancy;
} gt_adjoint_report;

GT_API void gt_adjoint_setup_defaults(gt_adjoint_setup* out);
/* Dot-product test <R f, omega> vs <f, R^* omega> for the geodesics of n. */
GT_API gt_status gt_adjoint_test(const gt_field* n, const gt_adjoint_setup* setup,
                                 gt_adjoint_report* out);

/* ---- reconstruction -------------------------------------------------- */

typedef struct gt_recon_config {
  double alpha;
  double p;  /* 1 selects soft thresholding */
  double mu;
  int line_search;
  int max_halvings;
  int inner_steps;
  int outer_steps;
  gt_backprojection backprojection; /* directions 0 uses the source count */
  gt_integrator integrator;
  double max_failed_fraction;
  int workers;
} gt_recon_config;

typedef struct gt_iteration_record {
  int k;
  double alpha;
  double J;
  double data_term;
  double penalty_term;
  double wall_ms;
  size_t failed_rays;
} gt_iteration_record;

typedef void (*gt_iteration_callback)(const gt_iteration_record* record, void* user);

GT_API void gt_recon_defaults(gt_recon_config* out);
GT_API gt_status gt_tikhonov_value(const gt_field* f, const gt_geodesics* geodesics,
                                   const gt_sinogram* measured, double alpha, double p,
                                   double* J, double* data_term, double* penalty_term);
/* Runs the outer re-linearization loop from n0. callback may be NULL. */
GT_API gt_status gt_reconstruct(const gt_field* n0, const gt_sinogram* measured,
                                const gt_recon_config* config, gt_iteration_callback callback,
                                void* user, gt_recon_result** out);
GT_API void gt_recon_result_destroy(gt_recon_result* result);
/* Copies of n_{k*} and its geodesics. */
GT_API gt_status gt_recon_result_field(const gt_recon_result* result, gt_field** out);
GT_API gt_status gt_recon_result_geodesics(const gt_recon_result* result, gt_geodesics** out);
/* Writes up to `capacity` records; *count receives the full log length. */
GT_API gt_status gt_recon_result_log(const gt_recon_result* result, gt_iteration_record* records,
                                     size_t capacity, size_t* count, int* k_star);
GT_API gt_status gt_recon_result_write_log_csv(const gt_recon_result* result, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* GEOTOMO_GEOTOMO_H */
