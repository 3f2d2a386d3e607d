// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "adjoint.hpp"
#include "field.hpp"
#include "geodesic.hpp"
#include "transform.hpp"

namespace geotomo {

struct ReconConfig {
  double alpha = 0.9;
  /// Optional per-iteration weight alpha_k; overrides `alpha` when set.
  std::function<double(int)> alpha_schedule;
  double p = 2.0;  // p == 1 selects soft thresholding
  double mu = 0.01;
  /// Halve mu until the frozen-geodesic functional does not increase.
  bool line_search = false;
  int max_halvings = 20;
  int inner_steps = 1;
  int outer_steps = 50;
  /// N_theta 0 uses the number of sources. The weight floor defaults to the
  /// resolution-based bound: boundary nodes otherwise pick up weights near
  /// 1000 from tangent directions, which destabilizes re-linearization.
  BackprojectionConfig backprojection{0, WeightMode::Euclidean, BracketMode::ParallelFamily, true, 0.0};
  IntegratorControl integrator;
  /// Abort when more than this fraction of inward rays fails to integrate.
  double max_failed_fraction = 0.5;
  int workers = 0;

  double alpha_at(int k) const { return alpha_schedule ? alpha_schedule(k) : alpha; }
  /// Throws Error(InvalidArgument) on out-of-range values.
  void validate() const;
};

struct TikhonovValue {
  double J = 0.0;
  double data_term = 0.0;     // 1/2 sum over rays of (R f - u)^2
  double penalty_term = 0.0;  // alpha/p sum over disk nodes of |f - 1|^p
};

/// Rays used by the data term: a frozen geodesic exists and the measurement
/// is valid.
std::vector<std::uint8_t> data_mask(const GeodesicSet& geodesics, const Sinogram& u_meas);

/// Sum over disk nodes of |f - 1|^p.
double deviation_power_sum(const ScalarField& f, double p) noexcept;

TikhonovValue tikhonov_value(const ScalarField& f, const GeodesicSet& geodesics,
                             const Sinogram& u_meas, double alpha, double p, int workers = 0);

/// Shrinkage S_lambda(v) = sign(v) max(|v| - lambda, 0).
double soft_threshold(double v, double lambda) noexcept;

struct StepOutcome {
  ScalarField field;
  /// The whole gradient vanished exactly (zero residual and no penalty pull),
  /// or a line search found no admissible step; `field` is the unchanged input.
  bool stopped = false;
  double mu_used = 0.0;
};

/// One steepest-descent step for p > 1 on the functional linearized at the
/// frozen geodesics: n - mu (R^*(R n - u) + alpha ||n-1||_p^{p-2} (n-1)).
StepOutcome landweber_step(const ScalarField& n, const GeodesicSet& geodesics,
                           const Sinogram& u_meas, double alpha, double p, double mu,
                           const BackprojectionConfig& bp, int workers = 0);

/// Gradient step on the data term followed by shrinkage of n - 1 by mu alpha.
StepOutcome soft_threshold_step(const ScalarField& n, const GeodesicSet& geodesics,
                                const Sinogram& u_meas, double alpha, double mu,
                                const BackprojectionConfig& bp, int workers = 0);

struct IterationRecord {
  int k = 0;
  double alpha = 0.0;
  TikhonovValue value;
  double wall_ms = 0.0;
  std::size_t failed_rays = 0;
};

struct IterationLog {
  std::vector<IterationRecord> records;
  int k_star = 0;
};

/// Argmin of the recorded J values; ties go to the smallest k. Throws
/// Error(InvalidArgument) for an empty sequence.
int select_stopping_index(std::span<const double> values);
int select_stopping_index(const IterationLog& log);

struct ReconResult {
  ScalarField field;       // n_{k*}
  GeodesicSet geodesics;   // geodesics of n_{k*}
  IterationLog log;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Adaptive re-linearization: for k = 0..outer_steps freeze the geodesics of
/// n_k, log J at n_k, then take inner_steps descent steps. Returns the logged
/// iterate with the smallest J.
ReconResult outer_loop(const ScalarField& n0, const Sinogram& u_meas, const ReconConfig& cfg,
                       const IterationObserver& observer = {});

// Log CSV: header "k,J,data_term,penalty_term,wall_ms".
void write_iteration_log_csv(const IterationLog& log, std::ostream& out);
void write_iteration_log_csv(const IterationLog& log, const std::filesystem::path& path);
IterationLog read_iteration_log_csv(std::istream& in);

}  // namespace geotomo
