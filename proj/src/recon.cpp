// SPDX-License-Identifier: Apache-2.0
#include "recon.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "csv.hpp"
#include "error.hpp"

namespace geotomo {

void ReconConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be positive");
  if (!(p >= 1.0) || !std::isfinite(p)) fail("p must be >= 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) fail("mu must be positive");
  if (inner_steps < 1) fail("inner_steps must be >= 1");
  if (outer_steps < 0) fail("outer_steps must be >= 0");
  if (max_halvings < 0) fail("max_halvings must be >= 0");
  if (backprojection.directions != 0 && backprojection.directions < 4)
    fail("backprojection directions must be 0 or >= 4");
  if (!(max_failed_fraction >= 0.0 && max_failed_fraction <= 1.0))
    fail("max_failed_fraction must lie in [0, 1]");
}

std::vector<std::uint8_t> data_mask(const GeodesicSet& geodesics, const Sinogram& u_meas) {
  if (!geodesics.rays || !u_meas.rays ||
      geodesics.rays->sources() != u_meas.rays->sources() ||
      geodesics.rays->directions() != u_meas.rays->directions())
    throw Error(ErrorCode::InvalidArgument, "geodesics and measurements use different ray sets");
  std::vector<std::uint8_t> mask(u_meas.size(), 0);
  for (std::size_t k = 0; k < mask.size(); ++k)
    mask[k] = geodesics.traces[k].has_value() && u_meas.valid[k] ? 1 : 0;
  return mask;
}

double deviation_power_sum(const ScalarField& f, double p) noexcept {
  double sum = 0.0;
  for (std::size_t k : f.spec().disk_nodes()) {
    const double d = std::abs(f.values()[k] - 1.0);
    sum += p == 2.0 ? d * d : p == 1.0 ? d : std::pow(d, p);
  }
  return sum;
}

namespace {

// Residual R f - u on the data mask, zero elsewhere, flagged valid on the mask.
Sinogram residual(const ScalarField& f, const GeodesicSet& geodesics, const Sinogram& u_meas,
                  const std::vector<std::uint8_t>& mask, int workers) {
  Sinogram r = forward_linearized(f, geodesics, workers);
  r.rays = u_meas.rays;
  r.kind = SinogramKind::Predicted;
  r.exit.clear();
  for (std::size_t k = 0; k < r.size(); ++k) {
    r.valid[k] = mask[k];
    r.tof[k] = mask[k] ? r.tof[k] - u_meas.tof[k] : 0.0;
  }
  return r;
}

double half_sum_squares(const Sinogram& r) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k)
    if (r.valid[k]) s += r.tof[k] * r.tof[k];
  return 0.5 * s;
}

bool all_zero(const Sinogram& r) noexcept {
  for (std::size_t k = 0; k < r.size(); ++k)
    if (r.valid[k] && r.tof[k] != 0.0) return false;
  return true;
}

BackprojectionConfig resolve(BackprojectionConfig bp, const GeodesicSet& g) {
  if (bp.directions == 0) bp.directions = g.rays->sources();
  return bp;
}

}  // namespace

TikhonovValue tikhonov_value(const ScalarField& f, const GeodesicSet& geodesics,
                             const Sinogram& u_meas, double alpha, double p, int workers) {
  const auto mask = data_mask(geodesics, u_meas);
  TikhonovValue v;
  v.data_term = half_sum_squares(residual(f, geodesics, u_meas, mask, workers));
  v.penalty_term = alpha / p * deviation_power_sum(f, p);
  v.J = v.data_term + v.penalty_term;
  return v;
}

double soft_threshold(double v, double lambda) noexcept {
  const double m = std::abs(v) - lambda;
  if (m <= 0.0) return 0.0;
  return v > 0.0 ? m : -m;
}

namespace {

// Applies `update(node, backprojected residual)` on disk nodes and pins the
// rest to 1. Returns nullopt if the result is not a positive field.
template <class Update>
std::optional<ScalarField> apply_update(const ScalarField& n, const ScalarField& grad,
                                        Update&& update) {
  const GridSpec& grid = n.spec();
  std::vector<double> out(grid.node_count(), 1.0);
  for (std::size_t k : grid.disk_nodes()) {
    const double v = update(k, grad.values()[k]);
    if (!(v > 0.0) || !std::isfinite(v)) return std::nullopt;
    out[k] = v;
  }
  return ScalarField(grid, std::move(out));
}

// Shared driver: fixed step, or halving until J does not increase.
template <class Candidate>
StepOutcome descend(const ScalarField& n, const GeodesicSet& geodesics, const Sinogram& u_meas,
                    double alpha, double p, double mu, bool line_search, int max_halvings,
                    int workers, Candidate&& candidate) {
  if (!line_search) {
    auto next = candidate(mu);
    if (!next)
      throw Error(ErrorCode::Positivity, "descent step produced a non-positive index field");
    return {std::move(*next), false, mu};
  }
  const double j0 = tikhonov_value(n, geodesics, u_meas, alpha, p, workers).J;
  double step = mu;
  for (int h = 0; h <= max_halvings; ++h, step *= 0.5) {
    auto next = candidate(step);
    if (next && tikhonov_value(*next, geodesics, u_meas, alpha, p, workers).J <= j0)
      return {std::move(*next), false, step};
  }
  return {n, true, 0.0};
}

StepOutcome landweber_impl(const ScalarField& n, const GeodesicSet& geodesics,
                           const Sinogram& u_meas, double alpha, double p, double mu,
                           const BackprojectionConfig& bp, bool line_search, int max_halvings,
                           int workers) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "landweber_step needs p > 1");
  const auto mask = data_mask(geodesics, u_meas);
  const Sinogram r = residual(n, geodesics, u_meas, mask, workers);
  // alpha ||n - 1||_p^{p-2} over disk nodes; a vanishing norm gives a zero gradient.
  const double norm_p = std::pow(deviation_power_sum(n, p), 1.0 / p);
  const double coeff = norm_p > 0.0 ? alpha * std::pow(norm_p, p - 2.0) : 0.0;
  if (all_zero(r) && coeff == 0.0) return {n, true, 0.0};
  const ScalarField rstar = backproject_nodes(r, geodesics, n.spec(), resolve(bp, geodesics), workers);
  auto candidate = [&](double step) {
    return apply_update(n, rstar, [&](std::size_t k, double g) {
      const double v = n.values()[k];
      return v - step * (g + coeff * (v - 1.0));
    });
  };
  return descend(n, geodesics, u_meas, alpha, p, mu, line_search, max_halvings, workers,
                 candidate);
}

StepOutcome soft_impl(const ScalarField& n, const GeodesicSet& geodesics, const Sinogram& u_meas,
                      double alpha, double mu, const BackprojectionConfig& bp, bool line_search,
                      int max_halvings, int workers) {
  const auto mask = data_mask(geodesics, u_meas);
  const Sinogram r = residual(n, geodesics, u_meas, mask, workers);
  const ScalarField rstar = backproject_nodes(r, geodesics, n.spec(), resolve(bp, geodesics), workers);
  auto candidate = [&](double step) {
    return apply_update(n, rstar, [&](std::size_t k, double g) {
      return 1.0 + soft_threshold(n.values()[k] - step * g - 1.0, step * alpha);
    });
  };
  return descend(n, geodesics, u_meas, alpha, 1.0, mu, line_search, max_halvings, workers,
                 candidate);
}

}  // namespace

StepOutcome landweber_step(const ScalarField& n, const GeodesicSet& geodesics,
                           const Sinogram& u_meas, double alpha, double p, double mu,
                           const BackprojectionConfig& bp, int workers) {
  return landweber_impl(n, geodesics, u_meas, alpha, p, mu, bp, false, 0, workers);
}

StepOutcome soft_threshold_step(const ScalarField& n, const GeodesicSet& geodesics,
                                const Sinogram& u_meas, double alpha, double mu,
                                const BackprojectionConfig& bp, int workers) {
  return soft_impl(n, geodesics, u_meas, alpha, mu, bp, false, 0, workers);
}

int select_stopping_index(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "empty iteration log");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] < values[best]) best = k;
  return static_cast<int>(best);
}

int select_stopping_index(const IterationLog& log) {
  std::vector<double> j;
  j.reserve(log.records.size());
  for (const auto& r : log.records) j.push_back(r.value.J);
  return select_stopping_index(j);
}

ReconResult outer_loop(const ScalarField& n0, const Sinogram& u_meas, const ReconConfig& cfg,
                       const IterationObserver& observer) {
  cfg.validate();
  if (!u_meas.rays) throw Error(ErrorCode::InvalidArgument, "measurement has no ray set");
  using clock = std::chrono::steady_clock;

  ScalarField n = n0;
  std::optional<ReconResult> best;
  double best_j = 0.0;
  IterationLog log;
  const std::size_t inward = u_meas.rays->inward_count();

  for (int k = 0; k <= cfg.outer_steps; ++k) {
    const auto t0 = clock::now();
    ForwardResult fwd = forward_nonlinear(n, u_meas.rays, cfg.integrator, cfg.workers);
    GeodesicSet& g = fwd.geodesics;
    if (static_cast<double>(g.failed_rays) > cfg.max_failed_fraction * static_cast<double>(inward))
      throw Error(ErrorCode::TooManyInvalidRays,
                  "iteration " + std::to_string(k) + ": " + std::to_string(g.failed_rays) +
                      " of " + std::to_string(inward) + " rays failed to integrate");

    const double alpha = cfg.alpha_at(k);
    IterationRecord rec;
    rec.k = k;
    rec.alpha = alpha;
    rec.failed_rays = g.failed_rays;
    rec.value = tikhonov_value(n, g, u_meas, alpha, cfg.p, cfg.workers);

    const bool improved = !best || rec.value.J < best_j;
    ScalarField current = n;
    if (k < cfg.outer_steps) {
      for (int l = 0; l < cfg.inner_steps; ++l) {
        StepOutcome step =
            cfg.p > 1.0
                ? landweber_impl(n, g, u_meas, alpha, cfg.p, cfg.mu, cfg.backprojection,
                                 cfg.line_search, cfg.max_halvings, cfg.workers)
                : soft_impl(n, g, u_meas, alpha, cfg.mu, cfg.backprojection, cfg.line_search,
                            cfg.max_halvings, cfg.workers);
        n = std::move(step.field);
        if (step.stopped) break;
      }
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    log.records.push_back(rec);
    if (improved) {
      if (!best) best.emplace(ReconResult{current, std::move(g), {}});
      else {
        best->field = std::move(current);
        best->geodesics = std::move(g);
      }
      best_j = rec.value.J;
    }
    if (observer) observer(rec);
  }
  log.k_star = select_stopping_index(log);
  best->log = std::move(log);
  return std::move(*best);
}

void write_iteration_log_csv(const IterationLog& log, std::ostream& out) {
  out << "k,J,data_term,penalty_term,wall_ms\n";
  for (const auto& r : log.records)
    out << r.k << ',' << csv::format_double(r.value.J) << ','
        << csv::format_double(r.value.data_term) << ','
        << csv::format_double(r.value.penalty_term) << ',' << csv::format_double(r.wall_ms)
        << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing iteration log");
}

void write_iteration_log_csv(const IterationLog& log, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  write_iteration_log_csv(log, out);
}

IterationLog read_iteration_log_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::trim_eol(line) != "k,J,data_term,penalty_term,wall_ms")
    throw Error(ErrorCode::Format, "iteration log: bad header");
  IterationLog log;
  while (std::getline(in, line)) {
    const auto body = csv::trim_eol(line);
    if (body.empty()) continue;
    const auto f = csv::split(body);
    if (f.size() != 5) throw Error(ErrorCode::Format, "iteration log: expected 5 fields");
    IterationRecord r;
    r.k = static_cast<int>(csv::parse_int(f[0], "k"));
    if (r.k != static_cast<int>(log.records.size()))
      throw Error(ErrorCode::Format, "iteration log: k out of sequence");
    r.value.J = csv::parse_double(f[1], "J");
    r.value.data_term = csv::parse_double(f[2], "data_term");
    r.value.penalty_term = csv::parse_double(f[3], "penalty_term");
    r.wall_ms = csv::parse_double(f[4], "wall_ms");
    log.records.push_back(r);
  }
  if (!log.records.empty()) log.k_star = select_stopping_index(log);
  return log;
}

}  // namespace geotomo
