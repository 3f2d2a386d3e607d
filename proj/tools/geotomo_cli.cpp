// SPDX-License-Identifier: Apache-2.0
//
// geotomo command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 ok, 1 usage or input error, 2 numeric failure, 3 tolerance breach.

#include <geotomo/geotomo.h>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitTolerance = 3;

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_for(gt_status s) {
  switch (s) {
    case GT_ERR_INVALID_ARGUMENT:
    case GT_ERR_IO:
    case GT_ERR_FORMAT: return kExitUsage;
    default: return kExitNumeric;
  }
}

void check(gt_status s, const std::string& context) {
  if (s == GT_OK) return;
  throw Failure{exit_code_for(s), context + ": " + gt_status_string(s) + ": " + gt_last_error()};
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using Field = std::unique_ptr<gt_field, Deleter<gt_field, gt_field_destroy>>;
using Sino = std::unique_ptr<gt_sinogram, Deleter<gt_sinogram, gt_sinogram_destroy>>;
using Geo = std::unique_ptr<gt_geodesics, Deleter<gt_geodesics, gt_geodesics_destroy>>;
using Result = std::unique_ptr<gt_recon_result, Deleter<gt_recon_result, gt_recon_result_destroy>>;

Field read_field(const std::string& path, bool is_speed) {
  gt_field* raw = nullptr;
  check(gt_field_read_csv(path.c_str(), 1, &raw), "reading " + path);
  Field f(raw);
  if (!is_speed) return f;
  gt_field* inv = nullptr;
  check(gt_field_reciprocal(f.get(), &inv), "inverting " + path);
  return Field(inv);
}

Sino read_sino(const std::string& path) {
  gt_sinogram* raw = nullptr;
  check(gt_sinogram_read_csv(path.c_str(), &raw), "reading " + path);
  return Sino(raw);
}

std::vector<double> field_values(const gt_field* f) {
  size_t count = 0;
  check(gt_field_info(f, nullptr, &count), "field info");
  std::vector<double> v(count);
  check(gt_field_values(f, v.data(), count), "field values");
  return v;
}

// Resolved configuration of a subcommand, every default materialized. The
// file is itself a valid --config input for the same command.
void write_manifest(const CLI::App& cmd, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Failure{kExitUsage, "cannot write manifest " + path};
  out << "# geotomo " << gt_version() << " run manifest\n";
  out << "# command = " << cmd.get_name() << "\n";
  out << "# rerun with: geotomo " << cmd.get_name() << " --config " << path << "\n";
  out << "[" << cmd.get_name() << "]\n";
  out << cmd.config_to_str(true, false);
  if (!out) throw Failure{kExitUsage, "cannot write manifest " + path};
}

std::string manifest_path(const std::string& explicit_path, const std::string& primary_output) {
  if (!explicit_path.empty()) return explicit_path;
  if (primary_output.empty()) return {};
  return primary_output + ".manifest";
}

// Adds an option whose current value is recorded as its default. Floating
// point defaults keep full precision so manifests reproduce runs exactly.
template <class T>
CLI::Option* add_defaulted(CLI::App* app, const std::string& name, T& value,
                           const std::string& help) {
  CLI::Option* opt = app->add_option(name, value, help);
  if constexpr (std::is_floating_point_v<T>) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(value));
    opt->default_str(buf);
  } else {
    opt->capture_default_str();
  }
  return opt;
}

struct IntegratorOpts {
  gt_integrator value{};
  IntegratorOpts() { gt_integrator_defaults(&value); }
  void add(CLI::App* app) {
    add_defaulted(app, "--safety", value.safety, "step-size safety factor");
    add_defaulted(app, "--initial-step", value.initial_step, "initial step size");
    add_defaulted(app, "--ode-tolerance", value.tolerance, "local error tolerance of the integrator");
    add_defaulted(app, "--max-steps", value.max_steps, "step budget per ray");
  }
};

struct BackprojectionOpts {
  gt_backprojection value{};
  bool unit_weight = false;
  bool fixed_tangent = false;
  bool no_fade = false;
  explicit BackprojectionOpts(const gt_backprojection& defaults) : value(defaults) {}
  void add(CLI::App* app, const std::string& directions_help) {
    add_defaulted(app, "--directions", value.directions, directions_help);
    add_defaulted(app, "--weight-floor", value.weight_floor,
                    "lower bound on 1 - s^2 in the weight; 0 = sin^2(pi/N_theta)");
    app->add_flag("--unit-weight", unit_weight, "use weight 1 instead of 1/sqrt(1-s^2)");
    app->add_flag("--fixed-tangent", fixed_tangent,
                  "bracket with the tangent index held fixed");
    app->add_flag("--no-fade", no_fade, "keep the nearest value when no bracket exists");
  }
  gt_backprojection resolved() const {
    gt_backprojection b = value;
    b.unit_weight = unit_weight ? 1 : 0;
    b.fixed_tangent = fixed_tangent ? 1 : 0;
    b.fade_to_zero = no_fade ? 0 : 1;
    return b;
  }
};

void print_stats(const char* label, const gt_field* f) {
  const auto v = field_values(f);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  std::printf("%s: min %.6f max %.6f\n", label, *lo, *hi);
}

// ---- phantom ---------------------------------------------------------------

struct PhantomCmd {
  std::string variant = "peaks";
  std::string profile = "normalized";
  int q = 10;
  gt_phantom_params params{};
  std::string out_index;
  std::string out_speed;
  std::string manifest;

  PhantomCmd() { gt_phantom_defaults(GT_PHANTOM_PEAKS, &params); }

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("phantom", "sample a sound-speed phantom on the grid");
    add_defaulted(c, "variant", variant, "peaks | curvature | ring")
        ->check(CLI::IsMember({"peaks", "curvature", "ring"}));
    add_defaulted(c, "--Q", q, "grid half resolution (h = 1/Q)");
    add_defaulted(c, "--profile", profile, "bump profile: normalized | literal")
        ->check(CLI::IsMember({"normalized", "literal"}));
    for (int b = 0; b < 3; ++b) {
      const std::string k = std::to_string(b + 1);
      add_defaulted(c, "--q" + k + "x", params.bump_x[b], "bump " + k + " center x");
      add_defaulted(c, "--q" + k + "y", params.bump_y[b], "bump " + k + " center y");
      add_defaulted(c, "--r" + k, params.bump_radius[b], "bump " + k + " radius");
      add_defaulted(c, "--theta" + k, params.bump_amplitude[b], "bump " + k + " amplitude");
    }
    add_defaulted(c, "--d", params.curvature_d, "curvature phantom d");
    add_defaulted(c, "--R", params.curvature_R, "curvature phantom R");
    add_defaulted(c, "--ring-amplitude", params.ring_amplitude, "ring amplitude");
    add_defaulted(c, "--ring-radius", params.ring_radius, "ring width parameter");
    add_defaulted(c, "--out-index", out_index, "output refractive index n (Field CSV)");
    add_defaulted(c, "--out-speed", out_speed, "output sound speed c (Field CSV)");
    add_defaulted(c, "--manifest", manifest, "run manifest path");
    c->callback([this, c] { run(*c); });
  }

  void run(const CLI::App& cmd) {
    if (out_index.empty() && out_speed.empty())
      throw Failure{kExitUsage, "phantom: give --out-index and/or --out-speed"};
    write_manifest(cmd, manifest_path(manifest, out_index.empty() ? out_speed : out_index));
    params.kind = variant == "peaks"       ? GT_PHANTOM_PEAKS
                  : variant == "curvature" ? GT_PHANTOM_CURVATURE
                                           : GT_PHANTOM_RING_PEAKS;
    params.bump_count = params.kind == GT_PHANTOM_CURVATURE ? 0 : 3;
    params.literal_profile = profile == "literal" ? 1 : 0;
    // Invalid phantom parameters are an input error, whatever the cause.
    if (gt_phantom_check(&params) != GT_OK)
      throw Failure{kExitUsage, std::string("phantom: ") + gt_last_error()};

    gt_field* raw = nullptr;
    check(gt_phantom_sample(&params, q, 0, &raw), "phantom");
    Field c(raw);
    check(gt_phantom_sample(&params, q, 1, &raw), "phantom");
    Field n(raw);
    print_stats("c", c.get());
    print_stats("n", n.get());
    if (!out_speed.empty()) check(gt_field_write_csv(c.get(), out_speed.c_str()), "writing c");
    if (!out_index.empty()) check(gt_field_write_csv(n.get(), out_index.c_str()), "writing n");
  }
};

// ---- simulate --------------------------------------------------------------

struct SimulateCmd {
  std::string field;
  bool field_is_speed = false;
  int nx = 40;
  int nxi = 40;
  double noise = 0.0;
  std::uint64_t seed = 1;
  int workers = 0;
  IntegratorOpts integrator;
  std::string out;
  std::string traces;
  std::string manifest;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("simulate", "trace all rays through a field and record TOFs");
    c->add_option("--field", field, "refractive index n (Field CSV)")->required();
    c->add_flag("--field-is-speed", field_is_speed, "the field holds c = 1/n");
    add_defaulted(c, "--nx", nx, "number of sources N_x");
    add_defaulted(c, "--nxi", nxi, "directions per source N_xi");
    add_defaulted(c, "--noise", noise, "relative l2 noise level");
    add_defaulted(c, "--seed", seed, "noise seed");
    add_defaulted(c, "--workers", workers, "worker threads (0 = all cores)");
    integrator.add(c);
    c->add_option("--out", out, "output Sinogram CSV")->required();
    add_defaulted(c, "--traces", traces, "optional Trace CSV of every geodesic");
    add_defaulted(c, "--manifest", manifest, "run manifest path");
    c->callback([this, c] { run(*c); });
  }

  void run(const CLI::App& cmd) {
    write_manifest(cmd, manifest_path(manifest, out));
    Field n = read_field(field, field_is_speed);
    gt_sinogram* s = nullptr;
    gt_geodesics* g = nullptr;
    check(gt_simulate(n.get(), nx, nxi, &integrator.value, workers, &s, &g), "simulate");
    Sino sino(s);
    Geo geo(g);
    size_t traced = 0, failed = 0, valid = 0;
    check(gt_geodesics_info(geo.get(), &traced, &failed), "geodesics");
    if (noise != 0.0) {
      gt_sinogram* noisy = nullptr;
      check(gt_sinogram_add_noise(sino.get(), noise, seed, &noisy), "noise");
      sino.reset(noisy);
    }
    check(gt_sinogram_info(sino.get(), nullptr, nullptr, &valid), "sinogram");
    std::printf("rays %d, valid %zu, failed %zu, noise %.6g\n", nx * nxi, valid, failed, noise);
    check(gt_sinogram_write_csv(sino.get(), out.c_str()), "writing " + out);
    if (!traces.empty())
      check(gt_geodesics_write_csv(geo.get(), nullptr, 0, traces.c_str()), "writing " + traces);
  }
};

// ---- reconstruct -----------------------------------------------------------

struct ReconstructCmd {
  std::string sino;
  std::string initial;
  int q = 10;
  gt_recon_config cfg{};
  bool line_search = false;
  std::uint64_t seed = 1;
  IntegratorOpts integrator;
  std::unique_ptr<BackprojectionOpts> bp;
  std::string out_index;
  std::string out_speed;
  std::string log;
  std::string traces;
  std::string manifest;
  bool quiet = false;

  ReconstructCmd() {
    gt_recon_defaults(&cfg);
    bp = std::make_unique<BackprojectionOpts>(cfg.backprojection);
  }

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("reconstruct", "adaptive Tikhonov reconstruction from TOF data");
    c->add_option("--sino", sino, "measured Sinogram CSV")->required();
    add_defaulted(c, "--initial", initial, "initial guess n0 (Field CSV); default n0 = 1");
    add_defaulted(c, "--Q", q, "grid half resolution when n0 = 1");
    add_defaulted(c, "--alpha", cfg.alpha, "regularization weight");
    add_defaulted(c, "--p", cfg.p, "penalty exponent (1 = soft thresholding)");
    add_defaulted(c, "--mu", cfg.mu, "descent step size");
    add_defaulted(c, "--inner-steps", cfg.inner_steps, "descent steps per linearization");
    add_defaulted(c, "--outer-steps", cfg.outer_steps, "number of re-linearizations");
    c->add_flag("--line-search", line_search, "halve mu until the functional decreases");
    add_defaulted(c, "--max-halvings", cfg.max_halvings, "line-search halvings");
    add_defaulted(c, "--max-failed-fraction", cfg.max_failed_fraction,
                  "abort when more inward rays fail");
    add_defaulted(c, "--seed", seed, "recorded for provenance");
    add_defaulted(c, "--workers", cfg.workers, "worker threads (0 = all cores)");
    integrator.add(c);
    bp->add(c, "N_theta (0 = number of sources)");
    c->add_option("--out-index", out_index, "reconstructed n (Field CSV)")->required();
    add_defaulted(c, "--out-speed", out_speed, "reconstructed c = 1/n (Field CSV)");
    add_defaulted(c, "--log", log, "iteration log CSV");
    add_defaulted(c, "--traces", traces, "Trace CSV of the selected geodesic set");
    add_defaulted(c, "--manifest", manifest, "run manifest path");
    c->add_flag("--quiet", quiet, "suppress per-iteration output");
    c->callback([this, c] { run(*c); });
  }

  static void report(const gt_iteration_record* r, void*) {
    std::printf("k %4d  J %.10g  data %.10g  penalty %.10g  %.0f ms\n", r->k, r->J, r->data_term,
                r->penalty_term, r->wall_ms);
    std::fflush(stdout);
  }

  void run(const CLI::App& cmd) {
    write_manifest(cmd, manifest_path(manifest, out_index));
    Sino u = read_sino(sino);
    Field n0;
    if (initial.empty()) {
      gt_field* raw = nullptr;
      check(gt_field_constant(q, 1.0, &raw), "initial guess");
      n0.reset(raw);
    } else {
      n0 = read_field(initial, false);
    }
    cfg.line_search = line_search ? 1 : 0;
    cfg.backprojection = bp->resolved();
    cfg.integrator = integrator.value;
    gt_recon_result* raw = nullptr;
    check(gt_reconstruct(n0.get(), u.get(), &cfg, quiet ? nullptr : &report, nullptr, &raw),
          "reconstruct");
    Result result(raw);
    int k_star = 0;
    size_t count = 0;
    check(gt_recon_result_log(result.get(), nullptr, 0, &count, &k_star), "log");
    std::printf("k* = %d of %zu logged iterations\n", k_star, count);

    gt_field* f = nullptr;
    check(gt_recon_result_field(result.get(), &f), "result");
    Field n(f);
    check(gt_field_write_csv(n.get(), out_index.c_str()), "writing " + out_index);
    if (!out_speed.empty()) {
      check(gt_field_reciprocal(n.get(), &f), "reciprocal");
      Field c(f);
      check(gt_field_write_csv(c.get(), out_speed.c_str()), "writing " + out_speed);
    }
    if (!log.empty())
      check(gt_recon_result_write_log_csv(result.get(), log.c_str()), "writing " + log);
    if (!traces.empty()) {
      gt_geodesics* g = nullptr;
      check(gt_recon_result_geodesics(result.get(), &g), "geodesics");
      Geo geo(g);
      check(gt_geodesics_write_csv(geo.get(), nullptr, 0, traces.c_str()), "writing " + traces);
    }
  }
};

// ---- backproject -----------------------------------------------------------

struct BackprojectCmd {
  std::string sino;
  std::string field;
  int q = 10;
  int workers = 0;
  IntegratorOpts integrator;
  std::unique_ptr<BackprojectionOpts> bp;
  std::string out;
  std::string manifest;

  BackprojectCmd() {
    gt_backprojection d;
    gt_backprojection_defaults(&d);
    bp = std::make_unique<BackprojectionOpts>(d);
  }

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("backproject", "apply the approximate adjoint to ray data");
    c->add_option("--sino", sino, "ray data omega (Sinogram CSV)")->required();
    add_defaulted(c, "--field", field, "generator field n of the geodesics; default n = 1");
    add_defaulted(c, "--Q", q, "grid half resolution when n = 1");
    add_defaulted(c, "--workers", workers, "worker threads (0 = all cores)");
    integrator.add(c);
    bp->add(c, "N_theta");
    c->add_option("--out", out, "output Field CSV")->required();
    add_defaulted(c, "--manifest", manifest, "run manifest path");
    c->callback([this, c] { run(*c); });
  }

  void run(const CLI::App& cmd) {
    write_manifest(cmd, manifest_path(manifest, out));
    Sino omega = read_sino(sino);
    Field n;
    if (field.empty()) {
      gt_field* raw = nullptr;
      check(gt_field_constant(q, 1.0, &raw), "field");
      n.reset(raw);
    } else {
      n = read_field(field, false);
    }
    int nx = 0, nxi = 0, half = 0;
    check(gt_sinogram_info(omega.get(), &nx, &nxi, nullptr), "sinogram");
    check(gt_field_info(n.get(), &half, nullptr), "field");
    gt_geodesics* g = nullptr;
    check(gt_simulate(n.get(), nx, nxi, &integrator.value, workers, nullptr, &g), "geodesics");
    Geo geo(g);
    const gt_backprojection cfg = bp->resolved();
    gt_field* raw = nullptr;
    check(gt_backproject_nodes(omega.get(), geo.get(), half, &cfg, workers, &raw),
          "backproject");
    Field result(raw);
    double at0 = 0.0;
    check(gt_backproject_point(omega.get(), geo.get(), 0.0, 0.0, &cfg, &at0), "backproject");
    std::printf("backprojection at origin: %.12g\n", at0);
    print_stats("backprojection", result.get());
    check(gt_field_write_csv(result.get(), out.c_str()), "writing " + out);
  }
};

// ---- adjoint-test ----------------------------------------------------------

struct AdjointCmd {
  std::string field;
  int q = 10;
  int n = 60;
  int seeds = 30;
  std::uint64_t seed = 1;
  double tolerance = 0.05;
  bool no_refine = false;
  bool zero_omega = false;
  double support_radius = 0.8;
  int workers = 0;
  IntegratorOpts integrator;
  std::unique_ptr<BackprojectionOpts> bp;
  std::string manifest;

  AdjointCmd() {
    gt_backprojection d;
    gt_backprojection_defaults(&d);
    bp = std::make_unique<BackprojectionOpts>(d);
  }

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("adjoint-test", "dot-product test of the ray transform pair");
    add_defaulted(c, "--field", field, "generator field n; default n = 1");
    add_defaulted(c, "--Q", q, "grid half resolution when n = 1");
    add_defaulted(c, "--N", n, "N_x = N_xi = N_theta");
    add_defaulted(c, "--seeds", seeds, "number of consecutive seeds averaged");
    add_defaulted(c, "--seed", seed, "first seed");
    add_defaulted(c, "--tolerance", tolerance, "maximum relative discrepancy");
    c->add_flag("--no-refine", no_refine, "skip the run with doubled N");
    c->add_flag("--zero-omega", zero_omega, "use omega = 0");
    add_defaulted(c, "--support-radius", support_radius, "f vanishes beyond this radius");
    add_defaulted(c, "--workers", workers, "worker threads (0 = all cores)");
    integrator.add(c);
    bp->add(c, "ignored; N_theta follows --N");
    add_defaulted(c, "--manifest", manifest, "run manifest path");
    c->callback([this, c] { run(*c); });
  }

  double mean_discrepancy(const gt_field* f, int count) {
    gt_adjoint_setup s;
    gt_adjoint_setup_defaults(&s);
    s.sources = s.ray_directions = count;
    s.backprojection = bp->resolved();
    s.backprojection.directions = count;
    s.integrator = integrator.value;
    s.zero_omega = zero_omega ? 1 : 0;
    s.support_radius = support_radius;
    s.workers = workers;
    double sum = 0.0;
    for (int k = 0; k < seeds; ++k) {
      s.seed = seed + static_cast<std::uint64_t>(k);
      gt_adjoint_report r;
      check(gt_adjoint_test(f, &s, &r), "adjoint test");
      std::printf("N %d seed %llu: <Rf,w> %.12g  <f,R*w> %.12g  discrepancy %.6g\n", count,
                  static_cast<unsigned long long>(s.seed), r.ray_pairing, r.node_pairing,
                  r.discrepancy);
      sum += r.discrepancy;
    }
    return sum / seeds;
  }

  void run(const CLI::App& cmd) {
    if (seeds < 1) throw Failure{kExitUsage, "adjoint-test: --seeds must be >= 1"};
    write_manifest(cmd, manifest);
    Field f;
    if (field.empty()) {
      gt_field* raw = nullptr;
      check(gt_field_constant(q, 1.0, &raw), "field");
      f.reset(raw);
    } else {
      f = read_field(field, false);
    }
    const double d1 = mean_discrepancy(f.get(), n);
    std::printf("mean discrepancy at N = %d: %.6g (tolerance %.6g)\n", n, d1, tolerance);
    bool ok = d1 <= tolerance;
    if (!no_refine) {
      const double d2 = mean_discrepancy(f.get(), 2 * n);
      const bool trend = d2 <= d1;
      std::printf("mean discrepancy at N = %d: %.6g (%s)\n", 2 * n, d2,
                  trend ? "non-increasing" : "INCREASED");
      ok = ok && trend;
    }
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    if (!ok) throw Failure{kExitTolerance, "adjoint-test: tolerance breached"};
  }
};

// ---- geodesics -------------------------------------------------------------

struct GeodesicsCmd {
  std::string field;
  bool field_is_speed = false;
  int nx = 40;
  int nxi = 40;
  std::vector<std::size_t> rays;
  double probe_x = 0.0;
  double probe_y = 0.0;
  double probe_radius = 0.15;
  int workers = 0;
  IntegratorOpts integrator;
  std::string out;
  std::string manifest;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("geodesics", "dump geodesic traces of a field");
    c->add_option("--field", field, "refractive index n (Field CSV)")->required();
    c->add_flag("--field-is-speed", field_is_speed, "the field holds c = 1/n");
    add_defaulted(c, "--nx", nx, "number of sources N_x");
    add_defaulted(c, "--nxi", nxi, "directions per source N_xi");
    c->add_option("--rays", rays, "0-based ray ids to dump (default: all traced rays)")
        ->delimiter(',');
    add_defaulted(c, "--probe-x", probe_x, "density probe center x");
    add_defaulted(c, "--probe-y", probe_y, "density probe center y");
    add_defaulted(c, "--probe-radius", probe_radius, "density probe radius");
    add_defaulted(c, "--workers", workers, "worker threads (0 = all cores)");
    integrator.add(c);
    c->add_option("--out", out, "output Trace CSV")->required();
    add_defaulted(c, "--manifest", manifest, "run manifest path");
    c->callback([this, c] { run(*c); });
  }

  void run(const CLI::App& cmd) {
    write_manifest(cmd, manifest_path(manifest, out));
    Field n = read_field(field, field_is_speed);
    gt_geodesics* g = nullptr;
    check(gt_simulate(n.get(), nx, nxi, &integrator.value, workers, nullptr, &g), "geodesics");
    Geo geo(g);
    double frac = 0.0;
    check(gt_geodesics_density(geo.get(), probe_x, probe_y, probe_radius, &frac), "density");
    size_t traced = 0, failed = 0;
    check(gt_geodesics_info(geo.get(), &traced, &failed), "geodesics");
    std::printf("traces %zu, failed %zu, fraction within %.4g of (%.4g, %.4g): %.6f\n", traced,
                failed, probe_radius, probe_x, probe_y, frac);
    check(gt_geodesics_write_csv(geo.get(), rays.empty() ? nullptr : rays.data(), rays.size(),
                                 out.c_str()),
          "writing " + out);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geotomo: travel-time tomography with geodesic ray transforms"};
  app.set_version_flag("--version", std::string(gt_version()));
  app.require_subcommand(1);
  // Config keys belong to a [command] section; the flag may follow the command.
  app.set_config("--config", "", "key = value configuration file, e.g. a run manifest");
  app.fallthrough();

  PhantomCmd phantom;
  SimulateCmd simulate;
  ReconstructCmd reconstruct;
  BackprojectCmd backproject;
  AdjointCmd adjoint;
  GeodesicsCmd geodesics;
  phantom.add(app);
  simulate.add(app);
  reconstruct.add(app);
  backproject.add(app);
  adjoint.add(app);
  geodesics.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
