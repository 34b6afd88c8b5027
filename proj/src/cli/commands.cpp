#include "herm/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <limits>

#include "CLI11.hpp"
#include "herm/bundle.hpp"
#include "herm/cli/field_io.hpp"
#include "herm/curvature.hpp"
#include "herm/errors.hpp"
#include "herm/laplace.hpp"
#include "herm/trig.hpp"

namespace herm::cli {
namespace {

using json = nlohmann::json;

class Context {
 public:
  Context(const RunConfig& cfg, Report& report) : cfg_(cfg), report_(report) {}

  template <class Fn>
  auto timed(const std::string& stage, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = fn();
    report_.timings[stage] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  }

  void emit(const std::string& name, const ScalarField& field) {
    if (!cfg_.output.emit_fields) return;
    std::error_code ec;
    std::filesystem::create_directories(cfg_.output.dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg_.output.dir + "'");
    const std::string file = name + "." + to_string(cfg_.output.format);
    write_field(field, (std::filesystem::path(cfg_.output.dir) / file).string(), cfg_.output.format);
    report_.fields.push_back(file);
    for (int axis : cfg_.output.slice_axes) {
      const TorusGrid& g = field.grid();
      const std::string an = (axis < g.n() ? "x" : "y") + std::to_string(axis % g.n() + 1);
      const std::string sfile = name + "_slice_" + an + ".csv";
      write_slice_csv(field, axis, (std::filesystem::path(cfg_.output.dir) / sfile).string());
      report_.fields.push_back(sfile);
    }
  }

 private:
  const RunConfig& cfg_;
  Report& report_;
};

Report start(const RunConfig& cfg) {
  Report r;
  r.command = cfg.command;
  r.digest = config_digest(cfg);
  return r;
}

TorusGrid grid_of(const RunConfig& cfg) { return make_grid(cfg.n, cfg.N); }

MetricField metric_of(const RunConfig& cfg, Context& ctx) {
  const TorusGrid g = grid_of(cfg);
  return ctx.timed("metric", [&] { return build_metric(cfg.metric, g); });
}

GauduchonOptions gauduchon_options(const RunConfig& cfg, bool spectrum) {
  GauduchonOptions o;
  o.tol = cfg.tol.gauduchon;
  o.estimate_spectrum = spectrum;
  return o;
}

PoissonOptions poisson_options(const RunConfig& cfg) {
  PoissonOptions o;
  o.tol = cfg.tol.poisson;
  return o;
}

double relative(double diff, double scale) { return scale > 0.0 ? diff / scale : diff; }

// Positive-definite random conformal factor of moderate size.
ScalarField random_factor(const TorusGrid& g, std::uint64_t seed) {
  return random_trig_field(g, seed, 2, 6, 0.05);
}

BundleMetricField bundle_of(const RunConfig& cfg, const MetricField& metric) {
  const BundleConfig& b = *cfg.bundle;
  if (b.canonical) return canonical_bundle_metric(metric, *b.canonical);
  return build_bundle_metric(b.spec, metric.grid());
}

}  // namespace

Report cmd_curvature(const RunConfig& cfg) {
  Report rep = start(cfg);
  Context ctx(cfg, rep);
  const MetricField metric = metric_of(cfg, ctx);
  const int n = metric.n();
  const ChernCurvatureField R = ctx.timed("curvature", [&] { return chern_curvature(metric); });
  rep.at_most("chern_hermitian_symmetry", "conj(R_{i jbar k lbar}) = R_{j ibar l kbar}, relative",
              hermitian_symmetry_residual(R), cfg.tol.curvature);

  const ScalarField S = scalar_S(metric, R);
  const ScalarField Sh = scalar_S_hat(metric, R);
  const double scale = std::max(S.max_abs(), Sh.max_abs());
  rep.values["S"] = {{"min", S.min_real()}, {"max", S.max_real()}, {"integral", volume_integral(S, metric)}};
  rep.values["S_hat"] = {{"min", Sh.min_real()}, {"max", Sh.max_real()},
                         {"integral", volume_integral(Sh, metric)}};

  const ScalarField trace = ctx.timed("ricci", [&] { return trace_with_omega(ricci_form(metric), metric); });
  rep.at_most("ricci_trace", "tr_omega Ric = S, max-norm relative to max |S|",
              relative(max_abs_diff(trace, S), S.max_abs()), cfg.tol.curvature);

  {
    const ScalarField u = random_factor(metric.grid(), cfg.seeds.conformal);
    const double res = ctx.timed("conformal_law", [&] { return conformal_scalar_law_residual(metric, u); });
    rep.at_most("conformal_scalar_law", "S(e^u w) = e^{-u}(n Delta_c u + S(w)), max-norm", res,
                cfg.tol.conformal);
  }

  const auto points = sample_points(metric.grid(), cfg.seeds.berger, cfg.sampling.berger_points);
  double quad_worst = 0.0;
  double mc_worst = 0.0;
  const double unit = sphere_volume(n) / (n * (n + 1));
  ctx.timed("berger", [&] {
    for (std::size_t p : points) {
      const double pred = berger_prediction(S, Sh, n, p);
      const double q = berger_quadrature(R, metric, p).value;
      quad_worst = std::max(quad_worst, relative(std::abs(q - pred), std::max(std::abs(pred), unit * scale)));
      if (cfg.sampling.berger_samples >= 2) {
        const SphereAverage mc = berger_monte_carlo(R, metric, p, cfg.seeds.berger, cfg.sampling.berger_samples);
        const double diff = std::abs(mc.value - pred);
        mc_worst = std::max(mc_worst, mc.standard_error > 0.0 ? diff / mc.standard_error : diff);
      }
    }
    return 0;
  });
  rep.at_most("berger_quadrature", "sphere average of H_p = (S + S_hat)/(n(n+1)) Vol(S^{2n-1}), relative",
              quad_worst, cfg.tol.berger);
  if (cfg.sampling.berger_samples >= 2) {
    rep.at_most("berger_monte_carlo", "same average by Monte-Carlo, in standard errors", mc_worst,
                cfg.tol.berger_sigma);
  }
  rep.values["berger_points"] = points.size();
  rep.values["berger_samples"] = cfg.sampling.berger_samples;

  HscSamplerConfig hc;
  hc.seed = cfg.seeds.hsc;
  hc.points = cfg.sampling.hsc_points;
  hc.directions = cfg.sampling.hsc_directions;
  hc.refine_steps = cfg.sampling.hsc_refine;
  const HscRange range = ctx.timed("hsc", [&] { return hsc_range_estimate(R, metric, hc); });
  rep.values["hsc_range"] = {{"min", range.min}, {"max", range.max}, {"heuristic", range.heuristic}};

  ctx.emit("S", S);
  ctx.emit("S_hat", Sh);
  return rep;
}

Report cmd_gauduchon(const RunConfig& cfg) {
  Report rep = start(cfg);
  Context ctx(cfg, rep);
  const MetricField metric = metric_of(cfg, ctx);
  rep.values["input_structure"] = [&] {
    const StructureResiduals s = structure_residuals(metric);
    return json{{"kahler", s.kahler}, {"balanced", s.balanced}, {"gauduchon", s.gauduchon}};
  }();

  const GauduchonFactor factor = ctx.timed(
      "factor", [&] { return gauduchon_factor(metric, gauduchon_options(cfg, cfg.sampling.estimate_spectrum)); });
  rep.at_most("factor_residual", "Delta*_c f0 = 0, max-norm", factor.residual, cfg.tol.gauduchon);
  rep.at_most("factor_normalization", "int f0 w^n = int w^n, relative", factor.normalization_error, 1e-10);
  rep.values["f0"] = {{"min", factor.f0.min_real()},
                      {"max", factor.f0.max_real()},
                      {"iterations", factor.report.iterations}};
  if (cfg.sampling.estimate_spectrum) {
    const double separation = factor.sigma_min > 0.0 ? factor.sigma_next / factor.sigma_min
                                                  : std::numeric_limits<double>::max();
    rep.at_least("kernel_separation", "sigma_next / sigma_min of the adjoint Laplacian", separation, 1e3);
  }

  const MetricField omega0 = gauduchon_metric(metric, factor);
  rep.at_most("gauduchon_residual", "ddbar w0^{n-1} = 0, normalized",
              structure_residuals(omega0).gauduchon, cfg.tol.structure);

  const GauduchonFactor again = ctx.timed(
      "idempotence", [&] { return gauduchon_factor(omega0, gauduchon_options(cfg, false)); });
  rep.at_most("idempotence", "factor of the Gauduchon representative is 1, max |f0' - 1|",
              max_abs_diff(again.f0, ScalarField::constant(metric.grid(), 1.0)), cfg.tol.idempotence);

  const GauduchonFactor scaled_factor = ctx.timed(
      "scale_invariance", [&] { return gauduchon_factor(scaled(metric, 2.5), gauduchon_options(cfg, false)); });
  rep.at_most("scale_invariance", "f0(2.5 g) = f0(g), max-norm", max_abs_diff(scaled_factor.f0, factor.f0),
              1e-9);

  const GauduchonSign sign = ctx.timed("sign", [&] { return gauduchon_sign(metric, factor); });
  rep.values["gauduchon_sign"] = {{"value", sign.value},
                                  {"normalized_value", sign.normalized_value},
                                  {"volume", sign.volume},
                                  {"zero_band", sign.zero_band},
                                  {"sign", sign.sign}};
  ctx.emit("f0", factor.f0);
  return rep;
}

Report cmd_normalize(const RunConfig& cfg) {
  Report rep = start(cfg);
  Context ctx(cfg, rep);
  const MetricField metric = metric_of(cfg, ctx);
  const ConstantSignMetric out = ctx.timed("normalize", [&] {
    return constant_sign_scalar_metric(metric, gauduchon_options(cfg, false), poisson_options(cfg));
  });
  const double volume = volume_integral(ScalarField::constant(metric.grid(), 1.0), out.omega0);
  const bool in_band = std::abs(out.C * volume) <= 1e-6 * volume;
  if (in_band) {
    rep.at_most("flatness", "S~ e^u is constant (C in the zero band), max - min", out.spread,
                cfg.tol.flatness_abs);
  } else {
    rep.at_most("flatness", "S~ e^u = C, (max - min) / |C|", out.spread / std::abs(out.C), cfg.tol.flatness);
  }
  rep.at_most("poisson_residual", "Delta_c u = (C - S0)/n, max-norm", out.report.residual, cfg.tol.poisson);

  const GauduchonSign reference = ctx.timed(
      "sign", [&] { return gauduchon_sign(metric, gauduchon_options(cfg, false)); });
  rep.at_most("sign_agreement", "sign(C) equals the Gauduchon sign (0 = agree)",
              out.sign == reference.sign ? 0.0 : 1.0, 0.0);

  const ScalarField St = out.S_tilde;
  ScalarField predicted = static_cast<double>(metric.n()) * laplacian_c(out.omega0, out.u);
  predicted += scalar_S(out.omega0, chern_curvature(out.omega0));
  predicted *= exp(-1.0 * out.u);
  rep.at_most("conformal_consistency", "S~ = e^{-u}(n Delta_c u + S0), max-norm", max_abs_diff(St, predicted),
              1e-7);

  rep.values["C"] = out.C;
  rep.values["sign"] = out.sign;
  rep.values["spread"] = out.spread;
  rep.values["gauduchon_value"] = reference.value;
  ctx.emit("u", out.u);
  ctx.emit("S_tilde_eu", out.S_tilde * exp(out.u));
  return rep;
}

Report cmd_bundle_cert(const RunConfig& cfg) {
  Report rep = start(cfg);
  Context ctx(cfg, rep);
  const MetricField metric = metric_of(cfg, ctx);
  const MetricField omega0 = ctx.timed("gauduchon", [&] {
    return gauduchon_metric(metric, gauduchon_options(cfg, false));
  });
  const BundleMetricField h = bundle_of(cfg, omega0);
  CertificateOptions co;
  co.poisson = poisson_options(cfg);
  const VanishingCertificate cert = ctx.timed("certificate", [&] { return vanishing_certificate(omega0, h, co); });

  rep.values["certificate"] = {{"status", to_string(cert.status)},
                               {"gamma_integral", cert.gamma_integral},
                               {"gamma_mean", cert.gamma_mean},
                               {"gamma_min", cert.gamma.min_real()},
                               {"gamma_max", cert.gamma.max_real()},
                               {"gamma_spectral_tail", cert.gamma_tail},
                               {"smoothness_warning", cert.smoothness_warning},
                               {"message", cert.message}};
  ctx.emit("gamma", cert.gamma);
  if (cert.status == CertificateStatus::hypothesis_failed) {
    rep.status = "hypothesis_failed";
    rep.error = cert.message;
    return rep;
  }
  rep.values["certificate"]["min_gap"] = cert.min_gap;
  rep.values["certificate"]["worst_point"] = cert.worst_point;
  rep.at_least("min_gap", "every eigenvalue of the transformed mean curvature is below -margin", cert.min_gap,
               cert.margin);
  rep.at_most("poisson_residual", "Delta_c u0 = -(gamma - mean gamma), max-norm", cert.report.residual,
              cfg.tol.poisson);
  rep.at_most("laplacian_integral", "int Delta_c u0 w0^n = 0, relative", cert.laplacian_integral, 1e-8);
  ctx.emit("u0", cert.u0);
  return rep;
}

Report cmd_identities(const RunConfig& cfg) {
  Report rep = start(cfg);
  Context ctx(cfg, rep);
  const MetricField metric = metric_of(cfg, ctx);

  IdentityOptions io;
  io.seed = cfg.seeds.identities;
  io.random_functions = cfg.sampling.random_functions;
  io.gauduchon = gauduchon_options(cfg, true);
  const IdentityReport suite = ctx.timed("identity_suite", [&] { return identity_suite(metric, io); });
  rep.values["gauduchon_input"] = suite.gauduchon_input;
  rep.values["gauduchon_residual"] = suite.gauduchon_residual;
  for (const auto& c : suite.checks) {
    const std::string identity = c.note.empty() ? c.name : c.name + ": " + c.note;
    if (c.lower_bound) {
      rep.at_least(c.name, identity, c.residual, c.tolerance);
    } else {
      rep.at_most(c.name, identity, c.residual, c.tolerance);
    }
  }

  const ScalarField S = scalar_S(metric, chern_curvature(metric));
  for (int m : cfg.sampling.weitzenbock_m) {
    const std::string tag = "m" + std::to_string(m);
    const double w = ctx.timed("weitzenbock", [&] { return weitzenbock_residual(metric, {m}); });
    rep.at_most("weitzenbock_" + tag, "-Delta_c |s|^2 = |nabla s|^2 + m S |s|^2, relative", w,
                cfg.tol.weitzenbock);
    const BundleMetricField h = canonical_bundle_metric(metric, m);
    const ScalarField gamma = gamma_field(mean_curvature(metric, h, bundle_curvature(h)), h);
    rep.at_most("canonical_gamma_" + tag, "gamma(m K) = -m S, max-norm",
                max_abs_diff(gamma, -static_cast<double>(m) * S), cfg.tol.bundle);
  }

  if (cfg.bundle && !cfg.bundle->canonical) {
    const BundleMetricField h = bundle_of(cfg, metric);
    const BundleCurvatureField R = bundle_curvature(h);
    rep.at_most("bundle_curvature_hermitian", "lowered bundle curvature is Hermitian, relative",
                bundle_hermitian_residual(R, h), 1e-9);
    const ScalarField u = random_factor(metric.grid(), cfg.seeds.conformal);
    rep.at_most("conformal_mean_curvature", "K~ = e^u (K + Delta_c(u) h), relative",
                conformal_bundle_check(metric, h, u), cfg.tol.bundle);
  }
  return rep;
}

Report run_command(const RunConfig& cfg) {
  auto fail = [&](const std::string& status, const std::exception& e) {
    Report r = start(cfg);
    r.status = status;
    r.error = e.what();
    return r;
  };
  try {
    if (cfg.command == "curvature") return cmd_curvature(cfg);
    if (cfg.command == "gauduchon") return cmd_gauduchon(cfg);
    if (cfg.command == "normalize") return cmd_normalize(cfg);
    if (cfg.command == "bundle-cert") return cmd_bundle_cert(cfg);
    if (cfg.command == "identities") return cmd_identities(cfg);
    throw ConfigError("unknown command '" + cfg.command + "'");
  } catch (const ConfigError& e) {
    return fail("config_error", e);
  } catch (const InvalidArgument& e) {
    return fail("config_error", e);
  } catch (const DimensionMismatch& e) {
    return fail("config_error", e);
  } catch (const PositivityViolation& e) {
    return fail("config_error", e);
  } catch (const IoError& e) {
    return fail("config_error", e);
  } catch (const IncompatibleRHS& e) {
    return fail("hypothesis_failed", e);
  } catch (const PreconditionViolation& e) {
    return fail("hypothesis_failed", e);
  } catch (const Error& e) {
    // NonConvergence, SignIndefinite, EigenFailure, SingularWedgeMap
    return fail("solver_failed", e);
  }
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical verification of Hermitian-geometry identities on flat complex tori",
               "hermtool"};
  std::string config_path;
  Overrides ov;
  std::string command;
  std::string out_dir;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int grid = 0;
  app.add_option("--config", config_path, "YAML or JSON run configuration")->required();
  auto* c_opt = app.add_option("--command", command, "curvature, gauduchon, normalize, bundle-cert, identities");
  auto* o_opt = app.add_option("--out", out_dir, "output directory for report.json, timings.json and fields");
  auto* s_opt = app.add_option("--seed", seed, "replaces every seed in the configuration");
  auto* t_opt = app.add_option("--tol", tol, "replaces the Gauduchon and Poisson solver tolerances");
  auto* g_opt = app.add_option("--grid", grid, "replaces the grid resolution N");
  app.add_flag("--emit-fields", ov.emit_fields, "write field files next to the report");
  app.set_version_flag("--version", std::string("hermtool ") + kToolVersion);

  std::vector<const char*> argv{"hermtool"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << "hermtool " << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  }
  if (*c_opt) ov.command = command;
  if (*o_opt) ov.out_dir = out_dir;
  if (*s_opt) ov.seed = seed;
  if (*t_opt) ov.tol = tol;
  if (*g_opt) ov.grid = grid;

  RunConfig cfg;
  try {
    cfg = load_config(config_path, false);
    apply_overrides(cfg, ov);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  }

  const Report rep = run_command(cfg);
  try {
    write_report(rep, cfg.output.dir);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  }
  out << std::setprecision(6);
  for (const auto& c : rep.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.value << " " << c.relation << " "
        << c.tolerance << "\n";
  }
  if (!rep.error.empty()) err << rep.status << ": " << rep.error << "\n";
  const int code = static_cast<int>(rep.exit_code());
  out << rep.command << ": " << rep.status << ", " << (rep.all_passed() ? "all checks passed" : "checks failed")
      << " (exit " << code << "), report in " << cfg.output.dir << "/report.json\n";
  return code;
}

}  // namespace herm::cli
