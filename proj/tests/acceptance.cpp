// Acceptance gate: twelve property checks at n = 2, N = 32. One PASS/FAIL line each;
// the exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "herm/bundle.hpp"
#include "herm/cli/commands.hpp"
#include "herm/curvature.hpp"
#include "herm/laplace.hpp"
#include "herm/trig.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace herm;
using namespace herm::test;

namespace {

constexpr int kN = 32;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

const TorusGrid& grid() {
  static const TorusGrid g = make_grid(2, kN);
  return g;
}

const MetricField& metric_f0() {
  static const MetricField m = build_metric(flat(), grid());
  return m;
}
const MetricField& metric_f1() {
  static const MetricField m = build_metric(conformally_flat(), grid());
  return m;
}
const MetricField& metric_f2() {
  static const MetricField m = build_metric(perturbed(), grid());
  return m;
}
const MetricField& gauduchon_f2() {
  static const MetricField m = gauduchon_metric(metric_f2());
  return m;
}
// F2 is already Gauduchon; the generic fixture has a non-constant factor
const MetricField& metric_generic() {
  static const MetricField m = build_metric(generic(), grid());
  return m;
}
const MetricField& gauduchon_generic() {
  static const MetricField m = gauduchon_metric(metric_generic());
  return m;
}

ScalarField abs_field(const ScalarField& f) {
  return map(f, [](cd z) { return cd{std::abs(z), 0.0}; }, true);
}

// Random field plus a first harmonic along every axis with random phase.
ScalarField generic_function(const TorusGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::vector<double> ph(static_cast<std::size_t>(g.axes()));
  for (double& p : ph) p = phase(rng);
  const ScalarField waves = ScalarField::sample(g, [&](const Point& x) {
    double v = 0.0;
    for (int a = 0; a < g.axes(); ++a) v += 0.5 * std::cos(2.0 * kPi * x[a] + ph[a]);
    return cd{v, 0.0};
  }, true);
  return random_trig_field(g, seed) + waves;
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

BundleSpec rank2_bundle() {
  BundleSpec s = BundleSpec::trivial(2);
  s.terms.push_back({0, 0, {{1, 0, 0, 0}, 0.06}});
  s.terms.push_back({1, 1, {{0, 1, 1, 0}, cd{0.04, 0.02}}});
  s.terms.push_back({0, 1, {{0, 0, 0, 1}, cd{0.05, -0.03}}});
  s.terms.push_back({0, 1, {{1, 0, 1, 0}, 0.03}});
  s.weight.terms.push_back({{0, 0, 1, 1}, 0.04});
  return s;
}

Outcome berger() {
  const MetricField& m = metric_f2();
  const ChernCurvatureField R = chern_curvature(m);
  const ScalarField S = scalar_S(m, R);
  const ScalarField Sh = scalar_S_hat(m, R);
  const double floor = sphere_volume(2) / 6.0 * std::max(S.max_abs(), Sh.max_abs());
  double quad = 0.0, sigmas = 0.0;
  for (std::size_t p : sample_points(grid(), 3, 20)) {
    const double pred = berger_prediction(S, Sh, 2, p);
    quad = std::max(quad, std::abs(berger_quadrature(R, m, p).value - pred) / std::max(std::abs(pred), floor));
    const SphereAverage mc = berger_monte_carlo(R, m, p, 3, 1000000);
    sigmas = std::max(sigmas, std::abs(mc.value - pred) / mc.standard_error);
  }
  return {quad <= 1e-8 && sigmas <= 3.0,
          "quadrature rel " + fmt(quad) + " <= 1e-8, Monte-Carlo " + fmt(sigmas) + " SE <= 3"};
}

Outcome conformal_law() {
  const ScalarField u1 = ScalarField::sample(grid(), [](const Point& x) {
    return cd{conformally_flat_u(x), 0.0};
  }, true);
  const double r01 = conformal_scalar_law_residual(metric_f0(), u1);
  const double r2 = conformal_scalar_law_residual(metric_f2(), random_trig_field(grid(), 11, 2, 6, 0.05));
  return {r01 <= 1e-8 && r2 <= 1e-8, "F0->F1 " + fmt(r01) + ", F2 random u " + fmt(r2) + " <= 1e-8"};
}

Outcome factor_closed_form() {
  const GauduchonFactor f = gauduchon_factor(metric_f1());
  const ScalarField u = conformally_flat().conformal.sample(grid());
  // c by quadrature of e^{2u} and e^{u} over the flat torus
  const double c = integrate(exp(2.0 * u)).real() / integrate(exp(u)).real();
  const double closed = max_abs_diff(f.f0, c * exp(-1.0 * u));
  const double scaling = max_abs_diff(gauduchon_factor(scaled(metric_f1(), 2.5)).f0, f.f0);
  return {closed <= 1e-7 && scaling <= 1e-9,
          "|f0 - c e^{-u}| " + fmt(closed) + " <= 1e-7, scaling " + fmt(scaling) + " <= 1e-9"};
}

Outcome gauduchon_residual() {
  double res = 0.0, drift = 0.0;
  for (const MetricField* w : {&gauduchon_f2(), &gauduchon_generic()}) {
    res = std::max(res, structure_residuals(*w).gauduchon);
    const MetricField ww = gauduchon_metric(*w);
    double d = 0.0, scale = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        d = std::max(d, max_abs_diff(ww.entry(i, j), w->entry(i, j)));
        scale = std::max(scale, w->entry(i, j).max_abs());
      }
    }
    drift = std::max(drift, d / scale);
  }
  const double before = structure_residuals(metric_generic()).gauduchon;
  return {res <= 1e-7 && drift <= 1e-8, "F2 and generic: residual " + fmt(res) + " <= 1e-7 (generic input " +
                                            fmt(before) + "), idempotence " + fmt(drift) + " <= 1e-8"};
}

double integral_ratio(const MetricField& m, const ScalarField& u) {
  const ScalarField Lu = laplacian_c(m, u);
  const ScalarField vol = omega_n_density(m);
  return std::abs(integrate(Lu * vol).real()) / integrate(abs_field(Lu) * vol).real();
}

Outcome integral_obstruction() {
  double worst = 0.0, weakest = INFINITY;
  for (int k = 0; k < 10; ++k) {
    worst = std::max(worst, integral_ratio(gauduchon_f2(), random_trig_field(grid(), 500 + k)));
    worst = std::max(worst, integral_ratio(gauduchon_generic(), random_trig_field(grid(), 500 + k)));
    weakest = std::min(weakest, integral_ratio(metric_f1(), generic_function(grid(), 600 + k)));
  }
  return {worst <= 1e-9 && weakest > 1e-3,
          "Gauduchon " + fmt(worst) + " <= 1e-9, F1 smallest " + fmt(weakest) + " > 1e-3"};
}

Outcome normalization() {
  const ConstantSignMetric c = constant_sign_scalar_metric(metric_f2());
  const GauduchonSign s = gauduchon_sign(metric_f2());
  const bool in_band = c.sign == 0;
  const double flat = in_band ? c.spread : c.spread / std::abs(c.C);
  const bool flat_ok = in_band ? flat <= 1e-8 : flat <= 1e-6;
  return {flat_ok && c.sign == s.sign,
          std::string(in_band ? "spread (C in zero band) " : "spread/|C| ") + fmt(flat) +
              (in_band ? " <= 1e-8" : " <= 1e-6") + ", sign(C) " + std::to_string(c.sign) +
              " vs Gauduchon sign " + std::to_string(s.sign)};
}

Outcome torsion_norm() {
  // curvature contraction on one side, pointwise |theta_0|^2 quadrature on the other
  auto sides = [](const MetricField& w) {
    const ChernCurvatureField R = chern_curvature(w);
    const double lhs = volume_integral(scalar_S(w, R) - scalar_S_hat(w, R), w);
    const double rhs = 0.5 * volume_integral(torsion_norm2(w, torsion(w)), w);
    return std::make_pair(lhs, rhs);
  };
  const auto [l2, r2] = sides(gauduchon_f2());
  const auto [lg, rg] = sides(gauduchon_generic());
  const double rel = std::max(std::abs(l2 - r2) / std::max(std::abs(l2), std::abs(r2)),
                              std::abs(lg - rg) / std::max(std::abs(lg), std::abs(rg)));
  return {rel <= 1e-6, "F2 " + fmt(l2) + " vs " + fmt(r2) + ", generic " + fmt(lg) + " vs " + fmt(rg) +
                           ", rel " + fmt(rel) + " <= 1e-6"};
}

Outcome adjointness() {
  double worst = 0.0;
  for (const MetricField* m : {&metric_f0(), &metric_f1(), &metric_f2()}) {
    for (int k = 0; k < 10; ++k) {
      const ScalarField u = random_trig_field(grid(), 700 + 2 * k);
      const ScalarField f = random_trig_field(grid(), 701 + 2 * k);
      const ScalarField Lu = laplacian_c(*m, u);
      const double lhs = volume_integral(Lu * f, *m);
      const double rhs = volume_integral(u * adjoint_c(*m, f), *m);
      worst = std::max(worst, std::abs(lhs - rhs) / volume_integral(abs_field(Lu * f), *m));
    }
  }
  return {worst <= 1e-7, "worst relative " + fmt(worst) + " <= 1e-7 over 30 pairs"};
}

Outcome certificate() {
  const BundleMetricField h = build_bundle_metric(oscillating_line(-0.25), grid());
  const VanishingCertificate c = vanishing_certificate(metric_f0(), h);
  bool ok = c.status == CertificateStatus::certified && c.min_gap > 0.0;
  // re-verify every eigenvalue of the transformed mean curvature
  double top = -INFINITY;
  if (ok) {
    const BundleMetricField ht = conformal(h, c.u0);
    for (const auto& ev : bundle_eigenvalues(mean_curvature(metric_f0(), ht, bundle_curvature(ht)), ht)) {
      top = std::max(top, ev.max_real());
    }
    ok = top < 0.0;
  }

  // gamma = 1 + cos(2 pi x1) >= 0 through the command line
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "herm_acceptance";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "positive.yaml").string();
  std::ofstream(path) << "version: 1\ncommand: bundle-cert\ngrid: {n: 2, N: " << kN
                      << "}\nbundle:\n  rank: 1\n  weight:\n    terms:\n      - {k: [1, 0, 0, 0], c: "
                      << 0.5 / (kPi * kPi) << "}\n  background: [[0.5, 0], [0, 0.5]]\n";
  std::ostringstream out, err;
  const int code = cli::run_main({"--config", path, "--out", (dir / "positive").string()}, out, err);
  return {ok && code == 3, "status " + to_string(c.status) + ", min_gap " + fmt(c.min_gap) +
                               ", largest re-verified eigenvalue " + fmt(top) + ", gamma >= 0 exit code " +
                               std::to_string(code)};
}

Outcome canonical_bundle() {
  const MetricField& m = metric_f2();
  const ScalarField S = scalar_S(m, chern_curvature(m));
  double gamma_res = 0.0;
  for (int power : {1, 2}) {
    const BundleMetricField h = canonical_bundle_metric(m, power);
    const ScalarField gamma = gamma_field(mean_curvature(m, h, bundle_curvature(h)), h);
    gamma_res = std::max(gamma_res, max_abs_diff(gamma, -1.0 * power * S));
  }
  double w = 0.0;
  for (const MetricField* metric : {&metric_f1(), &metric_f2()}) {
    for (int power : {1, 2}) w = std::max(w, weitzenbock_residual(*metric, {power, cd{1.0, 0.0}}));
  }
  return {gamma_res <= 1e-7 && w <= 1e-7,
          "|gamma + m S| " + fmt(gamma_res) + " <= 1e-7, Weitzenboeck " + fmt(w) + " <= 1e-7"};
}

Outcome comparison() {
  TorsionOneForm theta;
  theta.components = {ScalarField::sample(grid(), [](const Point& x) {
                        return cd{-0.1 * kPi * std::sin(2 * kPi * x[0]), 0.0};
                      }, false),
                      ScalarField(grid())};
  auto residual = [](const MetricField& m, const TorsionOneForm& t, std::uint64_t seed) {
    const ScalarField u = random_trig_field(grid(), seed);
    const ScalarField lhs = 2.0 * laplacian_c(m, u);
    return max_abs_diff(lhs, laplacian_riemann(m, u) + torsion_pairing(m, u, t)) / lhs.max_abs();
  };
  const double r1 = residual(metric_f1(), theta, 800);
  const double r2 = residual(metric_f2(), torsion(metric_f2()), 801);
  return {r1 <= 1e-7 && r2 <= 1e-6, "F1 closed-form theta " + fmt(r1) + " <= 1e-7, F2 " + fmt(r2) + " <= 1e-6"};
}

Outcome oracle_orders() {
  const std::vector<double> steps{1.0 / 16, 1.0 / 32, 1.0 / 64};
  const auto points = sample_points(grid(), 5, 8);

  std::vector<double> chern(steps.size(), 0.0);
  {
    const MetricSpec spec = perturbed();
    const ChernCurvatureField R = chern_curvature(metric_f2());
    for (std::size_t s = 0; s < steps.size(); ++s) {
      for (std::size_t p : points) {
        const std::vector<cd> fd = chern_curvature_fd(spec, grid().coordinates(p), steps[s]);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
              for (int l = 0; l < 2; ++l)
                chern[s] = std::max(chern[s], std::abs(R(i, j, k, l)[p] - fd[((i * 2 + j) * 2 + k) * 2 + l]));
      }
    }
  }
  std::vector<double> bundle(steps.size(), 0.0);
  {
    const BundleSpec spec = rank2_bundle();
    const BundleCurvatureField R = bundle_curvature(build_bundle_metric(spec, grid()));
    for (std::size_t s = 0; s < steps.size(); ++s) {
      for (std::size_t p : points) {
        const std::vector<cd> fd = bundle_curvature_fd(spec, 2, grid().coordinates(p), steps[s]);
        for (std::size_t c = 0; c < fd.size(); ++c) bundle[s] = std::max(bundle[s], std::abs(R.comps[c][p] - fd[c]));
      }
    }
  }
  const double oc = std::min(order(chern[0], chern[1]), order(chern[1], chern[2]));
  const double ob = std::min(order(bundle[0], bundle[1]), order(bundle[1], bundle[2]));
  return {oc >= 1.8 && ob >= 1.8, "Chern order " + fmt(oc) + ", bundle order " + fmt(ob) + " >= 1.8"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"berger_sphere_average", berger},
      {"conformal_scalar_law", conformal_law},
      {"gauduchon_factor_closed_form", factor_closed_form},
      {"gauduchon_metric_residual", gauduchon_residual},
      {"laplacian_integral_obstruction", integral_obstruction},
      {"constant_sign_normalization", normalization},
      {"torsion_norm_identity", torsion_norm},
      {"adjoint_identity", adjointness},
      {"vanishing_certificate", certificate},
      {"canonical_bundle_and_weitzenboeck", canonical_bundle},
      {"laplacian_comparison", comparison},
      {"finite_difference_oracles", oracle_orders},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
