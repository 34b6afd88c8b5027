#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "herm/curvature.hpp"
#include "herm/errors.hpp"
#include "herm/laplace.hpp"
#include "herm/trig.hpp"

namespace herm {
namespace {

ScalarField abs_field(const ScalarField& f) {
  return map(f, [](cd z) { return cd{std::abs(z), 0.0}; }, true);
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

IdentityCheck make_check(std::string name, double residual, double tol, std::string note = {}) {
  return {std::move(name), residual, tol, residual <= tol, std::move(note)};
}

// Random trigonometric field plus one first-harmonic wave along every axis, so that no
// single-axis coupling with the metric is missed.
ScalarField probe(const TorusGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::vector<double> phases(static_cast<std::size_t>(g.axes()));
  for (double& p : phases) p = phase(rng);
  const ScalarField waves = ScalarField::sample(g, [&](const Point& x) {
    double v = 0.0;
    for (int a = 0; a < g.axes(); ++a) v += 0.5 * std::cos(2.0 * M_PI * x[a] + phases[a]);
    return cd{v, 0.0};
  }, true);
  return random_trig_field(g, seed) + waves;
}

}  // namespace

IdentityReport identity_suite(const MetricField& metric, const IdentityOptions& options) {
  if (metric.n() < 2) throw InvalidArgument("identity_suite: requires complex dimension n >= 2");
  const TorusGrid& g = metric.grid();
  IdentityReport report;
  report.gauduchon_residual = structure_residuals(metric).gauduchon;
  report.gauduchon_input = report.gauduchon_residual <= 1e-6;

  const ComplexLaplacian L(metric);
  const AdjointComplexLaplacian Lstar(metric);
  const ScalarField vol = omega_n_density(metric);

  // integral of Delta_c u against omega^n, and adjointness, over random u
  double worst_integral = 0.0;
  double worst_adjoint = 0.0;
  for (int k = 0; k < options.random_functions; ++k) {
    const ScalarField u = probe(g, options.seed + 2 * k);
    const ScalarField f = random_trig_field(g, options.seed + 2 * k + 1);
    const ScalarField Lu = L.apply(u);
    const double ratio = safe_ratio(std::abs(integrate(Lu * vol).real()),
                                    integrate(abs_field(Lu) * vol).real());
    worst_integral = std::max(worst_integral, ratio);
    const double lhs = integrate(Lu * f * vol).real();
    const double rhs = integrate(u * Lstar.apply(f) * vol).real();
    const double scale = integrate(abs_field(Lu) * abs_field(f) * vol).real();
    worst_adjoint = std::max(worst_adjoint, safe_ratio(std::abs(lhs - rhs), scale));
  }
  if (report.gauduchon_input) {
    report.checks.push_back(make_check("integral_of_laplacian", worst_integral, 1e-9,
                                       "Gauduchon input: must vanish for every u"));
  } else {
    IdentityCheck c{"integral_of_laplacian", worst_integral, 1e-3, worst_integral > 1e-3,
                    "non-Gauduchon input: positive control, largest ratio must exceed tolerance",
                    true};
    report.checks.push_back(c);
  }
  report.checks.push_back(make_check("adjointness", worst_adjoint, 1e-7));

  // comparison of the two Laplacians through the torsion
  const TorsionOneForm theta = torsion(metric);
  {
    const ScalarField u = random_trig_field(g, options.seed + 1000);
    const ScalarField lhs = 2.0 * L.apply(u);
    const ScalarField rhs = laplacian_riemann(metric, u) + torsion_pairing(metric, u, theta);
    report.checks.push_back(
        make_check("comparison", safe_ratio(max_abs_diff(lhs, rhs), lhs.max_abs()), 1e-6));
  }

  // total scalar curvature relations against the Gauduchon representative
  GauduchonOptions gopts = options.gauduchon;
  gopts.estimate_spectrum = true;
  const GauduchonFactor factor = gauduchon_factor(metric, gopts);
  const MetricField omega0 = gauduchon_metric(metric, factor);
  double S_int, Sh_int, f0S_int, f0Sh_int, S_abs, Sh_abs;
  {
    const ChernCurvatureField R = chern_curvature(metric);
    const ScalarField S = scalar_S(metric, R);
    const ScalarField Sh = scalar_S_hat(metric, R);
    f0S_int = volume_integral(factor.f0 * S, metric);
    f0Sh_int = volume_integral(factor.f0 * Sh, metric);
    S_abs = volume_integral(abs_field(factor.f0 * S), metric);
    Sh_abs = volume_integral(abs_field(factor.f0 * Sh), metric);
  }
  double S0_abs, Sh0_abs;
  {
    const ChernCurvatureField R0 = chern_curvature(omega0);
    const ScalarField S0 = scalar_S(omega0, R0);
    const ScalarField Sh0 = scalar_S_hat(omega0, R0);
    S_int = volume_integral(S0, omega0);
    Sh_int = volume_integral(Sh0, omega0);
    S0_abs = volume_integral(abs_field(S0), omega0);
    Sh0_abs = volume_integral(abs_field(Sh0), omega0);
  }
  report.checks.push_back(make_check(
      "total_scalar_S", safe_ratio(std::abs(S_int - f0S_int), S0_abs + S_abs), 1e-6));
  report.checks.push_back(make_check(
      "total_scalar_S_hat", safe_ratio(std::abs(Sh_int - f0Sh_int), Sh0_abs + Sh_abs), 1e-6));

  const TorsionOneForm theta0 = torsion(omega0);
  const double torsion_int = volume_integral(torsion_norm2(omega0, theta0), omega0);
  const double scale = S0_abs + Sh0_abs + 0.5 * torsion_int;
  report.checks.push_back(make_check(
      "torsion_norm", safe_ratio(std::abs((S_int - Sh_int) - 0.5 * torsion_int), scale), 1e-6));
  const double decomposition = 0.5 * (f0S_int + f0Sh_int) + 0.25 * torsion_int;
  report.checks.push_back(make_check(
      "scalar_decomposition", safe_ratio(std::abs(S_int - decomposition), scale), 1e-6));

  const double separation = factor.sigma_min > 0.0 ? factor.sigma_next / factor.sigma_min
                                                : std::numeric_limits<double>::max();
  IdentityCheck kernel{"kernel_separation", separation, 1e3, !factor.kernel_ratio_flag,
                       "ratio of the two smallest singular-value estimates of the adjoint Laplacian",
                       true};
  report.checks.push_back(kernel);
  return report;
}

double conformal_scalar_law_residual(const MetricField& metric, const ScalarField& u) {
  const MetricField tilde = conformal(metric, u);
  const ScalarField S = scalar_S(metric, chern_curvature(metric));
  const ScalarField St = scalar_S(tilde, chern_curvature(tilde));
  ScalarField predicted = static_cast<double>(metric.n()) * laplacian_c(metric, u) + S;
  predicted *= map(u, [](cd z) { return std::exp(-z); }, true);
  return max_abs_diff(St, predicted);
}

}  // namespace herm
