#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "herm/bundle.hpp"
#include "herm/errors.hpp"

namespace herm {

std::string to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::certified:
      return "certified";
    case CertificateStatus::hypothesis_failed:
      return "hypothesis_failed";
    case CertificateStatus::certificate_failed:
      return "certificate_failed";
  }
  return "unknown";
}

VanishingCertificate vanishing_certificate(const MetricField& gmetric, const BundleMetricField& h,
                                           const CertificateOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const TorusGrid& g = gmetric.grid();
  require_same_grid(g, h.grid(), "vanishing_certificate");
  const double gres = structure_residuals(gmetric).gauduchon;
  if (gres > options.gauduchon_tol) {
    std::ostringstream msg;
    msg << "vanishing_certificate: base metric is not Gauduchon (residual " << gres << " > "
        << options.gauduchon_tol << ")";
    throw PreconditionViolation(msg.str());
  }

  VanishingCertificate out{CertificateStatus::hypothesis_failed, ScalarField(g, true), 0.0, 0.0,
                           ScalarField(g, true), 0.0, 0.0, 0, 0.0, 0.0, false, {}, {}};
  out.gamma = gamma_field(mean_curvature(gmetric, h, bundle_curvature(h)), h);
  const double volume = volume_integral(ScalarField::constant(g, 1.0), gmetric);
  out.gamma_integral = volume_integral(out.gamma, gmetric);
  out.gamma_mean = out.gamma_integral / volume;
  out.gamma_tail = spectral_tail(out.gamma);
  out.smoothness_warning = out.gamma_tail > options.smoothness_warning;

  const double gmax = out.gamma.max_abs();
  if (!(out.gamma_mean < -options.hypothesis_band * gmax)) {
    std::ostringstream msg;
    msg << "integral of gamma against the Gauduchon volume is not negative (mean " << out.gamma_mean
        << ", max |gamma| " << gmax << ")";
    out.message = msg.str();
    out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }

  // gamma_shift = gamma - mean; Delta_c u0 = -gamma_shift
  ScalarField rhs = out.gamma;
  rhs -= ScalarField::constant(g, out.gamma_mean);
  rhs = -1.0 * rhs;
  rhs.mark_real();
  const PoissonResult solved = solve_poisson_c(gmetric, rhs, options.poisson);
  out.u0 = solved.u;
  out.report = solved.report;

  const ScalarField lap = laplacian_c(gmetric, out.u0);
  const double lap_abs =
      volume_integral(map(lap, [](cd z) { return cd{std::abs(z), 0.0}; }, true), gmetric);
  out.laplacian_integral =
      lap_abs > 0.0 ? std::abs(volume_integral(lap, gmetric)) / lap_abs : 0.0;

  // independent re-verification: curvature of e^{u0} h computed from scratch, all eigenvalues
  const BundleMetricField ht = conformal(h, out.u0);
  const MeanCurvatureField Kt = mean_curvature(gmetric, ht, bundle_curvature(ht));
  const std::vector<ScalarField> eig = bundle_eigenvalues(Kt, ht);
  double kscale = 0.0;
  for (const auto& e : Kt.entries) kscale = std::max(kscale, e.max_abs());
  double top = -INFINITY;
  for (const auto& e : eig) {
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (e[p].real() > top) {
        top = e[p].real();
        out.worst_point = p;
      }
    }
  }
  out.min_gap = -top;
  const double margin = options.margin_rel * kscale;
  out.margin = margin;
  if (top <= -margin) {
    out.status = CertificateStatus::certified;
  } else {
    out.status = CertificateStatus::certificate_failed;
    std::ostringstream msg;
    msg << "transformed mean curvature is not negative definite: eigenvalue " << top
        << " at point " << out.worst_point << " (margin " << margin << ")";
    out.message = msg.str();
  }
  out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace herm
