#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "herm/curvature.hpp"
#include "herm/errors.hpp"
#include "herm/laplace.hpp"
#include "herm/spectral.hpp"
#include "herm/trig.hpp"

namespace herm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RealVector to_vector(const ScalarField& f) {
  RealVector v(f.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = f[p].real();
  return v;
}

ScalarField to_field(const TorusGrid& g, const RealVector& v) {
  std::vector<cd> c(v.begin(), v.end());
  return ScalarField(g, std::move(c), true);
}

double max_abs(const RealVector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

RealVector project_out(const RealVector& y, const RealVector& dir) {
  const double c = dot(dir, y) / dot(dir, dir);
  RealVector out = y;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * dir[i];
  return out;
}

void require_gauduchon_dimension(const MetricField& metric, const char* where) {
  if (metric.n() < 2) throw InvalidArgument(std::string(where) + ": requires complex dimension n >= 2");
}

}  // namespace

GauduchonFactor gauduchon_factor(const MetricField& metric, const GauduchonOptions& options) {
  require_gauduchon_dimension(metric, "gauduchon_factor");
  const auto t0 = Clock::now();
  const TorusGrid& g = metric.grid();
  const AdjointComplexLaplacian A(metric);
  const FlatInverse P(metric);
  const RealVector vol = to_vector(omega_n_density(metric));
  const double total = integrate(to_field(g, vol)).real();

  auto apply = [&](const RealVector& x) { return to_vector(A.apply(to_field(g, x))); };
  // Krylov operators drop Nyquist input modes; otherwise rounding-level Nyquist content
  // of the basis vectors gets amplified into the solution
  auto filtered = [&](const RealVector& x) { return to_vector(nyquist_filter(to_field(g, x))); };
  auto precond = [&](const RealVector& x) { return to_vector(P.apply(to_field(g, x))); };
  auto identity = [](const RealVector& x) { return x; };
  auto normalize = [&](RealVector& f) {
    double s = 0.0;
    for (std::size_t p = 0; p < f.size(); ++p) s += f[p] * vol[p];
    s /= static_cast<double>(f.size());
    if (s == 0.0) throw SignIndefinite("gauduchon_factor: kernel estimate has zero weighted integral");
    for (auto& x : f) x *= total / s;
  };

  RealVector f;
  if (options.initial) {
    require_same_grid(options.initial->grid(), g, "gauduchon_factor initial guess");
    f = to_vector(nyquist_filter(options.initial->real_part()));
  } else {
    f.assign(g.size(), 1.0);
  }
  normalize(f);

  KrylovOptions inner;
  // the inner residual is an RMS norm after preconditioning, which damps high modes strongly
  inner.tol = 1e-5 * options.tol;
  inner.max_iterations = options.max_inner;
  inner.restart = options.restart;

  int outer = 0;
  int inner_total = 0;
  double previous = INFINITY;
  for (;;) {
    // Nyquist modes of the residual are aliasing of the coefficient products; the
    // correction solve cannot act on them
    const RealVector r = to_vector(nyquist_filter(A.apply(to_field(g, f))));
    if (max_abs(r) <= options.tol) break;
    if (outer >= options.max_outer) {
      std::ostringstream msg;
      msg << "gauduchon_factor: no convergence after " << outer << " outer iterations (residual "
          << max_abs(r) << ", tolerance " << options.tol << ")";
      throw NonConvergence(msg.str());
    }
    ++outer;
    // high modes are damped most by the preconditioner; tighten when progress stalls
    if (max_abs(r) > 0.5 * previous) inner.tol *= 1e-2;
    previous = max_abs(r);
    // Correction solve in the complement of the current kernel estimate.
    auto op = [&](const RealVector& y) { return precond(apply(project_out(filtered(y), f))); };
    RealVector rhs = precond(r);
    for (auto& x : rhs) x = -x;
    const KrylovResult k = gmres(op, identity, rhs, RealVector(g.size(), 0.0), inner);
    inner_total += k.iterations;
    const RealVector delta = project_out(filtered(k.x), f);
    for (std::size_t p = 0; p < f.size(); ++p) f[p] += delta[p];
    normalize(f);
  }

  const double fmin = *std::min_element(f.begin(), f.end());
  const double fmax = max_abs(f);
  if (!(fmin > 0.0)) {
    std::ostringstream msg;
    msg << "gauduchon_factor: kernel element changes sign (min " << fmin << ", max |f| " << fmax
        << "); the grid is probably too coarse";
    throw SignIndefinite(msg.str());
  }

  GauduchonFactor out{to_field(g, f), 0.0, 0.0, 0.0, 0.0, false, {}};
  out.residual = A.apply(out.f0).max_abs();
  out.normalization_error =
      std::abs(volume_integral(out.f0, metric) - total) / total;
  out.sigma_min = rms_norm(apply(f)) / rms_norm(f);

  if (options.estimate_spectrum) {
    // a few inverse-iteration steps in the complement of the kernel; the range of the
    // operator is orthogonal to the volume density
    RealVector x = to_vector(nyquist_filter(random_trig_field(g, 0x5eed, 2, 6, 1.0)));
    x = project_out(x, vol);
    KrylovOptions est;
    est.tol = 1e-8 * rms_norm(x);
    est.max_iterations = options.max_inner;
    est.restart = options.restart;
    auto op = [&](const RealVector& y) { return precond(apply(project_out(filtered(y), f))); };
    double sigma = 0.0;
    for (int it = 0; it < 4; ++it) {
      const double xn = rms_norm(x);
      const RealVector b = precond(x);
      est.tol = 1e-8 * rms_norm(b);
      const KrylovResult k = gmres(op, identity, b, RealVector(g.size(), 0.0), est);
      inner_total += k.iterations;
      const RealVector y = project_out(filtered(k.x), f);
      const double yn = rms_norm(y);
      if (yn == 0.0) break;
      sigma = xn / yn;
      x = project_out(y, vol);
      for (auto& v : x) v /= yn;
    }
    out.sigma_next = sigma;
    out.kernel_ratio_flag = out.sigma_min > 0.0 && sigma / out.sigma_min < 1e3;
  }

  out.report.iterations = inner_total;
  out.report.residual = out.residual;
  out.report.normalization = total;
  out.report.wall_seconds = seconds_since(t0);
  return out;
}

MetricField gauduchon_metric(const MetricField& metric, const GauduchonFactor& factor) {
  require_gauduchon_dimension(metric, "gauduchon_metric");
  const double e = 1.0 / (metric.n() - 1);
  const ScalarField u = map(factor.f0, [e](cd z) { return cd{e * std::log(z.real()), 0.0}; }, true);
  return conformal(metric, u);
}

MetricField gauduchon_metric(const MetricField& metric, const GauduchonOptions& options) {
  return gauduchon_metric(metric, gauduchon_factor(metric, options));
}

PoissonResult solve_poisson_c(const MetricField& gmetric, const ScalarField& f,
                              const PoissonOptions& options) {
  const auto t0 = Clock::now();
  const TorusGrid& g = gmetric.grid();
  require_same_grid(f.grid(), g, "solve_poisson_c");
  if (!f.is_real()) throw InvalidArgument("solve_poisson_c: right-hand side must be real");
  const double gres = structure_residuals(gmetric).gauduchon;
  if (gres > options.gauduchon_tol) {
    std::ostringstream msg;
    msg << "solve_poisson_c: metric is not Gauduchon (residual " << gres << " > "
        << options.gauduchon_tol << ")";
    throw PreconditionViolation(msg.str());
  }

  const ScalarField vol = omega_n_density(gmetric);
  const double total = integrate(vol).real();
  const double weighted = integrate(f * vol).real();
  const double abs_weighted =
      integrate(map(f, [](cd z) { return cd{std::abs(z.real()), 0.0}; }, true) * vol).real();
  PoissonResult out{ScalarField(g, true), {}};
  if (abs_weighted == 0.0) {
    out.report.wall_seconds = seconds_since(t0);
    return out;
  }
  if (std::abs(weighted) / abs_weighted > options.compatibility_tol) {
    std::ostringstream msg;
    msg << "solve_poisson_c: right-hand side violates the integral condition (|int f w^n| / int |f| w^n = "
        << std::abs(weighted) / abs_weighted << ")";
    throw IncompatibleRHS(msg.str());
  }
  // remove the admissible rounding-level weighted mean
  const double shift = weighted / total;
  ScalarField rhs = f;
  rhs -= ScalarField::constant(g, shift);

  const ComplexLaplacian A(gmetric);
  const FlatInverse P(gmetric);
  // left preconditioning; Nyquist modes are removed on input and output, their
  // derivatives vanish and they would otherwise add spurious kernel directions
  auto op = [&](const RealVector& x) {
    return to_vector(P.apply(A.apply(nyquist_filter(to_field(g, x)))));
  };
  auto identity = [](const RealVector& x) { return x; };
  const RealVector b = to_vector(P.apply(rhs));

  KrylovOptions k;
  k.tol = 1e-3 * options.tol;
  k.max_iterations = options.max_iterations;
  k.restart = options.restart;
  RealVector x(g.size(), 0.0);
  double residual = 0.0;
  int iterations = 0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const KrylovResult r = gmres(op, identity, b, x, k);
    iterations += r.iterations;
    x = to_vector(nyquist_filter(to_field(g, r.x)));
    residual = max_abs_diff(A.apply(to_field(g, x)), rhs);
    if (residual <= options.tol || iterations >= options.max_iterations) break;
    k.tol *= 0.5 * options.tol / residual;
  }
  if (residual > options.tol) {
    std::ostringstream msg;
    msg << "solve_poisson_c: residual " << residual << " above tolerance " << options.tol
        << " after " << iterations << " iterations";
    const double unresolved = max_abs_diff(rhs, nyquist_filter(rhs));
    if (unresolved > options.tol) {
      msg << " (right-hand side has Nyquist content " << unresolved << "; refine the grid)";
    }
    throw NonConvergence(msg.str());
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (auto& v : x) v -= mean;
  out.u = to_field(g, x);
  out.report.iterations = iterations;
  out.report.residual = residual;
  out.report.normalization = shift;
  out.report.wall_seconds = seconds_since(t0);
  return out;
}

GauduchonSign gauduchon_sign(const MetricField& metric, const GauduchonOptions& options,
                             double zero_band_rel) {
  return gauduchon_sign(metric, gauduchon_factor(metric, options), zero_band_rel);
}

GauduchonSign gauduchon_sign(const MetricField& metric, GauduchonFactor factor,
                             double zero_band_rel) {
  require_same_grid(metric.grid(), factor.f0.grid(), "gauduchon_sign");
  GauduchonSign out{0.0, 0.0, 0.0, 0.0, 0, std::move(factor)};
  const MetricField omega0 = gauduchon_metric(metric, out.factor);
  const int n = metric.n();
  const ScalarField S0 = scalar_S(omega0, chern_curvature(omega0));
  out.value = volume_integral(S0, omega0);
  out.volume = volume_integral(ScalarField::constant(metric.grid(), 1.0), omega0);
  out.normalized_value = out.value / std::pow(out.volume, static_cast<double>(n - 1) / n);
  out.zero_band = zero_band_rel * out.volume;
  out.sign = std::abs(out.value) <= out.zero_band ? 0 : (out.value > 0.0 ? 1 : -1);
  return out;
}

ConstantSignMetric constant_sign_scalar_metric(const MetricField& metric,
                                               const GauduchonOptions& gopts,
                                               const PoissonOptions& popts) {
  require_gauduchon_dimension(metric, "constant_sign_scalar_metric");
  const auto t0 = Clock::now();
  const int n = metric.n();
  const TorusGrid& g = metric.grid();
  const GauduchonFactor factor = gauduchon_factor(metric, gopts);
  const MetricField omega0 = gauduchon_metric(metric, factor);
  const ScalarField S0 = scalar_S(omega0, chern_curvature(omega0));
  const double volume = volume_integral(ScalarField::constant(g, 1.0), omega0);
  const double C = volume_integral(S0, omega0) / volume;

  ScalarField f = (-1.0 / n) * S0;
  f += ScalarField::constant(g, C / n);
  f.mark_real();
  const PoissonResult solved = solve_poisson_c(omega0, f, popts);
  MetricField tilde = conformal(omega0, solved.u);
  ScalarField S_tilde = scalar_S(tilde, chern_curvature(tilde));

  const ScalarField product = S_tilde * exp(solved.u);
  ConstantSignMetric out{std::move(tilde), omega0, solved.u, std::move(S_tilde), 0.0, 0.0, 0, {}};
  out.C = C;
  out.spread = product.max_real() - product.min_real();
  const double band = 1e-6 * volume;
  out.sign = std::abs(C * volume) <= band ? 0 : (C > 0.0 ? 1 : -1);
  out.report = solved.report;
  out.report.iterations += factor.report.iterations;
  out.report.wall_seconds = seconds_since(t0);
  return out;
}

}  // namespace herm
