#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "herm/forms.hpp"
#include "herm/krylov.hpp"
#include "herm/metric.hpp"

namespace herm {

/// Delta_c u = -g^{i jbar} d_i d_jbar u, with the inverse metric cached.
class ComplexLaplacian {
 public:
  explicit ComplexLaplacian(const MetricField& metric);
  ScalarField apply(const ScalarField& u) const;

 private:
  TorusGrid grid_;
  int n_;
  std::vector<std::vector<cd>> inverse_;  // entry (a, b) of g^{-1}, per point
};

/// Delta*_c f = -(i/(n-1)!) * d d-bar(f omega^{n-1}), the formal adjoint of Delta_c with
/// respect to omega^n, with omega^{n-1} and the volume density cached.
class AdjointComplexLaplacian {
 public:
  explicit AdjointComplexLaplacian(const MetricField& metric);
  ScalarField apply(const ScalarField& f) const;

 private:
  // nonzero complex-basis components of omega^{n-1} and the ddbar derivative that
  // completes each to the top degree
  struct Term {
    ScalarField coefficient;
    int i;
    int j;
    double sign;
  };
  std::vector<Term> terms_;
  ScalarField volume_;
  cd factor_;
};

/// Exact inverse of the constant-coefficient operator with the grid-mean inverse metric.
/// The zero mode is passed through unchanged and Nyquist modes are removed.
class FlatInverse {
 public:
  explicit FlatInverse(const MetricField& metric);
  ScalarField apply(const ScalarField& f) const;

 private:
  TorusGrid grid_;
  std::vector<double> symbol_;
};

ScalarField laplacian_c(const MetricField& metric, const ScalarField& u);
/// d* d u for the Riemannian metric G = 2 Re g, in divergence form.
ScalarField laplacian_riemann(const MetricField& metric, const ScalarField& u);
ScalarField adjoint_c(const MetricField& metric, const ScalarField& f);

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  double normalization = 1.0;
  double wall_seconds = 0.0;
};

struct GauduchonOptions {
  double tol = 1e-10;  // max-norm of Delta*_c f0 for a normalized f0
  int max_outer = 200;
  int max_inner = 400;
  int restart = 30;
  bool estimate_spectrum = false;
  std::optional<ScalarField> initial;
};

struct GauduchonFactor {
  ScalarField f0;
  double residual = 0.0;             // max |Delta*_c f0|
  double normalization_error = 0.0;  // |int f0 omega^n - int omega^n| / int omega^n
  double sigma_min = 0.0;            // |A f0| / |f0|
  double sigma_next = 0.0;           // estimate of the next smallest singular value
  bool kernel_ratio_flag = false;    // sigma_next / sigma_min < 1e3
  SolveReport report;
};

/// Requires n >= 2. Throws NonConvergence or SignIndefinite.
GauduchonFactor gauduchon_factor(const MetricField& metric, const GauduchonOptions& options = {});
/// f0^{1/(n-1)} * metric.
MetricField gauduchon_metric(const MetricField& metric, const GauduchonFactor& factor);
MetricField gauduchon_metric(const MetricField& metric, const GauduchonOptions& options = {});

struct PoissonOptions {
  double tol = 1e-10;  // max-norm of Delta_c u - f
  int max_iterations = 2000;
  int restart = 30;
  double gauduchon_tol = 1e-6;
  double compatibility_tol = 1e-8;
};

struct PoissonResult {
  ScalarField u;
  SolveReport report;
};

/// Solves Delta_c u = f on a Gauduchon metric; u has zero mean.
/// Throws PreconditionViolation, IncompatibleRHS, NonConvergence.
PoissonResult solve_poisson_c(const MetricField& gmetric, const ScalarField& f,
                              const PoissonOptions& options = {});

struct GauduchonSign {
  double value = 0.0;             // int S_0 omega_0^n
  double normalized_value = 0.0;  // value / (int omega_0^n)^{(n-1)/n}, scale invariant
  double volume = 0.0;            // int omega_0^n
  double zero_band = 0.0;
  int sign = 0;
  GauduchonFactor factor;
};

GauduchonSign gauduchon_sign(const MetricField& metric, const GauduchonOptions& options = {},
                             double zero_band_rel = 1e-6);
/// Same, reusing an already computed factor.
GauduchonSign gauduchon_sign(const MetricField& metric, GauduchonFactor factor,
                             double zero_band_rel = 1e-6);

struct ConstantSignMetric {
  MetricField tilde;
  MetricField omega0;
  ScalarField u;
  ScalarField S_tilde;
  double C = 0.0;
  double spread = 0.0;  // max - min of S_tilde * e^u
  int sign = 0;
  SolveReport report;
};

ConstantSignMetric constant_sign_scalar_metric(const MetricField& metric,
                                               const GauduchonOptions& gopts = {},
                                               const PoissonOptions& popts = {});

struct IdentityCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
  bool lower_bound = false;  // passes when residual exceeds tolerance (positive controls)
};

struct IdentityOptions {
  std::uint64_t seed = 7;
  int random_functions = 10;
  GauduchonOptions gauduchon;
};

struct IdentityReport {
  bool gauduchon_input = false;
  double gauduchon_residual = 0.0;
  std::vector<IdentityCheck> checks;
};

/// Normalized residuals of the integral and pointwise identities relating the two
/// Laplacians, the torsion and the two scalar curvatures.
IdentityReport identity_suite(const MetricField& metric, const IdentityOptions& options = {});

/// max |S(e^u omega) - e^{-u} (n Delta_c u + S(omega))| with both scalar curvatures computed
/// from their curvature tensors.
double conformal_scalar_law_residual(const MetricField& metric, const ScalarField& u);

/// Pointwise inner product <du, theta> of the comparison identity, i.e. G^{ab} (du)_a theta_b.
ScalarField torsion_pairing(const MetricField& metric, const ScalarField& u, const TorsionOneForm& theta);
/// Pointwise |theta|^2 = G^{ab} theta_a theta_b for the real torsion form.
ScalarField torsion_norm2(const MetricField& metric, const TorsionOneForm& theta);

}  // namespace herm
