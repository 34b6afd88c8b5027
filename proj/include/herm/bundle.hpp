#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "herm/laplace.hpp"
#include "herm/metric.hpp"

namespace herm {

/// Hermitian metric on the trivial rank-r bundle over the torus:
/// h = exp(weight) * (base + sum of terms + partners), plus an optional constant
/// background curvature B_{i jbar} (n x n Hermitian) added to every curvature block as
/// B_{i jbar} * Id. A nonzero B stands for the non-periodic weight exp(-B_{i jbar} z^i zbar^j)
/// of a line bundle with nonzero degree; without it every periodic line bundle metric has
/// mean curvature of zero average against a Gauduchon volume.
struct BundleSpec {
  int rank = 1;
  SmallMatrix base;
  std::vector<MatrixTerm> terms;  // row/col are fiber indices, wave vectors have length 2n
  RealSeries weight;
  SmallMatrix background;  // empty or n x n

  static BundleSpec trivial(int rank);
  /// Analytic value of h at a point (without the background weight).
  SmallMatrix evaluate(const Point& x) const;
};

/// Pointwise r x r Hermitian positive-definite matrix h_{alpha betabar}.
class BundleMetricField {
 public:
  BundleMetricField(std::vector<ScalarField> entries, int rank, PositivityOptions opts = {},
                    SmallMatrix background = {});

  const TorusGrid& grid() const { return entries_.front().grid(); }
  int rank() const { return rank_; }
  const ScalarField& entry(int a, int b) const { return entries_[a * rank_ + b]; }
  SmallMatrix at(std::size_t p) const;
  /// Constant curvature offset B_{i jbar}; zero matrix when absent.
  const SmallMatrix& background() const { return background_; }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  std::vector<ScalarField> entries_;
  int rank_;
  SmallMatrix background_;
  double min_eigenvalue_ = 0.0;
};

BundleMetricField build_bundle_metric(const BundleSpec& spec, const TorusGrid& grid,
                                      PositivityOptions opts = {});
/// e^u h (u real).
BundleMetricField conformal(const BundleMetricField& h, const ScalarField& u);
BundleMetricField scaled(const BundleMetricField& h, double lambda);
/// A h A^H: the same metric in the frame s'_alpha = A_alpha^beta s_beta.
BundleMetricField change_frame(const BundleMetricField& h, const SmallMatrix& A);
/// h = (det g)^{-m} on the m-th power of the canonical bundle.
BundleMetricField canonical_bundle_metric(const MetricField& metric, int m);

/// R^beta_{i jbar alpha} of the Chern connection, one field per (i, j, alpha, beta).
struct BundleCurvatureField {
  int n = 0;
  int rank = 0;
  std::vector<ScalarField> comps;

  std::size_t slot(int i, int j, int a, int b) const {
    return static_cast<std::size_t>(((i * n + j) * rank + a) * rank + b);
  }
  const TorusGrid& grid() const { return comps.front().grid(); }
  const ScalarField& operator()(int i, int j, int a, int b) const { return comps[slot(i, j, a, b)]; }
  /// Matrix (alpha, beta) -> R^beta_{i jbar alpha} at one point.
  SmallMatrix block(std::size_t p, int i, int j) const;
};

/// R_{i jbar} = -d_jbar(d_i h h^{-1}) + B_{i jbar} Id, evaluated in the expanded form
/// -d_i d_jbar h h^{-1} + d_i h h^{-1} d_jbar h h^{-1} from spectral derivatives of h.
BundleCurvatureField bundle_curvature(const BundleMetricField& h);
/// Largest |conj(L_{i jbar alpha mubar}) - L_{j ibar mu alphabar}| relative to max |L|, where
/// L_{i jbar alpha mubar} = h_{beta mubar} R^beta_{i jbar alpha}.
double bundle_hermitian_residual(const BundleCurvatureField& R, const BundleMetricField& h);

/// K_{alpha betabar} = h_{gamma betabar} g^{i jbar} R^gamma_{i jbar alpha}.
struct MeanCurvatureField {
  int rank = 0;
  std::vector<ScalarField> entries;

  const TorusGrid& grid() const { return entries.front().grid(); }
  const ScalarField& entry(int a, int b) const { return entries[a * rank + b]; }
  SmallMatrix at(std::size_t p) const;
};

MeanCurvatureField mean_curvature(const MetricField& metric, const BundleMetricField& h,
                                  const BundleCurvatureField& R);
/// Largest |K - K^H| relative to max |K|.
double mean_curvature_hermitian_residual(const MeanCurvatureField& K);

/// All generalized eigenvalues of K xi = lambda h xi, ascending, one field each.
/// Throws EigenFailure with the offending point.
std::vector<ScalarField> bundle_eigenvalues(const MeanCurvatureField& K, const BundleMetricField& h);
/// Greatest generalized eigenvalue gamma.
ScalarField gamma_field(const MeanCurvatureField& K, const BundleMetricField& h);

/// Residual of K~ = e^u (K + Delta_c(u) h) for h~ = e^u h, max-norm relative to max |K~|.
double conformal_bundle_check(const MetricField& metric, const BundleMetricField& h,
                              const ScalarField& u);

/// Largest spectral coefficient among modes with some |k_a| > 3N/8, relative to the
/// largest coefficient; large values signal an eigenvalue crossing (gamma not smooth).
double spectral_tail(const ScalarField& f);

enum class CertificateStatus { certified, hypothesis_failed, certificate_failed };
std::string to_string(CertificateStatus s);

struct CertificateOptions {
  PoissonOptions poisson;
  double gauduchon_tol = 1e-6;
  double hypothesis_band = 1e-10;   // mean gamma must be below -band * max |gamma|
  double margin_rel = 1e-8;         // eigenvalues must be below -margin_rel * max |K~|
  double smoothness_warning = 1e-8; // spectral_tail above this sets smoothness_warning
};

struct VanishingCertificate {
  CertificateStatus status = CertificateStatus::hypothesis_failed;
  ScalarField gamma;
  double gamma_integral = 0.0;  // int gamma omega0^n
  double gamma_mean = 0.0;      // gamma_integral / int omega0^n
  ScalarField u0;               // solves Delta_c u0 = -(gamma - gamma_mean)
  double min_gap = 0.0;         // -max over points and eigenvalues of the transformed K~
  double margin = 0.0;          // required gap: margin_rel * max |K~|
  std::size_t worst_point = 0;
  double laplacian_integral = 0.0;  // |int Delta_c u0 omega0^n| / int |Delta_c u0| omega0^n
  double gamma_tail = 0.0;
  bool smoothness_warning = false;
  std::string message;
  SolveReport report;
};

/// Builds e^{u0} h with pointwise negative-definite mean curvature when int gamma omega0^n < 0.
/// Throws PreconditionViolation when gmetric is not Gauduchon.
VanishingCertificate vanishing_certificate(const MetricField& gmetric, const BundleMetricField& h,
                                           const CertificateOptions& options = {});

/// The section c (dz^1 ^ ... ^ dz^n)^{(x) m} of m K_M.
struct CanonicalSection {
  int m = 1;
  cd c{1.0, 0.0};

  /// |sigma|^2 = |c|^2 det(g)^{-m}
  ScalarField norm2(const MetricField& metric) const;
};

struct WeitzenbockTerms {
  ScalarField lhs;        // -Delta_c |sigma|^2
  ScalarField gradient;   // |nabla sigma|^2
  ScalarField curvature;  // m S |sigma|^2
  double residual = 0.0;  // max |lhs - gradient - curvature| / (max|curvature| + max|gradient|)
};

WeitzenbockTerms weitzenbock_terms(const MetricField& metric, const CanonicalSection& sec);
double weitzenbock_residual(const MetricField& metric, const CanonicalSection& sec);

}  // namespace herm
