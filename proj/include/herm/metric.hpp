#pragma once

#include <Eigen/Dense>
#include <vector>

#include "herm/forms.hpp"
#include "herm/grid.hpp"
#include "herm/trig.hpp"

namespace herm {

using SmallMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAxes, kMaxAxes>;
using SmallRealMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAxes, kMaxAxes>;
using SmallVector = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, kMaxAxes, 1>;

/// One Fourier term added to matrix entry (row, col) (0-based) together with its
/// conjugate-transpose partner at (col, row).
struct MatrixTerm {
  int row = 0;
  int col = 0;
  FourierTerm term;
};

/// Input description of a Hermitian metric g = exp(u) * (base + sum of terms + partners).
struct MetricSpec {
  int n = 2;
  SmallMatrix base;
  std::vector<MatrixTerm> terms;
  RealSeries conformal;

  static MetricSpec identity(int n);
  /// Analytic value of g at an arbitrary point.
  SmallMatrix evaluate(const Point& x) const;
};

struct PositivityOptions {
  double floor = 1e-6;
  double hermitian_tol = 1e-12;
};

/// Pointwise n x n Hermitian positive-definite matrix g_{i jbar}.
/// Entry (i, j) holds g_{i jbar}; the inverse convention is g^{i jbar} = (g^{-1})(j, i).
class MetricField {
 public:
  /// Validates Hermitian symmetry and positive-definiteness.
  MetricField(std::vector<ScalarField> entries, int n, PositivityOptions opts = {});

  const TorusGrid& grid() const { return entries_.front().grid(); }
  int n() const { return n_; }
  const ScalarField& entry(int i, int j) const { return entries_[i * n_ + j]; }

  SmallMatrix at(std::size_t p) const;
  /// Matrix inverse of at(p).
  SmallMatrix inverse_at(std::size_t p) const;
  ScalarField det() const;
  /// Smallest pointwise eigenvalue found during validation.
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  std::vector<ScalarField> entries_;
  int n_;
  double min_eigenvalue_ = 0.0;
};

MetricField build_metric(const MetricSpec& spec, const TorusGrid& grid, PositivityOptions opts = {});

/// omega = i g_{i jbar} dz^i ^ dzbar^j, returned in the real basis.
FormField omega_form(const MetricField& metric);
/// omega^k for 0 <= k <= n (k = 0 gives the constant 0-form 1), real basis.
FormField omega_power(const MetricField& metric, int k);

/// Density of omega^n against dx^1 dy^1 ... dx^n dy^n: 2^n n! det g.
ScalarField omega_n_density(const MetricField& metric);
/// Literal integral of f omega^n = 2^n n! integrate(f det g).
double volume_integral(const ScalarField& f, const MetricField& metric);

MetricField conformal(const MetricField& metric, const ScalarField& u, PositivityOptions opts = {});
MetricField scaled(const MetricField& metric, double lambda);

/// Torsion 1-form theta with d omega^{n-1} = omega^{n-1} ^ theta. Stores the (1,0)
/// components theta_i; the real form is theta_i dz^i + conj.
struct TorsionOneForm {
  std::vector<ScalarField> components;
  /// max |d omega^{n-1} - omega^{n-1} ^ theta| relative to max |d omega^{n-1}|.
  double reconstruction_residual = 0.0;

  const TorusGrid& grid() const { return components.front().grid(); }
  FormField real_form() const;
};

TorsionOneForm torsion(const MetricField& metric);

struct StructureResiduals {
  double kahler = 0.0;     // |d omega| / |omega|
  double balanced = 0.0;   // |d omega^{n-1}| / |omega^{n-1}|
  double gauduchon = 0.0;  // |ddbar omega^{n-1}| / |omega^{n-1}|
};

StructureResiduals structure_residuals(const MetricField& metric);

/// phi with ddbar(f omega^{n-1}) = phi * omega^n / n!.
ScalarField ddbar_scalar(const ScalarField& f, const MetricField& metric);

/// max |d* theta| for the Riemannian metric induced by omega.
double coclosed_residual(const TorsionOneForm& theta, const MetricField& metric);

// Underlying Riemannian structure G = 2 Re(g) in the (x, y) basis:
//   G(x^i, x^j) = G(y^i, y^j) = 2 Re g_{i jbar},  G(x^i, y^j) = -G(y^i, x^j) = 2 Im g_{i jbar}.

SmallRealMatrix riemannian_metric_at(const MetricField& metric, std::size_t p);
/// sqrt(det G) = 2^n det g.
ScalarField riemannian_volume_density(const MetricField& metric);
/// Pointwise G-inner product of two real-basis forms of equal degree.
ScalarField form_inner_product(const FormField& a, const FormField& b, const MetricField& metric);
/// Hodge star of a real-basis form with orientation dx^1^dy^1^...^dx^n^dy^n.
FormField hodge_star(const FormField& form, const MetricField& metric);
/// d* of a real 1-form via the divergence formula.
ScalarField codifferential(const FormField& one_form, const MetricField& metric);

}  // namespace herm
