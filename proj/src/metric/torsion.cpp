#include <Eigen/LU>
#include <sstream>

#include "herm/errors.hpp"
#include "herm/metric.hpp"
#include "herm/spectral.hpp"

namespace herm {
namespace {

constexpr double kWedgeConditionFloor = 1e-12;

double relative(double num, double den) { return den > 0.0 ? num / den : num; }

}  // namespace

FormField TorsionOneForm::real_form() const {
  const TorusGrid& g = grid();
  const int n = g.n();
  FormField out(g, 1, Basis::real);
  for (int j = 0; j < n; ++j) {
    ScalarField x(g, true), y(g, true);
    auto xv = x.values();
    auto yv = y.values();
    auto t = components[j].values();
    for (std::size_t p = 0; p < t.size(); ++p) {
      xv[p] = 2.0 * t[p].real();
      yv[p] = -2.0 * t[p].imag();
    }
    out.at(1u << g.x_axis(j)) = std::move(x.mark_real());
    out.at(1u << g.y_axis(j)) = std::move(y.mark_real());
  }
  return out;
}

TorsionOneForm torsion(const MetricField& metric) {
  const TorusGrid& g = metric.grid();
  const int n = metric.n();
  const int m = 2 * n;
  const FormField power = omega_power(metric, n - 1);
  const FormField target = exterior_d(power);

  struct Slot {
    std::size_t source;
    int row;
    int col;
    double sign;
  };
  std::vector<Slot> slots;
  for (std::size_t c = 0; c < power.component_count(); ++c) {
    const unsigned I = power.mask(c);
    for (int a = 0; a < m; ++a) {
      const unsigned e = 1u << a;
      if (I & e) continue;
      slots.push_back({c, static_cast<int>(target.component_index(I | e)), a,
                       static_cast<double>(wedge_sign(I, e))});
    }
  }

  std::vector<std::vector<double>> coeff(m, std::vector<double>(g.size()));
  Eigen::MatrixXd W(m, m);
  Eigen::VectorXd rhs(m);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  for (std::size_t p = 0; p < g.size(); ++p) {
    W.setZero();
    for (const auto& s : slots) W(s.row, s.col) += s.sign * power.component(s.source)[p].real();
    for (int r = 0; r < m; ++r) rhs(r) = target.component(r)[p].real();
    lu.compute(W);
    const double rc = lu.rcond();
    if (!(rc > kWedgeConditionFloor)) {
      std::ostringstream msg;
      msg << "wedge map with omega^{n-1} is singular at point " << p << " (rcond " << rc << ")";
      throw SingularWedgeMap(msg.str());
    }
    const Eigen::VectorXd a = lu.solve(rhs);
    for (int k = 0; k < m; ++k) coeff[k][p] = a(k);
  }

  TorsionOneForm theta;
  for (int j = 0; j < n; ++j) {
    ScalarField t(g, false);
    auto v = t.values();
    const auto& ax = coeff[g.x_axis(j)];
    const auto& ay = coeff[g.y_axis(j)];
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = 0.5 * cd{ax[p], -ay[p]};
    theta.components.push_back(std::move(t));
  }
  const FormField rebuilt = wedge(power, theta.real_form());
  theta.reconstruction_residual = relative(max_abs_diff(rebuilt, target), target.max_abs());
  return theta;
}

StructureResiduals structure_residuals(const MetricField& metric) {
  const int n = metric.n();
  StructureResiduals r;
  const FormField w = omega_form(metric);
  r.kahler = relative(exterior_d(w).max_abs(), w.max_abs());
  if (n == 1) return r;
  const FormField power = omega_power(metric, n - 1);
  r.balanced = relative(exterior_d(power).max_abs(), power.max_abs());
  r.gauduchon = relative(to_real_basis(ddbar(to_complex_basis(power))).max_abs(), power.max_abs());
  return r;
}

ScalarField ddbar_scalar(const ScalarField& f, const MetricField& metric) {
  require_same_grid(f.grid(), metric.grid(), "ddbar_scalar");
  const int n = metric.n();
  const FormField power = to_complex_basis(omega_power(metric, n - 1));
  const FormField top = to_real_basis(ddbar(scale(power, f)));
  ScalarField phi = oriented_top(top);
  const ScalarField vol = riemannian_volume_density(metric);
  auto v = phi.values();
  for (std::size_t p = 0; p < v.size(); ++p) v[p] /= vol[p].real();
  return phi;
}

double coclosed_residual(const TorsionOneForm& theta, const MetricField& metric) {
  return codifferential(theta.real_form(), metric).max_abs();
}

}  // namespace herm
