#include <Eigen/LU>
#include <bit>
#include <cmath>

#include "herm/errors.hpp"
#include "herm/metric.hpp"
#include "herm/spectral.hpp"

namespace herm {
namespace {

std::vector<int> symbols_of(unsigned mask) {
  std::vector<int> s;
  for (int a = 0; mask != 0; ++a, mask >>= 1)
    if (mask & 1u) s.push_back(a);
  return s;
}

// det of the minor of M with the given row and column symbol sets
double minor_det(const SmallRealMatrix& M, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return 1.0;
  if (k == 1) return M(rows[0], cols[0]);
  SmallRealMatrix sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = M(rows[i], cols[j]);
  return sub.determinant();
}

// Components of the form with indices raised by G^{-1}, at one point.
void raise_indices(const FormField& form, const SmallRealMatrix& Ginv,
                   const std::vector<std::vector<int>>& sym, std::size_t p, std::vector<double>& out) {
  const std::size_t count = form.component_count();
  out.assign(count, 0.0);
  for (std::size_t I = 0; I < count; ++I) {
    double s = 0.0;
    for (std::size_t J = 0; J < count; ++J) {
      const double v = form.component(J)[p].real();
      if (v == 0.0) continue;
      s += minor_det(Ginv, sym[I], sym[J]) * v;
    }
    out[I] = s;
  }
}

std::vector<std::vector<int>> symbol_table(const FormField& f) {
  std::vector<std::vector<int>> t;
  for (std::size_t c = 0; c < f.component_count(); ++c) t.push_back(symbols_of(f.mask(c)));
  return t;
}

void require_real_basis(const FormField& f, const char* where) {
  if (f.basis() != Basis::real) throw InvalidArgument(std::string(where) + ": real basis required");
}

}  // namespace

SmallRealMatrix riemannian_metric_at(const MetricField& metric, std::size_t p) {
  const int n = metric.n();
  const SmallMatrix g = metric.at(p);
  SmallRealMatrix G(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = 2.0 * g(i, j).real();
      const double b = 2.0 * g(i, j).imag();
      G(i, j) = a;
      G(n + i, n + j) = a;
      G(i, n + j) = b;
      G(n + i, j) = -b;
    }
  }
  return G;
}

ScalarField riemannian_volume_density(const MetricField& metric) {
  ScalarField out(metric.grid(), true);
  auto v = out.values();
  for (std::size_t p = 0; p < v.size(); ++p) {
    v[p] = std::sqrt(riemannian_metric_at(metric, p).determinant());
  }
  out.mark_real();
  return out;
}

ScalarField form_inner_product(const FormField& a, const FormField& b, const MetricField& metric) {
  require_real_basis(a, "form_inner_product");
  require_real_basis(b, "form_inner_product");
  if (a.degree() != b.degree()) throw InvalidArgument("form_inner_product: degree mismatch");
  require_same_grid(a.grid(), metric.grid(), "form_inner_product");
  const auto sym = symbol_table(a);
  ScalarField out(metric.grid(), true);
  auto v = out.values();
  std::vector<double> raised;
  for (std::size_t p = 0; p < v.size(); ++p) {
    const SmallRealMatrix Ginv = riemannian_metric_at(metric, p).inverse();
    raise_indices(a, Ginv, sym, p, raised);
    double s = 0.0;
    for (std::size_t c = 0; c < raised.size(); ++c) s += raised[c] * b.component(c)[p].real();
    v[p] = s;
  }
  out.mark_real();
  return out;
}

FormField hodge_star(const FormField& form, const MetricField& metric) {
  require_real_basis(form, "hodge_star");
  require_same_grid(form.grid(), metric.grid(), "hodge_star");
  const TorusGrid& g = form.grid();
  const int m = g.axes();
  const unsigned all = (1u << m) - 1u;
  const double orient = orientation_sign(g.n());
  FormField out(g, m - form.degree(), Basis::real);
  const auto sym = symbol_table(form);
  std::vector<std::size_t> target(form.component_count());
  std::vector<double> sign(form.component_count());
  for (std::size_t c = 0; c < form.component_count(); ++c) {
    const unsigned I = form.mask(c);
    target[c] = out.component_index(all & ~I);
    sign[c] = orient * wedge_sign(I, all & ~I);
  }
  std::vector<std::vector<cd>> acc(out.component_count(), std::vector<cd>(g.size()));
  std::vector<double> raised;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const SmallRealMatrix G = riemannian_metric_at(metric, p);
    const double vol = std::sqrt(G.determinant());
    raise_indices(form, G.inverse(), sym, p, raised);
    for (std::size_t c = 0; c < raised.size(); ++c) acc[target[c]][p] = sign[c] * vol * raised[c];
  }
  for (std::size_t c = 0; c < out.component_count(); ++c) {
    out.component(c) = ScalarField(g, std::move(acc[c]), false);
    out.component(c).mark_real();
  }
  return out;
}

ScalarField codifferential(const FormField& one_form, const MetricField& metric) {
  require_real_basis(one_form, "codifferential");
  if (one_form.degree() != 1) throw InvalidArgument("codifferential: 1-form required");
  require_same_grid(one_form.grid(), metric.grid(), "codifferential");
  const TorusGrid& g = metric.grid();
  const int m = g.axes();
  std::vector<ScalarField> flux(m, ScalarField(g, false));
  std::vector<double> vol(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const SmallRealMatrix G = riemannian_metric_at(metric, p);
    const SmallRealMatrix Ginv = G.inverse();
    vol[p] = std::sqrt(G.determinant());
    for (int a = 0; a < m; ++a) {
      double s = 0.0;
      for (int b = 0; b < m; ++b) s += Ginv(a, b) * one_form.at(1u << b)[p].real();
      flux[a].values()[p] = vol[p] * s;
    }
  }
  std::vector<cd> acc(g.size(), cd{0.0, 0.0});
  for (int a = 0; a < m; ++a) {
    FieldSpectrum(flux[a]).accumulate(DerivativeSymbol::first(LinearDerivative::axis(a)), -1.0, acc);
  }
  ScalarField div = inverse_transform(g, acc, true);
  auto v = div.values();
  for (std::size_t p = 0; p < v.size(); ++p) v[p] /= vol[p];
  div.mark_real();
  return div;
}

}  // namespace herm
