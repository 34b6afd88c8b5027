#include "herm/curvature.hpp"

#include <cmath>

#include "herm/errors.hpp"
#include "herm/spectral.hpp"

namespace herm {
namespace {

// Pointwise inverse matrices, stored as n*n arrays of samples.
std::vector<std::vector<cd>> inverse_fields(const MetricField& metric) {
  const int n = metric.n();
  const std::size_t size = metric.grid().size();
  std::vector<std::vector<cd>> inv(n * n, std::vector<cd>(size));
  for (std::size_t p = 0; p < size; ++p) {
    const SmallMatrix G = metric.inverse_at(p);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) inv[a * n + b][p] = G(a, b);
  }
  return inv;
}

}  // namespace

ChernCurvatureField chern_curvature(const MetricField& metric) {
  const TorusGrid& g = metric.grid();
  const int n = metric.n();
  const std::size_t size = g.size();

  std::vector<FieldSpectrum> spectra;
  spectra.reserve(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) spectra.emplace_back(metric.entry(a, b));

  // D[(i*n + a)*n + b] = d_i g_{a bbar}
  std::vector<ScalarField> D;
  D.reserve(n * n * n);
  for (int i = 0; i < n; ++i) {
    const auto sym = DerivativeSymbol::first(LinearDerivative::holomorphic(g, i));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) D.push_back(spectra[a * n + b].apply(sym, false));
  }
  auto d = [&](int i, int a, int b) -> const ScalarField& { return D[(i * n + a) * n + b]; };

  const auto inv = inverse_fields(metric);

  ChernCurvatureField R;
  R.n = n;
  R.comps.assign(static_cast<std::size_t>(n) * n * n * n, ScalarField(g, false));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto sym = DerivativeSymbol::second(LinearDerivative::holomorphic(g, i),
                                                LinearDerivative::antiholomorphic(g, j));
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          ScalarField out = spectra[k * n + l].apply(sym, false);
          auto v = out.values();
          for (std::size_t p = 0; p < size; ++p) {
            cd s = -v[p];
            for (int pp = 0; pp < n; ++pp) {
              // d_jbar g_{p lbar} = conj(d_j g_{l pbar})
              const cd right = std::conj(d(j, l, pp)[p]);
              for (int q = 0; q < n; ++q) s += inv[q * n + pp][p] * d(i, k, q)[p] * right;
            }
            v[p] = s;
          }
          R.comps[ChernCurvatureField::slot(n, i, j, k, l)] = std::move(out);
        }
      }
    }
  }
  return R;
}

double hermitian_symmetry_residual(const ChernCurvatureField& R) {
  const int n = R.n;
  double scale = 0.0;
  for (const auto& c : R.comps) scale = std::max(scale, c.max_abs());
  double worst = 0.0;
  const std::size_t size = R.grid().size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const auto& a = R(i, j, k, l);
          const auto& b = R(j, i, l, k);
          for (std::size_t p = 0; p < size; ++p) {
            worst = std::max(worst, std::abs(std::conj(a[p]) - b[p]));
          }
        }
  return scale > 0.0 ? worst / scale : worst;
}

double hsc_at(const ChernCurvatureField& R, const Direction& d) {
  const int n = R.n;
  if (d.v.size() != n) throw DimensionMismatch("hsc_at: direction length must be n");
  if (d.point >= R.grid().size()) throw InvalidArgument("hsc_at: point index out of range");
  cd s{0.0, 0.0};
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const cd t = R.at(d.point, i, j, k, l) * d.v(i) * std::conj(d.v(j)) * d.v(k) *
                       std::conj(d.v(l));
          s += t;
          scale += std::abs(t);
        }
  if (std::abs(s.imag()) > 1e-10 * std::max(1.0, scale)) {
    throw Error("hsc_at: holomorphic sectional curvature has a non-real value");
  }
  return s.real();
}

double metric_norm2(const MetricField& metric, const Direction& d) {
  const SmallMatrix G = metric.at(d.point);
  return (d.v.transpose() * G * d.v.conjugate())(0, 0).real();
}

ScalarField scalar_S(const MetricField& metric, const ChernCurvatureField& R) {
  const int n = metric.n();
  ScalarField out(metric.grid(), false);
  auto v = out.values();
  for (std::size_t p = 0; p < v.size(); ++p) {
    const SmallMatrix inv = metric.inverse_at(p);
    cd s{0.0, 0.0};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) s += inv(j, i) * inv(l, k) * R.at(p, i, j, k, l);
    v[p] = s;
  }
  out.mark_real();
  return out;
}

ScalarField scalar_S_hat(const MetricField& metric, const ChernCurvatureField& R) {
  const int n = metric.n();
  ScalarField out(metric.grid(), false);
  auto v = out.values();
  for (std::size_t p = 0; p < v.size(); ++p) {
    const SmallMatrix inv = metric.inverse_at(p);
    cd s{0.0, 0.0};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) s += inv(l, i) * inv(j, k) * R.at(p, i, j, k, l);
    v[p] = s;
  }
  out.mark_real();
  return out;
}

std::vector<ScalarField> ricci_components(const MetricField& metric) {
  const TorusGrid& g = metric.grid();
  const int n = metric.n();
  const ScalarField logdet = map(metric.det(), [](cd z) { return cd{std::log(z.real()), 0.0}; }, true);
  const FieldSpectrum spec(logdet);
  std::vector<ScalarField> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto sym = DerivativeSymbol::second(LinearDerivative::holomorphic(g, i),
                                                LinearDerivative::antiholomorphic(g, j));
      out.push_back(-1.0 * spec.apply(sym, false));
    }
  }
  return out;
}

FormField ricci_form(const MetricField& metric) {
  const int n = metric.n();
  const auto ric = ricci_components(metric);
  FormField c(metric.grid(), 2, Basis::complex);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.at((1u << i) | (1u << (n + j))) = cd{0.0, 1.0} * ric[i * n + j];
  FormField r = to_real_basis(c);
  r.mark_real();
  return r;
}

ScalarField trace_with_omega(const FormField& two_form, const MetricField& metric) {
  if (two_form.degree() != 2 || two_form.basis() != Basis::real) {
    throw InvalidArgument("trace_with_omega: real-basis 2-form required");
  }
  const int n = metric.n();
  const ScalarField num = oriented_top(wedge(two_form, omega_power(metric, n - 1)));
  const ScalarField den = oriented_top(omega_power(metric, n));
  ScalarField out(metric.grid(), false);
  auto v = out.values();
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = static_cast<double>(n) * num[p] / den[p];
  out.mark_real();
  return out;
}

}  // namespace herm
