#include <bit>
#include <cmath>
#include <numbers>

#include "herm/errors.hpp"
#include "herm/laplace.hpp"
#include "herm/spectral.hpp"

namespace herm {

ComplexLaplacian::ComplexLaplacian(const MetricField& metric)
    : grid_(metric.grid()), n_(metric.n()) {
  inverse_.assign(n_ * n_, std::vector<cd>(grid_.size()));
  for (std::size_t p = 0; p < grid_.size(); ++p) {
    const SmallMatrix inv = metric.inverse_at(p);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) inverse_[a * n_ + b][p] = inv(a, b);
  }
}

ScalarField ComplexLaplacian::apply(const ScalarField& u) const {
  require_same_grid(u.grid(), grid_, "laplacian_c");
  const FieldSpectrum spec(u);
  const std::size_t size = grid_.size();
  std::vector<cd> acc(size, cd{0.0, 0.0});
  auto symbol = [&](int i, int j) {
    return DerivativeSymbol::second(LinearDerivative::holomorphic(grid_, i),
                                    LinearDerivative::antiholomorphic(grid_, j));
  };
  // acc -= g^{i jbar} * d, optionally also the conjugate term g^{j ibar} * conj(d)
  auto add = [&](const ScalarField& d, int i, int j, bool with_partner) {
    const auto& inv = inverse_[j * n_ + i];
    const auto& partner = inverse_[i * n_ + j];
    for (std::size_t p = 0; p < size; ++p) {
      acc[p] -= inv[p] * d[p];
      if (with_partner) acc[p] -= partner[p] * std::conj(d[p]);
    }
  };
  if (u.is_real()) {
    // d_j d_ibar u = conj(d_i d_jbar u), and two real diagonal terms share one transform
    for (int i = 0; i < n_; i += 2) {
      std::vector<cd> c;
      spec.accumulate(symbol(i, i), 1.0, c);
      if (i + 1 < n_) spec.accumulate(symbol(i + 1, i + 1), cd{0.0, 1.0}, c);
      const ScalarField both = inverse_transform(grid_, c, false);
      add(both.real_part(), i, i, false);
      if (i + 1 < n_) {
        const ScalarField second = map(both, [](cd z) { return cd{z.imag(), 0.0}; }, true);
        add(second, i + 1, i + 1, false);
      }
    }
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) add(spec.apply(symbol(i, j), false), i, j, true);
    ScalarField out(grid_, std::move(acc), false);
    out.mark_real(1e-8);
    return out;
  }
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) add(spec.apply(symbol(i, j), false), i, j, false);
  return ScalarField(grid_, std::move(acc), false);
}

AdjointComplexLaplacian::AdjointComplexLaplacian(const MetricField& metric)
    : volume_(riemannian_volume_density(metric)) {
  const TorusGrid& g = metric.grid();
  const int n = metric.n();
  const FormField power = to_complex_basis(omega_power(metric, n - 1));
  const unsigned all = (1u << (2 * n)) - 1u;
  for (std::size_t c = 0; c < power.component_count(); ++c) {
    const unsigned I = power.mask(c);
    if (power.component(c).max_abs() == 0.0) continue;
    const unsigned missing = all & ~I;
    if (std::popcount(missing & ((1u << n) - 1u)) != 1) continue;  // not of type (n-1, n-1)
    int i = std::countr_zero(missing & ((1u << n) - 1u));
    int jb = std::countr_zero(missing >> n) + n;
    const unsigned ej = 1u << jb;
    const int sign = wedge_sign(1u << i, I | ej) * wedge_sign(ej, I);
    terms_.push_back({power.component(c), i, jb - n, static_cast<double>(sign)});
  }
  // real-basis oriented coefficient of the complex top monomial
  FormField top(g, 2 * n, Basis::complex);
  top.component(0) = ScalarField::constant(g, 1.0);
  const cd kappa = oriented_top(to_real_basis(top))[0];
  factor_ = cd{0.0, -1.0} / std::tgamma(n) * kappa;
}

ScalarField AdjointComplexLaplacian::apply(const ScalarField& f) const {
  const TorusGrid& g = volume_.grid();
  require_same_grid(f.grid(), g, "adjoint_c");
  std::vector<cd> acc;
  for (const auto& t : terms_) {
    const auto sym = DerivativeSymbol::second(LinearDerivative::holomorphic(g, t.i),
                                              LinearDerivative::antiholomorphic(g, t.j));
    FieldSpectrum(f * t.coefficient).accumulate(sym, t.sign, acc);
  }
  if (acc.empty()) return ScalarField(g, f.is_real());
  ScalarField out = inverse_transform(g, acc, false);
  auto v = out.values();
  for (std::size_t p = 0; p < v.size(); ++p) v[p] *= factor_ / volume_[p].real();
  if (f.is_real()) out.mark_real(1e-8);
  return out;
}

FlatInverse::FlatInverse(const MetricField& metric) : grid_(metric.grid()) {
  const int n = metric.n();
  SmallMatrix mean = SmallMatrix::Zero(n, n);
  for (std::size_t p = 0; p < grid_.size(); ++p) mean += metric.inverse_at(p);
  mean /= static_cast<double>(grid_.size());
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const int N = grid_.N();
  symbol_.assign(grid_.size(), 0.0);
  for_each_index(grid_, [&](std::size_t p, const AxisIndex& idx) {
    bool zero = true;
    for (int a = 0; a < grid_.axes(); ++a) {
      if (is_nyquist(idx[a], N)) return;
      zero = zero && idx[a] == 0;
    }
    if (zero) {
      symbol_[p] = 1.0;
      return;
    }
    std::array<cd, kMaxComplexDim> a{};
    for (int i = 0; i < n; ++i) {
      a[i] = cd{static_cast<double>(signed_wavenumber(idx[grid_.x_axis(i)], N)),
                -static_cast<double>(signed_wavenumber(idx[grid_.y_axis(i)], N))};
    }
    cd s{0.0, 0.0};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += mean(j, i) * a[i] * std::conj(a[j]);
    symbol_[p] = 1.0 / (pi2 * s.real());
  });
}

ScalarField FlatInverse::apply(const ScalarField& f) const {
  require_same_grid(f.grid(), grid_, "flat inverse");
  std::vector<cd> c = forward_transform(f);
  for (std::size_t p = 0; p < c.size(); ++p) c[p] *= symbol_[p];
  return inverse_transform(grid_, c, f.is_real());
}

ScalarField laplacian_c(const MetricField& metric, const ScalarField& u) {
  return ComplexLaplacian(metric).apply(u);
}

ScalarField laplacian_riemann(const MetricField& metric, const ScalarField& u) {
  return codifferential(exterior_d(zero_form(u)), metric);
}

ScalarField adjoint_c(const MetricField& metric, const ScalarField& f) {
  return AdjointComplexLaplacian(metric).apply(f);
}

ScalarField torsion_pairing(const MetricField& metric, const ScalarField& u,
                            const TorsionOneForm& theta) {
  return form_inner_product(exterior_d(zero_form(u)), theta.real_form(), metric);
}

ScalarField torsion_norm2(const MetricField& metric, const TorsionOneForm& theta) {
  const FormField t = theta.real_form();
  return form_inner_product(t, t, metric);
}

}  // namespace herm
