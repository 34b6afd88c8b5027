#include "herm/forms.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>

#include "herm/errors.hpp"
#include "herm/spectral.hpp"

namespace herm {
namespace {

void collect(int symbols, int degree, int start, unsigned mask, std::vector<unsigned>& out) {
  if (degree == 0) {
    out.push_back(mask);
    return;
  }
  for (int s = start; s <= symbols - degree; ++s) {
    collect(symbols, degree - 1, s + 1, mask | (1u << s), out);
  }
}

bool identically_zero(const ScalarField& f) {
  for (const auto& v : f.values()) {
    if (v != cd{0.0, 0.0}) return false;
  }
  return true;
}

LinearDerivative symbol_derivative(const TorusGrid& g, Basis basis, int s) {
  if (basis == Basis::real) return LinearDerivative::axis(s);
  return s < g.n() ? LinearDerivative::holomorphic(g, s)
                   : LinearDerivative::antiholomorphic(g, s - g.n());
}

enum class SymbolSet { all, holomorphic, antiholomorphic };

bool in_set(SymbolSet set, int s, int n) {
  switch (set) {
    case SymbolSet::all:
      return true;
    case SymbolSet::holomorphic:
      return s < n;
    case SymbolSet::antiholomorphic:
      return s >= n;
  }
  return false;
}

FormField first_order(const FormField& form, SymbolSet set) {
  const auto& g = form.grid();
  const int m = form.symbols();
  if (form.degree() >= m) throw InvalidArgument("exterior derivative of a top-degree form");
  FormField out(g, form.degree() + 1, form.basis());
  std::vector<std::vector<cd>> acc(out.component_count());
  for (std::size_t c = 0; c < form.component_count(); ++c) {
    const auto& comp = form.component(c);
    if (identically_zero(comp)) continue;
    FieldSpectrum spec(comp);
    const unsigned I = form.mask(c);
    for (int s = 0; s < m; ++s) {
      if ((I >> s) & 1u || !in_set(set, s, g.n())) continue;
      const unsigned e = 1u << s;
      const int sign = wedge_sign(e, I);
      spec.accumulate(DerivativeSymbol::first(symbol_derivative(g, form.basis(), s)),
                      static_cast<double>(sign), acc[out.component_index(I | e)]);
    }
  }
  const bool real = form.basis() == Basis::real && form.is_real();
  for (std::size_t c = 0; c < out.component_count(); ++c) {
    if (!acc[c].empty()) out.component(c) = inverse_transform(g, acc[c], real);
  }
  if (real) out.mark_real();
  return out;
}

// Per-symbol change of basis: e^a = sum_b T(a,b) c^b.
Eigen::MatrixXcd real_to_complex_matrix(int n) {
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    T(j, j) = 0.5;             // dx = (dz + dzbar)/2
    T(j, n + j) = 0.5;
    T(n + j, j) = cd{0.0, -0.5};  // dy = (dz - dzbar)/(2i)
    T(n + j, n + j) = cd{0.0, 0.5};
  }
  return T;
}

Eigen::MatrixXcd complex_to_real_matrix(int n) {
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    T(j, j) = 1.0;  // dz = dx + i dy
    T(j, n + j) = cd{0.0, 1.0};
    T(n + j, j) = 1.0;  // dzbar = dx - i dy
    T(n + j, n + j) = cd{0.0, -1.0};
  }
  return T;
}

struct CompoundEntry {
  std::size_t from;
  std::size_t to;
  cd value;
};

std::vector<CompoundEntry> compound(const Eigen::MatrixXcd& T, const std::vector<unsigned>& masks,
                                    const FormField& indexer) {
  std::vector<CompoundEntry> entries;
  const int m = static_cast<int>(T.rows());
  for (std::size_t r = 0; r < masks.size(); ++r) {
    for (std::size_t c = 0; c < masks.size(); ++c) {
      std::vector<int> rows, cols;
      for (int s = 0; s < m; ++s) {
        if ((masks[r] >> s) & 1u) rows.push_back(s);
        if ((masks[c] >> s) & 1u) cols.push_back(s);
      }
      cd det{1.0, 0.0};
      if (!rows.empty()) {
        Eigen::MatrixXcd sub(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
          for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = T(rows[i], cols[j]);
        det = sub.determinant();
      }
      if (std::abs(det) > 1e-14) {
        entries.push_back({indexer.component_index(masks[r]), indexer.component_index(masks[c]),
                           det});
      }
    }
  }
  return entries;
}

FormField change_basis(const FormField& form, const Eigen::MatrixXcd& T, Basis target) {
  FormField out(form.grid(), form.degree(), target);
  const auto masks = multi_indices(form.symbols(), form.degree());
  const auto entries = compound(T, masks, form);
  std::vector<bool> zero(form.component_count());
  for (std::size_t c = 0; c < form.component_count(); ++c) {
    zero[c] = identically_zero(form.component(c));
  }
  for (const auto& e : entries) {
    if (zero[e.from]) continue;
    auto src = form.component(e.from).values();
    auto dst = out.component(e.to).values();
    for (std::size_t p = 0; p < src.size(); ++p) dst[p] += e.value * src[p];
  }
  return out;
}

}  // namespace

std::vector<unsigned> multi_indices(int symbols, int degree) {
  std::vector<unsigned> out;
  if (degree < 0 || degree > symbols) return out;
  collect(symbols, degree, 0, 0u, out);
  return out;
}

int wedge_sign(unsigned a, unsigned b) {
  if (a & b) return 0;
  int inversions = 0;
  for (unsigned rest = b; rest != 0; rest &= rest - 1) {
    const unsigned low = rest & (~rest + 1);
    // count symbols of a that sit after this symbol of b
    inversions += std::popcount(a & ~(low | (low - 1)));
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

FormField::FormField(const TorusGrid& grid, int degree, Basis basis)
    : grid_(grid), degree_(degree), basis_(basis) {
  if (degree < 0 || degree > grid.axes()) throw InvalidArgument("FormField: degree out of range");
  masks_ = multi_indices(grid.axes(), degree);
  index_of_.assign(std::size_t{1} << grid.axes(), -1);
  for (std::size_t c = 0; c < masks_.size(); ++c) index_of_[masks_[c]] = static_cast<int>(c);
  comps_.assign(masks_.size(), ScalarField(grid, basis == Basis::real));
}

std::size_t FormField::component_index(unsigned mask) const {
  if (mask >= index_of_.size() || index_of_[mask] < 0) {
    throw InvalidArgument("FormField: multi-index not present");
  }
  return static_cast<std::size_t>(index_of_[mask]);
}

double FormField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comps_) m = std::max(m, c.max_abs());
  return m;
}

bool FormField::is_real() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const ScalarField& f) { return f.is_real(); });
}

FormField& FormField::mark_real(double tol) {
  for (auto& c : comps_) c.mark_real(tol);
  return *this;
}

FormField zero_form(const ScalarField& f) {
  FormField out(f.grid(), 0, Basis::real);
  out.component(0) = f;
  return out;
}

FormField wedge(const FormField& a, const FormField& b) {
  require_same_grid(a.grid(), b.grid(), "wedge");
  if (a.basis() != b.basis()) throw InvalidArgument("wedge: forms are stored in different bases");
  const int degree = a.degree() + b.degree();
  if (degree > a.symbols()) throw InvalidArgument("wedge: degree exceeds the dimension");
  FormField out(a.grid(), degree, a.basis());
  std::vector<bool> az(a.component_count()), bz(b.component_count());
  for (std::size_t i = 0; i < az.size(); ++i) az[i] = identically_zero(a.component(i));
  for (std::size_t j = 0; j < bz.size(); ++j) bz[j] = identically_zero(b.component(j));
  for (std::size_t i = 0; i < a.component_count(); ++i) {
    if (az[i]) continue;
    for (std::size_t j = 0; j < b.component_count(); ++j) {
      if (bz[j]) continue;
      const int sign = wedge_sign(a.mask(i), b.mask(j));
      if (sign == 0) continue;
      auto dst = out.at(a.mask(i) | b.mask(j)).values();
      auto x = a.component(i).values();
      auto y = b.component(j).values();
      for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += static_cast<double>(sign) * x[p] * y[p];
    }
  }
  if (a.basis() == Basis::real && a.is_real() && b.is_real()) out.mark_real();
  return out;
}

FormField scale(const FormField& a, const ScalarField& f) {
  require_same_grid(a.grid(), f.grid(), "scale");
  FormField out = a;
  for (std::size_t c = 0; c < out.component_count(); ++c) out.component(c) *= f;
  return out;
}

FormField operator+(const FormField& a, const FormField& b) {
  if (a.degree() != b.degree() || a.basis() != b.basis()) {
    throw InvalidArgument("form sum: degree or basis mismatch");
  }
  FormField out = a;
  for (std::size_t c = 0; c < out.component_count(); ++c) out.component(c) += b.component(c);
  return out;
}

FormField operator-(const FormField& a, const FormField& b) {
  if (a.degree() != b.degree() || a.basis() != b.basis()) {
    throw InvalidArgument("form difference: degree or basis mismatch");
  }
  FormField out = a;
  for (std::size_t c = 0; c < out.component_count(); ++c) out.component(c) -= b.component(c);
  return out;
}

FormField exterior_d(const FormField& form) { return first_order(form, SymbolSet::all); }

FormField del(const FormField& form) {
  if (form.basis() != Basis::complex) throw InvalidArgument("del: complex basis required");
  return first_order(form, SymbolSet::holomorphic);
}

FormField del_bar(const FormField& form) {
  if (form.basis() != Basis::complex) throw InvalidArgument("del_bar: complex basis required");
  return first_order(form, SymbolSet::antiholomorphic);
}

FormField ddbar(const FormField& form) {
  if (form.basis() != Basis::complex) throw InvalidArgument("ddbar: complex basis required");
  const auto& g = form.grid();
  const int n = g.n();
  const int m = form.symbols();
  if (form.degree() + 2 > m) throw InvalidArgument("ddbar: degree too high");
  FormField out(g, form.degree() + 2, Basis::complex);
  std::vector<std::vector<cd>> acc(out.component_count());
  for (std::size_t c = 0; c < form.component_count(); ++c) {
    const auto& comp = form.component(c);
    if (identically_zero(comp)) continue;
    FieldSpectrum spec(comp);
    const unsigned I = form.mask(c);
    for (int jb = n; jb < m; ++jb) {
      const unsigned ej = 1u << jb;
      if (I & ej) continue;
      const int s2 = wedge_sign(ej, I);
      for (int i = 0; i < n; ++i) {
        const unsigned ei = 1u << i;
        if (I & ei) continue;
        const int s1 = wedge_sign(ei, I | ej);
        auto sym = DerivativeSymbol::second(LinearDerivative::holomorphic(g, i),
                                            LinearDerivative::antiholomorphic(g, jb - n));
        spec.accumulate(sym, static_cast<double>(s1 * s2), acc[out.component_index(I | ei | ej)]);
      }
    }
  }
  for (std::size_t c = 0; c < out.component_count(); ++c) {
    if (!acc[c].empty()) out.component(c) = inverse_transform(g, acc[c], false);
  }
  return out;
}

FormField to_complex_basis(const FormField& form) {
  if (form.basis() == Basis::complex) return form;
  return change_basis(form, real_to_complex_matrix(form.grid().n()), Basis::complex);
}

FormField to_real_basis(const FormField& form) {
  if (form.basis() == Basis::real) return form;
  return change_basis(form, complex_to_real_matrix(form.grid().n()), Basis::real);
}

FormField project_type(const FormField& form, int p, int q) {
  if (form.basis() != Basis::complex) throw InvalidArgument("project_type: complex basis required");
  const int n = form.grid().n();
  const unsigned hol = (1u << n) - 1u;
  FormField out(form.grid(), form.degree(), Basis::complex);
  for (std::size_t c = 0; c < form.component_count(); ++c) {
    const unsigned I = form.mask(c);
    if (std::popcount(I & hol) == p && std::popcount(I & ~hol) == q) {
      out.component(c) = form.component(c);
    }
  }
  return out;
}

int orientation_sign(int n) {
  std::vector<int> perm;
  for (int j = 0; j < n; ++j) {
    perm.push_back(j);
    perm.push_back(n + j);
  }
  int inversions = 0;
  for (std::size_t a = 0; a < perm.size(); ++a)
    for (std::size_t b = a + 1; b < perm.size(); ++b)
      if (perm[a] > perm[b]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

ScalarField oriented_top(const FormField& top) {
  if (top.degree() != top.symbols() || top.basis() != Basis::real) {
    throw InvalidArgument("oriented_top: real-basis top-degree form required");
  }
  ScalarField out = top.component(0);
  out *= cd{static_cast<double>(orientation_sign(top.grid().n())), 0.0};
  return out;
}

double max_abs_diff(const FormField& a, const FormField& b) {
  if (a.degree() != b.degree() || a.basis() != b.basis()) {
    throw InvalidArgument("max_abs_diff: degree or basis mismatch");
  }
  double m = 0.0;
  for (std::size_t c = 0; c < a.component_count(); ++c) {
    m = std::max(m, max_abs_diff(a.component(c), b.component(c)));
  }
  return m;
}

}  // namespace herm
