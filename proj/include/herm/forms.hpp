#pragma once

#include <cstddef>
#include <vector>

#include "herm/grid.hpp"

namespace herm {

/// Coordinate basis in which a form's components are stored.
///   real:    symbols (dx^1..dx^n, dy^1..dy^n)
///   complex: symbols (dz^1..dz^n, dzbar^1..dzbar^n)
/// Components are indexed by strictly increasing multi-indices (bitmasks over
/// the 2n symbols), listed in lexicographic order.
enum class Basis { real, complex };

class FormField {
 public:
  FormField(const TorusGrid& grid, int degree, Basis basis);

  const TorusGrid& grid() const { return grid_; }
  int degree() const { return degree_; }
  Basis basis() const { return basis_; }
  int symbols() const { return grid_.axes(); }

  std::size_t component_count() const { return masks_.size(); }
  unsigned mask(std::size_t c) const { return masks_[c]; }
  std::size_t component_index(unsigned mask) const;

  ScalarField& component(std::size_t c) { return comps_[c]; }
  const ScalarField& component(std::size_t c) const { return comps_[c]; }
  ScalarField& at(unsigned mask) { return comps_[component_index(mask)]; }
  const ScalarField& at(unsigned mask) const { return comps_[component_index(mask)]; }

  double max_abs() const;
  /// True when every component is tagged real (only meaningful in the real basis).
  bool is_real() const;
  FormField& mark_real(double tol = kRealTolerance);

 private:
  TorusGrid grid_;
  int degree_;
  Basis basis_;
  std::vector<unsigned> masks_;
  std::vector<int> index_of_;
  std::vector<ScalarField> comps_;
};

/// All bitmasks over `symbols` bits with `degree` bits set, lexicographic by index sequence.
std::vector<unsigned> multi_indices(int symbols, int degree);

/// Sign of e^a ^ e^b (wedging two basis monomials in the given order) relative to e^{a|b};
/// zero when they share a symbol.
int wedge_sign(unsigned a, unsigned b);

FormField zero_form(const ScalarField& f);
FormField wedge(const FormField& a, const FormField& b);
FormField scale(const FormField& a, const ScalarField& f);
FormField operator+(const FormField& a, const FormField& b);
FormField operator-(const FormField& a, const FormField& b);

/// Exterior derivative; works in either basis (d = sum_s e^s ^ D_s with D_s the
/// derivative dual to symbol s). Throws InvalidArgument on top-degree input.
FormField exterior_d(const FormField& form);
/// Complex basis only.
FormField del(const FormField& form);
FormField del_bar(const FormField& form);
/// del(del_bar(form)) evaluated with one forward transform per input component.
FormField ddbar(const FormField& form);

FormField to_complex_basis(const FormField& form);
FormField to_real_basis(const FormField& form);
/// Keeps only (p,q)-type components; complex basis only.
FormField project_type(const FormField& form, int p, int q);

/// Sign s with dx^1^dy^1^...^dx^n^dy^n = s * e^{0}^...^e^{2n-1} in the real basis.
int orientation_sign(int n);
/// Top-degree coefficient against dx^1^dy^1^...^dx^n^dy^n (real basis input).
ScalarField oriented_top(const FormField& top);

double max_abs_diff(const FormField& a, const FormField& b);

}  // namespace herm
