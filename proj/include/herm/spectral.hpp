#pragma once

#include <array>
#include <vector>

#include "herm/grid.hpp"

namespace herm {

/// First-order constant-coefficient operator sum_a c_a d/d(axis a).
struct LinearDerivative {
  std::array<cd, kMaxAxes> coef{};

  static LinearDerivative axis(int a);
  /// d/dz^i = (d/dx^i - i d/dy^i) / 2
  static LinearDerivative holomorphic(const TorusGrid& g, int i);
  /// d/dzbar^i = (d/dx^i + i d/dy^i) / 2
  static LinearDerivative antiholomorphic(const TorusGrid& g, int i);
};

/// Product of up to two first-order operators, evaluated as a Fourier multiplier.
/// The unpaired Nyquist mode of every axis has derivative zero.
struct DerivativeSymbol {
  std::array<LinearDerivative, 2> factors{};
  int order = 0;

  static DerivativeSymbol identity() { return {}; }
  static DerivativeSymbol first(const LinearDerivative& a);
  static DerivativeSymbol second(const LinearDerivative& a, const LinearDerivative& b);
};

/// Normalized discrete Fourier coefficients of a field (forward transform divided by N^{2n}).
class FieldSpectrum {
 public:
  explicit FieldSpectrum(const ScalarField& f);

  const TorusGrid& grid() const { return grid_; }
  std::span<const cd> coefficients() const { return coeffs_; }

  /// Inverse transform of (symbol x coefficients).
  ScalarField apply(const DerivativeSymbol& s, bool real_result) const;
  /// out += scale * symbol * coefficients, in coefficient space.
  void accumulate(const DerivativeSymbol& s, cd scale, std::vector<cd>& out) const;

 private:
  TorusGrid grid_;
  std::vector<cd> coeffs_;
};

ScalarField inverse_transform(const TorusGrid& g, std::span<const cd> coefficients, bool real);
std::vector<cd> forward_transform(const ScalarField& f);

/// Signed wavenumber for storage index j on an N-point axis; the Nyquist index maps to N/2.
inline int signed_wavenumber(int j, int N) { return j <= N / 2 ? j : j - N; }
inline bool is_nyquist(int j, int N) { return j == N / 2; }

ScalarField derivative(const ScalarField& f, int axis);
ScalarField wirtinger_d(const ScalarField& f, int i);
ScalarField wirtinger_dbar(const ScalarField& f, int i);
/// d^2 f / dz^i dzbar^j
ScalarField ddbar_component(const ScalarField& f, int i, int j);

/// Removes every Fourier mode with a Nyquist index on any axis.
ScalarField nyquist_filter(const ScalarField& f);

/// Calls fn(flat_index, axis_indices) over all samples in storage order.
template <class Fn>
void for_each_index(const TorusGrid& g, Fn&& fn) {
  AxisIndex idx{};
  const int axes = g.axes();
  const int N = g.N();
  for (std::size_t p = 0; p < g.size(); ++p) {
    fn(p, idx);
    for (int a = axes - 1; a >= 0; --a) {
      if (++idx[a] < N) break;
      idx[a] = 0;
    }
  }
}

}  // namespace herm
