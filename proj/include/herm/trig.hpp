#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "herm/grid.hpp"

namespace herm {

/// c * exp(2 pi i k.x) with k in Z^{2n} over the axis order (x^1..x^n, y^1..y^n).
struct FourierTerm {
  std::vector<int> k;
  cd c;
};

cd evaluate_terms(std::span<const FourierTerm> terms, const Point& x);
/// Exact samples of sum_t c_t exp(2 pi i k_t.x) on the grid.
ScalarField sample_terms(const TorusGrid& grid, std::span<const FourierTerm> terms);

/// Real trigonometric series  constant + sum_t (c_t e^{2 pi i k_t.x} + conj(c_t) e^{-2 pi i k_t.x}).
struct RealSeries {
  double constant = 0.0;
  std::vector<FourierTerm> terms;

  double evaluate(const Point& x) const;
  /// Analytic first derivative along one real axis.
  double derivative(const Point& x, int axis) const;
  /// Analytic second derivative along two real axes.
  double second_derivative(const Point& x, int a, int b) const;
  ScalarField sample(const TorusGrid& grid) const;
  /// Largest |k_a| over all terms and axes.
  int max_mode() const;
};

/// Random real series with `count` terms, wavenumbers in [-max_mode, max_mode], zero mean,
/// and coefficients of size up to `amplitude`. Deterministic in `seed`.
RealSeries random_real_series(int n, std::uint64_t seed, int max_mode = 2, int count = 6,
                              double amplitude = 1.0);

ScalarField random_trig_field(const TorusGrid& grid, std::uint64_t seed, int max_mode = 2,
                              int count = 6, double amplitude = 1.0);

}  // namespace herm
