#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace herm {

using cd = std::complex<double>;

inline constexpr int kMaxComplexDim = 3;
inline constexpr int kMaxAxes = 2 * kMaxComplexDim;
inline constexpr std::size_t kDefaultPointBudget = std::size_t{1} << 24;
inline constexpr double kRealTolerance = 1e-10;

using AxisIndex = std::array<int, kMaxAxes>;
using Point = std::array<double, kMaxAxes>;

/// Uniform periodic grid on the complex torus C^n / (Z^n + iZ^n).
///
/// Real axes are ordered (x^1, ..., x^n, y^1, ..., y^n) with z^j = x^j + i y^j.
/// Samples are stored row-major over that axis order, last axis fastest.
class TorusGrid {
 public:
  int n() const { return n_; }
  int N() const { return N_; }
  int axes() const { return 2 * n_; }
  std::size_t size() const { return size_; }
  double spacing() const { return 1.0 / N_; }

  int x_axis(int j) const { return j; }
  int y_axis(int j) const { return n_ + j; }

  AxisIndex unravel(std::size_t flat) const;
  std::size_t ravel(const AxisIndex& idx) const;
  Point coordinates(std::size_t flat) const;

  bool operator==(const TorusGrid&) const = default;

 private:
  friend TorusGrid make_grid(int n, int N, std::size_t point_budget);
  TorusGrid(int n, int N, std::size_t size) : n_(n), N_(N), size_(size) {}

  int n_;
  int N_;
  std::size_t size_;
};

/// Rejects odd N, N < 8, n outside [1, 3], and grids larger than `point_budget` samples.
TorusGrid make_grid(int n, int N, std::size_t point_budget = kDefaultPointBudget);

/// Complex samples of a function on a TorusGrid, optionally tagged real-valued.
class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& grid, bool real = false);
  ScalarField(const TorusGrid& grid, std::vector<cd> values, bool real);

  static ScalarField constant(const TorusGrid& grid, cd value);
  static ScalarField sample(const TorusGrid& grid, const std::function<cd(const Point&)>& fn,
                            bool real);

  const TorusGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  bool is_real() const { return real_; }

  cd operator[](std::size_t i) const { return values_[i]; }
  std::span<const cd> values() const { return values_; }
  /// Mutable access drops the real-valued tag; call mark_real() again after writing.
  std::span<cd> values() {
    real_ = false;
    return values_;
  }

  /// Tags the field real after checking imag parts are below tol relative to max(1, |f|_inf);
  /// the imaginary parts are then zeroed. Throws InvalidArgument otherwise.
  ScalarField& mark_real(double tol = kRealTolerance);
  /// Discards the imaginary part unconditionally.
  ScalarField real_part() const;

  double max_abs() const;
  double max_imag() const;
  double min_real() const;
  double max_real() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator*=(cd s);

 private:
  TorusGrid grid_;
  std::vector<cd> values_;
  bool real_ = false;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(cd s, ScalarField a);
ScalarField operator*(double s, ScalarField a);

/// Pointwise map; the result is tagged real when `real` is set.
ScalarField map(const ScalarField& f, const std::function<cd(cd)>& fn, bool real);
ScalarField exp(const ScalarField& f);

/// Plain Lebesgue integral over [0,1)^{2n}: the compensated mean of the samples.
cd integrate(const ScalarField& f);

double max_abs_diff(const ScalarField& a, const ScalarField& b);

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where);

}  // namespace herm
