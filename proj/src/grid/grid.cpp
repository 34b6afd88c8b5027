#include "herm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "herm/errors.hpp"

namespace herm {

TorusGrid make_grid(int n, int N, std::size_t point_budget) {
  if (n < 1 || n > kMaxComplexDim) {
    throw InvalidArgument("make_grid: complex dimension must be in [1, 3], got " +
                          std::to_string(n));
  }
  if (N < 8) throw InvalidArgument("make_grid: N must be at least 8, got " + std::to_string(N));
  if (N % 2 != 0) throw InvalidArgument("make_grid: N must be even, got " + std::to_string(N));
  std::size_t size = 1;
  for (int a = 0; a < 2 * n; ++a) {
    size *= static_cast<std::size_t>(N);
    if (size > point_budget) {
      throw InvalidArgument("make_grid: N^(2n) exceeds the point budget of " +
                            std::to_string(point_budget));
    }
  }
  return TorusGrid(n, N, size);
}

AxisIndex TorusGrid::unravel(std::size_t flat) const {
  AxisIndex idx{};
  for (int a = axes() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % N_);
    flat /= N_;
  }
  return idx;
}

std::size_t TorusGrid::ravel(const AxisIndex& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < axes(); ++a) {
    int i = ((idx[a] % N_) + N_) % N_;
    flat = flat * N_ + static_cast<std::size_t>(i);
  }
  return flat;
}

Point TorusGrid::coordinates(std::size_t flat) const {
  AxisIndex idx = unravel(flat);
  Point x{};
  for (int a = 0; a < axes(); ++a) x[a] = idx[a] * spacing();
  return x;
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
  if (!(a == b)) throw DimensionMismatch(std::string(where) + ": fields live on different grids");
}

ScalarField::ScalarField(const TorusGrid& grid, bool real)
    : grid_(grid), values_(grid.size(), cd{0.0, 0.0}), real_(real) {}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<cd> values, bool real)
    : grid_(grid), values_(std::move(values)), real_(false) {
  if (values_.size() != grid.size()) {
    throw DimensionMismatch("ScalarField: value count does not match the grid");
  }
  if (real) mark_real();
}

ScalarField ScalarField::constant(const TorusGrid& grid, cd value) {
  ScalarField f(grid, value.imag() == 0.0);
  std::fill(f.values_.begin(), f.values_.end(), value);
  return f;
}

ScalarField ScalarField::sample(const TorusGrid& grid, const std::function<cd(const Point&)>& fn,
                                bool real) {
  std::vector<cd> v(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) v[p] = fn(grid.coordinates(p));
  return ScalarField(grid, std::move(v), real);
}

ScalarField& ScalarField::mark_real(double tol) {
  double scale = std::max(1.0, max_abs());
  double im = max_imag();
  if (im > tol * scale) {
    throw InvalidArgument("ScalarField: imaginary part " + std::to_string(im) +
                          " exceeds the real-valued tolerance");
  }
  for (auto& v : values_) v = cd{v.real(), 0.0};
  real_ = true;
  return *this;
}

ScalarField ScalarField::real_part() const {
  ScalarField r(grid_, true);
  for (std::size_t i = 0; i < values_.size(); ++i) r.values_[i] = values_[i].real();
  return r;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::max_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

double ScalarField::min_real() const {
  double m = values_.empty() ? 0.0 : values_[0].real();
  for (const auto& v : values_) m = std::min(m, v.real());
  return m;
}

double ScalarField::max_real() const {
  double m = values_.empty() ? 0.0 : values_[0].real();
  for (const auto& v : values_) m = std::max(m, v.real());
  return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  real_ = real_ && o.real_;
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  real_ = real_ && o.real_;
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "operator*=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  real_ = real_ && o.real_;
  return *this;
}

ScalarField& ScalarField::operator*=(cd s) {
  for (auto& v : values_) v *= s;
  real_ = real_ && s.imag() == 0.0;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(cd s, ScalarField a) { return a *= s; }
ScalarField operator*(double s, ScalarField a) { return a *= cd{s, 0.0}; }

ScalarField map(const ScalarField& f, const std::function<cd(cd)>& fn, bool real) {
  std::vector<cd> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = fn(f[i]);
  return ScalarField(f.grid(), std::move(v), real);
}

ScalarField exp(const ScalarField& f) {
  return map(f, [](cd z) { return std::exp(z); }, f.is_real());
}

cd integrate(const ScalarField& f) {
  // Neumaier summation in a fixed order keeps the result deterministic and accurate.
  auto neumaier = [](std::span<const cd> v, auto part) {
    double sum = 0.0, comp = 0.0;
    for (const auto& z : v) {
      double x = part(z);
      double t = sum + x;
      if (std::abs(sum) >= std::abs(x)) {
        comp += (sum - t) + x;
      } else {
        comp += (x - t) + sum;
      }
      sum = t;
    }
    return sum + comp;
  };
  auto v = f.values();
  double re = neumaier(v, [](cd z) { return z.real(); });
  double im = neumaier(v, [](cd z) { return z.imag(); });
  double inv = 1.0 / static_cast<double>(v.size());
  return {re * inv, im * inv};
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace herm
