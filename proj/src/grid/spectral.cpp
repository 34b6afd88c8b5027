#include "herm/spectral.hpp"

#include <fftw3.h>
#ifdef __GLIBC__
#include <malloc.h>
#endif

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include "herm/errors.hpp"

namespace herm {
namespace {

#ifdef __GLIBC__
// Keep large field buffers in the heap so that repeated allocations of the same
// size do not each pay for fresh page mappings.
[[maybe_unused]] const bool kAllocatorTuned = [] {
  mallopt(M_MMAP_THRESHOLD, 32 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  return true;
}();
#endif

// One forward/backward plan pair per grid shape, executed on an owned aligned
// buffer. Plans are created with FFTW_ESTIMATE so that the transform (and hence
// every result) is identical across runs.
class FftPlans {
 public:
  explicit FftPlans(const TorusGrid& g) : size_(g.size()), buf_(fftw_alloc_complex(size_)) {
    std::vector<int> dims(g.axes(), g.N());
    forward_ = fftw_plan_dft(g.axes(), dims.data(), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(g.axes(), dims.data(), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (forward_ == nullptr || backward_ == nullptr) throw Error("FFTW planning failed");
  }
  ~FftPlans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buf_);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  /// out = scale * DFT(in); in and out may alias.
  void run(bool forward, std::span<const cd> in, std::span<cd> out, double scale) {
    std::lock_guard<std::mutex> lock(mu_);
    auto* b = reinterpret_cast<cd*>(buf_);
    std::copy(in.begin(), in.end(), b);
    fftw_execute(forward ? forward_ : backward_);
    if (scale == 1.0) {
      std::copy(b, b + size_, out.begin());
    } else {
      for (std::size_t i = 0; i < size_; ++i) out[i] = scale * b[i];
    }
  }

 private:
  std::size_t size_;
  fftw_complex* buf_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::mutex mu_;
};

FftPlans& plans_for(const TorusGrid& g) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<FftPlans>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{g.n(), g.N()}];
  if (!slot) slot = std::make_unique<FftPlans>(g);
  return *slot;
}

// Derivative multiplier 2*pi*i*k for each storage index on one axis.
std::vector<cd> derivative_table(int N) {
  std::vector<cd> t(N);
  for (int j = 0; j < N; ++j) {
    t[j] = is_nyquist(j, N) ? cd{0.0, 0.0}
                            : cd{0.0, 2.0 * std::numbers::pi * signed_wavenumber(j, N)};
  }
  return t;
}

struct SparseFactor {
  int count = 0;
  std::array<int, kMaxAxes> axis{};
  std::array<cd, kMaxAxes> coef{};
};

SparseFactor sparsify(const LinearDerivative& d, int axes) {
  SparseFactor s;
  for (int a = 0; a < axes; ++a) {
    if (d.coef[a] != cd{0.0, 0.0}) {
      s.axis[s.count] = a;
      s.coef[s.count] = d.coef[a];
      ++s.count;
    }
  }
  return s;
}

template <class Fn>
void for_each_symbol_value(const TorusGrid& g, const DerivativeSymbol& s, Fn&& fn) {
  const auto table = derivative_table(g.N());
  std::array<SparseFactor, 2> f{};
  for (int k = 0; k < s.order; ++k) f[k] = sparsify(s.factors[k], g.axes());
  for_each_index(g, [&](std::size_t p, const AxisIndex& idx) {
    cd value{1.0, 0.0};
    for (int k = 0; k < s.order; ++k) {
      cd acc{0.0, 0.0};
      for (int t = 0; t < f[k].count; ++t) acc += f[k].coef[t] * table[idx[f[k].axis[t]]];
      value *= acc;
    }
    fn(p, value);
  });
}

}  // namespace

LinearDerivative LinearDerivative::axis(int a) {
  LinearDerivative d;
  d.coef[a] = 1.0;
  return d;
}

LinearDerivative LinearDerivative::holomorphic(const TorusGrid& g, int i) {
  if (i < 0 || i >= g.n()) throw InvalidArgument("holomorphic derivative: axis index out of range");
  LinearDerivative d;
  d.coef[g.x_axis(i)] = 0.5;
  d.coef[g.y_axis(i)] = cd{0.0, -0.5};
  return d;
}

LinearDerivative LinearDerivative::antiholomorphic(const TorusGrid& g, int i) {
  if (i < 0 || i >= g.n()) {
    throw InvalidArgument("antiholomorphic derivative: axis index out of range");
  }
  LinearDerivative d;
  d.coef[g.x_axis(i)] = 0.5;
  d.coef[g.y_axis(i)] = cd{0.0, 0.5};
  return d;
}

DerivativeSymbol DerivativeSymbol::first(const LinearDerivative& a) {
  DerivativeSymbol s;
  s.factors[0] = a;
  s.order = 1;
  return s;
}

DerivativeSymbol DerivativeSymbol::second(const LinearDerivative& a, const LinearDerivative& b) {
  DerivativeSymbol s;
  s.factors[0] = a;
  s.factors[1] = b;
  s.order = 2;
  return s;
}

std::vector<cd> forward_transform(const ScalarField& f) {
  std::vector<cd> data(f.size());
  plans_for(f.grid()).run(true, f.values(), data, 1.0 / static_cast<double>(data.size()));
  return data;
}

ScalarField inverse_transform(const TorusGrid& g, std::span<const cd> coefficients, bool real) {
  std::vector<cd> data(coefficients.size());
  plans_for(g).run(false, coefficients, data, 1.0);
  ScalarField out(g, std::move(data), false);
  if (real) out = out.real_part();
  return out;
}

FieldSpectrum::FieldSpectrum(const ScalarField& f) : grid_(f.grid()), coeffs_(forward_transform(f)) {}

ScalarField FieldSpectrum::apply(const DerivativeSymbol& s, bool real_result) const {
  std::vector<cd> out(coeffs_.size());
  for_each_symbol_value(grid_, s, [&](std::size_t p, cd v) { out[p] = v * coeffs_[p]; });
  return inverse_transform(grid_, out, real_result);
}

void FieldSpectrum::accumulate(const DerivativeSymbol& s, cd scale, std::vector<cd>& out) const {
  if (out.size() != coeffs_.size()) out.assign(coeffs_.size(), cd{0.0, 0.0});
  for_each_symbol_value(grid_, s, [&](std::size_t p, cd v) { out[p] += scale * v * coeffs_[p]; });
}

ScalarField derivative(const ScalarField& f, int axis) {
  if (axis < 0 || axis >= f.grid().axes()) throw InvalidArgument("derivative: axis out of range");
  return FieldSpectrum(f).apply(DerivativeSymbol::first(LinearDerivative::axis(axis)), f.is_real());
}

ScalarField wirtinger_d(const ScalarField& f, int i) {
  return FieldSpectrum(f).apply(
      DerivativeSymbol::first(LinearDerivative::holomorphic(f.grid(), i)), false);
}

ScalarField wirtinger_dbar(const ScalarField& f, int i) {
  return FieldSpectrum(f).apply(
      DerivativeSymbol::first(LinearDerivative::antiholomorphic(f.grid(), i)), false);
}

ScalarField ddbar_component(const ScalarField& f, int i, int j) {
  const auto& g = f.grid();
  bool real = f.is_real() && i == j;
  return FieldSpectrum(f).apply(
      DerivativeSymbol::second(LinearDerivative::holomorphic(g, i),
                               LinearDerivative::antiholomorphic(g, j)),
      real);
}

ScalarField nyquist_filter(const ScalarField& f) {
  auto c = forward_transform(f);
  const int N = f.grid().N();
  const int axes = f.grid().axes();
  for_each_index(f.grid(), [&](std::size_t p, const AxisIndex& idx) {
    for (int a = 0; a < axes; ++a) {
      if (is_nyquist(idx[a], N)) {
        c[p] = 0.0;
        return;
      }
    }
  });
  return inverse_transform(f.grid(), c, f.is_real());
}

}  // namespace herm
