#include "herm/trig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "herm/errors.hpp"
#include "herm/rng.hpp"
#include "herm/spectral.hpp"

namespace herm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phase(const FourierTerm& t, const Point& x) {
  double s = 0.0;
  for (std::size_t a = 0; a < t.k.size(); ++a) s += t.k[a] * x[a];
  return kTwoPi * s;
}

}  // namespace

cd evaluate_terms(std::span<const FourierTerm> terms, const Point& x) {
  cd v{0.0, 0.0};
  for (const auto& t : terms) v += t.c * std::polar(1.0, phase(t, x));
  return v;
}

ScalarField sample_terms(const TorusGrid& grid, std::span<const FourierTerm> terms) {
  ScalarField out(grid, false);
  auto vals = out.values();
  const int N = grid.N();
  const int axes = grid.axes();
  for (const auto& t : terms) {
    if (static_cast<int>(t.k.size()) != axes) {
      throw DimensionMismatch("Fourier term wave vector length does not match 2n");
    }
    // per-axis phase tables, exact roots of unity
    std::vector<std::vector<cd>> table(axes, std::vector<cd>(N));
    for (int a = 0; a < axes; ++a) {
      for (int j = 0; j < N; ++j) {
        long r = (static_cast<long>(t.k[a]) * j) % N;
        if (r < 0) r += N;
        table[a][j] = std::polar(1.0, kTwoPi * static_cast<double>(r) / N);
      }
    }
    for_each_index(grid, [&](std::size_t p, const AxisIndex& idx) {
      cd v = t.c;
      for (int a = 0; a < axes; ++a) v *= table[a][idx[a]];
      vals[p] += v;
    });
  }
  return out;
}

double RealSeries::evaluate(const Point& x) const {
  double v = constant;
  for (const auto& t : terms) v += 2.0 * (t.c * std::polar(1.0, phase(t, x))).real();
  return v;
}

double RealSeries::derivative(const Point& x, int axis) const {
  double v = 0.0;
  for (const auto& t : terms) {
    cd factor{0.0, kTwoPi * t.k[axis]};
    v += 2.0 * (factor * t.c * std::polar(1.0, phase(t, x))).real();
  }
  return v;
}

double RealSeries::second_derivative(const Point& x, int a, int b) const {
  double v = 0.0;
  for (const auto& t : terms) {
    double factor = -kTwoPi * kTwoPi * t.k[a] * t.k[b];
    v += 2.0 * (factor * t.c * std::polar(1.0, phase(t, x))).real();
  }
  return v;
}

ScalarField RealSeries::sample(const TorusGrid& grid) const {
  std::vector<FourierTerm> all;
  all.reserve(2 * terms.size());
  for (const auto& t : terms) {
    all.push_back(t);
    FourierTerm partner = t;
    for (auto& k : partner.k) k = -k;
    partner.c = std::conj(t.c);
    all.push_back(partner);
  }
  ScalarField f = sample_terms(grid, all);
  auto v = f.values();
  for (auto& z : v) z += constant;
  f.mark_real(1e-12);
  return f;
}

int RealSeries::max_mode() const {
  int m = 0;
  for (const auto& t : terms)
    for (int k : t.k) m = std::max(m, std::abs(k));
  return m;
}

RealSeries random_real_series(int n, std::uint64_t seed, int max_mode, int count, double amplitude) {
  CounterRng rng(seed, 0x7269676full);
  RealSeries s;
  const int width = 2 * max_mode + 1;
  for (int t = 0; t < count; ++t) {
    FourierTerm term;
    term.k.resize(2 * n);
    bool nonzero = false;
    while (!nonzero) {
      for (auto& k : term.k) {
        k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(width)) - max_mode;
        nonzero = nonzero || k != 0;
      }
    }
    const double scale = amplitude / count;
    term.c = cd{scale * (2.0 * rng.uniform() - 1.0), scale * (2.0 * rng.uniform() - 1.0)};
    s.terms.push_back(std::move(term));
  }
  return s;
}

ScalarField random_trig_field(const TorusGrid& grid, std::uint64_t seed, int max_mode, int count,
                              double amplitude) {
  return random_real_series(grid.n(), seed, max_mode, count, amplitude).sample(grid);
}

}  // namespace herm
