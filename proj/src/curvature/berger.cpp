#include <Eigen/Cholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "herm/curvature.hpp"
#include "herm/errors.hpp"
#include "herm/rng.hpp"

namespace herm {
namespace {

// Curvature at one point expressed in a unitary frame, flattened with slot().
struct FrameTensor {
  int n = 0;
  std::array<cd, 81> r{};

  cd operator()(int a, int b, int c, int d) const {
    return r[ChernCurvatureField::slot(n, a, b, c, d)];
  }

  double hsc(const SmallVector& w) const {
    cd s{0.0, 0.0};
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const cd ab = w(a) * std::conj(w(b));
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) s += (*this)(a, b, c, d) * ab * w(c) * std::conj(w(d));
      }
    return s.real();
  }
};

FrameTensor frame_tensor(const ChernCurvatureField& R, const SmallMatrix& E, std::size_t p) {
  const int n = R.n;
  FrameTensor t;
  t.n = n;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cd s{0.0, 0.0};
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                  s += R.at(p, i, j, k, l) * E(i, a) * std::conj(E(j, b)) * E(k, c) *
                       std::conj(E(l, d));
                }
          t.r[ChernCurvatureField::slot(n, a, b, c, d)] = s;
        }
  return t;
}

SmallVector random_unit(CounterRng& rng, int n) {
  SmallVector w(n);
  double norm2 = 0.0;
  for (int a = 0; a < n; ++a) {
    const double re = rng.normal();
    const double im = rng.normal();
    w(a) = cd{re, im};
    norm2 += re * re + im * im;
  }
  return w / std::sqrt(norm2);
}

void check_point(const ChernCurvatureField& R, const MetricField& metric, std::size_t p) {
  if (R.n != metric.n()) throw DimensionMismatch("curvature and metric dimensions differ");
  if (p >= metric.grid().size()) throw InvalidArgument("point index out of range");
}

}  // namespace

double sphere_volume(int n) {
  double f = 1.0;
  for (int k = 2; k < n; ++k) f *= k;
  return 2.0 * std::pow(std::numbers::pi, n) / f;
}

SmallMatrix unitary_frame(const MetricField& metric, std::size_t p) {
  Eigen::LLT<SmallMatrix> llt(metric.at(p));
  if (llt.info() != Eigen::Success) throw EigenFailure(p, "unitary_frame: Cholesky factorization failed");
  const SmallMatrix L = llt.matrixL();
  return L.transpose().inverse();
}

SphereAverage berger_quadrature(const ChernCurvatureField& R, const MetricField& metric,
                                std::size_t p) {
  check_point(R, metric, p);
  const int n = R.n;
  const FrameTensor t = frame_tensor(R, unitary_frame(metric, p), p);
  cd s{0.0, 0.0};
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) s += t(a, a, c, c) + t(a, c, c, a);
  SphereAverage out;
  out.value = sphere_volume(n) / (n * (n + 1)) * s.real();
  return out;
}

std::vector<std::size_t> sample_points(const TorusGrid& grid, std::uint64_t seed, std::size_t count) {
  const std::size_t size = grid.size();
  std::vector<std::size_t> out;
  if (count >= size) {
    for (std::size_t p = 0; p < size; ++p) out.push_back(p);
    return out;
  }
  CounterRng rng(seed, 0);
  while (out.size() < count) {
    const std::size_t p = rng.next_u64() % size;
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

SphereAverage berger_monte_carlo(const ChernCurvatureField& R, const MetricField& metric,
                                 std::size_t p, std::uint64_t seed, std::size_t samples) {
  check_point(R, metric, p);
  if (samples < 2) throw InvalidArgument("berger_monte_carlo: need at least two samples");
  const int n = R.n;
  const FrameTensor t = frame_tensor(R, unitary_frame(metric, p), p);
  CounterRng rng(seed, p);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double h = t.hsc(random_unit(rng, n));
    const double delta = h - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (h - mean);
  }
  const double vol = sphere_volume(n);
  SphereAverage out;
  out.samples = samples;
  out.value = vol * mean;
  out.standard_error = vol * std::sqrt(m2 / static_cast<double>(samples - 1) / samples);
  return out;
}

double berger_prediction(const ScalarField& S, const ScalarField& S_hat, int n, std::size_t p) {
  return (S[p].real() + S_hat[p].real()) / (n * (n + 1)) * sphere_volume(n);
}

HscRange hsc_range_estimate(const ChernCurvatureField& R, const MetricField& metric,
                            const HscSamplerConfig& config) {
  if (R.n != metric.n()) throw DimensionMismatch("curvature and metric dimensions differ");
  if (config.directions == 0) throw InvalidArgument("hsc_range_estimate: directions must be positive");
  const int n = R.n;
  const std::size_t size = metric.grid().size();
  CounterRng rng(config.seed, 0);

  std::vector<std::size_t> points;
  if (config.points >= size) {
    for (std::size_t p = 0; p < size; ++p) points.push_back(p);
  } else {
    for (std::size_t i = 0; i < config.points; ++i) points.push_back(rng.next_u64() % size);
  }

  struct Candidate {
    double value;
    std::size_t point;
    SmallVector w;
  };
  Candidate lo{std::numeric_limits<double>::infinity(), 0, {}};
  Candidate hi{-std::numeric_limits<double>::infinity(), 0, {}};
  for (std::size_t p : points) {
    const FrameTensor t = frame_tensor(R, unitary_frame(metric, p), p);
    for (std::size_t k = 0; k < config.directions; ++k) {
      const SmallVector w = random_unit(rng, n);
      const double h = t.hsc(w);
      if (h < lo.value) lo = {h, p, w};
      if (h > hi.value) hi = {h, p, w};
    }
  }

  auto refine = [&](Candidate& c, double sign) {
    const FrameTensor t = frame_tensor(R, unitary_frame(metric, c.point), c.point);
    double step = 0.5;
    for (int s = 0; s < config.refine_steps; ++s) {
      for (int trial = 0; trial < 8; ++trial) {
        SmallVector w = c.w + step * random_unit(rng, n);
        w /= w.norm();
        const double h = t.hsc(w);
        if (sign * (h - c.value) > 0.0) c = {h, c.point, w};
      }
      step *= 0.7;
    }
  };
  refine(lo, -1.0);
  refine(hi, 1.0);

  HscRange out;
  out.min = lo.value;
  out.max = hi.value;
  out.argmin = {lo.point, unitary_frame(metric, lo.point) * lo.w};
  out.argmax = {hi.point, unitary_frame(metric, hi.point) * hi.w};
  return out;
}

}  // namespace herm
