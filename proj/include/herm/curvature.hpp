#pragma once

#include <cstdint>
#include <vector>

#include "herm/forms.hpp"
#include "herm/metric.hpp"

namespace herm {

/// Chern curvature R_{i jbar k lbar} of (T^{1,0}, omega), one field per index quadruple.
struct ChernCurvatureField {
  int n = 0;
  std::vector<ScalarField> comps;

  static std::size_t slot(int n, int i, int j, int k, int l) {
    return static_cast<std::size_t>(((i * n + j) * n + k) * n + l);
  }
  const TorusGrid& grid() const { return comps.front().grid(); }
  const ScalarField& operator()(int i, int j, int k, int l) const { return comps[slot(n, i, j, k, l)]; }
  cd at(std::size_t p, int i, int j, int k, int l) const { return comps[slot(n, i, j, k, l)][p]; }
};

/// R_{i jbar k lbar} = -d_i d_jbar g_{k lbar} + g^{p qbar} d_i g_{k qbar} d_jbar g_{p lbar}.
ChernCurvatureField chern_curvature(const MetricField& metric);

/// max |conj(R_{i jbar k lbar}) - R_{j ibar l kbar}| relative to max |R|.
double hermitian_symmetry_residual(const ChernCurvatureField& R);

struct Direction {
  std::size_t point = 0;
  SmallVector v;
};

/// R(v, vbar, v, vbar). Throws Error if the contraction has a non-negligible imaginary part.
double hsc_at(const ChernCurvatureField& R, const Direction& d);
/// |v|^2 = g_{i jbar} v^i conj(v^j).
double metric_norm2(const MetricField& metric, const Direction& d);

/// S = g^{i jbar} g^{k lbar} R_{i jbar k lbar}
ScalarField scalar_S(const MetricField& metric, const ChernCurvatureField& R);
/// S_hat = g^{i lbar} g^{k jbar} R_{i jbar k lbar}
ScalarField scalar_S_hat(const MetricField& metric, const ChernCurvatureField& R);

/// Components -d_i d_jbar log det g (entry i*n + j).
std::vector<ScalarField> ricci_components(const MetricField& metric);
/// Ric = -i ddbar log det g as a real 2-form in the real basis.
FormField ricci_form(const MetricField& metric);
/// tr_omega alpha = n alpha ^ omega^{n-1} / omega^n for a real 2-form.
ScalarField trace_with_omega(const FormField& two_form, const MetricField& metric);

/// Volume of the unit sphere S^{2n-1}: 2 pi^n / (n-1)!.
double sphere_volume(int n);

/// Columns form a g-unitary frame at point p: g(e_a, e_b) = delta_ab.
SmallMatrix unitary_frame(const MetricField& metric, std::size_t p);

/// `count` distinct grid points drawn deterministically from (seed, stream 0); all points
/// when count >= grid size.
std::vector<std::size_t> sample_points(const TorusGrid& grid, std::uint64_t seed, std::size_t count);

struct SphereAverage {
  double value = 0.0;
  double standard_error = 0.0;  // zero for the quadrature path
  std::size_t samples = 0;
};

/// Exact integral of H_p over the g-unit sphere via the fourth-moment identity in a unitary frame.
SphereAverage berger_quadrature(const ChernCurvatureField& R, const MetricField& metric,
                                std::size_t p);
/// Monte-Carlo estimate of the same integral with `samples` uniform directions.
SphereAverage berger_monte_carlo(const ChernCurvatureField& R, const MetricField& metric,
                                 std::size_t p, std::uint64_t seed, std::size_t samples);
/// (S + S_hat)(p) / (n(n+1)) * Vol(S^{2n-1}).
double berger_prediction(const ScalarField& S, const ScalarField& S_hat, int n, std::size_t p);

struct HscSamplerConfig {
  std::uint64_t seed = 1;
  std::size_t points = 64;           // grid points visited (all points if >= grid size)
  std::size_t directions = 32;       // random unit directions per point
  int refine_steps = 20;             // local perturbation steps around the best candidates
};

/// Sampled extrema of H over unit directions. Heuristic: never a proof of sign.
struct HscRange {
  double min = 0.0;
  double max = 0.0;
  Direction argmin;
  Direction argmax;
  bool heuristic = true;
};

HscRange hsc_range_estimate(const ChernCurvatureField& R, const MetricField& metric,
                            const HscSamplerConfig& config);

}  // namespace herm
