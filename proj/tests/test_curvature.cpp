#include <algorithm>
#include <random>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "herm/curvature.hpp"
#include "herm/laplace.hpp"
#include "herm/errors.hpp"
#include "herm/rng.hpp"
#include "herm/trig.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace herm;
using namespace herm::test;

namespace {

const TorusGrid& grid16() {
  static const TorusGrid g = make_grid(2, 16);
  return g;
}

double max_component(const ChernCurvatureField& R) {
  double m = 0.0;
  for (const auto& c : R.comps) m = std::max(m, c.max_abs());
  return m;
}

SmallVector random_vector(CounterRng& rng, int n) {
  SmallVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cd{rng.normal(), rng.normal()};
  return v;
}

// Plain quadruple loop R_{i jbar k lbar} v^i conj(v^j) v^k conj(v^l).
cd contract(const ChernCurvatureField& R, std::size_t p, const SmallVector& v) {
  cd s = 0.0;
  for (int i = 0; i < R.n; ++i)
    for (int j = 0; j < R.n; ++j)
      for (int k = 0; k < R.n; ++k)
        for (int l = 0; l < R.n; ++l) s += R.at(p, i, j, k, l) * v(i) * std::conj(v(j)) * v(k) * std::conj(v(l));
  return s;
}

}  // namespace

TEST_CASE("Chern curvature of the flat metric vanishes") {
  const ChernCurvatureField R = chern_curvature(build_metric(flat(), grid16()));
  CHECK(max_component(R) == 0.0);
}

TEST_CASE("Chern curvature of the conformally flat metric against its closed form") {
  // g = e^u I: -d_i d_jbar (e^u) delta_kl + e^{-u} d_i e^u d_jbar e^u delta_kl = -e^u u_{i jbar} delta_kl
  const TorusGrid& g = grid16();
  const MetricSpec spec = conformally_flat();
  const ChernCurvatureField R = chern_curvature(build_metric(spec, g));
  CounterRng rng(5, 0);
  for (int t = 0; t < 5; ++t) {
    const std::size_t p = rng.next_u64() % g.size();
    const Point x = g.coordinates(p);
    const double eu = std::exp(spec.conformal.evaluate(x));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const RealSeries& u = spec.conformal;
        const cd uij = 0.25 * cd{u.second_derivative(x, i, j) + u.second_derivative(x, 2 + i, 2 + j),
                                 u.second_derivative(x, i, 2 + j) - u.second_derivative(x, 2 + i, j)};
        for (int k = 0; k < 2; ++k) {
          for (int l = 0; l < 2; ++l) {
            const cd expected = k == l ? -eu * uij : cd{0.0, 0.0};
            CHECK(std::abs(R.at(p, i, j, k, l) - expected) < 1e-10);
          }
        }
      }
    }
    // and the hand-reduced value for u = cos(2 pi x1) / 10
    CHECK(R.at(p, 0, 0, 1, 1).real() == doctest::Approx(0.1 * kPi * kPi * eu * std::cos(2 * kPi * x[0])).epsilon(1e-10));
  }
}

TEST_CASE("Chern curvature of the perturbed metric converges to the difference oracle at second order") {
  const TorusGrid& g = grid16();
  const MetricSpec spec = perturbed();
  const ChernCurvatureField R = chern_curvature(build_metric(spec, g));
  CHECK(hermitian_symmetry_residual(R) <= 1e-10);
  const auto points = sample_points(g, 99, 16);
  std::vector<double> errors;
  for (int N : {16, 32, 64}) {
    double err = 0.0;
    for (std::size_t p : points) {
      const std::vector<cd> fd = chern_curvature_fd(spec, g.coordinates(p), 1.0 / N);
      for (std::size_t s = 0; s < fd.size(); ++s) err = std::max(err, std::abs(fd[s] - R.comps[s][p]));
    }
    errors.push_back(err);
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) CHECK(std::log2(errors[i] / errors[i + 1]) >= 1.8);
}

TEST_CASE("holomorphic sectional curvature") {
  const TorusGrid& g = grid16();
  const MetricField m0 = build_metric(flat(), g);
  const MetricField m2 = build_metric(perturbed(), g);
  const ChernCurvatureField R0 = chern_curvature(m0);
  const ChernCurvatureField R2 = chern_curvature(m2);
  CounterRng rng(8, 0);
  for (int t = 0; t < 5; ++t) {
    const Direction d{rng.next_u64() % g.size(), random_vector(rng, 2)};
    CHECK(hsc_at(R0, d) == 0.0);
    const double h = hsc_at(R2, d);
    const cd naive = contract(R2, d.point, d.v);
    CHECK(std::abs(naive.imag()) < 1e-12);
    CHECK(h == doctest::Approx(naive.real()).epsilon(1e-12));
    const Direction rotated{d.point, std::exp(cd{0.0, 0.7}) * d.v};
    CHECK(hsc_at(R2, rotated) == doctest::Approx(h).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hsc_at(R2, Direction{0, SmallVector::Ones(3)}), DimensionMismatch);
}

TEST_CASE("scalar curvatures") {
  const TorusGrid& g = grid16();
  {
    const MetricField m0 = build_metric(flat(), g);
    const ChernCurvatureField R = chern_curvature(m0);
    CHECK(scalar_S(m0, R).max_abs() == 0.0);
    CHECK(scalar_S_hat(m0, R).max_abs() == 0.0);
  }
  {
    // S = n e^{-u} Delta_flat u = 2 pi^2 (1/10) e^{-u} cos(2 pi x1) and S_hat keeps one of the
    // two diagonal terms
    const MetricField m1 = build_metric(conformally_flat(), g);
    const ChernCurvatureField R = chern_curvature(m1);
    const ScalarField S = ScalarField::sample(g, [](const Point& x) {
      return cd{2.0 * kPi * kPi * 0.1 * std::exp(-conformally_flat_u(x)) * std::cos(2 * kPi * x[0]), 0.0};
    }, true);
    CHECK(max_abs_diff(scalar_S(m1, R), S) < 1e-11);
    CHECK(max_abs_diff(scalar_S_hat(m1, R), 0.5 * S) < 1e-11);
  }
  {
    const MetricField m2 = build_metric(perturbed(), g);
    const ChernCurvatureField R = chern_curvature(m2);
    const ScalarField S = scalar_S(m2, R);
    const ScalarField Sh = scalar_S_hat(m2, R);
    CHECK(S.is_real());
    CHECK(max_abs_diff(S, Sh) > 1e-3);
    CounterRng rng(4, 0);
    for (int t = 0; t < 5; ++t) {
      const std::size_t p = rng.next_u64() % g.size();
      const SmallMatrix gi = m2.inverse_at(p);
      cd s = 0.0, sh = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
              // g^{a bbar} = inverse(b, a)
              s += gi(j, i) * gi(l, k) * R.at(p, i, j, k, l);
              sh += gi(l, i) * gi(j, k) * R.at(p, i, j, k, l);
            }
      CHECK(std::abs(S[p] - s) < 1e-12);
      CHECK(std::abs(Sh[p] - sh) < 1e-12);
    }
  }
}

TEST_CASE("the two scalar curvatures agree for a Kaehler metric") {
  const MetricField m = build_metric(kahler_perturbation(), grid16());
  CHECK(structure_residuals(m).kahler <= 1e-10);
  const ChernCurvatureField R = chern_curvature(m);
  const ScalarField S = scalar_S(m, R);
  CHECK(S.max_abs() > 1e-2);
  CHECK(max_abs_diff(S, scalar_S_hat(m, R)) <= 1e-10 * S.max_abs());
}

TEST_CASE("Ricci form") {
  const TorusGrid& g = grid16();
  for (const auto& c : ricci_components(build_metric(flat(), g))) CHECK(c.max_abs() == 0.0);

  // det(e^u I) = e^{2u}: Ric_{1 1bar} = -2 u_{1 1bar} = 0.2 pi^2 cos(2 pi x1), other entries 0
  const MetricField m1 = build_metric(conformally_flat(), g);
  const auto ric = ricci_components(m1);
  const ScalarField expected = ScalarField::sample(g, [](const Point& x) {
    return cd{0.2 * kPi * kPi * std::cos(2 * kPi * x[0]), 0.0};
  }, true);
  CHECK(max_abs_diff(ric[0], expected) < 1e-11);
  for (int e = 1; e < 4; ++e) CHECK(ric[e].max_abs() < 1e-11);

  const MetricField m2 = build_metric(perturbed(), g);
  const FormField rho = ricci_form(m2);
  CHECK(rho.is_real());
  CHECK(exterior_d(rho).max_abs() <= 1e-10 * std::max(1.0, rho.max_abs()));
  const ScalarField S = scalar_S(m2, chern_curvature(m2));
  CHECK(max_abs_diff(trace_with_omega(rho, m2), S) <= 1e-8 * S.max_abs());
}

TEST_CASE("unitary frame") {
  const MetricField m = build_metric(perturbed(), grid16());
  for (std::size_t p : {0ul, 1234ul, 50000ul}) {
    const SmallMatrix E = unitary_frame(m, p);
    const SmallMatrix G = m.at(p);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        cd s = 0.0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) s += G(i, j) * E(i, a) * std::conj(E(j, b));
        CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) < 1e-13);
      }
    }
  }
}

TEST_CASE("fourth moment of the uniform measure on the unit sphere in C^2") {
  // (delta_ij delta_kl + delta_il delta_kj) / (n (n+1)) at i=j=k=l, n=2: average of |v1|^4 is 1/3
  std::mt19937_64 gen(17);
  std::normal_distribution<double> normal;
  const int M = 400000;
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < M; ++s) {
    const cd v1{normal(gen), normal(gen)};
    const cd v2{normal(gen), normal(gen)};
    const double r2 = std::norm(v1) + std::norm(v2);
    const double q = std::norm(v1) * std::norm(v1) / (r2 * r2);
    sum += q;
    sum2 += q * q;
  }
  const double mean = sum / M;
  const double se = std::sqrt((sum2 / M - mean * mean) / M);
  CHECK(std::abs(mean - 1.0 / 3.0) <= 3.0 * se);
  CHECK(sphere_volume(2) == doctest::Approx(2.0 * kPi * kPi));
  CHECK(sphere_volume(3) == doctest::Approx(kPi * kPi * kPi));
}

TEST_CASE("Berger sphere average") {
  const TorusGrid& g = grid16();
  const MetricField m0 = build_metric(flat(), g);
  const ChernCurvatureField R0 = chern_curvature(m0);
  CHECK(berger_quadrature(R0, m0, 17).value == 0.0);

  const MetricField m2 = build_metric(perturbed(), g);
  const ChernCurvatureField R = chern_curvature(m2);
  const ScalarField S = scalar_S(m2, R);
  const ScalarField Sh = scalar_S_hat(m2, R);
  for (std::size_t p : sample_points(g, 3, 5)) {
    const double rhs = (S[p].real() + Sh[p].real()) / 6.0 * 2.0 * kPi * kPi;
    CHECK(berger_prediction(S, Sh, 2, p) == doctest::Approx(rhs).epsilon(1e-14));
    const SphereAverage q = berger_quadrature(R, m2, p);
    CHECK(std::abs(q.value - rhs) <= 1e-8 * std::max(std::abs(rhs), 1e-3));
    const SphereAverage mc = berger_monte_carlo(R, m2, p, 3, 1000000);
    CHECK(mc.samples == 1000000u);
    CHECK(std::abs(mc.value - rhs) <= 3.0 * mc.standard_error);
  }
}

TEST_CASE("holomorphic sectional curvature range") {
  const TorusGrid& g = grid16();
  HscSamplerConfig cfg;
  cfg.points = 32;
  cfg.directions = 16;
  {
    const MetricField m0 = build_metric(flat(), g);
    const HscRange r = hsc_range_estimate(chern_curvature(m0), m0, cfg);
    CHECK(r.min == 0.0);
    CHECK(r.max == 0.0);
  }
  const MetricField m1 = build_metric(conformally_flat(), g);
  const ChernCurvatureField R1 = chern_curvature(m1);
  const HscRange a = hsc_range_estimate(R1, m1, cfg);
  CHECK(a.heuristic);
  CHECK(a.min < 0.0);
  CHECK(a.max > 0.0);
  CHECK(metric_norm2(m1, a.argmin) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hsc_at(R1, a.argmin) == doctest::Approx(a.min).epsilon(1e-12));
  const HscRange b = hsc_range_estimate(R1, m1, cfg);
  CHECK(a.min == b.min);
  CHECK(a.max == b.max);
  CHECK(a.argmin.point == b.argmin.point);
}

TEST_CASE("sample points are distinct and deterministic") {
  const TorusGrid g = make_grid(1, 8);
  const auto a = sample_points(g, 3, 20);
  CHECK(a == sample_points(g, 3, 20));
  CHECK(a != sample_points(g, 4, 20));
  std::vector<std::size_t> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(sample_points(g, 3, 1000).size() == g.size());
}

TEST_CASE("conformal scalar-curvature law") {
  const TorusGrid& g = grid16();
  const MetricField m0 = build_metric(flat(), g);
  CHECK(conformal_scalar_law_residual(m0, conformally_flat().conformal.sample(g)) <= 1e-8);
  const MetricField m2 = build_metric(perturbed(), g);
  CHECK(conformal_scalar_law_residual(m2, random_trig_field(g, 11, 1, 4, 0.05)) <= 1e-8);
}
