#include <cmath>
#include <vector>

#include "doctest.h"
#include "herm/bundle.hpp"
#include "herm/curvature.hpp"
#include "herm/errors.hpp"
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

// rank-2 fiber metric with couplings along every real axis
BundleSpec random_rank2() {
  BundleSpec s = BundleSpec::trivial(2);
  s.terms.push_back({0, 0, {{1, 0, 0, 0}, 0.06}});
  s.terms.push_back({1, 1, {{0, 1, 1, 0}, cd{0.04, 0.02}}});
  s.terms.push_back({0, 1, {{0, 0, 0, 1}, cd{0.05, -0.03}}});
  s.terms.push_back({0, 1, {{1, 0, 1, 0}, 0.03}});
  s.weight.terms.push_back({{0, 0, 1, 1}, 0.04});
  return s;
}

double max_diff(const ScalarField& a, const ScalarField& b) { return max_abs_diff(a, b); }

}  // namespace

TEST_CASE("bundle curvature of a constant metric vanishes") {
  const TorusGrid& g = grid16();
  const BundleCurvatureField R = bundle_curvature(build_bundle_metric(BundleSpec::trivial(2), g));
  for (const auto& c : R.comps) CHECK(c.max_abs() == 0.0);
}

TEST_CASE("line bundle h = exp(-phi) has curvature ddbar phi") {
  // phi = -weight; for the wave c e^{2 pi i k.x} the operator d_i d_jbar multiplies by
  // -pi^2 (kx_i - i ky_i)(kx_j + i ky_j)
  const TorusGrid& g = grid16();
  BundleSpec s = BundleSpec::trivial(1);
  s.weight.terms.push_back({{1, 0, 0, 1}, cd{0.07, 0.02}});
  s.weight.terms.push_back({{0, 1, 1, 0}, 0.03});
  const BundleCurvatureField R = bundle_curvature(build_bundle_metric(s, g));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      std::vector<FourierTerm> waves;
      for (const auto& t : s.weight.terms) {
        const cd fi{static_cast<double>(t.k[i]), -static_cast<double>(t.k[2 + i])};
        const cd fj{static_cast<double>(t.k[j]), static_cast<double>(t.k[2 + j])};
        const cd factor = kPi * kPi * fi * fj;  // -(-pi^2 ...) from phi = -weight
        waves.push_back({t.k, factor * t.c});
        std::vector<int> mk(t.k.size());
        for (std::size_t a = 0; a < mk.size(); ++a) mk[a] = -t.k[a];
        const cd mi{-static_cast<double>(t.k[i]), static_cast<double>(t.k[2 + i])};
        const cd mj{-static_cast<double>(t.k[j]), -static_cast<double>(t.k[2 + j])};
        waves.push_back({mk, kPi * kPi * mi * mj * std::conj(t.c)});
      }
      CHECK(max_diff(R(i, j, 0, 0), sample_terms(g, waves)) <= 1e-10);
    }
  }
}

TEST_CASE("rank-2 bundle curvature against the finite-difference oracle") {
  const BundleSpec s = random_rank2();
  const TorusGrid g = make_grid(2, 16);
  const BundleMetricField h = build_bundle_metric(s, g);
  const BundleCurvatureField R = bundle_curvature(h);
  CHECK(bundle_hermitian_residual(R, h) <= 1e-9);

  std::vector<std::size_t> points;
  for (std::size_t p = 0; p < g.size(); p += 4099) points.push_back(p);
  std::vector<double> errors;
  for (double step : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    double err = 0.0;
    for (std::size_t p : points) {
      const std::vector<cd> fd = bundle_curvature_fd(s, 2, g.coordinates(p), step);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              err = std::max(err, std::abs(R(i, j, a, b)[p] - fd[R.slot(i, j, a, b)]));
    }
    errors.push_back(err);
  }
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const double order = std::log2(errors[k] / errors[k + 1]);
    INFO("errors " << errors[k] << " -> " << errors[k + 1]);
    CHECK(order >= 1.8);
  }
}

TEST_CASE("mean curvature") {
  const TorusGrid& g = grid16();
  const MetricField m0 = build_metric(flat(), g);
  {
    const BundleMetricField h = build_bundle_metric(BundleSpec::trivial(2), g);
    const MeanCurvatureField K = mean_curvature(m0, h, bundle_curvature(h));
    for (const auto& e : K.entries) CHECK(e.max_abs() == 0.0);
  }

  // on m K_M with h = (det g)^{-m}, gamma = -m S; N = 32 resolves log det g to 1e-7
  {
    const TorusGrid g32 = make_grid(2, 32);
    const MetricField m = build_metric(perturbed(), g32);
    const ScalarField S = scalar_S(m, chern_curvature(m));
    for (int power : {1, 2}) {
      const BundleMetricField h = canonical_bundle_metric(m, power);
      const MeanCurvatureField K = mean_curvature(m, h, bundle_curvature(h));
      CHECK(mean_curvature_hermitian_residual(K) <= 1e-9);
      CHECK(max_diff(gamma_field(K, h), -1.0 * power * S) <= 1e-7);
    }
  }
  const MetricField m2 = build_metric(perturbed(), g);

  // a constant change of trivialization leaves gamma unchanged
  const BundleMetricField h = build_bundle_metric(random_rank2(), g);
  const ScalarField gamma = gamma_field(mean_curvature(m2, h, bundle_curvature(h)), h);
  SmallMatrix A(2, 2);
  A << cd{1.2, 0.1}, cd{0.3, -0.4}, cd{-0.2, 0.0}, cd{0.9, 0.5};
  const BundleMetricField hA = change_frame(h, A);
  const ScalarField gammaA = gamma_field(mean_curvature(m2, hA, bundle_curvature(hA)), hA);
  CHECK(max_diff(gamma, gammaA) <= 1e-9 * std::max(1.0, gamma.max_abs()));

  // gamma is invariant under h -> lambda h
  const BundleMetricField hl = scaled(h, 3.0);
  CHECK(max_diff(gamma_field(mean_curvature(m2, hl, bundle_curvature(hl)), hl), gamma) <= 1e-9);
}

TEST_CASE("greatest generalized eigenvalue") {
  const TorusGrid& g = grid16();
  const BundleMetricField I2 = build_bundle_metric(BundleSpec::trivial(2), g);
  {
    MeanCurvatureField K{2, {ScalarField(g, true), ScalarField(g, true), ScalarField(g, true), ScalarField(g, true)}};
    CHECK(gamma_field(K, I2).max_abs() == 0.0);
  }
  {
    BundleSpec s = BundleSpec::trivial(1);
    s.weight.terms.push_back({{1, 1, 0, 0}, 0.2});
    const BundleMetricField h = build_bundle_metric(s, g);
    const ScalarField k = random_trig_field(g, 12);
    const MeanCurvatureField K{1, {k}};
    CHECK(max_diff(gamma_field(K, h), k * exp(-1.0 * s.weight.sample(g))) <= 1e-13);
  }
  {
    const ScalarField a = random_trig_field(g, 13);
    const ScalarField b = random_trig_field(g, 14);
    const MeanCurvatureField K{2, {a, ScalarField(g, true), ScalarField(g, true), b}};
    std::vector<cd> top(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) top[p] = std::max(a[p].real(), b[p].real());
    const ScalarField expected(g, top, true);
    CHECK(max_diff(gamma_field(K, I2), expected) <= 1e-13);
  }
}

TEST_CASE("conformal law of the mean curvature") {
  const TorusGrid& g = grid16();
  const MetricField m2 = build_metric(perturbed(), g);
  const BundleMetricField h = build_bundle_metric(random_rank2(), g);
  CHECK(conformal_bundle_check(m2, h, ScalarField(g, true)) <= 1e-13);
  CHECK(conformal_bundle_check(m2, h, ScalarField::constant(g, 0.7)) <= 1e-13);
  for (int k = 0; k < 3; ++k) {
    CHECK(conformal_bundle_check(m2, h, random_trig_field(g, 400 + k, 1, 4, 0.2)) <= 1e-7);
  }
}

TEST_CASE("vanishing certificate") {
  const TorusGrid& g = grid16();
  const MetricField m0 = build_metric(flat(), g);

  SUBCASE("oscillating gamma with negative mean") {
    // gamma = -0.5 + cos(2 pi x1): u0 = -cos(2 pi x1) / pi^2, and the greatest eigenvalue of
    // K~ relative to e^{u0} h is gamma + Delta_c u0 = -0.5 everywhere
    const VanishingCertificate c = vanishing_certificate(m0, build_bundle_metric(oscillating_line(-0.25), g));
    CHECK(c.status == CertificateStatus::certified);
    CHECK(c.gamma.max_real() > 0.0);
    CHECK(c.gamma_mean == doctest::Approx(-0.5).epsilon(1e-12));
    const ScalarField u0 = ScalarField::sample(g, [](const Point& x) {
      return cd{-std::cos(2 * kPi * x[0]) / (kPi * kPi), 0.0};
    }, true);
    CHECK(max_abs_diff(c.u0, u0) <= 1e-8);
    CHECK(c.min_gap == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(c.laplacian_integral <= 1e-8);
  }
  SUBCASE("constant negative gamma") {
    BundleSpec s = BundleSpec::trivial(1);
    s.background = SmallMatrix::Identity(2, 2) * cd{-0.5, 0.0};
    const VanishingCertificate c = vanishing_certificate(m0, build_bundle_metric(s, g));
    CHECK(c.status == CertificateStatus::certified);
    CHECK(c.u0.max_abs() <= 1e-12);
    CHECK(c.min_gap == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("non-negative gamma fails the hypothesis") {
    const VanishingCertificate c = vanishing_certificate(m0, build_bundle_metric(oscillating_line(0.5), g));
    CHECK(c.status == CertificateStatus::hypothesis_failed);
    CHECK(c.gamma.min_real() >= -1e-10);
  }
  SUBCASE("scaling the fiber metric keeps the status") {
    for (double b : {-0.25, 0.5}) {
      const BundleMetricField h = build_bundle_metric(oscillating_line(b), g);
      CHECK(vanishing_certificate(m0, h).status == vanishing_certificate(m0, scaled(h, 4.0)).status);
    }
  }
  SUBCASE("non-Gauduchon input is rejected") {
    const MetricField m1 = build_metric(conformally_flat(), g);
    CHECK_THROWS_AS(vanishing_certificate(m1, build_bundle_metric(oscillating_line(-0.25), g)), PreconditionViolation);
  }
}

TEST_CASE("Weitzenboeck formula for constant sections of m K") {
  const TorusGrid& g = grid16();
  for (int m : {1, 2, 3}) {
    const WeitzenbockTerms t = weitzenbock_terms(build_metric(flat(), g), {m, cd{1.0, 0.5}});
    CHECK(t.lhs.max_abs() <= 1e-13);
    CHECK(t.gradient.max_abs() <= 1e-13);
    CHECK(t.curvature.max_abs() <= 1e-13);
  }
  {
    // u = cos(2 pi x1) / 10, m = 1: |sigma|^2 = e^{-2u}, gradient e^{-3u} u'^2,
    // curvature -e^{-3u} u'' / 2, lhs their sum
    const WeitzenbockTerms t = weitzenbock_terms(build_metric(conformally_flat(), g), {1, cd{1.0, 0.0}});
    auto closed = [&](double a, double b) {
      return ScalarField::sample(g, [=](const Point& x) {
        const double u = 0.1 * std::cos(2 * kPi * x[0]);
        const double du = -0.2 * kPi * std::sin(2 * kPi * x[0]);
        const double ddu = -0.4 * kPi * kPi * std::cos(2 * kPi * x[0]);
        return cd{std::exp(-3 * u) * (a * du * du + b * ddu), 0.0};
      }, true);
    };
    CHECK(max_abs_diff(t.gradient, closed(1.0, 0.0)) <= 1e-10);
    CHECK(max_abs_diff(t.curvature, closed(0.0, -0.5)) <= 1e-10);
    CHECK(max_abs_diff(t.lhs, closed(1.0, -0.5)) <= 1e-9);
    CHECK(t.residual <= 1e-7);
  }
  CHECK(weitzenbock_residual(build_metric(perturbed(), make_grid(2, 32)), {2, cd{0.3, -1.0}}) <= 1e-7);
}
