#pragma once

#include <cmath>
#include <numbers>

#include "herm/bundle.hpp"
#include "herm/metric.hpp"

namespace herm::test {

inline constexpr double kPi = std::numbers::pi;

// g = I
inline MetricSpec flat(int n = 2) { return MetricSpec::identity(n); }

// g = e^u I with u = cos(2 pi x1) / 10
inline MetricSpec conformally_flat(int n = 2) {
  MetricSpec s = MetricSpec::identity(n);
  std::vector<int> k(2 * n, 0);
  k[0] = 1;
  s.conformal.terms.push_back({k, 0.05});
  return s;
}

inline double conformally_flat_u(const Point& x) { return 0.1 * std::cos(2.0 * kPi * x[0]); }

// g = I + eps (P + P^H), P_11 = e^{2 pi i x1}, P_12 = e^{2 pi i y2} / 2
inline MetricSpec perturbed(double eps = 0.05) {
  MetricSpec s = MetricSpec::identity(2);
  s.terms.push_back({0, 0, {{1, 0, 0, 0}, eps}});
  s.terms.push_back({0, 1, {{0, 0, 0, 1}, 0.5 * eps}});
  return s;
}

// perturbed() plus two more terms; its conformal class has a non-constant factor
inline MetricSpec generic() {
  MetricSpec s = perturbed();
  s.terms.push_back({1, 1, {{1, 0, 0, 0}, 0.08}});
  s.terms.push_back({0, 1, {{0, 1, 0, 0}, 0.03}});
  return s;
}

// Kaehler: g = I + i ddbar-type Hessian of psi = a e^{2 pi i (x1 + x2)} + conj, which for
// this wave vector equals -pi^2 (psi) in every entry.
inline MetricSpec kahler_perturbation(double a = 0.01) {
  MetricSpec s = MetricSpec::identity(2);
  const std::vector<int> k{1, 1, 0, 0};
  const std::vector<int> mk{-1, -1, 0, 0};
  const double c = -kPi * kPi * a;
  s.terms.push_back({0, 0, {k, c}});
  s.terms.push_back({1, 1, {k, c}});
  s.terms.push_back({0, 1, {k, c}});
  s.terms.push_back({0, 1, {mk, c}});
  return s;
}

// Line bundle with constant curvature B = b I and periodic weight w = c e^{2 pi i x1} + conj,
// c = 0.5 / pi^2, so that gamma = 2b + cos(2 pi x1) on the flat torus.
inline BundleSpec oscillating_line(double b) {
  BundleSpec s = BundleSpec::trivial(1);
  s.weight.terms.push_back({{1, 0, 0, 0}, 0.5 / (kPi * kPi)});
  s.background = SmallMatrix::Identity(2, 2) * cd{b, 0.0};
  return s;
}

}  // namespace herm::test
