#include "herm/metric.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "herm/errors.hpp"
#include "herm/spectral.hpp"

namespace herm {
namespace {

double smallest_eigenvalue(const SmallMatrix& g) {
  const int n = static_cast<int>(g.rows());
  if (n == 1) return g(0, 0).real();
  if (n == 2) {
    const double a = g(0, 0).real();
    const double d = g(1, 1).real();
    const double h = 0.5 * (a - d);
    return 0.5 * (a + d) - std::sqrt(h * h + std::norm(g(0, 1)));
  }
  Eigen::SelfAdjointEigenSolver<SmallMatrix> es(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return es.eigenvalues()(0);
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

MetricSpec MetricSpec::identity(int n) {
  MetricSpec s;
  s.n = n;
  s.base = SmallMatrix::Identity(n, n);
  return s;
}

SmallMatrix MetricSpec::evaluate(const Point& x) const {
  SmallMatrix g = base;
  for (const auto& t : terms) {
    const FourierTerm* p = &t.term;
    const cd v = evaluate_terms(std::span<const FourierTerm>(p, 1), x);
    g(t.row, t.col) += v;
    g(t.col, t.row) += std::conj(v);
  }
  return std::exp(conformal.evaluate(x)) * g;
}

MetricField::MetricField(std::vector<ScalarField> entries, int n, PositivityOptions opts)
    : entries_(std::move(entries)), n_(n) {
  if (n < 1 || n > kMaxComplexDim) throw InvalidArgument("metric: complex dimension out of range");
  if (static_cast<int>(entries_.size()) != n * n) {
    throw DimensionMismatch("metric: expected n*n entry fields");
  }
  const TorusGrid& g = entries_.front().grid();
  if (g.n() != n) throw DimensionMismatch("metric: grid dimension differs from matrix size");
  for (const auto& e : entries_) require_same_grid(g, e.grid(), "metric");

  double scale = 0.0;
  for (const auto& e : entries_) scale = std::max(scale, e.max_abs());
  const double tol = opts.hermitian_tol * std::max(1.0, scale);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      auto& a = entries_[i * n + j];
      if (i == j) {
        if (a.max_imag() > tol) {
          throw InvalidArgument("metric: diagonal entry has a non-zero imaginary part");
        }
        a = a.real_part();
        continue;
      }
      auto& b = entries_[j * n + i];
      auto av = a.values();
      auto bv = b.values();
      for (std::size_t p = 0; p < av.size(); ++p) {
        if (std::abs(av[p] - std::conj(bv[p])) > tol) {
          std::ostringstream msg;
          msg << "metric: entries (" << i + 1 << "," << j + 1 << ") and (" << j + 1 << ","
              << i + 1 << ") are not conjugate at point " << p;
          throw InvalidArgument(msg.str());
        }
        bv[p] = std::conj(av[p]);
      }
    }
  }

  min_eigenvalue_ = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double lam = smallest_eigenvalue(at(p));
    if (!(lam >= min_eigenvalue_)) {
      min_eigenvalue_ = lam;
      worst = p;
      if (std::isnan(lam)) break;
    }
  }
  if (!(min_eigenvalue_ > opts.floor)) {
    std::ostringstream msg;
    msg << "metric is not positive definite: smallest eigenvalue " << min_eigenvalue_
        << " at point " << worst << " (floor " << opts.floor << ")";
    throw PositivityViolation(worst, min_eigenvalue_, msg.str());
  }
}

SmallMatrix MetricField::at(std::size_t p) const {
  SmallMatrix m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = entries_[i * n_ + j][p];
  return m;
}

SmallMatrix MetricField::inverse_at(std::size_t p) const { return at(p).inverse(); }

ScalarField MetricField::det() const {
  ScalarField out(grid(), true);
  auto v = out.values();
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = at(p).determinant().real();
  out.mark_real(1e30);
  return out;
}

MetricField build_metric(const MetricSpec& spec, const TorusGrid& grid, PositivityOptions opts) {
  const int n = spec.n;
  if (grid.n() != n) throw DimensionMismatch("metric spec dimension differs from the grid");
  if (spec.base.rows() != n || spec.base.cols() != n) {
    throw DimensionMismatch("metric spec: base matrix must be n x n");
  }
  for (const auto& t : spec.terms) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw InvalidArgument("metric spec: term entry index out of range");
    }
    if (static_cast<int>(t.term.k.size()) != 2 * n) {
      throw DimensionMismatch("metric spec: wave vector length must be 2n");
    }
  }
  for (const auto& t : spec.conformal.terms) {
    if (static_cast<int>(t.k.size()) != 2 * n) {
      throw DimensionMismatch("metric spec: conformal wave vector length must be 2n");
    }
  }

  const bool has_conformal = !spec.conformal.terms.empty() || spec.conformal.constant != 0.0;
  ScalarField factor = has_conformal ? exp(spec.conformal.sample(grid))
                                     : ScalarField::constant(grid, 1.0);
  std::vector<ScalarField> entries;
  entries.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<FourierTerm> list;
      list.push_back({std::vector<int>(2 * n, 0), spec.base(i, j)});
      for (const auto& t : spec.terms) {
        if (t.row == i && t.col == j) list.push_back(t.term);
        if (t.col == i && t.row == j) {
          FourierTerm partner = t.term;
          for (auto& k : partner.k) k = -k;
          partner.c = std::conj(partner.c);
          list.push_back(std::move(partner));
        }
      }
      ScalarField e = sample_terms(grid, list);
      if (has_conformal) e *= factor;
      entries.push_back(std::move(e));
    }
  }
  // the conjugate pairs are summed separately, so allow rounding-level mismatch
  opts.hermitian_tol = std::max(opts.hermitian_tol, 1e-12);
  return MetricField(std::move(entries), n, opts);
}

FormField omega_form(const MetricField& metric) {
  const int n = metric.n();
  FormField c(metric.grid(), 2, Basis::complex);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ScalarField comp = metric.entry(i, j);
      comp *= cd{0.0, 1.0};
      c.at((1u << i) | (1u << (n + j))) = std::move(comp);
    }
  }
  FormField r = to_real_basis(c);
  r.mark_real();
  return r;
}

FormField omega_power(const MetricField& metric, int k) {
  if (k < 0 || k > metric.n()) throw InvalidArgument("omega_power: exponent out of range");
  FormField out = zero_form(ScalarField::constant(metric.grid(), 1.0).mark_real());
  if (k == 0) return out;
  const FormField w = omega_form(metric);
  out = w;
  for (int i = 1; i < k; ++i) out = wedge(out, w);
  return out;
}

ScalarField omega_n_density(const MetricField& metric) {
  const int n = metric.n();
  ScalarField d = metric.det();
  d *= cd{std::ldexp(factorial(n), n), 0.0};
  return d;
}

double volume_integral(const ScalarField& f, const MetricField& metric) {
  require_same_grid(f.grid(), metric.grid(), "volume_integral");
  return integrate(f * omega_n_density(metric)).real();
}

MetricField conformal(const MetricField& metric, const ScalarField& u, PositivityOptions opts) {
  require_same_grid(u.grid(), metric.grid(), "conformal");
  if (!u.is_real()) throw InvalidArgument("conformal: the factor exponent must be real");
  const ScalarField f = exp(u);
  const int n = metric.n();
  std::vector<ScalarField> entries;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) entries.push_back(metric.entry(i, j) * f);
  return MetricField(std::move(entries), n, opts);
}

MetricField scaled(const MetricField& metric, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("scaled: factor must be positive");
  const int n = metric.n();
  std::vector<ScalarField> entries;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) entries.push_back(lambda * metric.entry(i, j));
  PositivityOptions opts;
  opts.floor = 0.0;
  return MetricField(std::move(entries), n, opts);
}

}  // namespace herm
