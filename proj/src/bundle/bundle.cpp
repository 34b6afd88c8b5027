#include "herm/bundle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "herm/curvature.hpp"
#include "herm/errors.hpp"
#include "herm/spectral.hpp"

namespace herm {
namespace {

double smallest_eigenvalue(const SmallMatrix& h) {
  if (h.rows() == 1) return h(0, 0).real();
  Eigen::SelfAdjointEigenSolver<SmallMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return es.eigenvalues()(0);
}

std::vector<std::vector<cd>> inverse_fields(const BundleMetricField& h) {
  const int r = h.rank();
  const std::size_t size = h.grid().size();
  std::vector<std::vector<cd>> inv(r * r, std::vector<cd>(size));
  for (std::size_t p = 0; p < size; ++p) {
    const SmallMatrix H = h.at(p).inverse();
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) inv[a * r + b][p] = H(a, b);
  }
  return inv;
}

}  // namespace

BundleSpec BundleSpec::trivial(int rank) {
  BundleSpec s;
  s.rank = rank;
  s.base = SmallMatrix::Identity(rank, rank);
  return s;
}

SmallMatrix BundleSpec::evaluate(const Point& x) const {
  SmallMatrix h = base;
  for (const auto& t : terms) {
    const FourierTerm* p = &t.term;
    const cd v = evaluate_terms(std::span<const FourierTerm>(p, 1), x);
    h(t.row, t.col) += v;
    h(t.col, t.row) += std::conj(v);
  }
  return std::exp(weight.evaluate(x)) * h;
}

BundleMetricField::BundleMetricField(std::vector<ScalarField> entries, int rank,
                                     PositivityOptions opts, SmallMatrix background)
    : entries_(std::move(entries)), rank_(rank), background_(std::move(background)) {
  if (rank < 1 || rank > kMaxAxes) throw InvalidArgument("bundle metric: rank out of range");
  if (static_cast<int>(entries_.size()) != rank * rank) {
    throw DimensionMismatch("bundle metric: expected rank*rank entry fields");
  }
  const TorusGrid& g = entries_.front().grid();
  for (const auto& e : entries_) require_same_grid(g, e.grid(), "bundle metric");
  const int n = g.n();
  if (background_.size() == 0) background_ = SmallMatrix::Zero(n, n);
  if (background_.rows() != n || background_.cols() != n) {
    throw DimensionMismatch("bundle metric: background curvature must be n x n");
  }
  if ((background_ - background_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidArgument("bundle metric: background curvature must be Hermitian");
  }

  double scale = 0.0;
  for (const auto& e : entries_) scale = std::max(scale, e.max_abs());
  const double tol = std::max(opts.hermitian_tol, 1e-12) * std::max(1.0, scale);
  for (int a = 0; a < rank; ++a) {
    for (int b = a; b < rank; ++b) {
      auto& x = entries_[a * rank + b];
      if (a == b) {
        if (x.max_imag() > tol) throw InvalidArgument("bundle metric: diagonal entry is not real");
        x = x.real_part();
        continue;
      }
      auto& y = entries_[b * rank + a];
      auto xv = x.values();
      auto yv = y.values();
      for (std::size_t p = 0; p < xv.size(); ++p) {
        if (std::abs(xv[p] - std::conj(yv[p])) > tol) {
          std::ostringstream msg;
          msg << "bundle metric: entries (" << a + 1 << "," << b + 1 << ") and (" << b + 1 << ","
              << a + 1 << ") are not conjugate at point " << p;
          throw InvalidArgument(msg.str());
        }
        yv[p] = std::conj(xv[p]);
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
    msg << "bundle metric is not positive definite: smallest eigenvalue " << min_eigenvalue_
        << " at point " << worst << " (floor " << opts.floor << ")";
    throw PositivityViolation(worst, min_eigenvalue_, msg.str());
  }
}

SmallMatrix BundleMetricField::at(std::size_t p) const {
  SmallMatrix m(rank_, rank_);
  for (int a = 0; a < rank_; ++a)
    for (int b = 0; b < rank_; ++b) m(a, b) = entries_[a * rank_ + b][p];
  return m;
}

BundleMetricField build_bundle_metric(const BundleSpec& spec, const TorusGrid& grid,
                                      PositivityOptions opts) {
  const int r = spec.rank;
  const int n = grid.n();
  if (r < 1 || r > kMaxAxes) throw InvalidArgument("bundle spec: rank out of range");
  if (spec.base.rows() != r || spec.base.cols() != r) {
    throw DimensionMismatch("bundle spec: base matrix must be rank x rank");
  }
  for (const auto& t : spec.terms) {
    if (t.row < 0 || t.row >= r || t.col < 0 || t.col >= r) {
      throw InvalidArgument("bundle spec: term entry index out of range");
    }
    if (static_cast<int>(t.term.k.size()) != 2 * n) {
      throw DimensionMismatch("bundle spec: wave vector length must be 2n");
    }
  }
  for (const auto& t : spec.weight.terms) {
    if (static_cast<int>(t.k.size()) != 2 * n) {
      throw DimensionMismatch("bundle spec: weight wave vector length must be 2n");
    }
  }
  const ScalarField factor = exp(spec.weight.sample(grid));
  std::vector<ScalarField> entries;
  entries.reserve(r * r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      std::vector<FourierTerm> list;
      list.push_back({std::vector<int>(2 * n, 0), spec.base(a, b)});
      for (const auto& t : spec.terms) {
        if (t.row == a && t.col == b) list.push_back(t.term);
        if (t.col == a && t.row == b) {
          FourierTerm partner = t.term;
          for (auto& k : partner.k) k = -k;
          partner.c = std::conj(partner.c);
          list.push_back(std::move(partner));
        }
      }
      ScalarField e = sample_terms(grid, list);
      e *= factor;
      entries.push_back(std::move(e));
    }
  }
  return BundleMetricField(std::move(entries), r, opts, spec.background);
}

BundleMetricField conformal(const BundleMetricField& h, const ScalarField& u) {
  if (!u.is_real()) throw InvalidArgument("bundle conformal: factor must be real");
  require_same_grid(h.grid(), u.grid(), "bundle conformal");
  const ScalarField e = exp(u);
  std::vector<ScalarField> entries;
  for (int a = 0; a < h.rank(); ++a)
    for (int b = 0; b < h.rank(); ++b) entries.push_back(h.entry(a, b) * e);
  PositivityOptions opts;
  opts.floor = 0.0;
  return BundleMetricField(std::move(entries), h.rank(), opts, h.background());
}

BundleMetricField scaled(const BundleMetricField& h, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("bundle scaled: factor must be positive");
  std::vector<ScalarField> entries;
  for (int a = 0; a < h.rank(); ++a)
    for (int b = 0; b < h.rank(); ++b) entries.push_back(lambda * h.entry(a, b));
  PositivityOptions opts;
  opts.floor = 0.0;
  return BundleMetricField(std::move(entries), h.rank(), opts, h.background());
}

BundleMetricField change_frame(const BundleMetricField& h, const SmallMatrix& A) {
  const int r = h.rank();
  if (A.rows() != r || A.cols() != r) throw DimensionMismatch("change_frame: matrix must be rank x rank");
  if (std::abs(A.determinant()) < 1e-12) throw InvalidArgument("change_frame: matrix is singular");
  std::vector<ScalarField> entries(r * r, ScalarField(h.grid(), false));
  for (std::size_t p = 0; p < h.grid().size(); ++p) {
    const SmallMatrix H = A * h.at(p) * A.adjoint();
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) entries[a * r + b].values()[p] = H(a, b);
  }
  PositivityOptions opts;
  opts.floor = 0.0;
  return BundleMetricField(std::move(entries), r, opts, h.background());
}

BundleMetricField canonical_bundle_metric(const MetricField& metric, int m) {
  if (m < 1) throw InvalidArgument("canonical bundle: tensor power must be positive");
  const double e = -static_cast<double>(m);
  ScalarField h = map(metric.det(), [e](cd d) { return cd{std::pow(d.real(), e), 0.0}; }, true);
  PositivityOptions opts;
  opts.floor = 0.0;
  return BundleMetricField({std::move(h)}, 1, opts);
}

SmallMatrix BundleCurvatureField::block(std::size_t p, int i, int j) const {
  SmallMatrix m(rank, rank);
  for (int a = 0; a < rank; ++a)
    for (int b = 0; b < rank; ++b) m(a, b) = comps[slot(i, j, a, b)][p];
  return m;
}

BundleCurvatureField bundle_curvature(const BundleMetricField& h) {
  const TorusGrid& g = h.grid();
  const int n = g.n();
  const int r = h.rank();
  const std::size_t size = g.size();

  std::vector<FieldSpectrum> spectra;
  spectra.reserve(r * r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) spectra.emplace_back(h.entry(a, b));

  // D[(i*r + a)*r + b] = d_i h_{a bbar}
  std::vector<ScalarField> D;
  D.reserve(n * r * r);
  for (int i = 0; i < n; ++i) {
    const auto sym = DerivativeSymbol::first(LinearDerivative::holomorphic(g, i));
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) D.push_back(spectra[a * r + b].apply(sym, false));
  }
  auto d = [&](int i, int a, int b) -> const ScalarField& { return D[(i * r + a) * r + b]; };
  const auto inv = inverse_fields(h);
  const SmallMatrix& B = h.background();

  BundleCurvatureField R;
  R.n = n;
  R.rank = r;
  R.comps.assign(static_cast<std::size_t>(n) * n * r * r, ScalarField(g, false));
  std::vector<ScalarField> second(r * r, ScalarField(g, false));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto sym = DerivativeSymbol::second(LinearDerivative::holomorphic(g, i),
                                                LinearDerivative::antiholomorphic(g, j));
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) second[a * r + b] = spectra[a * r + b].apply(sym, false);
      SmallMatrix S(r, r), Di(r, r), Dj(r, r), Hinv(r, r);
      std::vector<std::span<cd>> out(r * r);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) out[a * r + b] = R.comps[R.slot(i, j, a, b)].values();
      for (std::size_t p = 0; p < size; ++p) {
        for (int a = 0; a < r; ++a) {
          for (int b = 0; b < r; ++b) {
            S(a, b) = second[a * r + b][p];
            Di(a, b) = d(i, a, b)[p];
            // d_jbar h_{a bbar} = conj(d_j h_{b abar})
            Dj(a, b) = std::conj(d(j, b, a)[p]);
            Hinv(a, b) = inv[a * r + b][p];
          }
        }
        SmallMatrix M = -S * Hinv + Di * Hinv * Dj * Hinv;
        M.diagonal().array() += B(i, j);
        for (int a = 0; a < r; ++a)
          for (int b = 0; b < r; ++b) out[a * r + b][p] = M(a, b);
      }
    }
  }
  return R;
}

double bundle_hermitian_residual(const BundleCurvatureField& R, const BundleMetricField& h) {
  const int n = R.n;
  const int r = R.rank;
  double scale = 0.0;
  double worst = 0.0;
  for (std::size_t p = 0; p < h.grid().size(); ++p) {
    const SmallMatrix H = h.at(p);
    std::vector<SmallMatrix> L(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        L[i * n + j] = R.block(p, i, j) * H;
        scale = std::max(scale, L[i * n + j].cwiseAbs().maxCoeff());
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int a = 0; a < r; ++a)
          for (int m = 0; m < r; ++m)
            worst = std::max(worst, std::abs(std::conj(L[i * n + j](a, m)) - L[j * n + i](m, a)));
  }
  return scale > 0.0 ? worst / scale : worst;
}

SmallMatrix MeanCurvatureField::at(std::size_t p) const {
  SmallMatrix m(rank, rank);
  for (int a = 0; a < rank; ++a)
    for (int b = 0; b < rank; ++b) m(a, b) = entries[a * rank + b][p];
  return m;
}

MeanCurvatureField mean_curvature(const MetricField& metric, const BundleMetricField& h,
                                  const BundleCurvatureField& R) {
  require_same_grid(metric.grid(), h.grid(), "mean_curvature");
  require_same_grid(metric.grid(), R.grid(), "mean_curvature");
  if (R.n != metric.n() || R.rank != h.rank()) {
    throw DimensionMismatch("mean_curvature: curvature shape differs from metric or bundle");
  }
  const int n = metric.n();
  const int r = h.rank();
  MeanCurvatureField K;
  K.rank = r;
  K.entries.assign(r * r, ScalarField(metric.grid(), false));
  std::vector<std::span<cd>> out(r * r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) out[a * r + b] = K.entries[a * r + b].values();
  for (std::size_t p = 0; p < metric.grid().size(); ++p) {
    const SmallMatrix Ginv = metric.inverse_at(p);
    SmallMatrix trace = SmallMatrix::Zero(r, r);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) trace += Ginv(j, i) * R.block(p, i, j);
    const SmallMatrix k = trace * h.at(p);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) out[a * r + b][p] = k(a, b);
  }
  return K;
}

double mean_curvature_hermitian_residual(const MeanCurvatureField& K) {
  double scale = 0.0;
  double worst = 0.0;
  for (std::size_t p = 0; p < K.grid().size(); ++p) {
    const SmallMatrix k = K.at(p);
    scale = std::max(scale, k.cwiseAbs().maxCoeff());
    worst = std::max(worst, (k - k.adjoint()).cwiseAbs().maxCoeff());
  }
  return scale > 0.0 ? worst / scale : worst;
}

std::vector<ScalarField> bundle_eigenvalues(const MeanCurvatureField& K, const BundleMetricField& h) {
  require_same_grid(K.grid(), h.grid(), "bundle_eigenvalues");
  const int r = h.rank();
  if (K.rank != r) throw DimensionMismatch("bundle_eigenvalues: rank mismatch");
  std::vector<ScalarField> out(r, ScalarField(h.grid(), true));
  std::vector<std::span<cd>> v(r);
  for (int a = 0; a < r; ++a) v[a] = out[a].values();
  for (std::size_t p = 0; p < h.grid().size(); ++p) {
    const SmallMatrix H = h.at(p);
    SmallMatrix k = K.at(p);
    k = 0.5 * (k + k.adjoint());
    if (r == 1) {
      v[0][p] = k(0, 0).real() / H(0, 0).real();
      continue;
    }
    Eigen::LLT<SmallMatrix> llt(H);
    if (llt.info() != Eigen::Success) {
      throw EigenFailure(p, "bundle_eigenvalues: fiber metric is not positive definite at point " +
                                std::to_string(p));
    }
    const SmallMatrix Linv = llt.matrixL().solve(SmallMatrix::Identity(r, r));
    const SmallMatrix C = Linv * k * Linv.adjoint();
    Eigen::SelfAdjointEigenSolver<SmallMatrix> es(0.5 * (C + C.adjoint()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success || !es.eigenvalues().allFinite()) {
      throw EigenFailure(p, "bundle_eigenvalues: eigen solver failed at point " + std::to_string(p));
    }
    for (int a = 0; a < r; ++a) v[a][p] = es.eigenvalues()(a);
  }
  for (auto& f : out) f.mark_real();
  return out;
}

ScalarField gamma_field(const MeanCurvatureField& K, const BundleMetricField& h) {
  return std::move(bundle_eigenvalues(K, h).back());
}

double conformal_bundle_check(const MetricField& metric, const BundleMetricField& h,
                              const ScalarField& u) {
  if (!u.is_real()) throw InvalidArgument("conformal_bundle_check: u must be real");
  const int r = h.rank();
  const MeanCurvatureField K = mean_curvature(metric, h, bundle_curvature(h));
  const BundleMetricField ht = conformal(h, u);
  const MeanCurvatureField Kt = mean_curvature(metric, ht, bundle_curvature(ht));
  const ScalarField lap = laplacian_c(metric, u);
  const ScalarField e = exp(u);
  double worst = 0.0;
  double scale = 0.0;
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      const ScalarField rhs = e * (K.entry(a, b) + lap * h.entry(a, b));
      worst = std::max(worst, max_abs_diff(Kt.entry(a, b), rhs));
      scale = std::max(scale, Kt.entry(a, b).max_abs());
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

double spectral_tail(const ScalarField& f) {
  const TorusGrid& g = f.grid();
  const std::vector<cd> c = forward_transform(f);
  const int N = g.N();
  const int cut = (3 * N) / 8;
  double top = 0.0;
  double tail = 0.0;
  for_each_index(g, [&](std::size_t p, const AxisIndex& idx) {
    const double a = std::abs(c[p]);
    top = std::max(top, a);
    for (int ax = 0; ax < g.axes(); ++ax) {
      if (std::abs(signed_wavenumber(idx[ax], N)) > cut) {
        tail = std::max(tail, a);
        break;
      }
    }
  });
  return top > 0.0 ? tail / top : 0.0;
}

ScalarField CanonicalSection::norm2(const MetricField& metric) const {
  const double c2 = std::norm(c);
  const double e = -static_cast<double>(m);
  return map(metric.det(), [c2, e](cd d) { return cd{c2 * std::pow(d.real(), e), 0.0}; }, true);
}

WeitzenbockTerms weitzenbock_terms(const MetricField& metric, const CanonicalSection& sec) {
  if (sec.c == cd{0.0, 0.0}) throw InvalidArgument("weitzenbock: section coefficient must be nonzero");
  if (sec.m < 1) throw InvalidArgument("weitzenbock: tensor power must be positive");
  const TorusGrid& g = metric.grid();
  const int n = metric.n();
  const ScalarField s2 = sec.norm2(metric);
  const double m = sec.m;
  const ScalarField phi =
      map(metric.det(), [m](cd d) { return cd{m * std::log(d.real()), 0.0}; }, true);

  std::vector<ScalarField> dphi;
  for (int i = 0; i < n; ++i) dphi.push_back(wirtinger_d(phi, i));
  ScalarField grad(g, false);
  auto gv = grad.values();
  for (std::size_t p = 0; p < g.size(); ++p) {
    const SmallMatrix Ginv = metric.inverse_at(p);
    cd s{0.0, 0.0};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += Ginv(j, i) * dphi[i][p] * std::conj(dphi[j][p]);
    gv[p] = s * s2[p];
  }
  grad.mark_real(1e-8);

  WeitzenbockTerms out{-1.0 * laplacian_c(metric, s2), std::move(grad),
                       m * (scalar_S(metric, chern_curvature(metric)) * s2)};
  out.curvature.mark_real(1e-8);
  const double scale = out.curvature.max_abs() + out.gradient.max_abs();
  const double diff = max_abs_diff(out.lhs, out.gradient + out.curvature);
  out.residual = scale > 0.0 ? diff / scale : diff;
  return out;
}

double weitzenbock_residual(const MetricField& metric, const CanonicalSection& sec) {
  return weitzenbock_terms(metric, sec).residual;
}

}  // namespace herm
