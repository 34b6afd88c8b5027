#include "herm/krylov.hpp"

#include <cmath>

#include "herm/errors.hpp"

namespace herm {
namespace {

void axpy(double a, const RealVector& x, RealVector& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

RealVector residual_of(const LinearMap& A, const RealVector& b, const RealVector& x) {
  RealVector r = A(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

}  // namespace

double dot(const RealVector& a, const RealVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double rms_norm(const RealVector& v) {
  if (v.empty()) return 0.0;
  return std::sqrt(dot(v, v) / static_cast<double>(v.size()));
}

KrylovResult gmres(const LinearMap& A, const LinearMap& M, const RealVector& b, RealVector x0,
                   const KrylovOptions& options) {
  if (x0.size() != b.size()) throw DimensionMismatch("gmres: initial guess size differs from rhs");
  if (options.restart < 1) throw InvalidArgument("gmres: restart length must be positive");
  const std::size_t size = b.size();
  const double scale = std::sqrt(static_cast<double>(size));
  const int m = options.restart;

  KrylovResult out;
  out.x = std::move(x0);
  RealVector r = residual_of(A, b, out.x);
  double beta = std::sqrt(dot(r, r));
  out.residual = beta / scale;

  std::vector<RealVector> V;
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1);

  while (out.residual > options.tol && out.iterations < options.max_iterations) {
    V.assign(1, r);
    for (auto& v : V[0]) v /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && out.iterations < options.max_iterations; ++k) {
      RealVector w = A(M(V[k]));
      for (int i = 0; i <= k; ++i) {
        H[i][k] = dot(w, V[i]);
        axpy(-H[i][k], V[i], w);
      }
      H[k + 1][k] = std::sqrt(dot(w, w));
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
        H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
        H[i][k] = t;
      }
      const double h = std::hypot(H[k][k], H[k + 1][k]);
      const bool breakdown = h == 0.0;
      cs[k] = breakdown ? 1.0 : H[k][k] / h;
      sn[k] = breakdown ? 0.0 : H[k + 1][k] / h;
      const double hk1 = H[k + 1][k];
      H[k][k] = breakdown ? H[k][k] : h;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++out.iterations;
      if (std::abs(g[k + 1]) / scale <= options.tol || hk1 <= 1e-14 * beta) {
        ++k;
        break;
      }
      for (auto& v : w) v /= hk1;
      V.push_back(std::move(w));
    }
    // back substitution for the k x k triangular system
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
      y[i] = H[i][i] != 0.0 ? s / H[i][i] : 0.0;
    }
    RealVector comb(size, 0.0);
    for (int i = 0; i < k; ++i) axpy(y[i], V[i], comb);
    axpy(1.0, M(comb), out.x);
    r = residual_of(A, b, out.x);
    const double next = std::sqrt(dot(r, r));
    const bool stalled = next >= beta * (1.0 - 1e-12);
    beta = next;
    out.residual = beta / scale;
    if (stalled) break;
  }
  out.converged = out.residual <= options.tol;
  return out;
}

}  // namespace herm
