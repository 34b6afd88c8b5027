#pragma once

#include <functional>
#include <vector>

namespace herm {

using RealVector = std::vector<double>;
using LinearMap = std::function<RealVector(const RealVector&)>;

struct KrylovOptions {
  /// Stop when the root-mean-square residual |b - A x|_2 / sqrt(size) is below tol.
  double tol = 1e-10;
  int max_iterations = 500;
  int restart = 30;
};

struct KrylovResult {
  RealVector x;
  int iterations = 0;
  double residual = 0.0;  // true RMS residual at exit
  bool converged = false;
};

/// Restarted GMRES with right preconditioning: solves A M y = b, x = M y.
/// Handles non-symmetric A; does not throw on non-convergence (check `converged`).
KrylovResult gmres(const LinearMap& A, const LinearMap& M, const RealVector& b, RealVector x0,
                   const KrylovOptions& options);

double rms_norm(const RealVector& v);
double dot(const RealVector& a, const RealVector& b);

}  // namespace herm
