#ifndef WSLAB_JACOBI_HPP
#define WSLAB_JACOBI_HPP

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "rng.hpp"

namespace wslab {

/// Squared CS values of the bidiagonal beta-Jacobi matrix model.
///
/// The returned lambda_1 <= ... <= lambda_n have joint density proportional to
/// prod |lambda_i - lambda_j|^beta prod lambda^(beta(a+1)/2 - 1) (1-lambda)^(beta(b+1)/2 - 1).
template <class Rng>
VectorR sample_jacobi_ensemble(int n, double beta, double a, double b, Rng& rng)
{
  require(n >= 1, ErrorCode::invalid_dimension, "Jacobi ensemble size must be at least 1");
  require(beta > 0.0 && a > -1.0 && b > -1.0, ErrorCode::invalid_argument, "invalid Jacobi parameters");

  VectorR c(n + 1), s(n + 1), cp(n + 1), sp(n + 1);
  for (int k = 1; k <= n; ++k) {
    const double x = beta_variate(0.5 * beta * (a + k), 0.5 * beta * (b + k), rng);
    c(k) = std::sqrt(x);
    s(k) = std::sqrt(1.0 - x);
  }
  for (int k = 1; k < n; ++k) {
    const double x = beta_variate(0.5 * beta * k, 0.5 * beta * (a + b + 1 + k), rng);
    cp(k) = std::sqrt(x);
    sp(k) = std::sqrt(1.0 - x);
  }

  // upper bidiagonal block: row i carries index k = n - i
  VectorR d(n), e(std::max(n - 1, 1));
  for (int i = 0; i < n; ++i) {
    const int k = n - i;
    d(i) = c(k) * (k < n ? sp(k) : 1.0);
    if (i + 1 < n) e(i) = -s(k) * cp(k - 1);
  }

  VectorR diag(n), sub(std::max(n - 1, 1));
  for (int i = 0; i < n; ++i) diag(i) = d(i) * d(i) + (i > 0 ? e(i - 1) * e(i - 1) : 0.0);
  for (int i = 0; i + 1 < n; ++i) sub(i) = d(i) * e(i);

  VectorR lambda;
  if (n == 1) {
    lambda = diag;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);
    lambda = es.eigenvalues();
  }
  for (int i = 0; i < n; ++i) lambda(i) = std::clamp(lambda(i), 0.0, 1.0);
  std::sort(lambda.data(), lambda.data() + n);
  return lambda;
}

} // namespace wslab

#endif // WSLAB_JACOBI_HPP
