#ifndef WSLAB_QUADRATURE_HPP
#define WSLAB_QUADRATURE_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "errors.hpp"

namespace wslab {

/// Nodes and positive weights of an interpolatory rule on [lower, upper].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double lower = -1.0;
  double upper = 1.0;

  std::size_t size() const { return nodes.size(); }

  double weight_sum() const
  {
    double acc = 0.0;
    for (double w : weights) acc += w;
    return acc;
  }

  template <class F>
  double integrate(F&& f) const
  {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }

  /// Same rule affinely mapped onto [a, b].
  QuadratureRule mapped(double a, double b) const
  {
    QuadratureRule out;
    out.lower = a;
    out.upper = b;
    const double scale = (b - a) / (upper - lower);
    out.nodes.resize(nodes.size());
    out.weights.resize(weights.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      out.nodes[i] = a + (nodes[i] - lower) * scale;
      out.weights[i] = weights[i] * scale;
    }
    return out;
  }
};

/// Gauss-Legendre rule of the given order, nodes by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int order, double a = -1.0, double b = 1.0)
{
  require(order >= 1, ErrorCode::invalid_argument, "quadrature order must be positive");
  require(a < b, ErrorCode::invalid_argument, "quadrature interval must satisfy a < b");
  const int n = order;
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule.mapped(a, b);
}

/// Gauss-Laguerre rule for the weight x^alpha e^{-x} on [0, inf)
/// (Golub-Welsch on the Jacobi matrix).
inline QuadratureRule gauss_laguerre(int order, double alpha = 0.0)
{
  require(order >= 1, ErrorCode::invalid_argument, "quadrature order must be positive");
  require(alpha > -1.0, ErrorCode::invalid_argument, "Laguerre exponent must exceed -1");
  Eigen::VectorXd diag(order), off(std::max(order - 1, 1));
  for (int k = 0; k < order; ++k) diag[k] = 2.0 * k + 1.0 + alpha;
  for (int k = 1; k < order; ++k) off[k - 1] = std::sqrt(k * (k + alpha));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, off.head(order - 1), Eigen::ComputeEigenvectors);
  QuadratureRule rule;
  rule.lower = 0.0;
  rule.upper = std::numeric_limits<double>::infinity();
  const double mu0 = std::tgamma(alpha + 1.0);
  for (int i = 0; i < order; ++i) {
    const double v = eig.eigenvectors()(0, i);
    rule.nodes.push_back(eig.eigenvalues()[i]);
    rule.weights.push_back(mu0 * v * v);
  }
  return rule;
}

/// Streaming log(sum exp(x_i)).
class LogSumExp {
public:
  void add(double x)
  {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }

  double value() const
  {
    return sum_ > 0.0 ? max_ + std::log(sum_) : -std::numeric_limits<double>::infinity();
  }

private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

} // namespace wslab

#endif // WSLAB_QUADRATURE_HPP
