#ifndef WSLAB_DENSITIES_HPP
#define WSLAB_DENSITIES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/LU>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "quadrature.hpp"
#include "types.hpp"

namespace wslab {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

enum class InnerPath {
  automatic,  ///< determinant for beta = 2, direct otherwise
  direct,     ///< nested quadrature over the ordered t-simplex
  determinant ///< moment-matrix determinant (beta = 2 only)
};

/// Largest t-integral dimension handled by the direct nested quadrature.
inline constexpr int max_direct_dimension = 4;

struct JointDensityParams {
  DysonClass beta{2};
  int n_open = 1;
  double gamma = 1.0;
  int quad_order = 24;
  InnerPath path = InnerPath::automatic;

  /// Dimension of the t-integral, beta N / 2.
  int n_t() const { return beta.beta() * n_open / 2; }

  void validate() const
  {
    require(n_open >= 1, ErrorCode::invalid_dimension, "n_open must be at least 1");
    require(std::isfinite(gamma) && gamma > 0.0, ErrorCode::invalid_argument, "gamma must be positive");
    require(quad_order >= 2, ErrorCode::invalid_argument, "quad_order must be at least 2");
    require(!(beta.beta() == 1 && n_open % 2 == 1), ErrorCode::unsupported_representation,
            "beta = 1 needs an even number of channels (t-integral of dimension N/2)");
  }
};

/// Signed logarithm of a determinant.
struct LogDet {
  double log_abs = neg_inf;
  int sign = 0;
};

/// sum_{i<j} power * log|x_i - x_j|
inline double log_vandermonde(std::span<const double> x, double power)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) acc += std::log(std::abs(x[i] - x[j]));
  return power * acc;
}

namespace detail {

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

inline bool inside_support(std::span<const double> gammas, double gamma)
{
  return std::all_of(gammas.begin(), gammas.end(), [&](double g) { return g > gamma; });
}

inline LogDet log_determinant(const Eigen::MatrixXd& m)
{
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const auto& f = lu.matrixLU();
  LogDet out{0.0, static_cast<int>(lu.permutationP().determinant())};
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const double d = f(i, i);
    if (d == 0.0) return {neg_inf, 0};
    if (d < 0.0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(d));
  }
  return out;
}

// Gram matrix of shifted Legendre polynomials under the weight
// e^{-N gamma u} prod_i (Gamma_i - gamma u) on [0, 1], at one quadrature order.
// The weight is divided by its largest nodal value, whose log is returned.
inline LogDet shifted_legendre_gram(const JointDensityParams& p, std::span<const double> gammas, int order)
{
  const int n = p.n_open;
  const QuadratureRule rule = gauss_legendre(order, 0.0, 1.0);
  std::vector<double> logw(rule.size());
  double peak = neg_inf;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double u = rule.nodes[q];
    double lw = -n * p.gamma * u;
    for (double g : gammas) lw += std::log((g - p.gamma) + p.gamma * (1.0 - u));
    logw[q] = lw;
    peak = std::max(peak, lw);
  }
  Eigen::MatrixXd basis(n, rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double x = 2.0 * rule.nodes[q] - 1.0;
    double p0 = 1.0, p1 = x;
    basis(0, q) = 1.0;
    if (n > 1) basis(1, q) = x;
    for (int k = 2; k < n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      basis(k, q) = p2;
      p0 = p1;
      p1 = p2;
    }
  }
  Eigen::VectorXd w(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) w[q] = rule.weights[q] * std::exp(logw[q] - peak);
  const Eigen::MatrixXd gram = basis * w.asDiagonal() * basis.transpose();
  LogDet det = log_determinant(gram);
  det.log_abs += n * peak;
  return det;
}

} // namespace detail

/// log det of M_{nm} = int_0^gamma t^{n+m-2} e^{-N t} prod_i (Gamma_i - t) dt.
///
/// The monomials are replaced by shifted Legendre polynomials on [0, gamma]
/// (a triangular change of basis) so the Gram matrix stays well conditioned;
/// the scale factors gamma^{N^2} and prod_k binom(2k, k)^{-2} are restored in
/// log space.  The quadrature order is doubled until two successive orders
/// agree within 1e-10.
inline LogDet andreief_moment_matrix(const JointDensityParams& params, std::span<const double> gammas)
{
  params.validate();
  require(params.beta.beta() == 2, ErrorCode::unsupported_representation, "moment matrix requires beta = 2");
  require(static_cast<int>(gammas.size()) == params.n_open, ErrorCode::invalid_dimension,
          "expected N = " + std::to_string(params.n_open) + " eigenvalues");
  require(detail::inside_support(gammas, params.gamma), ErrorCode::out_of_support, "all Gamma_i must exceed gamma");

  const int n = params.n_open;
  int order = std::max(params.quad_order, 2 * n + 8);
  LogDet prev = detail::shifted_legendre_gram(params, gammas, order);
  for (int attempt = 0; attempt < 6; ++attempt) {
    order *= 2;
    const LogDet next = detail::shifted_legendre_gram(params, gammas, order);
    const bool agree = next.sign == prev.sign && std::abs(next.log_abs - prev.log_abs) <= 1e-10;
    prev = next;
    if (agree) {
      double scale = n * static_cast<double>(n) * std::log(params.gamma);
      for (int k = 0; k < n; ++k)
        scale -= 2.0 * (detail::log_factorial(2 * k) - 2.0 * detail::log_factorial(k));
      prev.log_abs += scale;
      return prev;
    }
  }
  fail(ErrorCode::quadrature_failure, "moment-matrix quadrature did not settle to 1e-10");
}

/// log of the t-integral by nested Gauss-Legendre over the ordered simplex
/// 0 < theta_1 < ... < theta_Nt < pi/2 with t = gamma sin^2(theta).
///
/// On the ordered simplex every |t_i - t_j|^{4/beta} is a polynomial and the
/// substitution absorbs the endpoint factors [t(gamma - t)]^{2/beta - 1}, so
/// the integrand is analytic in theta and the tensor rule converges spectrally.
inline double log_inner_integral_direct(const JointDensityParams& params, std::span<const double> gammas)
{
  params.validate();
  const int nt = params.n_t();
  require(nt <= max_direct_dimension, ErrorCode::unsupported_representation,
          "direct t-integral limited to dimension " + std::to_string(max_direct_dimension) + " (got " +
              std::to_string(nt) + ")");
  require(static_cast<int>(gammas.size()) == params.n_open, ErrorCode::invalid_dimension,
          "expected N = " + std::to_string(params.n_open) + " eigenvalues");
  if (!detail::inside_support(gammas, params.gamma)) return neg_inf;

  const double g = params.gamma;
  const double beta = params.beta.value();
  const double pair_power = 4.0 / beta;
  const double edge_power = 4.0 / beta - 1.0;
  const double log_jac = std::log(2.0) + edge_power * std::log(g);
  const QuadratureRule base = gauss_legendre(params.quad_order, 0.0, 1.0);
  const double half_pi = 0.5 * std::numbers::pi;

  std::vector<double> theta(nt);
  LogSumExp acc;
  auto single = [&](double th) {
    const double s = std::sin(th), c = std::cos(th);
    const double t = g * s * s;
    double v = log_jac + edge_power * std::log(s * c) - params.n_open * t;
    for (double gm : gammas) v += std::log((gm - g) + g * c * c);
    return v;
  };
  auto recurse = [&](auto&& self, int level, double lower, double logacc) -> void {
    if (level == nt) {
      acc.add(logacc);
      return;
    }
    const double width = half_pi - lower;
    for (std::size_t q = 0; q < base.size(); ++q) {
      const double th = lower + width * base.nodes[q];
      double v = logacc + std::log(width * base.weights[q]) + single(th);
      for (int i = 0; i < level; ++i)
        v += pair_power * std::log(g * std::sin(th - theta[i]) * std::sin(th + theta[i]));
      theta[level] = th;
      self(self, level + 1, th, v);
    }
  };
  recurse(recurse, 0, 0.0, 0.0);
  return acc.value() + detail::log_factorial(nt);
}

/// log of the t-integral through the determinant identity (beta = 2):
/// int_{[0,gamma]^N} ... = N! det M.
inline double log_inner_integral_determinant(const JointDensityParams& params, std::span<const double> gammas)
{
  const LogDet det = andreief_moment_matrix(params, gammas);
  require(det.sign > 0, ErrorCode::quadrature_failure, "moment matrix determinant must be positive");
  return det.log_abs + detail::log_factorial(params.n_open);
}

/// Natural log of the unnormalised joint density of {Gamma_n}; -inf outside
/// the support min Gamma_n > gamma.
inline double log_joint_density(const JointDensityParams& params, std::span<const double> gammas)
{
  params.validate();
  require(static_cast<int>(gammas.size()) == params.n_open, ErrorCode::invalid_dimension,
          "expected N = " + std::to_string(params.n_open) + " eigenvalues");
  if (!detail::inside_support(gammas, params.gamma)) return neg_inf;

  const double beta = params.beta.value();
  double outer = log_vandermonde(gammas, beta);
  for (double g : gammas) outer -= 0.5 * beta * params.n_open * g;

  InnerPath path = params.path;
  if (path == InnerPath::automatic) path = params.beta.beta() == 2 ? InnerPath::determinant : InnerPath::direct;
  const double inner = path == InnerPath::determinant ? log_inner_integral_determinant(params, gammas)
                                                      : log_inner_integral_direct(params, gammas);
  return outer + inner;
}

/// Unnormalised zero-absorption (Laguerre) density in the Gamma = 1/(N tau)
/// convention: prod |Gamma_i - Gamma_j|^beta prod Gamma_n^{beta N/2} e^{-beta N Gamma_n / 2}.
inline double laguerre_log_density(DysonClass beta, int n_open, std::span<const double> gammas)
{
  require(n_open >= 1, ErrorCode::invalid_dimension, "n_open must be at least 1");
  require(static_cast<int>(gammas.size()) == n_open, ErrorCode::invalid_dimension,
          "expected N = " + std::to_string(n_open) + " eigenvalues");
  for (double g : gammas) require(g > 0.0, ErrorCode::out_of_support, "Laguerre density needs Gamma_i > 0");
  const double b = beta.value();
  double out = log_vandermonde(gammas, b);
  for (double g : gammas) out += 0.5 * b * n_open * (std::log(g) - g);
  return out;
}

// ---------------------------------------------------------------------------
// Single channel, beta = 2.

/// e^{-x} [x (1 - e^{-gamma}) + e^{-gamma}(gamma + 1) - 1], evaluated in the
/// form (1 - e^{-gamma})(x - gamma) + (gamma + e^{-gamma} - 1) to keep small
/// gamma accurate.
inline double density_n1_unnormalized(double gamma, double x)
{
  require(std::isfinite(gamma) && gamma > 0.0, ErrorCode::invalid_argument, "gamma must be positive");
  if (!(x > gamma)) return 0.0;
  const double slope = -std::expm1(-gamma);
  double offset;
  if (gamma < 1e-2) {
    // gamma + e^{-gamma} - 1 = gamma^2/2 - gamma^3/6 + ...
    double term = gamma * gamma / 2.0, sum = 0.0;
    for (int k = 2; k < 12; ++k) {
      sum += term;
      term *= -gamma / (k + 1);
    }
    offset = sum;
  } else {
    offset = gamma + std::expm1(-gamma);
  }
  return std::exp(-x) * (slope * (x - gamma) + offset);
}

/// Integral of density_n1_unnormalized over (gamma, inf) by exp-sinh quadrature.
inline double density_n1_mass(double gamma)
{
  require(std::isfinite(gamma) && gamma > 0.0, ErrorCode::invalid_argument, "gamma must be positive");
  boost::math::quadrature::exp_sinh<double> integrator;
  const double scale = std::exp(-gamma);
  auto f = [&](double y) { return density_n1_unnormalized(gamma, gamma + y) / scale; };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity()) * scale;
}

inline double density_n1(double gamma, double x)
{
  if (!(x > gamma)) return 0.0;
  return density_n1_unnormalized(gamma, x) / density_n1_mass(gamma);
}

// ---------------------------------------------------------------------------
// Normalisation and one-point marginals for small N.

/// log of the full integral of exp(log_joint_density) over {Gamma_i > gamma}.
///
/// In ordered coordinates Gamma_1 = gamma + y_1, Gamma_k = Gamma_{k-1} + y_k
/// the density is e^{-beta N sum Gamma / 2} times a polynomial, so a tensor
/// Gauss-Laguerre rule with per-coordinate rates is exact once its order
/// exceeds half the polynomial degree.
inline double log_normalization(const JointDensityParams& params)
{
  params.validate();
  const int n = params.n_open;
  require(n <= 3, ErrorCode::unsupported_representation, "numerical normalisation limited to N <= 3");
  const double beta = params.beta.value();
  const int degree = static_cast<int>(beta) * n * (n - 1) / 2 + n * params.n_t();
  const QuadratureRule lag = gauss_laguerre(degree / 2 + 4);

  std::vector<double> rate(n);
  for (int k = 0; k < n; ++k) rate[k] = 0.5 * beta * n * (n - k);
  std::vector<double> gam(n);
  LogSumExp acc;
  auto recurse = [&](auto&& self, int level, double prev, double logw) -> void {
    if (level == n) {
      double v = log_joint_density(params, gam);
      double sum = 0.0;
      for (double g : gam) sum += g;
      // undo the exponential absorbed into the Laguerre weight
      v += 0.5 * beta * n * sum;
      acc.add(logw + v - 0.5 * beta * n * n * params.gamma);
      return;
    }
    for (std::size_t q = 0; q < lag.size(); ++q) {
      const double y = lag.nodes[q] / rate[level];
      gam[level] = prev + y;
      self(self, level + 1, gam[level], logw + std::log(lag.weights[q] / rate[level]));
    }
  };
  recurse(recurse, 0, params.gamma, 0.0);
  return acc.value() + detail::log_factorial(n);
}

/// Process-wide cache of log normalisations keyed by (beta, N, gamma, order).
class NormalizationCache {
public:
  static NormalizationCache& instance()
  {
    static NormalizationCache cache;
    return cache;
  }

  double log_normalization(const JointDensityParams& params)
  {
    const Key key{params.beta.beta(), params.n_open, params.gamma, params.quad_order};
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const double v = wslab::log_normalization(params);
    values_.emplace(key, v);
    return v;
  }

private:
  using Key = std::tuple<int, int, double, int>;
  std::mutex mutex_;
  std::map<Key, double> values_;
};

/// Normalised one-point density (density of one eigenvalue picked at random)
/// for N <= 3 (beta = 2) or N = 1 (any beta), by Gauss-Laguerre over the
/// remaining eigenvalues.
inline double one_point_density(const JointDensityParams& params, double x)
{
  params.validate();
  const int n = params.n_open;
  require(params.beta.beta() == 2 || n == 1, ErrorCode::unsupported_representation,
          "one-point density for N > 1 implemented for beta = 2");
  if (!(x > params.gamma)) return 0.0;
  const double log_z = NormalizationCache::instance().log_normalization(params);
  if (n == 1) {
    if (params.beta.beta() == 2) return density_n1(params.gamma, x);
    const double single[1] = {x};
    return std::exp(log_joint_density(params, single) - log_z);
  }
  const double rate = n;
  const QuadratureRule lag = gauss_laguerre(2 * n + 4);
  std::vector<double> gam(n);
  gam[0] = x;
  LogSumExp acc;
  auto recurse = [&](auto&& self, int level, double logw) -> void {
    if (level == n) {
      double v = log_joint_density(params, gam);
      for (int k = 1; k < n; ++k) v += rate * (gam[k] - params.gamma);
      acc.add(logw + v);
      return;
    }
    for (std::size_t q = 0; q < lag.size(); ++q) {
      gam[level] = params.gamma + lag.nodes[q] / rate;
      self(self, level + 1, logw + std::log(lag.weights[q] / rate));
    }
  };
  recurse(recurse, 1, 0.0);
  return std::exp(acc.value() - log_z);
}

/// Tabulated cumulative distribution of a one-point density on [gamma, inf),
/// linear interpolation between panel ends of width `panel`.
class TabulatedCdf {
public:
  template <class Density>
  TabulatedCdf(double lower, double span, double panel, Density&& density) : lower_(lower), panel_(panel)
  {
    const QuadratureRule rule = gauss_legendre(10, 0.0, 1.0);
    const int panels = static_cast<int>(std::ceil(span / panel));
    cdf_.assign(panels + 1, 0.0);
    for (int k = 0; k < panels; ++k) {
      const double a = lower + k * panel;
      double mass = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) mass += rule.weights[q] * density(a + panel * rule.nodes[q]);
      cdf_[k + 1] = cdf_[k] + panel * mass;
    }
  }

  double operator()(double x) const
  {
    if (x <= lower_) return 0.0;
    const double pos = (x - lower_) / panel_;
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= cdf_.size()) return cdf_.back();
    const double f = pos - static_cast<double>(k);
    return cdf_[k] + f * (cdf_[k + 1] - cdf_[k]);
  }

  /// Mass captured by the table (1 up to truncation of the tail).
  double total() const { return cdf_.back(); }

private:
  double lower_;
  double panel_;
  std::vector<double> cdf_;
};

/// One-point CDF on the same cases as one_point_density.
inline TabulatedCdf one_point_cdf(const JointDensityParams& params, double panel = 0.01)
{
  const double span = 45.0 / params.n_open + 5.0;
  if (params.n_open == 1 && params.beta.beta() == 2) {
    const double mass = density_n1_mass(params.gamma);
    return TabulatedCdf(params.gamma, span, panel,
                        [&](double x) { return density_n1_unnormalized(params.gamma, x) / mass; });
  }
  return TabulatedCdf(params.gamma, span, panel, [&](double x) { return one_point_density(params, x); });
}

} // namespace wslab

#endif // WSLAB_DENSITIES_HPP
