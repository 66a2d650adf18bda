#ifndef WSLAB_CHEBYSHEV_HPP
#define WSLAB_CHEBYSHEV_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace wslab {

/// First-kind Chebyshev nodes u_j = cos(pi (j + 1/2) / m), j = 0..m-1 (descending).
inline std::vector<double> chebyshev_nodes(int m)
{
  std::vector<double> u(m);
  for (int j = 0; j < m; ++j) u[j] = std::cos(std::numbers::pi * (j + 0.5) / m);
  return u;
}

/// Cosine table cos(pi k (j + 1/2) / m) shared by all transforms of size m.
class ChebyshevTable {
public:
  static std::shared_ptr<const ChebyshevTable> get(int m)
  {
    static std::mutex mutex;
    static std::vector<std::shared_ptr<const ChebyshevTable>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    for (const auto& t : cache)
      if (t->size() == m) return t;
    cache.push_back(std::shared_ptr<const ChebyshevTable>(new ChebyshevTable(m)));
    return cache.back();
  }

  int size() const { return m_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double cos_entry(int k, int j) const { return table_[static_cast<std::size_t>(k) * m_ + j]; }

private:
  explicit ChebyshevTable(int m) : m_(m), nodes_(chebyshev_nodes(m)), table_(static_cast<std::size_t>(m) * m)
  {
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < m; ++j) table_[static_cast<std::size_t>(k) * m + j] = std::cos(std::numbers::pi * k * (j + 0.5) / m);
  }

  int m_;
  std::vector<double> nodes_;
  std::vector<double> table_;
};

/// Coefficients a_k of the degree m-1 interpolant sum a_k T_k through values at the m first-kind nodes.
inline std::vector<double> chebyshev_coefficients(const std::vector<double>& values)
{
  const int m = static_cast<int>(values.size());
  const auto table = ChebyshevTable::get(m);
  std::vector<double> a(m, 0.0);
  for (int k = 0; k < m; ++k) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += table->cos_entry(k, j) * values[j];
    a[k] = 2.0 * acc / m;
  }
  a[0] *= 0.5;
  return a;
}

/// Re-expands sum a_k T_k as sum b_k U_k using T_0 = U_0, T_1 = U_1 / 2, T_k = (U_k - U_{k-2}) / 2.
inline std::vector<double> chebyshev_t_to_u(const std::vector<double>& a)
{
  std::vector<double> b(a.size(), 0.0);
  if (a.empty()) return b;
  b[0] += a[0];
  if (a.size() > 1) b[1] += 0.5 * a[1];
  for (std::size_t k = 2; k < a.size(); ++k) {
    b[k] += 0.5 * a[k];
    b[k - 2] -= 0.5 * a[k];
  }
  return b;
}

/// Clenshaw evaluation of sum c_n T_n(u).
inline double chebyshev_t_series(const std::vector<double>& c, double u)
{
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * u * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return (c.empty() ? 0.0 : c[0]) + u * b1 - b2;
}

/// Clenshaw evaluation of sum c_n U_n(u).
inline double chebyshev_u_series(const std::vector<double>& c, double u)
{
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    const double b0 = 2.0 * u * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

inline constexpr double hard_edge_exponent = -0.5;
inline constexpr double soft_edge_exponent = 0.5;

/// One-dimensional density on [a, b] in the form
///   rho(x) = sum_n c_n T_n(u) / (pi h sqrt(1 - u^2)),  x = c + h u,
/// so that c_0 is the mass and sum c_n T_n(u) (the "bracket") vanishes at a
/// soft edge.  All transforms below are exact for this representation.
class DiscretizedDensity {
public:
  DiscretizedDensity() = default;
  DiscretizedDensity(double a, double b, std::vector<double> coeffs)
      : a_(a), b_(b), coeffs_(std::move(coeffs))
  {
    require(a < b, ErrorCode::invalid_argument, "density support must satisfy a < b");
    require(!coeffs_.empty(), ErrorCode::invalid_argument, "density needs at least one coefficient");
  }

  double lower() const { return a_; }
  double upper() const { return b_; }
  double half_width() const { return 0.5 * (b_ - a_); }
  double center() const { return 0.5 * (a_ + b_); }
  const std::vector<double>& coefficients() const { return coeffs_; }
  std::pair<double, double> edge_exponents() const { return edges_; }
  void set_edge_exponents(double left, double right) { edges_ = {left, right}; }

  double mass() const { return coeffs_[0]; }
  double to_unit(double x) const { return (x - center()) / half_width(); }
  double bracket(double u) const { return chebyshev_t_series(coeffs_, u); }

  /// Bracket values at u = -1 and u = +1.
  std::pair<double, double> edge_brackets() const
  {
    double left = 0.0, right = 0.0;
    for (std::size_t n = 0; n < coeffs_.size(); ++n) {
      right += coeffs_[n];
      left += (n % 2 == 0 ? 1.0 : -1.0) * coeffs_[n];
    }
    return {left, right};
  }

  double operator()(double x) const
  {
    if (!(x > a_ && x < b_)) return 0.0;
    const double u = to_unit(x);
    return bracket(u) / (std::numbers::pi * half_width() * std::sqrt((1.0 - u) * (1.0 + u)));
  }

  /// Nodes (x) of the m-point first-kind grid and density values there.
  std::vector<double> grid(int m) const
  {
    std::vector<double> x = chebyshev_nodes(m);
    for (double& v : x) v = center() + half_width() * v;
    std::reverse(x.begin(), x.end());
    return x;
  }

  /// PV int rho(x') / (x - x') dx' for x inside the support.
  double principal_value(double x) const
  {
    const double u = to_unit(x);
    std::vector<double> shifted(coeffs_.begin() + std::min<std::size_t>(1, coeffs_.size()), coeffs_.end());
    return -chebyshev_u_series(shifted, u) / half_width();
  }

  /// int rho(x') / (x - x') dx' for x outside the support.
  double stieltjes(double x) const
  {
    const double z = to_unit(x);
    const double az = std::abs(z);
    const double root = std::sqrt((az - 1.0) * (az + 1.0));
    const double w = z > 0.0 ? 1.0 / (az + root) : -1.0 / (az + root);
    double acc = 0.0;
    for (std::size_t n = coeffs_.size(); n-- > 0;) acc = acc * w + coeffs_[n];
    return (z > 0.0 ? acc : -acc) / (root * half_width());
  }

  /// int rho(x') log|x - x'| dx' for x outside the support.
  double log_potential(double x) const
  {
    const double z = to_unit(x);
    const double az = std::abs(z);
    const double root = std::sqrt((az - 1.0) * (az + 1.0));
    const double w = z > 0.0 ? 1.0 / (az + root) : -1.0 / (az + root);
    double acc = coeffs_[0] * (std::log(half_width()) + std::log(0.5 * (az + root)));
    double wn = 1.0;
    for (std::size_t n = 1; n < coeffs_.size(); ++n) {
      wn *= w;
      acc -= coeffs_[n] * wn / static_cast<double>(n);
    }
    return acc;
  }

  /// int int rho(x) rho(x') log|x - x'| dx dx'.
  double self_log_energy() const
  {
    const double c0 = coeffs_[0];
    double acc = c0 * c0 * (std::log(half_width()) - std::numbers::ln2);
    for (std::size_t n = 1; n < coeffs_.size(); ++n) acc -= coeffs_[n] * coeffs_[n] / (2.0 * n);
    return acc;
  }

  /// int x rho(x) dx.
  double first_moment() const
  {
    return center() * coeffs_[0] + (coeffs_.size() > 1 ? 0.5 * half_width() * coeffs_[1] : 0.0);
  }

  /// int f(x) rho(x) dx by Gauss-Chebyshev with m nodes.
  template <class F>
  double integrate(F&& f, int m = 0) const
  {
    if (m <= 0) m = 4 * static_cast<int>(coeffs_.size());
    const auto table = ChebyshevTable::get(m);
    double acc = 0.0;
    for (double u : table->nodes()) acc += bracket(u) * f(center() + half_width() * u);
    return acc / m;
  }

  /// int rho(x) / x dx (requires 0 outside the support).
  double inverse_moment() const
  {
    require(a_ > 0.0 || b_ < 0.0, ErrorCode::invalid_state, "inverse moment needs 0 outside the support");
    return -stieltjes(0.0);
  }

  /// Smallest bracket value over a fine first-kind grid (negative means rho < 0 somewhere).
  double min_bracket(int m = 0) const
  {
    if (m <= 0) m = 2 * static_cast<int>(coeffs_.size()) + 1;
    double lo = std::min(edge_brackets().first, edge_brackets().second);
    for (double u : chebyshev_nodes(m)) lo = std::min(lo, bracket(u));
    return lo;
  }

  /// Notes attached by producers (e.g. asymptotic-validity warnings).
  std::vector<std::string> warnings;

private:
  double a_ = -1.0;
  double b_ = 1.0;
  std::vector<double> coeffs_{1.0};
  std::pair<double, double> edges_{hard_edge_exponent, hard_edge_exponent};
};

/// Solves the airfoil equation PV int f(t) / (x - t) dt = g(x) on [a, b] with
/// int f = mass, by expanding h g in U_k at m first-kind nodes (the series for
/// f follows term by term).  No sign check.
inline DiscretizedDensity tricomi_solve(const std::function<double(double)>& g, double a, double b, double mass, int m)
{
  require(a < b, ErrorCode::invalid_argument, "Tricomi interval must satisfy a < b");
  require(m >= 4, ErrorCode::invalid_argument, "Tricomi grid needs at least 4 nodes");
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  const auto table = ChebyshevTable::get(m);
  std::vector<double> vals(m);
  for (int j = 0; j < m; ++j) {
    vals[j] = h * g(c + h * table->nodes()[j]);
    require(std::isfinite(vals[j]), ErrorCode::unsupported_field, "field is singular inside the support");
  }
  const std::vector<double> u_coeffs = chebyshev_t_to_u(chebyshev_coefficients(vals));
  std::vector<double> coeffs(m + 1, 0.0);
  coeffs[0] = mass;
  for (int k = 0; k < m; ++k) coeffs[k + 1] = -u_coeffs[k];
  return DiscretizedDensity(a, b, std::move(coeffs));
}

/// Tricomi inversion with a positivity check: a bracket below -tol anywhere
/// means the requested support is not admissible for this field.
inline DiscretizedDensity tricomi_invert(const std::function<double(double)>& g, double a, double b, double mass,
                                         int m = 256, double tol = 1e-8)
{
  DiscretizedDensity d = tricomi_solve(g, a, b, mass, m);
  const double lo = d.min_bracket();
  require(lo >= -tol, ErrorCode::infeasible_support,
          "Tricomi solution is negative (bracket " + std::to_string(lo) + "); move the support edges");
  return d;
}

} // namespace wslab

#endif // WSLAB_CHEBYSHEV_HPP
