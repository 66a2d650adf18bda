#ifndef WSLAB_COULOMB_HPP
#define WSLAB_COULOMB_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "chebyshev.hpp"
#include "quadrature.hpp"
#include "types.hpp"

namespace wslab {

struct SolverSettings {
  int grid_size = 256;
  double tol = 1e-8;
  int max_iter = 500;
  double damping = 0.5; ///< weight of the previous t-density in each update
};

/// Largest |mu| for which the single-cut ansatz is trusted.
inline constexpr double max_abs_mu = 0.2;

/// Saddle point of the two-gas energy: rho_gamma on [gamma or a, b_Gamma],
/// rho_t on [0, b_t] with b_t <= gamma.
struct TwoGasState {
  DiscretizedDensity rho_gamma;
  DiscretizedDensity rho_t;
  double mu = 0.0;
  double gamma = 0.0;
  std::pair<double, double> residuals{0.0, 0.0}; ///< (Gamma gas, t gas)
  int iterations = 0;
  std::vector<double> residual_history;

  double max_residual() const { return std::max(residuals.first, residuals.second); }
};

namespace detail {

// Convex combination of t-densities; the damped iterate is kept as a mixture
// because the supports of successive iterates differ.
class DensityMixture {
public:
  void reset(DiscretizedDensity d)
  {
    parts_.clear();
    parts_.emplace_back(1.0, std::move(d));
  }

  void blend(DiscretizedDensity d, double keep)
  {
    for (auto& p : parts_) p.first *= keep;
    parts_.emplace_back(1.0 - keep, std::move(d));
    std::erase_if(parts_, [](const auto& p) { return p.first < 1e-17; });
  }

  double stieltjes(double x) const
  {
    double acc = 0.0;
    for (const auto& [w, d] : parts_) acc += w * d.stieltjes(x);
    return acc;
  }

private:
  std::vector<std::pair<double, DiscretizedDensity>> parts_;
};

template <class F>
double bracketed_root(F&& f, double lo, double hi)
{
  std::uintmax_t iters = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(50);
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

// One gas in a given field.  The left edge is hard at `left` unless the
// bracket there turns negative and a soft left edge is allowed; the right
// edge is soft, or hard at `right_wall` if the density would extend past it.
inline DiscretizedDensity solve_gas(const std::function<double(double)>& g, double left,
                                    std::optional<double> right_wall, bool soft_left_allowed, int m)
{
  auto right_bracket = [&](double a, double b) { return tricomi_solve(g, a, b, 1.0, m).edge_brackets().second; };
  auto fit_right = [&](double a) -> std::pair<double, bool> {
    if (right_wall) {
      const double wall = *right_wall;
      if (right_bracket(a, wall) >= 0.0) return {wall, true};
      return {bracketed_root([&](double b) { return right_bracket(a, b); }, a + 1e-9 * (wall - a), wall), false};
    }
    double b = a + 0.1;
    int guard = 0;
    while (right_bracket(a, b) > 0.0) {
      b = a + (b - a) * 1.5;
      require(++guard < 200, ErrorCode::support_ansatz_violated, "soft right edge not found");
    }
    const double b0 = a + (b - a) / 1.5;
    return {bracketed_root([&](double bb) { return right_bracket(a, bb); }, b0, b), false};
  };

  double a = left;
  auto [b, right_hard] = fit_right(a);
  DiscretizedDensity d = tricomi_solve(g, a, b, 1.0, m);
  bool left_hard = true;
  if (soft_left_allowed && d.edge_brackets().first < 0.0) {
    auto left_bracket = [&](double aa) {
      const double bb = fit_right(aa).first;
      return tricomi_solve(g, aa, bb, 1.0, m).edge_brackets().first;
    };
    double hi = left + 0.01 * std::max(1.0, std::abs(left));
    int guard = 0;
    while (left_bracket(hi) < 0.0) {
      hi = left + (hi - left) * 1.5;
      require(++guard < 200, ErrorCode::support_ansatz_violated, "soft left edge not found");
    }
    a = bracketed_root(left_bracket, left, hi);
    std::tie(b, right_hard) = fit_right(a);
    d = tricomi_solve(g, a, b, 1.0, m);
    left_hard = false;
  }
  d.set_edge_exponents(left_hard ? hard_edge_exponent : soft_edge_exponent,
                       right_hard ? hard_edge_exponent : soft_edge_exponent);
  return d;
}

inline void check_positive(const DiscretizedDensity& d, const char* name)
{
  const double lo = d.min_bracket();
  require(lo >= -1e-8, ErrorCode::support_ansatz_violated,
          std::string(name) + " density negative (bracket " + std::to_string(lo) + ")");
}

inline double gamma_field(double x, double mu) { return 0.5 - mu / (2.0 * x * x); }

} // namespace detail

/// Largest force-balance violation of each gas over its first-kind nodes:
/// PV int rho_Gamma/(x-x') + (1/2) int rho_t/(x-t) - 1/2 + mu/(2x^2) and
/// PV int rho_t/(t-t') + (1/2) int rho_Gamma/(t-x) - 1/2.
inline std::pair<double, double> force_balance_residuals(const DiscretizedDensity& rho_gamma,
                                                         const DiscretizedDensity& rho_t, double mu, int m)
{
  double rg = 0.0, rt = 0.0;
  for (double x : rho_gamma.grid(m)) {
    const double lhs = rho_gamma.principal_value(x) + 0.5 * rho_t.stieltjes(x);
    rg = std::max(rg, std::abs(lhs - detail::gamma_field(x, mu)));
  }
  for (double t : rho_t.grid(m)) {
    const double lhs = rho_t.principal_value(t) + 0.5 * rho_gamma.stieltjes(t);
    rt = std::max(rt, std::abs(lhs - 0.5));
  }
  return {rg, rt};
}

/// Alternating damped solve of the two coupled force-balance equations.
inline TwoGasState solve_two_gas(double gamma, double mu, const SolverSettings& settings = {})
{
  require(std::isfinite(gamma) && gamma > 0.0, ErrorCode::invalid_argument, "gamma must be positive");
  require(std::abs(mu) <= max_abs_mu, ErrorCode::mu_out_of_range,
          "|mu| = " + std::to_string(std::abs(mu)) + " exceeds the validated range 0.2");
  require(settings.grid_size >= 16, ErrorCode::invalid_argument, "grid_size must be at least 16");
  require(settings.tol > 0.0, ErrorCode::invalid_argument, "tol must be positive");
  require(settings.max_iter >= 1, ErrorCode::invalid_argument, "max_iter must be positive");
  require(settings.damping >= 0.0 && settings.damping < 1.0, ErrorCode::invalid_argument, "damping must lie in [0, 1)");

  const int m = settings.grid_size;
  detail::DensityMixture mix;
  mix.reset(DiscretizedDensity(0.0, std::min(gamma, 4.0), {1.0}));

  TwoGasState state;
  state.gamma = gamma;
  state.mu = mu;
  for (int it = 1; it <= settings.max_iter; ++it) {
    auto g_gamma = [&](double x) { return detail::gamma_field(x, mu) - 0.5 * mix.stieltjes(x); };
    DiscretizedDensity dg = detail::solve_gas(g_gamma, gamma, std::nullopt, true, m);
    auto g_t = [&](double t) { return 0.5 - 0.5 * dg.stieltjes(t); };
    DiscretizedDensity dt = detail::solve_gas(g_t, 0.0, gamma, false, m);
    detail::check_positive(dg, "Gamma-gas");
    detail::check_positive(dt, "t-gas");

    state.residuals = force_balance_residuals(dg, dt, mu, m);
    state.residual_history.push_back(state.max_residual());
    state.iterations = it;
    state.rho_gamma = dg;
    state.rho_t = dt;
    if (state.max_residual() < settings.tol) return state;
    mix.blend(std::move(dt), settings.damping);
  }
  std::string history;
  const auto& h = state.residual_history;
  for (std::size_t i = h.size() > 5 ? h.size() - 5 : 0; i < h.size(); ++i)
    history += (history.empty() ? "" : ", ") + std::to_string(h[i]);
  fail(ErrorCode::solver_diverged, "two-gas solver did not reach tol " + std::to_string(settings.tol) + " in " +
                                       std::to_string(settings.max_iter) + " iterations; last residuals: " + history);
}

/// Zero-absorption limit: the t-gas collapses onto t = 0 (Stieltjes transform
/// 1/x) and the Gamma gas is soft at both ends.
inline DiscretizedDensity solve_zero_absorption(double mu, const SolverSettings& settings = {})
{
  require(std::abs(mu) <= max_abs_mu, ErrorCode::mu_out_of_range,
          "|mu| = " + std::to_string(std::abs(mu)) + " exceeds the validated range 0.2");
  auto g = [&](double x) { return detail::gamma_field(x, mu) - 0.5 / x; };
  // for mu < 0 the field is positive below the root of x^2 - x - mu
  const double wall = (mu < 0.0 ? 0.5 * (1.0 - std::sqrt(1.0 + 4.0 * mu)) : 0.0) + 1e-3;
  DiscretizedDensity d = detail::solve_gas(g, wall, std::nullopt, true, settings.grid_size);
  require(d.edge_exponents().first == soft_edge_exponent, ErrorCode::support_ansatz_violated,
          "zero-absorption gas touched the origin");
  detail::check_positive(d, "Gamma-gas");
  return d;
}

/// Two-gas energy: int x rho_G - int int rho_G rho_G log|x - x'| + int t rho_t
/// - int int rho_t rho_t log|t - t'| - int int rho_G rho_t log(x - t).
inline double energy(const TwoGasState& state)
{
  const auto& g = state.rho_gamma;
  const auto& t = state.rho_t;
  require(t.upper() <= g.lower() + 1e-12, ErrorCode::invalid_state, "gas supports overlap");
  const double cross = g.integrate([&](double x) { return t.log_potential(std::max(x, t.upper())); });
  return g.first_moment() - g.self_log_energy() + t.first_moment() - t.self_log_energy() - cross;
}

/// Exact expansion F(c + eps d) = F(c) + eps D1 + eps^2 D2 of the functional
/// energy + mu int rho_G / x when the n-th Chebyshev coefficient of rho_Gamma
/// moves by eps (mass preserved for n >= 1).  D1 vanishes at a saddle point.
struct EnergyVariation {
  double first = 0.0;
  double second = 0.0;
  double change(double eps) const { return eps * first + eps * eps * second; }
};

inline EnergyVariation energy_variation(const TwoGasState& state, int mode)
{
  const auto& g = state.rho_gamma;
  const auto& t = state.rho_t;
  const auto& c = g.coefficients();
  require(mode >= 1 && mode < static_cast<int>(c.size()), ErrorCode::invalid_argument,
          "perturbation mode must lie in [1, grid size]");
  const int quad = 4 * static_cast<int>(c.size());
  const auto table = ChebyshevTable::get(quad);
  double cross = 0.0, inverse = 0.0;
  for (double u : table->nodes()) {
    const double tn = std::cos(mode * std::acos(u));
    const double x = g.center() + g.half_width() * u;
    cross += tn * t.log_potential(std::max(x, t.upper()));
    inverse += tn / x;
  }
  cross /= quad;
  inverse /= quad;
  EnergyVariation v;
  v.first = (mode == 1 ? 0.5 * g.half_width() : 0.0) + c[mode] / mode - cross + state.mu * inverse;
  v.second = 1.0 / (2.0 * mode);
  return v;
}

/// dPhi/dmu = int rho_Gamma*(x; mu) / x dx.
inline double phi_derivative(double gamma, double mu, const SolverSettings& settings = {})
{
  return solve_two_gas(gamma, mu, settings).rho_gamma.inverse_moment();
}

inline double phi_derivative_zero_absorption(double mu, const SolverSettings& settings = {})
{
  return solve_zero_absorption(mu, settings).inverse_moment();
}

/// Derivatives Phi'(0), Phi''(0), Phi'''(0) from central differences of Phi'
/// with one Richardson step (stencil mu = 0, +-h, +-2h).
struct PhiDerivatives {
  std::vector<double> values; ///< values[k-1] = d^k Phi / d mu^k at mu = 0
  double step = 0.0;
  double max_residual = 0.0;
  int max_iterations = 0;
};

inline double default_fd_step(double gamma) { return std::min(1e-3, 0.1 * gamma); }

inline PhiDerivatives cumulants_from_phi(double gamma, int order, double step = 0.0, const SolverSettings& settings = {})
{
  require(order >= 1 && order <= 3, ErrorCode::invalid_argument, "order must be 1, 2 or 3");
  if (step <= 0.0) step = default_fd_step(gamma);
  require(2.0 * step <= max_abs_mu, ErrorCode::mu_out_of_range, "finite-difference stencil leaves |mu| <= 0.2");
  PhiDerivatives out;
  out.step = step;
  auto eval = [&](double mu) {
    const TwoGasState s = solve_two_gas(gamma, mu, settings);
    out.max_residual = std::max(out.max_residual, s.max_residual());
    out.max_iterations = std::max(out.max_iterations, s.iterations);
    return s.rho_gamma.inverse_moment();
  };
  const double f0 = eval(0.0);
  out.values.push_back(f0);
  if (order == 1) return out;
  const double fp1 = eval(step), fm1 = eval(-step), fp2 = eval(2 * step), fm2 = eval(-2 * step);
  const double d1h = (fp1 - fm1) / (2 * step), d1w = (fp2 - fm2) / (4 * step);
  out.values.push_back((4.0 * d1h - d1w) / 3.0);
  if (order == 3) {
    const double d2h = (fp1 - 2 * f0 + fm1) / (step * step), d2w = (fp2 - 2 * f0 + fm2) / (4 * step * step);
    out.values.push_back((4.0 * d2h - d2w) / 3.0);
  }
  return out;
}

/// Converts d^k Phi/d mu^k at 0 into the k-th cumulant of s:
/// <s^k>_c = (-2 / (beta N^2))^{k-1} Phi^{(k)}(0).
inline double cumulant_from_derivative(int k, double derivative, DysonClass beta, int n_open)
{
  return std::pow(-2.0 / (beta.value() * n_open * n_open), k - 1) * derivative;
}

/// <s^n>_c = <s^n>_c^0 - (gamma beta N^2 / 4) <s^{n+1}>_c^0 for n = 1..orders;
/// zero_absorption[k] holds the (k+1)-th cumulant at gamma = 0.
inline std::vector<double> weak_absorption_cumulants(double gamma, const std::vector<double>& zero_absorption,
                                                     DysonClass beta, int n_open, int orders = -1)
{
  require(gamma >= 0.0, ErrorCode::invalid_argument, "gamma must be non-negative");
  require(n_open >= 1, ErrorCode::invalid_dimension, "n_open must be at least 1");
  if (orders < 0) orders = static_cast<int>(zero_absorption.size()) - 1;
  require(orders >= 1 && static_cast<int>(zero_absorption.size()) >= orders + 1, ErrorCode::insufficient_input,
          "order n needs the zero-absorption cumulant of order n + 1");
  const double shift = gamma * beta.value() * n_open * n_open / 4.0;
  std::vector<double> out(orders);
  for (int n = 0; n < orders; ++n) out[n] = zero_absorption[n] - shift * zero_absorption[n + 1];
  return out;
}

/// Leading-order strong-absorption density of y = Gamma - gamma,
/// (1/2pi) sqrt((b - y)/y) (1 - (mu~ + 1)/gamma) on [0, b], b = 4 + 4(1 + mu~)/gamma.
/// The support is recorded shifted to [gamma, gamma + b].
inline DiscretizedDensity strong_absorption_density(double gamma, double mu_tilde)
{
  require(std::isfinite(gamma) && gamma > 1.0, ErrorCode::outside_asymptotic_regime,
          "strong-absorption form needs gamma > 1");
  const double b = 4.0 + 4.0 * (1.0 + mu_tilde) / gamma;
  const double k = 1.0 - (mu_tilde + 1.0) / gamma;
  DiscretizedDensity d(gamma, gamma + b, {k * b / 4.0, -k * b / 4.0});
  d.set_edge_exponents(hard_edge_exponent, soft_edge_exponent);
  if (gamma < 5.0)
    d.warnings.push_back("gamma = " + std::to_string(gamma) + " < 5: strong-absorption form is outside its regime");
  return d;
}

/// L1 distance between two densities, by composite Gauss-Legendre on the
/// union of supports with breakpoints at every edge.
inline double l1_distance(const DiscretizedDensity& p, const DiscretizedDensity& q, int panels = 400)
{
  std::vector<double> cuts{p.lower(), p.upper(), q.lower(), q.upper()};
  std::sort(cuts.begin(), cuts.end());
  // x = a + (b - a) sin^2(theta) on each piece removes the edge singularities
  const QuadratureRule rule = gauss_legendre(8, 0.0, 1.0);
  const double width = 0.5 * std::numbers::pi / panels;
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    if (!(b > a)) continue;
    for (int k = 0; k < panels; ++k) {
      for (std::size_t j = 0; j < rule.size(); ++j) {
        const double th = width * (k + rule.nodes[j]);
        const double sn = std::sin(th), cs = std::cos(th);
        const double x = a + (b - a) * sn * sn;
        acc += width * rule.weights[j] * 2.0 * (b - a) * sn * cs * std::abs(p(x) - q(x));
      }
    }
  }
  return acc;
}

} // namespace wslab

#endif // WSLAB_COULOMB_HPP
