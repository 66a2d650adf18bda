// Acceptance battery.  Each criterion draws its inputs from the library and
// checks them against quantities computed here from scratch.
//
//   acceptance [--only name[,name...]] [--times dir]
//   acceptance --runtime-total dir

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <array>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wslab/wslab.hpp"

using namespace wslab;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::uint64_t base_seed = 918273;

struct Check {
  std::string key;
  double value;
  std::string relation;
  bool ok;
};

struct Outcome {
  std::vector<Check> checks;

  void below(const std::string& key, double v, double limit)
  {
    checks.push_back({key, v, "< " + num(limit), v < limit});
  }
  void at_least(const std::string& key, double v, double limit)
  {
    checks.push_back({key, v, ">= " + num(limit), v >= limit});
  }
  void within(const std::string& key, double v, double lo, double hi)
  {
    checks.push_back({key, v, "in [" + num(lo) + ", " + num(hi) + "]", v >= lo && v <= hi});
  }
  bool passed() const
  {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
  }

  static std::string num(double v)
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }
};

class Stopwatch {
public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------
// Oracles

double mean_of(const std::vector<double>& v)
{
  long double acc = 0.0L;
  for (double x : v) acc += x;
  return static_cast<double>(acc / v.size());
}

double variance_of(const std::vector<double>& v)
{
  const long double m = mean_of(v);
  long double acc = 0.0L;
  for (double x : v) acc += (x - m) * (x - m);
  return static_cast<double>(acc / (v.size() - 1));
}

std::vector<double> wigner_times(int n, double gamma, std::size_t samples, std::uint64_t seed, int n_fict = 0)
{
  CavityModel model = CavityModel::with_default_channels(n, gamma, DysonClass(2));
  if (n_fict > 0) model.n_fict = n_fict;
  std::vector<double> s;
  s.reserve(samples);
  for (const auto& g : sample_ensemble(model, samples, seed)) {
    double inv = 0.0;
    for (double x : g.values) inv += 1.0 / x;
    s.push_back(inv / g.values.size());
  }
  return s;
}

MatrixC symplectic_unit(Eigen::Index pairs)
{
  MatrixC j = MatrixC::Zero(2 * pairs, 2 * pairs);
  for (Eigen::Index k = 0; k < pairs; ++k) {
    j(2 * k, 2 * k + 1) = 1.0;
    j(2 * k + 1, 2 * k) = -1.0;
  }
  return j;
}

// CDF of e^{-x}[x(1 - e^{-g}) + (g + 1)e^{-g} - 1] on x > g.
double single_channel_cdf(double g, double x)
{
  if (x <= g) return 0.0;
  const double a = 1.0 - std::exp(-g);
  const double c = (g + 1.0) * std::exp(-g) - 1.0;
  auto primitive = [&](double y) { return -a * (y + 1.0) * std::exp(-y) - c * std::exp(-y); };
  const double total = -primitive(g);
  return (primitive(x) - primitive(g)) / total;
}

double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf)
{
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Tensor Gauss-Legendre over [0, g]^2 of (t1 - t2)^2 e^{-N(t1 + t2)} prod (G_m - t_n).
double andreief_oracle(double g, const std::vector<double>& big_gamma)
{
  const int order = 48;
  // Golub-Welsch on [-1, 1], independent of the library rule
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) jac(k, k - 1) = jac(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  std::vector<double> t(order), w(order);
  for (int i = 0; i < order; ++i) {
    t[i] = 0.5 * g * (es.eigenvalues()(i) + 1.0);
    w[i] = g * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  const double n = static_cast<double>(big_gamma.size());
  auto single = [&](double x) {
    double v = std::exp(-n * x);
    for (double gm : big_gamma) v *= gm - x;
    return v;
  };
  double acc = 0.0;
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j) acc += w[i] * w[j] * (t[i] - t[j]) * (t[i] - t[j]) * single(t[i]) * single(t[j]);
  return acc;
}

// Transforms of a density rho(x) = f(u) / (pi h sqrt(1 - u^2)), x = c + h u,
// with a polynomial bracket f, built from pointwise values of rho only.
// (f(v) - f(u)) / (u - v) is a polynomial in v, so an M-point first-kind
// Gauss-Chebyshev rule is exact once M exceeds the degree of f.
class PointwiseTransforms {
public:
  explicit PointwiseTransforms(const DiscretizedDensity& rho, int order = 1030)
      : rho_(rho), c_(0.5 * (rho.lower() + rho.upper())), h_(0.5 * (rho.upper() - rho.lower())),
        v_(order), f_(order), coeff_(order)
  {
    for (int k = 0; k < order; ++k) {
      v_[k] = std::cos((k + 0.5) * pi / order);
      f_[k] = bracket_at(v_[k]);
    }
    for (int n = 0; n < order; ++n) {
      double acc = 0.0;
      for (int k = 0; k < order; ++k) acc += f_[k] * std::cos(n * (k + 0.5) * pi / order);
      coeff_[n] = (n == 0 ? 1.0 : 2.0) * acc / order;
    }
  }

  // PV int rho(y) / (x - y) dy, x inside the support
  double principal_value(double x) const
  {
    const double u = (x - c_) / h_;
    return subtracted_sum(u, bracket_at(u)) / h_;
  }

  // int rho(y) / (x - y) dy, x outside the support
  double stieltjes(double x) const
  {
    const double z = (x - c_) / h_;
    const double root = std::sqrt((std::abs(z) - 1.0) * (std::abs(z) + 1.0));
    // the plain rule converges like (|z| + root)^(-2M); close to the support
    // the pole is subtracted with the bracket continued outside [-1, 1]
    if (2.0 * v_.size() * std::log(std::abs(z) + root) > 40.0) return subtracted_sum(z, 0.0) / h_;
    const double fz = clenshaw(z);
    return (subtracted_sum(z, fz) + (z > 0.0 ? fz : -fz) / root) / h_;
  }

private:
  double bracket_at(double u) const { return pi * h_ * std::sqrt((1.0 - u) * (1.0 + u)) * rho_(c_ + h_ * u); }

  double subtracted_sum(double z, double fz) const
  {
    double acc = 0.0;
    for (std::size_t k = 0; k < v_.size(); ++k) {
      if (std::abs(z - v_[k]) < 1e-9) throw std::runtime_error("evaluation point collides with a quadrature node");
      acc += (f_[k] - fz) / (z - v_[k]);
    }
    return acc / v_.size();
  }

  double clenshaw(double z) const
  {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t n = std::min<std::size_t>(coeff_.size(), continued_terms); n-- > 1;) {
      const double b0 = 2.0 * z * b1 - b2 + coeff_[n];
      b2 = b1;
      b1 = b0;
    }
    return z * b1 - b2 + coeff_[0];
  }

  static constexpr std::size_t continued_terms = 512;

  const DiscretizedDensity& rho_;
  double c_, h_;
  std::vector<double> v_, f_, coeff_;
};

// First-kind Chebyshev nodes of a support (every stride-th, both extremes kept).
std::vector<double> collocation_points(const DiscretizedDensity& rho, int m, int stride)
{
  std::vector<double> x;
  for (int j = 0; j < m; j += (j + stride < m || j == m - 1) ? stride : m - 1 - j) {
    const double u = std::cos((j + 0.5) * pi / m);
    x.push_back(0.5 * (rho.lower() + rho.upper()) + 0.5 * (rho.upper() - rho.lower()) * u);
    if (j == m - 1) break;
  }
  return x;
}

// Evenly spaced points covering 95% of a support.
std::vector<double> interior_points(const DiscretizedDensity& rho, int count = 11)
{
  std::vector<double> x;
  for (int k = 0; k < count; ++k) {
    const double u = -0.95 + 1.9 * k / (count - 1);
    x.push_back(0.5 * (rho.lower() + rho.upper()) + 0.5 * (rho.upper() - rho.lower()) * u);
  }
  return x;
}

// Largest force-balance violation of each gas (mu = 0) over the given points.
template <class Points>
std::pair<double, double> independent_residuals(const TwoGasState& s, Points&& points)
{
  const PointwiseTransforms g(s.rho_gamma), t(s.rho_t);
  double rg = 0.0, rt = 0.0;
  auto worst = [](double& acc, double v) {
    if (!(std::abs(v) <= acc)) acc = std::isnan(v) ? v : std::abs(v);
  };
  for (double x : points(s.rho_gamma)) worst(rg, g.principal_value(x) + 0.5 * t.stieltjes(x) - 0.5);
  for (double y : points(s.rho_t)) worst(rt, t.principal_value(y) + 0.5 * g.stieltjes(y) - 0.5);
  return {rg, rt};
}

// int rho(y) / y dy for a density supported on positive reals.
double inverse_moment(const DiscretizedDensity& rho) { return -PointwiseTransforms(rho).stieltjes(0.0); }

// (1 - 1/g) sqrt((b - y)/y) / (2 pi), b = 4 + 4/g, for y = x - g in (0, b).
double strong_density(double g, double x)
{
  const double y = x - g, b = 4.0 + 4.0 / g;
  if (!(y > 0.0 && y < b)) return 0.0;
  return (1.0 - 1.0 / g) * std::sqrt((b - y) / y) / (2.0 * pi);
}

double l1_to_strong(const DiscretizedDensity& rho, double g)
{
  const double lo = g, hi = std::max(rho.upper(), g + 4.0 + 4.0 / g);
  const int n = 200000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double th = (k + 0.5) * 0.5 * pi / n;
    const double x = lo + (hi - lo) * std::sin(th) * std::sin(th);
    const double jac = (hi - lo) * std::sin(2.0 * th) * 0.5 * pi / n;
    acc += std::abs(rho(x) - strong_density(g, x)) * jac;
  }
  return acc;
}

std::string tag(double g)
{
  std::ostringstream os;
  os << g;
  return os.str();
}

// ---------------------------------------------------------------------------
// Criteria

Outcome structure()
{
  Outcome o;
  Stopwatch clock;
  for (int b : {1, 2, 4}) {
    const CavityModel model{4, 60, 1.0, DysonClass(b)};
    const Eigen::Index mult = b == 4 ? 2 : 1;
    const Eigen::Index dim = mult * (model.n_open + model.n_fict);
    const Eigen::Index nr = mult * model.n_open;
    const MatrixC j = symplectic_unit(dim / 2);
    double unit = 0.0, sym = 0.0, r_min = 1.0, r_max = 0.0, s_excess = -1.0;
    for (int i = 0; i < 1000; ++i) {
      Engine rng = make_stream(base_seed + b, i);
      const MatrixC s = sample_scattering_matrix(model, rng).entries;
      if (s.rows() != dim) {
        unit = 1.0;
        break;
      }
      unit = std::max(unit, (s * s.adjoint() - MatrixC::Identity(dim, dim)).cwiseAbs().maxCoeff());
      if (b == 1) sym = std::max(sym, (s - s.transpose()).cwiseAbs().maxCoeff());
      if (b == 4) sym = std::max(sym, (s - j * s.transpose() * j.transpose()).cwiseAbs().maxCoeff());
      const MatrixC r = s.topLeftCorner(nr, nr);
      const Eigen::VectorXd rr = Eigen::SelfAdjointEigenSolver<MatrixC>(r.adjoint() * r).eigenvalues();
      r_min = std::min(r_min, rr.minCoeff());
      r_max = std::max(r_max, rr.maxCoeff());
      double inv = 0.0;
      for (Eigen::Index k = 0; k < rr.size(); ++k) inv += (1.0 - std::clamp(rr(k), 0.0, 1.0)) / model.gamma;
      s_excess = std::max(s_excess, inv / rr.size() - 1.0 / model.gamma);
    }
    const std::string t = "beta" + std::to_string(b);
    o.below(t + ".unitarity", unit, 1e-10);
    if (b != 2) o.below(t + (b == 1 ? ".symmetry" : ".self_duality"), sym, 1e-10);
    // Gamma = gamma / (1 - R) >= gamma needs 0 <= R <= 1
    o.at_least(t + ".min_reflection_eigenvalue", r_min, -1e-10);
    o.below(t + ".max_reflection_eigenvalue_minus_1", r_max - 1.0, 1e-10);
    o.below(t + ".max_s_minus_inverse_gamma", s_excess, 1e-9);
  }
  o.below("seconds", clock.seconds(), 120.0);
  return o;
}

Outcome mc_n1()
{
  Outcome o;
  Stopwatch clock;
  CavityModel model = CavityModel::with_default_channels(1, 1.0, DysonClass(2));
  model.n_fict = 1000;
  std::vector<double> x;
  for (const auto& g : sample_ensemble(model, 200000, base_seed + 5)) x.push_back(g.values.front());
  o.below("ks_distance", ks_distance(std::move(x), [](double v) { return single_channel_cdf(1.0, v); }), 0.01);
  o.below("seconds", clock.seconds(), 300.0);
  return o;
}

Outcome andreief()
{
  Outcome o;
  std::mt19937_64 rng(base_seed + 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double g : {0.5, 1.0, 2.0}) {
    JointDensityParams p;
    p.n_open = 2;
    p.gamma = g;
    p.path = InnerPath::determinant;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const std::vector<double> big{g + 5.0 * u(rng), g + 5.0 * u(rng)};
      const double lib = std::exp(log_inner_integral_determinant(p, big));
      worst = std::max(worst, std::abs(lib / andreief_oracle(g, big) - 1.0));
    }
    o.below("gamma" + tag(g) + ".relative_difference", worst, 1e-7);
  }
  return o;
}

Outcome mean_all_gamma()
{
  Outcome o;
  for (double g : {0.5, 1.0, 2.0}) {
    const double m = mean_of(wigner_times(50, g, 10000, base_seed + 11 + static_cast<int>(10 * g)));
    o.below("gamma" + tag(g) + ".relative_error", std::abs(m * (1.0 + g) - 1.0), 0.05);
  }
  return o;
}

Outcome weak_absorption()
{
  Outcome o;
  const double g = 0.05, n = 50, beta = 2;
  const auto s = wigner_times(50, g, 20000, base_seed + 13);
  o.below("mean_relative_error", std::abs(mean_of(s) / (1.0 - g) - 1.0), 0.02);
  o.below("variance_relative_error", std::abs(variance_of(s) / (4.0 / (beta * n * n) * (1.0 - 6.0 * g)) - 1.0), 0.15);
  return o;
}

Outcome strong_absorption()
{
  Outcome o;
  const double g = 10.0, n = 50, beta = 2;
  const auto s = wigner_times(50, g, 20000, base_seed + 17);
  o.below("mean_relative_error", std::abs(mean_of(s) / ((1.0 - 1.0 / g) / g) - 1.0), 0.05);
  o.within("variance_ratio", variance_of(s) * beta * n * n * std::pow(g, 4) / 2.0, 0.8, 1.2);
  return o;
}

Outcome coulomb_moments()
{
  Outcome o;
  const int m = SolverSettings{}.grid_size;
  auto nodes = [m](const DiscretizedDensity& rho) { return collocation_points(rho, m, 1); };
  for (double g : {1.0, 20.0}) {
    const std::string t = "gamma" + tag(g);
    Stopwatch clock;
    const TwoGasState s = solve_two_gas(g, 0.0);
    o.below(t + ".seconds", clock.seconds(), 120.0);
    const auto [rg, rt] = independent_residuals(s, nodes);
    o.below(t + ".gamma_gas_residual", rg, 1e-6);
    o.below(t + ".t_gas_residual", rt, 1e-6);
    if (g == 1.0) o.below(t + ".phi_prime_error", std::abs(inverse_moment(s.rho_gamma) - 0.5), 1e-3);
    if (g == 20.0) o.below(t + ".l1_distance", l1_to_strong(s.rho_gamma, 20.0), 0.02);
    const auto [ig, it] = independent_residuals(s, [](const DiscretizedDensity& rho) { return interior_points(rho); });
    std::printf("info coulomb-moments %s.between_nodes_residual gamma_gas=%.3g t_gas=%.3g\n", t.c_str(), ig, it);
  }
  return o;
}

Outcome tricomi()
{
  Outcome o;
  const DiscretizedDensity semi = tricomi_invert([](double x) { return 0.5 * x; }, -2.0, 2.0, 1.0, 256);
  const DiscretizedDensity arc = tricomi_invert([](double) { return 0.0; }, -1.0, 1.0, 1.0, 256);
  double e_semi = 0.0, e_arc = 0.0;
  const int n = 4000;
  for (int k = 0; k < n; ++k) {
    const double u = -1.0 + 2.0 * (k + 0.5) / n;
    e_semi = std::max(e_semi, std::abs(semi(2.0 * u) - std::sqrt(4.0 - 4.0 * u * u) / (2.0 * pi)));
    e_arc = std::max(e_arc, std::abs(arc(u) * pi * std::sqrt(1.0 - u * u) - 1.0));
  }
  o.below("semicircle.linf_error", e_semi, 1e-6);
  o.below("arcsine.max_relative_error", e_arc, 1e-12);
  return o;
}

Outcome generating_shift()
{
  Outcome o;
  const double g = 0.05;
  const double with_absorption = inverse_moment(solve_two_gas(g, 0.0).rho_gamma);
  const double shifted = inverse_moment(solve_zero_absorption(g / 2.0));
  o.below("phi_prime_difference", std::abs(with_absorption - shifted), 1e-3);
  const int n = 50;
  const double beta = 2.0;
  const auto c = weak_absorption_cumulants(g, {1.0, 4.0 / (beta * n * n)}, DysonClass(2), n, 1);
  // <s> = <s>_0 - (beta N^2 / 4) gamma <s^2>_c,0 = 1 - gamma
  o.below("relation_n1_error", std::abs(c.at(0) - (1.0 - g)), 1e-15);
  return o;
}

Outcome laguerre_limit()
{
  Outcome o;
  JointDensityParams p;
  p.n_open = 2;
  p.gamma = 1e-4;
  const std::vector<std::array<double, 2>> grid{{0.5, 1.0}, {0.8, 2.5}, {1.2, 3.0}, {2.0, 4.5}, {0.6, 5.0}};
  std::vector<double> log_ratio;
  for (const auto& g : grid) {
    // |G1 - G2|^2 prod G^2 e^{-2G}
    const double laguerre = 2.0 * std::log(std::abs(g[0] - g[1])) + 2.0 * std::log(g[0] * g[1]) - 2.0 * (g[0] + g[1]);
    log_ratio.push_back(log_joint_density(p, g) - laguerre);
  }
  const auto [lo, hi] = std::minmax_element(log_ratio.begin(), log_ratio.end());
  o.below("relative_variation", std::expm1(*hi - *lo), 1e-3);
  return o;
}

Outcome beta_duality()
{
  Outcome o;
  struct Case {
    int beta, n;
    std::vector<double> g;
  };
  for (const Case& c : {Case{1, 4, {1.3, 2.1, 2.9, 4.2}}, Case{4, 2, {1.4, 2.6}}}) {
    JointDensityParams p;
    p.beta = DysonClass(c.beta);
    p.n_open = c.n;
    p.gamma = 1.0;
    p.path = InnerPath::direct;
    std::vector<double> g = c.g;
    std::sort(g.begin(), g.end());
    const double first = log_joint_density(p, g);
    double spread = 0.0;
    bool finite = std::isfinite(first);
    while (std::next_permutation(g.begin(), g.end())) {
      const double v = log_joint_density(p, g);
      finite = finite && std::isfinite(v);
      spread = std::max(spread, std::abs(v - first));
    }
    const std::string t = "beta" + std::to_string(c.beta) + "_n" + std::to_string(c.n);
    o.at_least(t + ".finite", finite ? 1.0 : 0.0, 1.0);
    o.below(t + ".permutation_spread", spread, 1e-12);
  }
  auto rejected = [](int n) {
    try {
      JointDensityParams p;
      p.beta = DysonClass(1);
      p.n_open = n;
      const std::vector<double> g(n, 2.0);
      log_joint_density(p, g);
    } catch (const Error& e) {
      return e.code() == ErrorCode::unsupported_representation;
    }
    return false;
  };
  o.at_least("beta1_n3_rejected", rejected(3) ? 1.0 : 0.0, 1.0);
  o.at_least("beta1_n1_rejected", rejected(1) ? 1.0 : 0.0, 1.0);
  JointDensityParams even;
  even.beta = DysonClass(1);
  even.n_open = 2;
  o.at_least("beta1_n2_finite", std::isfinite(log_joint_density(even, std::vector<double>{1.5, 2.5})) ? 1.0 : 0.0, 1.0);
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& battery()
{
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
      {"structure", structure},
      {"mc-n1", mc_n1},
      {"andreief", andreief},
      {"mean-all-gamma", mean_all_gamma},
      {"weak-absorption", weak_absorption},
      {"strong-absorption", strong_absorption},
      {"coulomb-moments", coulomb_moments},
      {"tricomi", tricomi},
      {"generating-shift", generating_shift},
      {"laguerre-limit", laguerre_limit},
      {"beta-duality", beta_duality},
  };
  return all;
}

std::vector<std::string> split_names(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int runtime_total(const fs::path& dir)
{
  double total = 0.0;
  std::size_t seen = 0;
  if (fs::exists(dir))
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() != ".seconds") continue;
      std::ifstream in(e.path());
      double v = 0.0;
      if (in >> v) {
        total += v;
        ++seen;
      }
    }
  const bool complete = seen == battery().size();
  const bool ok = complete && total < 1800.0;
  std::printf("%s battery-runtime measured total_seconds=%.1f (criteria timed: %zu of %zu) required < 1800\n",
              ok ? "PASS" : "FAIL", total, seen, battery().size());
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
  std::vector<std::string> only;
  std::optional<fs::path> times;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (i + 1 >= argc) {
      std::fprintf(stderr, "missing value for %s\n", arg.c_str());
      return 2;
    }
    const std::string value = argv[++i];
    if (arg == "--only") {
      only = split_names(value);
    } else if (arg == "--times") {
      times = value;
    } else if (arg == "--runtime-total") {
      return runtime_total(value);
    } else {
      std::fprintf(stderr, "unknown option %s\n", arg.c_str());
      return 2;
    }
  }
  for (const auto& name : only)
    if (std::none_of(battery().begin(), battery().end(), [&](const auto& c) { return c.first == name; })) {
      std::fprintf(stderr, "unknown criterion %s\n", name.c_str());
      return 2;
    }

  bool all_ok = true;
  for (const auto& [name, run] : battery()) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Stopwatch clock;
    std::string line;
    bool ok = false;
    try {
      const Outcome o = run();
      ok = o.passed();
      for (const auto& c : o.checks) {
        char buf[256];
        std::snprintf(buf, sizeof buf, " %s=%.6g (%s%s)", c.key.c_str(), c.value, c.relation.c_str(),
                      c.ok ? "" : ", violated");
        line += buf;
      }
    } catch (const std::exception& e) {
      line = std::string(" error: ") + e.what();
    }
    const double seconds = clock.seconds();
    std::printf("%s %s measured%s [%.1f s]\n", ok ? "PASS" : "FAIL", name.c_str(), line.c_str(), seconds);
    std::fflush(stdout);
    if (times) {
      fs::create_directories(*times);
      std::ofstream(*times / (name + ".seconds")) << seconds << '\n';
    }
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
