#ifndef WSLAB_VALIDATION_HPP
#define WSLAB_VALIDATION_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "coulomb.hpp"
#include "densities.hpp"
#include "ensemble.hpp"
#include "io.hpp"
#include "stats.hpp"

namespace wslab {

struct ValidationOptions {
  double tol = 1e-8;                ///< Coulomb-gas solver tolerance
  int grid_size = 256;              ///< Coulomb-gas Chebyshev grid
  std::uint64_t seed = 20240601;    ///< base seed of every Monte Carlo criterion
  int threads = 0;
};

/// One measured quantity and the bound it is held to.
struct Measurement {
  std::string key;
  double value = 0.0;
  double limit = 0.0;
  std::string relation; ///< "<", "<=", ">=" or "in [lo, hi]"
  bool passed = false;
};

struct CriterionResult {
  std::string name;
  std::string description;
  std::vector<Measurement> measurements;
  std::string error; ///< non-empty if the criterion threw
  double seconds = 0.0;

  bool passed() const
  {
    if (!error.empty() || measurements.empty()) return false;
    return std::all_of(measurements.begin(), measurements.end(), [](const Measurement& m) { return m.passed; });
  }

  void below(std::string key, double value, double limit)
  {
    measurements.push_back({std::move(key), value, limit, "<", value < limit});
  }

  void at_least(std::string key, double value, double limit)
  {
    measurements.push_back({std::move(key), value, limit, ">=", value >= limit});
  }

  void within(std::string key, double value, double lo, double hi)
  {
    measurements.push_back({std::move(key), value, hi, "in [" + format_range(lo, hi) + "]", value >= lo && value <= hi});
  }

private:
  static std::string format_range(double lo, double hi)
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g, %g", lo, hi);
    return buf;
  }
};

namespace validation {

inline std::vector<double> wigner_times(const std::vector<GammaSpectrum>& spectra)
{
  std::vector<double> s(spectra.size());
  for (std::size_t i = 0; i < spectra.size(); ++i) s[i] = spectra[i].s;
  return s;
}

inline std::vector<GammaSpectrum> ensemble(int n, double gamma, std::size_t samples, std::uint64_t seed,
                                           const ValidationOptions& opt, int n_fict = 0)
{
  CavityModel model = CavityModel::with_default_channels(n, gamma, DysonClass(2));
  if (n_fict > 0) model.n_fict = n_fict;
  return sample_ensemble(model, samples, seed, {SamplingPath::automatic, opt.threads});
}

inline CriterionResult structure(const ValidationOptions& opt)
{
  CriterionResult r{"structure", "1e3 sampled S per beta (N + Nphi = 64) satisfy unitarity, symmetry, self-duality"};
  for (int b : {1, 2, 4}) {
    const CavityModel model{4, 60, 1.0, DysonClass(b)};
    const std::size_t count = 1000;
    std::vector<double> residual(count), wall(count), smax(count);
    parallel_for(count, resolve_thread_count(opt.threads), [&](std::size_t i) {
      Engine rng = make_stream(opt.seed + b, i);
      const ComplexMatrix s = sample_scattering_matrix(model, rng);
      residual[i] = s.structure_residual();
      const GammaSpectrum g = reflection_to_gamma(extract_reflection(s, model.n_open), model.gamma, model.beta);
      wall[i] = g.values.front() - model.gamma;
      smax[i] = g.s - 1.0 / model.gamma;
    });
    const std::string tag = "beta" + std::to_string(b);
    r.below(tag + ".max_structure_residual", *std::max_element(residual.begin(), residual.end()), 1e-10);
    r.at_least(tag + ".min_gamma_minus_wall", *std::min_element(wall.begin(), wall.end()), -1e-9);
    r.below(tag + ".max_s_minus_inverse_gamma", *std::max_element(smax.begin(), smax.end()), 1e-9);
  }
  return r;
}

inline CriterionResult mc_n1(const ValidationOptions& opt)
{
  CriterionResult r{"mc-n1", "N = 1, beta = 2, gamma = 1, Nphi = 1000, 2e5 samples: KS to the exact law < 0.01"};
  const auto spectra = ensemble(1, 1.0, 200000, opt.seed + 11, opt, 1000);
  std::vector<double> x(spectra.size());
  for (std::size_t i = 0; i < spectra.size(); ++i) x[i] = spectra[i].values[0];
  JointDensityParams p;
  p.gamma = 1.0;
  const TabulatedCdf cdf = one_point_cdf(p);
  r.below("ks_distance", ks_statistic(x, cdf), 0.01);
  return r;
}

inline CriterionResult andreief(const ValidationOptions& opt)
{
  CriterionResult r{"andreief", "beta = 2, N = 2: determinant vs direct quadrature, 20 pairs per gamma, rel < 1e-7"};
  Engine rng = make_stream(opt.seed + 13, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double gamma : {0.5, 1.0, 2.0}) {
    JointDensityParams p;
    p.n_open = 2;
    p.gamma = gamma;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const std::vector<double> g{gamma + 0.01 + 4.0 * unif(rng), gamma + 0.01 + 4.0 * unif(rng)};
      const double det = log_inner_integral_determinant(p, g);
      const double dir = log_inner_integral_direct(p, g);
      worst = std::max(worst, std::abs(std::expm1(det - dir)));
    }
    r.below("gamma" + format_double(gamma) + ".max_relative_difference", worst, 1e-7);
  }
  return r;
}

inline CriterionResult mean_all_gamma(const ValidationOptions& opt)
{
  CriterionResult r{"mean-all-gamma", "beta = 2, N = 50, 1e4 samples: <s> within 5% of 1/(1+gamma)"};
  for (double gamma : {0.5, 1.0, 2.0}) {
    const auto s = wigner_times(ensemble(50, gamma, 10000, opt.seed + 17 + static_cast<int>(4 * gamma), opt));
    const double mean = pairwise_sum(s) / s.size();
    r.below("gamma" + format_double(gamma) + ".relative_error", std::abs(mean * (1.0 + gamma) - 1.0), 0.05);
  }
  return r;
}

inline CriterionResult weak_absorption(const ValidationOptions& opt)
{
  CriterionResult r{"weak-absorption", "beta = 2, N = 50, gamma = 0.05, 2e4 samples: <s> within 2% of 1 - gamma, "
                                       "Var(s) within 15% of 4(1 - 6 gamma)/(beta N^2)"};
  const double gamma = 0.05;
  const auto s = wigner_times(ensemble(50, gamma, 20000, opt.seed + 19, opt));
  const auto k = estimate_cumulants(s, 2);
  r.below("mean_relative_error", std::abs(k[0].value / (1.0 - gamma) - 1.0), 0.02);
  const double var_pred = 4.0 / (2.0 * 50 * 50) * (1.0 - 6.0 * gamma);
  r.below("variance_relative_error", std::abs(k[1].value / var_pred - 1.0), 0.15);
  return r;
}

inline CriterionResult strong_absorption(const ValidationOptions& opt)
{
  CriterionResult r{"strong-absorption", "beta = 2, N = 50, gamma = 10, 2e4 samples: <s> within 5% of "
                                         "(1 - 1/gamma)/gamma, Var(s) beta N^2 gamma^4 / 2 in [0.8, 1.2]"};
  const double gamma = 10.0;
  const auto s = wigner_times(ensemble(50, gamma, 20000, opt.seed + 23, opt));
  const auto k = estimate_cumulants(s, 2);
  r.below("mean_relative_error", std::abs(k[0].value / ((1.0 - 1.0 / gamma) / gamma) - 1.0), 0.05);
  r.within("variance_ratio", k[1].value * 2.0 * 50 * 50 * std::pow(gamma, 4) / 2.0, 0.8, 1.2);
  return r;
}

inline CriterionResult coulomb_moments(const ValidationOptions& opt)
{
  CriterionResult r{"coulomb-moments", "two-gas solver: residuals < 1e-6 and Phi'(0) = 0.5 +- 1e-3 at gamma = 1; "
                                       "L1 distance to the strong-absorption density < 2% at gamma = 20"};
  SolverSettings st;
  st.grid_size = opt.grid_size;
  st.tol = opt.tol;
  const TwoGasState s1 = solve_two_gas(1.0, 0.0, st);
  r.below("gamma1.max_residual", s1.max_residual(), 1e-6);
  r.below("gamma1.phi_prime_error", std::abs(s1.rho_gamma.inverse_moment() - 0.5), 1e-3);
  const TwoGasState s20 = solve_two_gas(20.0, 0.0, st);
  r.below("gamma20.max_residual", s20.max_residual(), 1e-6);
  r.below("gamma20.l1_distance", l1_distance(s20.rho_gamma, strong_absorption_density(20.0, 0.0)), 0.02);
  return r;
}

inline CriterionResult tricomi(const ValidationOptions& opt)
{
  CriterionResult r{"tricomi", "semicircle from g = x/2 on [-2, 2] (Linf < 1e-6); arcsine from g = 0 to rounding"};
  const int m = opt.grid_size;
  const DiscretizedDensity semi = tricomi_invert([](double x) { return 0.5 * x; }, -2.0, 2.0, 1.0, m);
  const DiscretizedDensity arc = tricomi_invert([](double) { return 0.0; }, -1.0, 1.0, 1.0, m);
  double e_semi = 0.0, e_arc = 0.0;
  for (double x : semi.grid(m)) e_semi = std::max(e_semi, std::abs(semi(x) - std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi)));
  for (double x : arc.grid(m)) {
    const double exact = 1.0 / (std::numbers::pi * std::sqrt(1.0 - x * x));
    e_arc = std::max(e_arc, std::abs(arc(x) / exact - 1.0));
  }
  r.below("semicircle.linf_error", e_semi, 1e-6);
  r.below("arcsine.max_relative_error", e_arc, 1e-12);
  return r;
}

inline CriterionResult generating_shift(const ValidationOptions& opt)
{
  CriterionResult r{"generating-shift", "Phi'_gamma(0) at gamma = 0.05 equals Phi'_0(0.025) within 1e-3; the cumulant "
                                        "relation at n = 1 gives <s> = 1 - gamma exactly"};
  SolverSettings st;
  st.grid_size = opt.grid_size;
  st.tol = opt.tol;
  const double gamma = 0.05;
  const double with_absorption = phi_derivative(gamma, 0.0, st);
  const double shifted = phi_derivative_zero_absorption(gamma / 2.0, st);
  r.below("phi_prime_difference", std::abs(with_absorption - shifted), 1e-3);
  const int n = 50;
  const DysonClass beta(2);
  const auto c = weak_absorption_cumulants(gamma, {1.0, 4.0 / (beta.value() * n * n)}, beta, n, 1);
  r.below("relation_n1_error", std::abs(c[0] - (1.0 - gamma)), 1e-15);
  return r;
}

inline CriterionResult laguerre_limit(const ValidationOptions&)
{
  CriterionResult r{"laguerre-limit", "gamma = 1e-4, beta = 2, N = 2: joint density / Laguerre density constant "
                                      "within 1e-3 on a 5-point grid"};
  JointDensityParams p;
  p.n_open = 2;
  p.gamma = 1e-4;
  const std::vector<std::vector<double>> grid{{0.5, 1.0}, {0.8, 2.5}, {1.2, 3.0}, {2.0, 4.5}, {0.6, 5.0}};
  std::vector<double> ratio;
  for (const auto& g : grid) ratio.push_back(log_joint_density(p, g) - laguerre_log_density(p.beta, 2, g));
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  r.below("relative_variation", std::expm1(*hi - *lo), 1e-3);
  return r;
}

inline CriterionResult beta_duality(const ValidationOptions&)
{
  CriterionResult r{"beta-duality", "beta = 1, N = 4 (N_t = 2) and beta = 4, N = 2 (N_t = 4): direct t-integral "
                                    "finite and permutation symmetric; beta = 1 with odd N rejected"};
  struct Case {
    int beta, n;
    std::vector<double> g;
  };
  const std::vector<Case> cases{{1, 4, {1.3, 2.1, 2.9, 4.2}}, {4, 2, {1.4, 2.6}}};
  for (const auto& c : cases) {
    JointDensityParams p;
    p.beta = DysonClass(c.beta);
    p.n_open = c.n;
    p.gamma = 1.0;
    p.path = InnerPath::direct;
    std::vector<double> g = c.g;
    const double base = log_joint_density(p, g);
    double spread = 0.0;
    std::sort(g.begin(), g.end());
    do {
      spread = std::max(spread, std::abs(log_joint_density(p, g) - base));
    } while (std::next_permutation(g.begin(), g.end()));
    const std::string tag = "beta" + std::to_string(c.beta) + "_n" + std::to_string(c.n);
    r.below(tag + ".not_finite", std::isfinite(base) ? 0.0 : 1.0, 0.5);
    r.below(tag + ".permutation_spread", spread, 1e-12);
  }
  double rejected = 0.0;
  try {
    JointDensityParams p;
    p.beta = DysonClass(1);
    p.n_open = 3;
    p.validate();
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::unsupported_representation ? 1.0 : 0.0;
  }
  r.at_least("beta1_odd_n_rejected", rejected, 1.0);
  JointDensityParams even;
  even.beta = DysonClass(1);
  even.n_open = 2;
  const std::vector<double> pair{1.5, 2.5};
  r.at_least("beta1_n2_finite", std::isfinite(log_joint_density(even, pair)) ? 1.0 : 0.0, 1.0);
  return r;
}

} // namespace validation

struct CriterionEntry {
  std::string name;
  std::function<CriterionResult(const ValidationOptions&)> run;
};

inline const std::vector<CriterionEntry>& validation_criteria()
{
  static const std::vector<CriterionEntry> all{
      {"structure", validation::structure},
      {"mc-n1", validation::mc_n1},
      {"andreief", validation::andreief},
      {"mean-all-gamma", validation::mean_all_gamma},
      {"weak-absorption", validation::weak_absorption},
      {"strong-absorption", validation::strong_absorption},
      {"coulomb-moments", validation::coulomb_moments},
      {"tricomi", validation::tricomi},
      {"generating-shift", validation::generating_shift},
      {"laguerre-limit", validation::laguerre_limit},
      {"beta-duality", validation::beta_duality},
  };
  return all;
}

/// Runs the selected criteria (all if `only` is empty); failures and
/// exceptions are collected, never short-circuited.
inline std::vector<CriterionResult> run_validation(const ValidationOptions& opt, const std::vector<std::string>& only,
                                                   const std::function<void(const CriterionResult&)>& on_done = {})
{
  for (const auto& name : only) {
    const auto& all = validation_criteria();
    require(std::any_of(all.begin(), all.end(), [&](const CriterionEntry& c) { return c.name == name; }),
            ErrorCode::invalid_config, "unknown criterion '" + name + "'");
  }
  std::vector<CriterionResult> out;
  for (const auto& entry : validation_criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), entry.name) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = entry.run(opt);
    } catch (const std::exception& e) {
      res.name = entry.name;
      const auto* err = dynamic_cast<const Error*>(&e);
      res.error = err ? std::string(err->code_name()) + ": " + e.what() : e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_done) on_done(res);
    out.push_back(std::move(res));
  }
  return out;
}

} // namespace wslab

#endif // WSLAB_VALIDATION_HPP
