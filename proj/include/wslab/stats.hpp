#ifndef WSLAB_STATS_HPP
#define WSLAB_STATS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "types.hpp"

namespace wslab {

/// Pairwise (cascade) summation with a fixed split, so the result depends
/// only on the order of the input.
inline double pairwise_sum(std::span<const double> v)
{
  if (v.size() <= 64) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

struct CumulantEstimate {
  int order = 1;
  double value = 0.0;
  double std_error = 0.0; ///< delete-1 jackknife standard error
  std::size_t n_samples = 0;
};

namespace detail {

// k-statistics k_1..k_4 from the count and the central sums S_r = sum (x - mean)^r.
inline std::array<double, 4> k_statistics(double n, double mean, double s2, double s3, double s4)
{
  std::array<double, 4> k{};
  k[0] = mean;
  k[1] = n > 1 ? s2 / (n - 1) : 0.0;
  k[2] = n > 2 ? n * s3 / ((n - 1) * (n - 2)) : 0.0;
  k[3] = n > 3 ? (n * (n + 1) * s4 - 3 * (n - 1) * s2 * s2) / ((n - 1) * (n - 2) * (n - 3)) : 0.0;
  return k;
}

// Central sums of a sample given raw sums T_r = sum d^r of offsets d = x - shift.
inline std::array<double, 4> from_shifted_sums(double n, double shift, const std::array<double, 5>& t)
{
  const double delta = t[1] / n;
  const double d2 = delta * delta;
  const double s2 = t[2] - n * d2;
  const double s3 = t[3] - 3 * delta * t[2] + 2 * n * d2 * delta;
  const double s4 = t[4] - 4 * delta * t[3] + 6 * d2 * t[2] - 3 * n * d2 * d2;
  return k_statistics(n, shift + delta, s2, s3, s4);
}

} // namespace detail

/// Unbiased cumulant estimators (k-statistics) of orders 1..max_order with
/// delete-1 jackknife standard errors.  Needs at least 100 * max_order samples.
inline std::vector<CumulantEstimate> estimate_cumulants(std::span<const double> samples, int max_order)
{
  require(max_order >= 1 && max_order <= 4, ErrorCode::invalid_argument, "max_order must be in 1..4");
  const std::size_t n = samples.size();
  require(n >= 100 * static_cast<std::size_t>(max_order), ErrorCode::sample_size_error,
          "need at least " + std::to_string(100 * max_order) + " samples (got " + std::to_string(n) + ")");

  const double shift = pairwise_sum(samples) / static_cast<double>(n);
  std::array<std::vector<double>, 5> powers;
  for (auto& p : powers) p.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = samples[i] - shift;
    powers[0][i] = 1.0;
    for (int r = 1; r <= 4; ++r) powers[r][i] = powers[r - 1][i] * d;
  }
  std::array<double, 5> t{};
  for (int r = 0; r <= 4; ++r) t[r] = pairwise_sum(powers[r]);

  const double nd = static_cast<double>(n);
  const auto full = detail::from_shifted_sums(nd, shift, t);

  std::array<double, 4> mean_loo{}, sq_loo{};
  std::vector<std::array<double, 4>> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, 5> ti = t;
    for (int r = 1; r <= 4; ++r) ti[r] -= powers[r][i];
    loo[i] = detail::from_shifted_sums(nd - 1, shift, ti);
  }
  for (int k = 0; k < max_order; ++k) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = loo[i][k];
    mean_loo[k] = pairwise_sum(col) / nd;
    for (std::size_t i = 0; i < n; ++i) col[i] = (loo[i][k] - mean_loo[k]) * (loo[i][k] - mean_loo[k]);
    sq_loo[k] = pairwise_sum(col);
  }

  std::vector<CumulantEstimate> out;
  for (int k = 0; k < max_order; ++k)
    out.push_back({k + 1, full[k], std::sqrt((nd - 1) / nd * sq_loo[k]), n});
  return out;
}

/// One analytic prediction confronted with a Monte Carlo estimate.
struct PredictionRow {
  std::string name;
  double predicted = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  /// |estimate - predicted| <= 3 stderr + 5% |predicted|
  bool within_band = false;
};

struct AsymptoticReport {
  double gamma = 0.0;
  int beta = 2;
  int n_open = 1;
  std::string regime; ///< "weak", "strong" or "intermediate"
  std::vector<PredictionRow> rows;
  std::vector<std::string> warnings;

  const PredictionRow* find(const std::string& name) const
  {
    for (const auto& r : rows)
      if (r.name == name) return &r;
    return nullptr;
  }
};

inline constexpr double weak_regime_limit = 0.2;
inline constexpr double strong_regime_limit = 5.0;

inline PredictionRow make_row(std::string name, double predicted, const CumulantEstimate& e)
{
  PredictionRow r;
  r.name = std::move(name);
  r.predicted = predicted;
  r.estimate = e.value;
  r.std_error = e.std_error;
  r.z = e.std_error > 0.0 ? (e.value - predicted) / e.std_error : 0.0;
  r.within_band = std::abs(e.value - predicted) <= 3.0 * e.std_error + 0.05 * std::abs(predicted);
  return r;
}

/// Confronts the first two cumulants with the large-N predictions:
/// <s> = 1/(1+gamma) for every gamma; for gamma < 0.2, <s> ~ 1 - gamma and
/// Var(s) ~ 4(1 - 6 gamma)/(beta N^2); for gamma > 5, <s> ~ (1 - 1/gamma)/gamma
/// and Var(s) ~ 2/(beta N^2 gamma^4).
inline AsymptoticReport compare_asymptotics(const std::vector<CumulantEstimate>& estimates, double gamma,
                                            DysonClass beta, int n_open)
{
  const CumulantEstimate* k1 = nullptr;
  const CumulantEstimate* k2 = nullptr;
  for (const auto& e : estimates) {
    if (e.order == 1) k1 = &e;
    if (e.order == 2) k2 = &e;
  }
  require(k1 && k2, ErrorCode::insufficient_input, "estimates must contain orders 1 and 2");
  require(gamma > 0.0, ErrorCode::invalid_argument, "gamma must be positive");
  require(n_open >= 1, ErrorCode::invalid_dimension, "n_open must be at least 1");

  AsymptoticReport rep;
  rep.gamma = gamma;
  rep.beta = beta.beta();
  rep.n_open = n_open;
  const double bn2 = beta.value() * n_open * n_open;
  rep.rows.push_back(make_row("mean-all-gamma", 1.0 / (1.0 + gamma), *k1));
  if (gamma < weak_regime_limit) {
    rep.regime = "weak";
    rep.rows.push_back(make_row("mean-weak", 1.0 - gamma, *k1));
    rep.rows.push_back(make_row("variance-weak", 4.0 / bn2 * (1.0 - 6.0 * gamma), *k2));
  } else if (gamma > strong_regime_limit) {
    rep.regime = "strong";
    rep.rows.push_back(make_row("mean-strong", (1.0 - 1.0 / gamma) / gamma, *k1));
    rep.rows.push_back(make_row("variance-strong", 2.0 / (bn2 * std::pow(gamma, 4)), *k2));
  } else {
    rep.regime = "intermediate";
    rep.warnings.push_back("gamma = " + std::to_string(gamma) +
                           " lies between the weak and strong regimes; only the all-gamma mean is reported");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov helpers.

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `samples`.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf)
{
  require(!samples.empty(), ErrorCode::sample_size_error, "KS statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// Two-sample statistic sup_x |F_a(x) - F_b(x)|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
  require(!a.empty() && !b.empty(), ErrorCode::sample_size_error, "KS statistic needs samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

/// Asymptotic Kolmogorov tail probability P(D > d) for effective size n_eff,
/// with the Stephens small-sample correction.
inline double kolmogorov_pvalue(double d, double n_eff)
{
  const double root = std::sqrt(n_eff);
  const double lambda = (root + 0.12 + 0.11 / root) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

} // namespace wslab

#endif // WSLAB_STATS_HPP
