#ifndef WSLAB_ENSEMBLE_HPP
#define WSLAB_ENSEMBLE_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "colligation.hpp"
#include "haar.hpp"
#include "rng.hpp"
#include "scattering.hpp"

namespace wslab {

enum class SamplingPath {
  automatic,  ///< elimination when Nphi >= 2N, dense otherwise
  dense,      ///< full circular-ensemble matrix of size N + Nphi
  elimination ///< ColligationSampler
};

struct EnsembleOptions {
  SamplingPath path = SamplingPath::automatic;
  int threads = 0; ///< 0: WSLAB_THREADS or hardware concurrency
};

/// Worker count: explicit request, else WSLAB_THREADS, else hardware concurrency.
inline int resolve_thread_count(int requested)
{
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WSLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Full scattering matrix S of the absorbing cavity, dimension N + Nphi.
template <class Rng>
ComplexMatrix sample_scattering_matrix(const CavityModel& model, Rng& rng)
{
  model.validate();
  const ComplexMatrix u = sample_haar(model.n_open + model.n_fict, model.beta, rng);
  return apply_coupling(u, coupling_matrix(model));
}

template <class Rng>
GammaSpectrum sample_spectrum(const CavityModel& model, Rng& rng, SamplingPath path = SamplingPath::automatic)
{
  model.validate();
  require(model.gamma > 0.0, ErrorCode::absorption_required, "sampling Gamma requires gamma > 0");
  if (path == SamplingPath::automatic)
    path = model.n_fict >= 2 * model.n_open ? SamplingPath::elimination : SamplingPath::dense;

  if (path == SamplingPath::dense) {
    const ComplexMatrix s = sample_scattering_matrix(model, rng);
    return reflection_to_gamma(extract_reflection(s, model.n_open), model.gamma, model.beta);
  }
  ColligationSampler<Rng> sampler(model.n_open, model.beta);
  const double a = std::sqrt(1.0 - model.tunnel_probability());
  const ComplexMatrix r{sampler.reflection(model.n_fict, a, rng), Structure::general};
  return reflection_to_gamma(r, model.gamma, model.beta);
}

/// Runs `body(i)` for i in [0, count) on a worker pool; the first failing
/// index (lowest i) is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body)
{
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Sample i draws from make_stream(seed, i), so the output is identical for
/// any worker count and execution order.
inline std::vector<GammaSpectrum> sample_ensemble(const CavityModel& model, std::size_t n_samples,
                                                  std::uint64_t seed, const EnsembleOptions& options = {})
{
  model.validate();
  require(n_samples >= 1, ErrorCode::invalid_argument, "n_samples must be at least 1");
  std::vector<GammaSpectrum> out(n_samples);
  parallel_for(n_samples, resolve_thread_count(options.threads), [&](std::size_t i) {
    Engine rng = make_stream(seed, i);
    out[i] = sample_spectrum(model, rng, options.path);
  });
  return out;
}

} // namespace wslab

#endif // WSLAB_ENSEMBLE_HPP
