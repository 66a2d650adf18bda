#ifndef WSLAB_RNG_HPP
#define WSLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "types.hpp"

namespace wslab {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Key of stream `index` under `seed`: two mixing rounds over (seed, index).
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) noexcept
{
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Independent engine for sample `index`; depends only on (seed, index).
inline Engine make_stream(std::uint64_t seed, std::uint64_t index)
{
  const std::uint64_t key = stream_key(seed, index);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Engine(seq);
}

template <class Rng>
double standard_normal(Rng& rng)
{
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

/// Circular complex Gaussian with E|z|^2 = 1.
template <class Rng>
cplx complex_normal(Rng& rng)
{
  constexpr double scale = 0.70710678118654752440;
  const double re = standard_normal(rng);
  const double im = standard_normal(rng);
  return {scale * re, scale * im};
}

template <class Rng>
double gamma_variate(double shape, Rng& rng)
{
  boost::random::gamma_distribution<double> dist(shape, 1.0);
  return dist(rng);
}

template <class Rng>
double beta_variate(double a, double b, Rng& rng)
{
  const double x = gamma_variate(a, rng);
  const double y = gamma_variate(b, rng);
  return x / (x + y);
}

template <class Rng>
MatrixC ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
  MatrixC z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = complex_normal(rng);
  return z;
}

} // namespace wslab

#endif // WSLAB_RNG_HPP
