#ifndef WSLAB_WSLAB_HPP
#define WSLAB_WSLAB_HPP

#include "chebyshev.hpp"
#include "colligation.hpp"
#include "config.hpp"
#include "coulomb.hpp"
#include "densities.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "haar.hpp"
#include "io.hpp"
#include "jacobi.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "runner.hpp"
#include "scattering.hpp"
#include "stats.hpp"
#include "types.hpp"
#include "validation.hpp"

#endif // WSLAB_WSLAB_HPP
