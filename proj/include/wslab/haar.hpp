#ifndef WSLAB_HAAR_HPP
#define WSLAB_HAAR_HPP

#include <Eigen/QR>

#include "rng.hpp"
#include "types.hpp"

namespace wslab {

/// Haar unitary from the QR factorization of a Ginibre matrix, with the
/// phases of diag(R) moved into Q so that the result is exactly Haar.
template <class Rng>
MatrixC haar_unitary(Eigen::Index n, Rng& rng)
{
  require(n >= 1, ErrorCode::invalid_dimension, "Haar dimension must be at least 1");
  const MatrixC z = ginibre(n, n, rng);
  Eigen::HouseholderQR<MatrixC> qr(z);
  MatrixC q = qr.householderQ();
  const MatrixC& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx d = packed(j, j);
    const double mod = std::abs(d);
    if (mod > 0.0) q.col(j) *= d / mod;
  }
  return q;
}

/// Circular ensemble matrix of the given class.
/// beta=2: Haar U(dim); beta=1: W W^T; beta=4: W W^D in the 2*dim embedding.
template <class Rng>
ComplexMatrix sample_haar(Eigen::Index dim, DysonClass beta, Rng& rng)
{
  require(dim >= 1, ErrorCode::invalid_dimension, "dimension must be at least 1");
  ComplexMatrix out;
  out.structure = unitary_structure(beta);
  switch (beta.beta()) {
    case 1: {
      const MatrixC w = haar_unitary(dim, rng);
      out.entries = w * w.transpose();
      out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
      break;
    }
    case 4: {
      const MatrixC w = haar_unitary(2 * dim, rng);
      out.entries = w * symplectic_dual(w);
      out.entries = 0.5 * (out.entries + symplectic_dual(out.entries)).eval();
      break;
    }
    default: out.entries = haar_unitary(dim, rng); break;
  }
  return out;
}

} // namespace wslab

#endif // WSLAB_HAAR_HPP
