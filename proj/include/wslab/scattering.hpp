#ifndef WSLAB_SCATTERING_HPP
#define WSLAB_SCATTERING_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "types.hpp"

namespace wslab {

inline constexpr double clamp_epsilon = 1e-12;
inline constexpr double max_coupling_condition = 1e12;

/// Mean scattering matrix diag(0_N, sqrt(1-T) 1_Nphi), repeated per quaternion component.
inline ComplexMatrix coupling_matrix(const CavityModel& model)
{
  model.validate();
  const int m = model.beta.multiplicity();
  const double a = std::sqrt(1.0 - model.tunnel_probability());
  const Eigen::Index n0 = static_cast<Eigen::Index>(m) * model.n_open;
  const Eigen::Index n1 = static_cast<Eigen::Index>(m) * model.n_fict;
  VectorR diag(n0 + n1);
  diag.head(n0).setZero();
  diag.tail(n1).setConstant(a);
  return {diag.cast<cplx>().asDiagonal(), Structure::hermitian};
}

/// Poisson-kernel map Y = A - sqrt(1-A^2) U (1-AU)^{-1} sqrt(1-A^2).
inline ComplexMatrix apply_coupling(const ComplexMatrix& u, const ComplexMatrix& mean_s)
{
  const Eigen::Index n = u.dim();
  require(n >= 1 && u.entries.cols() == n, ErrorCode::invalid_dimension, "U must be square and non-empty");
  require(mean_s.dim() == n && mean_s.entries.cols() == n, ErrorCode::invalid_dimension,
          "mean matrix must match the dimension of U");
  const MatrixC& a = mean_s.entries;
  require(hermiticity_residual(a) < 1e-12, ErrorCode::invalid_argument, "mean matrix must be Hermitian");

  MatrixC root;
  const bool diagonal = max_norm(a - MatrixC(a.diagonal().asDiagonal())) == 0.0;
  if (diagonal) {
    VectorR d = a.diagonal().real();
    require(d.minCoeff() >= 0.0 && d.maxCoeff() < 1.0, ErrorCode::invalid_argument,
            "mean matrix eigenvalues must lie in [0, 1)");
    root = (1.0 - d.array().square()).sqrt().matrix().cast<cplx>().asDiagonal();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixC> es(a);
    const VectorR& ev = es.eigenvalues();
    require(ev.minCoeff() >= -1e-14 && ev.maxCoeff() < 1.0, ErrorCode::invalid_argument,
            "mean matrix eigenvalues must lie in [0, 1)");
    const VectorR s = (1.0 - ev.array().square()).sqrt().matrix();
    root = es.eigenvectors() * s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  }

  const MatrixC m = MatrixC::Identity(n, n) - a * u.entries;
  Eigen::PartialPivLU<MatrixC> lu(m);
  const double rcond = lu.rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  if (!(cond <= max_coupling_condition))
    fail(ErrorCode::ill_conditioned_coupling,
         "1 - A U is numerically singular (condition estimate " + std::to_string(cond) + ")");

  ComplexMatrix y;
  y.entries = a - root * u.entries * lu.solve(root);
  y.structure = u.structure;
  return y;
}

/// Top-left reflection block; in the quaternion embedding the block spans 2*n_open rows.
inline ComplexMatrix extract_reflection(const ComplexMatrix& s, int n_open)
{
  const int m = s.structure == Structure::self_dual_unitary ? 2 : 1;
  require(n_open >= 1, ErrorCode::invalid_partition, "n_open must be at least 1");
  const Eigen::Index k = static_cast<Eigen::Index>(m) * n_open;
  require(k < s.dim(), ErrorCode::invalid_partition,
          "n_open = " + std::to_string(n_open) + " leaves no fictitious channels");
  return {s.entries.topLeftCorner(k, k), Structure::general};
}

/// Gamma_n = gamma / (1 - R_n) from the eigenvalues R_n of r^dagger r.
/// For beta = 4 one value of each Kramers pair is kept.
inline GammaSpectrum reflection_to_gamma(const ComplexMatrix& r, double gamma, DysonClass beta = DysonClass{2})
{
  require(gamma > 0.0 && std::isfinite(gamma), ErrorCode::absorption_required,
          "gamma must be positive: the map to Gamma is singular without absorption");
  const Eigen::Index n = r.dim();
  require(n >= 1 && r.entries.cols() == n, ErrorCode::invalid_dimension, "r must be square and non-empty");
  const int m = beta.multiplicity();
  require(n % m == 0, ErrorCode::invalid_dimension, "quaternion reflection block must have even dimension");

  const MatrixC h = r.entries.adjoint() * r.entries;
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h, Eigen::EigenvaluesOnly);
  const VectorR& ev = es.eigenvalues();

  GammaSpectrum out;
  out.gamma = gamma;
  out.values.reserve(static_cast<std::size_t>(n / m));
  for (Eigen::Index i = 0; i < n; i += m) {
    double rn = ev(i);
    if (rn > 1.0 + 1e-10)
      fail(ErrorCode::non_contraction_input, "r^dagger r has eigenvalue " + std::to_string(rn) + " > 1");
    rn = std::max(rn, 0.0);
    if (rn > 1.0 - clamp_epsilon) {
      rn = 1.0 - clamp_epsilon;
      ++out.saturated;
    }
    out.values.push_back(gamma / (1.0 - rn));
  }
  std::sort(out.values.begin(), out.values.end());
  out.s = rescaled_wigner_time(out);
  return out;
}

} // namespace wslab

#endif // WSLAB_SCATTERING_HPP
