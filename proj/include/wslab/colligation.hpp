#ifndef WSLAB_COLLIGATION_HPP
#define WSLAB_COLLIGATION_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "haar.hpp"
#include "jacobi.hpp"
#include "scattering.hpp"

namespace wslab {

/// Reflection block of the absorbing cavity obtained by eliminating the
/// fictitious channels N at a time.
///
/// With a = sqrt(1-T), the reflection block is r = -Theta_U(a), where
/// Theta_U(z) = U11 + z U12 (1 - z U22)^{-1} U21 is the characteristic function
/// of the circular-ensemble matrix U with respect to the first N channels.
/// Splitting off N internal channels at a time, Theta for internal dimension K
/// is a linear-fractional image of Theta for internal dimension K - N, driven by
/// a fresh 2N x 2N block whose law is fixed by K.  Each step costs O(N^3), so a
/// sample costs O(N^2 Nphi) instead of O((N + Nphi)^3), with the same distribution.
template <class Rng>
class ColligationSampler {
public:
  ColligationSampler(int n_open, DysonClass beta) : n_(n_open), beta_(beta), m_(beta.multiplicity())
  {
    require(n_open >= 1, ErrorCode::invalid_dimension, "n_open must be at least 1");
  }

  /// Returns the (multiplicity * N)-square reflection block r.
  MatrixC reflection(int n_fict, double a, Rng& rng)
  {
    require(n_fict >= 0, ErrorCode::invalid_dimension, "n_fict must be non-negative");
    require(a >= 0.0 && a < 1.0, ErrorCode::invalid_argument, "coupling amplitude must lie in [0, 1)");
    if (beta_.beta() == 2 && n_ == 1) return MatrixC::Constant(1, 1, -scalar_theta(n_fict, a, rng));

    int k = n_fict % n_;
    MatrixC theta = theta_direct(k, a, rng);
    for (k += n_; k <= n_fict; k += n_) {
      if (beta_.beta() == 2)
        unitary_step(theta, k, a, rng);
      else
        structured_step(theta, k, a, rng);
    }
    return -theta;
  }

private:
  // Theta(a) from a circular-ensemble matrix with internal dimension k < N.
  MatrixC theta_direct(int k, double a, Rng& rng)
  {
    const ComplexMatrix u = sample_haar(n_ + k, beta_, rng);
    if (k == 0) return u.entries;
    const Eigen::Index p = static_cast<Eigen::Index>(m_) * n_;
    const Eigen::Index q = static_cast<Eigen::Index>(m_) * k;
    const auto u11 = u.entries.topLeftCorner(p, p);
    const auto u12 = u.entries.topRightCorner(p, q);
    const auto u21 = u.entries.bottomLeftCorner(q, p);
    const MatrixC lhs = MatrixC::Identity(q, q) - a * u.entries.bottomRightCorner(q, q);
    Eigen::PartialPivLU<MatrixC> lu(lhs);
    check_condition(lu);
    return u11 + a * u12 * lu.solve(u21);
  }

  // beta = 2.  The driving block is [[P E, F], [E, -P^dagger F]] with
  // P = Z R^{-1} (Z Ginibre N x N, R complex Bartlett factor with k degrees of
  // freedom), F = (1 + P P^dagger)^{-1/2} and E = (1 + P^dagger P)^{-1/2} realized
  // through Cholesky factors.  Substituting into the linear-fractional update gives
  // Theta' = (P + a (L1^dagger + a Theta^dagger P^dagger)^{-1} Theta^dagger) L2^{-dagger}.
  void unitary_step(MatrixC& theta, int k, double a, Rng& rng)
  {
    const Eigen::Index n = n_;
    z_ = ginibre(n, n, rng);
    bartlett_.setZero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) bartlett_(i, j) = complex_normal(rng);
      bartlett_(j, j) = std::sqrt(gamma_variate(static_cast<double>(k - j), rng));
    }
    p_ = bartlett_.triangularView<Eigen::Upper>().template solve<Eigen::OnTheRight>(z_);

    h1_.setIdentity(n, n);
    h1_.template selfadjointView<Eigen::Lower>().rankUpdate(p_);
    h2_.setIdentity(n, n);
    h2_.template selfadjointView<Eigen::Lower>().rankUpdate(p_.adjoint());
    llt1_.compute(h1_);
    llt2_.compute(h2_);

    lhs_ = llt1_.matrixU();
    lhs_.noalias() += a * (theta.adjoint() * p_.adjoint());
    lu_.compute(lhs_);
    check_condition(lu_);
    rhs_ = theta.adjoint();
    x_ = lu_.solve(rhs_);
    x_ = p_ + a * x_;
    theta = llt2_.matrixU().template solve<Eigen::OnTheRight>(x_);
  }

  // beta = 1, 4.  The driving block is diag(Q, 1) [[C, S], [S, -C]] diag(Q^#, 1)
  // with C = cos(theta) from the Jacobi ensemble of the truncated circular
  // ensemble, Q Haar and Q^# = Q^T (beta=1) or Q^D (beta=4).
  void structured_step(MatrixC& theta, int k, double a, Rng& rng)
  {
    const Eigen::Index p = static_cast<Eigen::Index>(m_) * n_;
    const double b = beta_.value();
    const VectorR lambda = sample_jacobi_ensemble(n_, b, 2.0 / b - 1.0, static_cast<double>(k - n_), rng);
    VectorR c(p), s(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      const double l = lambda(i / m_);
      c(i) = std::sqrt(l);
      s(i) = std::sqrt(1.0 - l);
    }
    const MatrixC q = haar_unitary(p, rng);

    lhs_ = theta.adjoint() * c.cast<cplx>().asDiagonal();
    lhs_ *= a;
    lhs_.diagonal().array() += 1.0;
    lu_.compute(lhs_);
    check_condition(lu_);
    rhs_ = theta.adjoint();
    x_ = lu_.solve(rhs_);
    x_ = (a * s).cast<cplx>().asDiagonal() * x_ * s.cast<cplx>().asDiagonal();
    x_.diagonal() += c.cast<cplx>();
    if (beta_.beta() == 1) {
      theta = q * x_ * q.transpose();
      theta = 0.5 * (theta + theta.transpose()).eval();
    } else {
      theta = q * x_ * symplectic_dual(q);
      theta = 0.5 * (theta + symplectic_dual(theta)).eval();
    }
  }

  // N = 1, beta = 2: the same recursion with scalars.
  cplx scalar_theta(int n_fict, double a, Rng& rng)
  {
    cplx theta = theta_direct(0, a, rng)(0, 0);
    for (int k = 1; k <= n_fict; ++k) {
      const cplx z = complex_normal(rng);
      const cplx p = z / std::sqrt(gamma_variate(static_cast<double>(k), rng));
      const double l = std::sqrt(1.0 + std::norm(p));
      const cplx lhs = l + a * std::conj(theta) * std::conj(p);
      theta = (p + a * std::conj(theta) / lhs) / l;
    }
    return theta;
  }

  static void check_condition(const Eigen::PartialPivLU<MatrixC>& lu)
  {
    const double rcond = lu.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : INFINITY;
    if (!(cond <= max_coupling_condition))
      fail(ErrorCode::ill_conditioned_coupling,
           "coupling step is numerically singular (condition estimate " + std::to_string(cond) + ")");
  }

  int n_;
  DysonClass beta_;
  int m_;
  MatrixC z_, bartlett_, p_, h1_, h2_, lhs_, rhs_, x_;
  Eigen::LLT<MatrixC> llt1_, llt2_;
  Eigen::PartialPivLU<MatrixC> lu_;
};

} // namespace wslab

#endif // WSLAB_COLLIGATION_HPP
