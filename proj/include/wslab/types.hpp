#ifndef WSLAB_TYPES_HPP
#define WSLAB_TYPES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace wslab {

using cplx = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using VectorR = Eigen::VectorXd;

/// Dyson symmetry index: 1 orthogonal, 2 unitary, 4 symplectic.
class DysonClass {
public:
  constexpr DysonClass() = default;
  explicit DysonClass(int beta) : beta_(beta)
  {
    require(beta == 1 || beta == 2 || beta == 4, ErrorCode::invalid_argument,
            "beta must be 1, 2 or 4 (got " + std::to_string(beta) + ")");
  }

  constexpr int beta() const noexcept { return beta_; }
  constexpr double value() const noexcept { return static_cast<double>(beta_); }
  /// Complex dimension of one channel in the matrix embedding (2 for quaternions).
  constexpr int multiplicity() const noexcept { return beta_ == 4 ? 2 : 1; }

  friend constexpr bool operator==(DysonClass a, DysonClass b) noexcept { return a.beta_ == b.beta_; }

private:
  int beta_ = 2;
};

enum class Structure { general, unitary, symmetric_unitary, self_dual_unitary, hermitian };

inline Structure unitary_structure(DysonClass beta)
{
  switch (beta.beta()) {
    case 1: return Structure::symmetric_unitary;
    case 4: return Structure::self_dual_unitary;
    default: return Structure::unitary;
  }
}

/// Symplectic unit J = 1_n (x) [[0, 1], [-1, 0]] in the 2n complex embedding.
inline MatrixC symplectic_unit(Eigen::Index n)
{
  MatrixC j = MatrixC::Zero(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    j(2 * k, 2 * k + 1) = 1.0;
    j(2 * k + 1, 2 * k) = -1.0;
  }
  return j;
}

/// Quaternion dual M^D = J M^T J^T, evaluated without forming J.
inline MatrixC symplectic_dual(const MatrixC& m)
{
  const Eigen::Index n = m.rows() / 2;
  MatrixC d(m.cols(), m.rows());
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      // block (a,b) of the dual is adj-like transform of block (b,a)
      const cplx p = m(2 * b, 2 * a), q = m(2 * b, 2 * a + 1);
      const cplx r = m(2 * b + 1, 2 * a), s = m(2 * b + 1, 2 * a + 1);
      d(2 * a, 2 * b) = s;
      d(2 * a, 2 * b + 1) = -q;
      d(2 * a + 1, 2 * b) = -r;
      d(2 * a + 1, 2 * b + 1) = p;
    }
  }
  return d;
}

inline double max_norm(const MatrixC& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double unitarity_residual(const MatrixC& m)
{
  return max_norm(m.adjoint() * m - MatrixC::Identity(m.cols(), m.cols()));
}

inline double symmetry_residual(const MatrixC& m) { return max_norm(m - m.transpose()); }

inline double self_duality_residual(const MatrixC& m) { return max_norm(m - symplectic_dual(m)); }

inline double hermiticity_residual(const MatrixC& m) { return max_norm(m - m.adjoint()); }

/// Dense complex square matrix tagged with the structure it claims to have.
struct ComplexMatrix {
  MatrixC entries;
  Structure structure = Structure::general;

  Eigen::Index dim() const { return entries.rows(); }

  /// Largest violation of the claimed structure (0 for general matrices).
  double structure_residual() const
  {
    switch (structure) {
      case Structure::general: return 0.0;
      case Structure::unitary: return unitarity_residual(entries);
      case Structure::symmetric_unitary:
        return std::max(unitarity_residual(entries), symmetry_residual(entries));
      case Structure::self_dual_unitary:
        return std::max(unitarity_residual(entries), self_duality_residual(entries));
      case Structure::hermitian: return hermiticity_residual(entries);
    }
    return 0.0;
  }

  bool satisfies_structure(double tol = 1e-10) const { return structure_residual() < tol; }
};

/// Sorted rescaled inverse proper delays and the rescaled Wigner time.
struct GammaSpectrum {
  double gamma = 0.0;
  std::vector<double> values;
  double s = 0.0;
  int saturated = 0;

  std::size_t size() const { return values.size(); }
};

inline double rescaled_wigner_time(const GammaSpectrum& spectrum)
{
  double acc = 0.0;
  for (double g : spectrum.values) acc += 1.0 / g;
  return spectrum.values.empty() ? 0.0 : acc / static_cast<double>(spectrum.values.size());
}

/// Cavity with N ideal channels and Nphi weakly coupled absorbing channels.
struct CavityModel {
  int n_open = 1;
  int n_fict = 50;
  double gamma = 1.0;
  DysonClass beta{2};

  double tunnel_probability() const { return gamma * n_open / static_cast<double>(n_fict); }

  static int default_n_fict(int n_open, double gamma)
  {
    const double by_gamma = std::ceil(10.0 * gamma * n_open);
    return static_cast<int>(std::max<double>(50.0 * n_open, by_gamma));
  }

  static CavityModel with_default_channels(int n_open, double gamma, DysonClass beta)
  {
    return CavityModel{n_open, default_n_fict(n_open, gamma), gamma, beta};
  }

  void validate() const
  {
    require(n_open >= 1, ErrorCode::invalid_model, "n_open must be at least 1");
    require(n_fict > n_open, ErrorCode::invalid_model, "n_fict must exceed n_open");
    require(std::isfinite(gamma) && gamma >= 0.0, ErrorCode::invalid_model, "gamma must be finite and non-negative");
    const double t = tunnel_probability();
    require(t < 1.0, ErrorCode::invalid_model,
            "tunnel probability gamma*N/Nphi = " + std::to_string(t) + " must be below 1");
  }
};

} // namespace wslab

#endif // WSLAB_TYPES_HPP
