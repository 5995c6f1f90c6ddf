#pragma once

#include <utility>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hinf/types.hpp"

namespace hinf {

/// Hermitian matrix; H = H^* is enforced by symmetrization on construction.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const CMat& raw) {
    if (raw.rows() != raw.cols())
      throw DimensionError("HermitianMatrix requires a square matrix");
    m_ = 0.5 * (raw + raw.adjoint());
  }

  static HermitianMatrix zero(Eigen::Index k) {
    return HermitianMatrix(CMat::Zero(k, k));
  }

  static HermitianMatrix identity(Eigen::Index k) {
    return HermitianMatrix(CMat::Identity(k, k));
  }

  const CMat& mat() const { return m_; }
  Eigen::Index size() const { return m_.rows(); }

 private:
  CMat m_;
};

inline HermitianMatrix symmetrize(const CMat& m) { return HermitianMatrix(m); }

/// Real part of the Frobenius pairing <E, V> = Tr(E^* V); real when both
/// arguments are Hermitian.
inline double herm_inner(const HermitianMatrix& e, const HermitianMatrix& v) {
  return (e.mat().adjoint() * v.mat()).trace().real();
}

/// Matrix square root S with S S^* = H, via the Hermitian eigendecomposition
/// (not Cholesky) so that semidefinite inputs are tolerated. Eigenvalues in
/// [-tol, tol) are clipped to zero (the square root would otherwise amplify
/// eigenvalue noise into the numerical rank); anything below -tol is rejected.
inline CMat psd_sqrt(const HermitianMatrix& h, double tol) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h.mat());
  if (es.info() != Eigen::Success)
    throw NumericalError("psd_sqrt: eigendecomposition failed");
  RVec lambda = es.eigenvalues();
  if (lambda.size() > 0 && lambda.minCoeff() < -tol)
    throw NotPsdError("psd_sqrt: matrix has eigenvalue below -tol");
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) < tol) lambda(i) = 0.0;
  const RVec roots = lambda.cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Real-symmetric embedding of H = P + jQ as [[P, -Q], [Q, P]].
/// The embedding is PSD iff H is, and doubles the trace.
inline RMat embed_real(const HermitianMatrix& h) {
  const Eigen::Index k = h.size();
  const RMat p = h.mat().real();
  const RMat q = h.mat().imag();
  RMat out(2 * k, 2 * k);
  out.topLeftCorner(k, k) = p;
  out.topRightCorner(k, k) = -q;
  out.bottomLeftCorner(k, k) = q;
  out.bottomRightCorner(k, k) = p;
  return out;
}

/// Inverse of embed_real on possibly-noisy symmetric input: averages the
/// 2k x 2k matrix with its symplectic conjugate, which projects onto the
/// embedded subspace while preserving PSD-ness and Hermitian pairings.
inline HermitianMatrix deembed_real(const RMat& x) {
  if (x.rows() != x.cols() || x.rows() % 2 != 0)
    throw DimensionError("deembed_real requires an even square matrix");
  const Eigen::Index k = x.rows() / 2;
  const RMat p = 0.5 * (x.topLeftCorner(k, k) + x.bottomRightCorner(k, k));
  const RMat q = 0.5 * (x.bottomLeftCorner(k, k) - x.topRightCorner(k, k));
  return HermitianMatrix(p.cast<Complex>() + Complex(0, 1) * q.cast<Complex>());
}

/// Number of singular values above rel_tol * sigma_max (0 for a zero matrix).
inline int numerical_rank(const CMat& m, double rel_tol = kDefaultRankTol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<CMat> svd(m);
  const RVec sigma = svd.singularValues();
  const double top = sigma(0);
  if (top == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > rel_tol * top) ++rank;
  return rank;
}

/// Moore-Penrose pseudoinverse; singular values below rel_tol * sigma_max
/// are treated as zero.
inline CMat pinv(const CMat& m, double rel_tol = kDefaultRankTol) {
  if (m.rows() == 0 || m.cols() == 0) return CMat::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec sigma = svd.singularValues();
  const double top = sigma.size() > 0 ? sigma(0) : 0.0;
  RVec inv = RVec::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (top > 0.0 && sigma(i) > rel_tol * top) inv(i) = 1.0 / sigma(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace hinf
