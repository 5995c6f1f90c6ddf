#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hinf/hermitian.hpp"
#include "hinf/sdp_build.hpp"
#include "hinf/sdp_solver.hpp"
#include "hinf/state_space.hpp"
#include "hinf/types.hpp"

namespace hinf {

/// Worst-case sinusoid: w_k = e^{j theta k} w_opt drives the output power to
/// mu_opt, with x_opt the corresponding steady state
/// (e^{j theta} x_opt = A x_opt + B w_opt) and ||w_opt|| = 1.
struct RankOneCertificate {
  CVec x_opt;
  CVec w_opt;
  double theta_opt = 0.0;
  double mu_opt = 0.0;
};

/// One rank-one summand of a feasible lifted matrix: V_k = v v^*, with input
/// energy p_k (trace of the w-block) and output energy mu_k.
struct RankOnePiece {
  HermitianMatrix V;
  double p = 0.0;
  double mu = 0.0;
  CVec factor;  // v with V = v v^*
};

struct DilationOptions {
  double pre_tol = kDilationPreTol;
  double rank_tol = kDefaultRankTol;
};

namespace detail {

/// Cayley transform (I + D)(I - D)^{-1}, evaluated as a right division.
inline CMat cayley(const CMat& delta) {
  const Eigen::Index c = delta.rows();
  const CMat num = CMat::Identity(c, c) + delta;
  const CMat den = CMat::Identity(c, c) - delta;
  Eigen::JacobiSVD<CMat> svd(den);
  const RVec sigma = svd.singularValues();
  if (sigma(0) == 0.0 || sigma(sigma.size() - 1) < 1e-12 * sigma(0))
    throw DegenerateDilationError("dilation: (I - Delta) is numerically singular");
  Eigen::PartialPivLU<CMat> lu(den.adjoint());
  return lu.solve(num.adjoint()).adjoint();
}

inline void check_equal_gram(const CMat& f, const CMat& g, double pre_tol) {
  if (f.rows() != g.rows() || f.cols() != g.cols())
    throw DimensionError("dilation: F and G must have equal shape");
  const CMat ff = f * f.adjoint();
  const CMat gg = g * g.adjoint();
  const double scale = std::max(1.0, ff.norm());
  if ((ff - gg).norm() > pre_tol * scale)
    throw InputError("dilation: F F^* = G G^* violated beyond tolerance");
}

/// The Cayley construction cannot reach eigenphase pi exactly (e.g. F = -G);
/// such inputs slip through the Gram precondition, so the product is checked.
inline void check_dilation_fit(const CMat& f, const CMat& g, const CMat& u) {
  if ((f - g * u).norm() > 1e-4 * std::max(1.0, g.norm()))
    throw DegenerateDilationError("dilation: U does not reproduce F = G U");
}

}  // namespace detail

/// Unitary U with F = G U, given F F^* = G G^*.
/// Steps: P = F+G, Q = F-G; SVD of P and its numerical rank r;
/// [R S] = [I_r 0] V_P^* P^+ Q V_P; Delta = V_P [R S; -S^* 0] V_P^*;
/// U = (I + Delta)(I - Delta)^{-1}.
inline CMat unitary_dilation(const CMat& f, const CMat& g,
                             const DilationOptions& options = {}) {
  detail::check_equal_gram(f, g, options.pre_tol);
  const Eigen::Index c = f.cols();
  const CMat p = f + g;
  const CMat q = f - g;

  Eigen::JacobiSVD<CMat> svd(p, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec sigma = svd.singularValues();
  const double top = sigma.size() > 0 ? sigma(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (top > 0.0 && sigma(i) > options.rank_tol * top) ++r;

  const CMat vp = svd.matrixV();
  CMat delta = CMat::Zero(c, c);
  if (r > 0) {
    CMat pinv_p = vp.leftCols(r) *
                  sigma.head(r).cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>() *
                  svd.matrixU().leftCols(r).adjoint();
    const CMat rs = (vp.adjoint() * pinv_p * q * vp).topRows(r);
    CMat inner = CMat::Zero(c, c);
    inner.topRows(r) = rs;
    inner.bottomLeftCorner(c - r, r) = -rs.rightCols(c - r).adjoint();
    delta = vp * inner * vp.adjoint();
  }
  const CMat u = detail::cayley(delta);
  detail::check_dilation_fit(f, g, u);
  return u;
}

/// Unitary U with F = G U and U + U^* >= 2 cos(theta0) I, given
/// F F^* = G G^* and F G^* + G F^* >= 2 cos(theta0) F F^*. The eigenphases
/// of U are confined to [-theta0, theta0].
inline CMat unitary_dilation_band(const CMat& f, const CMat& g, double theta0,
                                  const DilationOptions& options = {}) {
  detail::check_equal_gram(f, g, options.pre_tol);
  const double cos0 = std::cos(theta0);
  {
    const CMat coupling = f * g.adjoint() + g * f.adjoint() -
                          2.0 * cos0 * (f * f.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(
        0.5 * (coupling + coupling.adjoint()), Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, (f * f.adjoint()).norm());
    if (es.eigenvalues().size() > 0 &&
        es.eigenvalues().minCoeff() < -options.pre_tol * scale)
      throw InputError(
          "band dilation: F G^* + G F^* >= 2 cos(theta0) F F^* violated");
  }

  const double mu = (1.0 - cos0) / (1.0 + cos0);
  const double sqrt_mu = std::sqrt(mu);
  const Eigen::Index c = f.cols();
  const CMat p = sqrt_mu * (f + g);
  const CMat q = f - g;

  Eigen::JacobiSVD<CMat> svd(p, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec sigma = svd.singularValues();
  const double top = sigma.size() > 0 ? sigma(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (top > 0.0 && sigma(i) > options.rank_tol * top) ++r;

  const CMat vp = svd.matrixV();
  CMat delta = CMat::Zero(c, c);
  if (r > 0) {
    CMat pinv_p = vp.leftCols(r) *
                  sigma.head(r).cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>() *
                  svd.matrixU().leftCols(r).adjoint();
    const CMat rs = (vp.adjoint() * pinv_p * q * vp).topRows(r);
    const CMat rr = rs.leftCols(r);
    const CMat ss = rs.rightCols(c - r);
    CMat inner = CMat::Zero(c, c);
    inner.topRows(r) = rs;
    inner.bottomLeftCorner(c - r, r) = -ss.adjoint();
    inner.bottomRightCorner(c - r, c - r) =
        -ss.adjoint() * rr * pinv(CMat::Identity(r, r) + rr * rr, options.rank_tol) * ss;
    delta = vp * inner * vp.adjoint();
  }
  const CMat u = detail::cayley(sqrt_mu * delta);
  detail::check_dilation_fit(f, g, u);
  return u;
}

namespace detail {

/// Nearest unitary matrix (polar factor).
inline CMat polar_unitary(const CMat& u) {
  Eigen::JacobiSVD<CMat> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace detail

/// Split a feasible lifted matrix into rank-one feasible pieces
/// V = sum_k V_k via the unitary dilation of F = [I 0] V^{1/2} against
/// G = [A B] V^{1/2}. High bands reuse the low-band dilation through the
/// substitution (G, theta0) -> (-G, pi - theta0); Middle bands rotate G by
/// the modulation shift. The pieces are built from an orthonormal eigenbasis
/// of U, so they sum back to V at machine precision.
inline std::vector<RankOnePiece> rank_one_split(const HermitianMatrix& v,
                                                const StateSpace& sys,
                                                const FrequencyBand& band) {
  const Eigen::Index k = sys.n() + sys.m();
  if (v.size() != k)
    throw DimensionError("rank_one_split: V must be (n+m) x (n+m)");
  const FrequencyBand b = band.canonical();

  const double v_scale = v.mat().norm();
  std::vector<RankOnePiece> pieces;
  if (v_scale == 0.0) return pieces;

  // Zero out solver-noise eigenvalues before factoring: directions at the
  // noise floor would otherwise be inverted inside the dilation and corrupt
  // the pieces. The truncation moves V by at most k * 1e-9 * ||V||, inside
  // the conservation tolerance.
  Eigen::SelfAdjointEigenSolver<CMat> v_eig(v.mat());
  if (v_eig.info() != Eigen::Success)
    throw NumericalError("rank_one_split: eigendecomposition failed");
  const double lam_max = v_eig.eigenvalues().maxCoeff();
  if (lam_max < -1e-7 * v_scale)
    throw NotPsdError("rank_one_split: V is not PSD within tolerance");
  RVec lam = v_eig.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam(i) < 1e-9 * lam_max) lam(i) = 0.0;
  const CMat sqrt_v = v_eig.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                      v_eig.eigenvectors().adjoint();
  const CMat f = sys.selector_block() * sqrt_v;
  const CMat g = sys.dynamics_block() * sqrt_v;

  CMat u;
  switch (b.kind()) {
    case FrequencyBand::Kind::Full:
      u = unitary_dilation(f, g);
      break;
    case FrequencyBand::Kind::Low:
      u = unitary_dilation_band(f, g, b.theta0());
      break;
    case FrequencyBand::Kind::High:
      u = -unitary_dilation_band(f, -g, std::numbers::pi - b.theta0());
      break;
    case FrequencyBand::Kind::Middle: {
      const double theta_c = 0.5 * (b.theta1() + b.theta2());
      const double theta0 = 0.5 * (b.theta2() - b.theta1());
      u = unitary_dilation_band(f, std::polar(1.0, -theta_c) * g, theta0);
      break;
    }
  }

  // Schur vectors of the polar-projected U form an exactly orthonormal
  // eigenbasis, so conservation of V survives any dilation noise.
  Eigen::ComplexSchur<CMat> schur(detail::polar_unitary(u));
  if (schur.info() != Eigen::Success)
    throw NumericalError("rank_one_split: Schur decomposition failed");

  const CMat basis = schur.matrixU();
  const CMat output = sys.output_block();
  pieces.reserve(static_cast<size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    RankOnePiece piece;
    piece.factor = sqrt_v * basis.col(i);
    piece.V = HermitianMatrix(piece.factor * piece.factor.adjoint());
    piece.p = piece.factor.tail(sys.m()).squaredNorm();
    piece.mu = (output * piece.factor).squaredNorm();
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

/// Pick the piece maximizing mu_k / p_k among pieces with usable input
/// energy and rescale it to unit input power: V_hat = V_J / p_J. Candidates
/// are tried in decreasing ratio order and must satisfy the lifted equality
/// after rescaling; pieces assembled from solver noise have energy above
/// kMinPieceEnergy but inflated ratios, and fail that check by orders of
/// magnitude.
inline HermitianMatrix select_best(const std::vector<RankOnePiece>& pieces,
                                   const StateSpace& sys) {
  std::vector<size_t> order;
  for (size_t i = 0; i < pieces.size(); ++i)
    if (pieces[i].p > kMinPieceEnergy) order.push_back(i);
  if (order.empty())
    throw DegenerateCertificateError(
        "select_best: no piece has usable input energy");
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const double ra = pieces[a].mu / pieces[a].p;
    const double rb = pieces[b].mu / pieces[b].p;
    if (ra != rb) return ra > rb;
    return a < b;
  });

  const CMat f = sys.selector_block();
  const CMat g = sys.dynamics_block();
  for (size_t idx : order) {
    const CVec scaled = pieces[idx].factor / std::sqrt(pieces[idx].p);
    const CMat v_hat = scaled * scaled.adjoint();
    const double residual = (f * v_hat * f.adjoint() - g * v_hat * g.adjoint()).norm();
    if (residual <= kCertificateTol * (1.0 + v_hat.norm()))
      return HermitianMatrix(v_hat);
  }
  throw DegenerateCertificateError(
      "select_best: no piece is feasible after rescaling");
}

/// Factor a rank-one feasible V_hat = v v^*, split v into (x_opt, w_opt),
/// normalize ||w_opt|| = 1 and read the frequency off the phase of
/// <x_opt, A x_opt + B w_opt>. For pure feedthrough optima (x_opt ~ 0) every
/// frequency is optimal and 0 is returned by convention.
inline RankOneCertificate extract_input(const HermitianMatrix& v_hat,
                                        const StateSpace& sys,
                                        double tol_cert = kCertificateTol) {
  if (v_hat.size() != sys.n() + sys.m())
    throw DimensionError("extract_input: V must be (n+m) x (n+m)");
  if (numerical_rank(v_hat.mat(), 1e-6) != 1)
    throw InputError("extract_input: V must have numerical rank one");

  Eigen::SelfAdjointEigenSolver<CMat> es(v_hat.mat());
  const Eigen::Index last = v_hat.size() - 1;
  const double lambda = es.eigenvalues()(last);
  if (lambda <= 0.0)
    throw InputError("extract_input: V has no positive eigenvalue");
  CVec v = std::sqrt(lambda) * es.eigenvectors().col(last);

  const double w_norm = v.tail(sys.m()).norm();
  if (w_norm <= 1e-12 * v.norm())
    throw DegenerateCertificateError(
        "extract_input: input block of the certificate vanishes");
  v /= w_norm;

  // Deterministic global phase: largest input component made real positive.
  Eigen::Index pivot;
  v.tail(sys.m()).cwiseAbs().maxCoeff(&pivot);
  const Complex pv = v(sys.n() + pivot);
  if (std::abs(pv) > 0.0) v *= std::conj(pv) / std::abs(pv);

  RankOneCertificate cert;
  cert.x_opt = v.head(sys.n());
  cert.w_opt = v.tail(sys.m());

  const CVec advanced = sys.A() * cert.x_opt + sys.B() * cert.w_opt;
  const double x_norm = cert.x_opt.norm();
  if (x_norm > 1e-7 * v.norm())
    cert.theta_opt = std::arg(cert.x_opt.dot(advanced));
  else
    cert.theta_opt = 0.0;
  cert.mu_opt = (sys.C() * cert.x_opt + sys.D() * cert.w_opt).squaredNorm();

  const double residual =
      (std::polar(1.0, cert.theta_opt) * cert.x_opt - advanced).norm();
  if (residual > tol_cert * (cert.x_opt.norm() + cert.w_opt.norm()))
    throw ExtractionError("extract_input: certificate dynamics residual too large");
  return cert;
}

struct AnalyzeSettings {
  SolverSettings solver;
  double cert_tol = kCertificateTol;
  double band_tol = 1e-4;
};

struct AnalysisResult {
  double norm = 0.0;
  RankOneCertificate certificate;
  SolverSolution solution;
};

namespace detail {

/// Steady-state certificate at theta = 0 for systems with (numerically) zero
/// norm; any input is worst-case there.
inline RankOneCertificate zero_norm_certificate(const StateSpace& sys) {
  RankOneCertificate cert;
  cert.w_opt = CVec::Zero(sys.m());
  cert.w_opt(0) = 1.0;
  const CMat resolvent = CMat::Identity(sys.n(), sys.n()) - sys.A();
  cert.x_opt = Eigen::PartialPivLU<CMat>(resolvent).solve(sys.B() * cert.w_opt);
  cert.theta_opt = 0.0;
  cert.mu_opt = (sys.C() * cert.x_opt + sys.D() * cert.w_opt).squaredNorm();
  return cert;
}

}  // namespace detail

/// End-to-end pipeline: build and solve the lifted SDP for the band, recover
/// a rank-one optimal solution (directly if V_opt is already rank one,
/// otherwise via split + selection) and extract the worst-case sinusoid.
inline AnalysisResult analyze(const StateSpace& sys, const FrequencyBand& band,
                              const AnalyzeSettings& settings = {}) {
  require_schur_stable(sys);
  const FrequencyBand b = band.canonical();

  AnalysisResult result;
  result.solution = solve(build_primal(sys, b), settings.solver);
  if (result.solution.status != SolverStatus::Optimal &&
      result.solution.status != SolverStatus::NearOptimal)
    throw SolverError(std::string("analyze: SDP solve failed with status ") +
                      to_string(result.solution.status));

  const double objective = std::max(result.solution.objective, 0.0);
  result.norm = std::sqrt(objective);

  const double output_scale = sys.output_block().squaredNorm();
  if (objective <= 1e-10 * std::max(1.0, output_scale)) {
    result.certificate = detail::zero_norm_certificate(sys);
    return result;
  }

  HermitianMatrix v_hat;
  if (numerical_rank(result.solution.V.mat(), 1e-6) == 1) {
    // Rank-one optimum: no dilation machinery needed.
    Eigen::SelfAdjointEigenSolver<CMat> es(result.solution.V.mat());
    const Eigen::Index last = result.solution.V.size() - 1;
    const CVec v = std::sqrt(std::max(es.eigenvalues()(last), 0.0)) *
                   es.eigenvectors().col(last);
    const double p = v.tail(sys.m()).squaredNorm();
    if (p <= kMinPieceEnergy)
      throw DegenerateCertificateError("analyze: optimal V has no input energy");
    const CVec scaled = v / std::sqrt(p);
    v_hat = HermitianMatrix(scaled * scaled.adjoint());
  } else {
    v_hat = select_best(rank_one_split(result.solution.V, sys, b), sys);
  }

  result.certificate = extract_input(v_hat, sys, settings.cert_tol);
  if (!b.contains(result.certificate.theta_opt, settings.band_tol))
    throw ExtractionError("analyze: extracted frequency lies outside the band");
  return result;
}

}  // namespace hinf
