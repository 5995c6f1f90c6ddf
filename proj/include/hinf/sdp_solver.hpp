#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hinf/hermitian.hpp"
#include "hinf/sdp_build.hpp"
#include "hinf/types.hpp"

namespace hinf {

struct SolverSettings {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iters = 200;
  Eigen::Index size_cap = 200;
};

enum class SolverStatus { Optimal, MaxIters, Infeasible, Unbounded, NearOptimal };

inline const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Optimal: return "Optimal";
    case SolverStatus::MaxIters: return "MaxIters";
    case SolverStatus::Infeasible: return "Infeasible";
    case SolverStatus::Unbounded: return "Unbounded";
    case SolverStatus::NearOptimal: return "NearOptimal";
  }
  return "Unknown";
}

struct SolverResiduals {
  double primal_eq = 0.0;       // relative equality residual
  double psd_violation = 0.0;   // most negative eigenvalue of V before clipping
  double duality_gap = 0.0;     // |objective - dual_objective|
};

struct SolverSolution {
  HermitianMatrix V;
  double objective = 0.0;
  double dual_objective = 0.0;
  SolverStatus status = SolverStatus::MaxIters;
  SolverResiduals residuals;
  int iterations = 0;
  std::vector<double> gap_history;  // relative duality gap per iteration
};

struct DualSolution {
  double lambda = 0.0;
  HermitianMatrix P;
  std::optional<HermitianMatrix> Q;
  SolverStatus status = SolverStatus::MaxIters;
  bool not_attained = false;  // ||P|| escaped beyond kDualNormCap
  double p_norm = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
};

namespace detail {

using Blocks = std::vector<RMat>;

inline Blocks zero_blocks(const std::vector<Eigen::Index>& sizes) {
  Blocks out;
  out.reserve(sizes.size());
  for (auto s : sizes) out.push_back(RMat::Zero(s, s));
  return out;
}

inline Blocks scaled_identity_blocks(const std::vector<Eigen::Index>& sizes,
                                     double scale) {
  Blocks out;
  out.reserve(sizes.size());
  for (auto s : sizes) out.push_back(scale * RMat::Identity(s, s));
  return out;
}

inline double blocks_dot(const Blocks& a, const Blocks& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    sum += a[i].cwiseProduct(b[i]).sum();
  return sum;
}

inline double blocks_norm(const Blocks& a) {
  double sum = 0.0;
  for (const auto& blk : a) sum += blk.squaredNorm();
  return std::sqrt(sum);
}

/// Real block-diagonal SDP in primal standard form:
///   min <C, X>  s.t.  <A_i, X> = b_i,  X >= 0,
/// with dual  max b'y  s.t.  Z = C - sum y_i A_i >= 0.
struct StdProblem {
  std::vector<Eigen::Index> block_sizes;
  Blocks C;
  std::vector<Blocks> A;
  RVec b;
};

struct IpmOptions {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iters = 200;
};

struct IpmResult {
  Blocks X;
  RVec y;
  double pobj = 0.0;
  double dobj = 0.0;
  double rel_primal = 1.0;
  double rel_dual = 1.0;
  double gap_abs = 0.0;
  SolverStatus status = SolverStatus::MaxIters;
  int iterations = 0;
  std::vector<double> gap_history;
};

inline RMat sym_part(const RMat& m) { return 0.5 * (m + m.transpose()); }

/// Inverse of a (nominally) PD block; falls back to an eigenvalue-floored
/// inverse when the Cholesky factorization fails near the boundary.
inline RMat pd_inverse(const RMat& s) {
  Eigen::LLT<RMat> llt(s);
  if (llt.info() == Eigen::Success)
    return llt.solve(RMat::Identity(s.rows(), s.cols()));
  Eigen::SelfAdjointEigenSolver<RMat> es(s);
  RVec lam = es.eigenvalues();
  const double top = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  const double floor = 1e-14 * top;
  RVec inv(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    inv(i) = 1.0 / std::max(lam(i), floor);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

inline bool is_pd(const RMat& s) {
  Eigen::LLT<RMat> llt(s);
  return llt.info() == Eigen::Success;
}

/// Largest a >= 0 with S + a dS >= 0, via the smallest eigenvalue of
/// L^{-1} dS L^{-T} where S = L L^T.
inline double max_step_length(const RMat& s, const RMat& ds) {
  const double inf = std::numeric_limits<double>::infinity();
  if (s.rows() == 0) return inf;
  Eigen::LLT<RMat> llt(s);
  RMat w;
  if (llt.info() == Eigen::Success) {
    RMat half = llt.matrixL().solve(ds);
    w = llt.matrixL().solve(half.transpose()).transpose();
  } else {
    RMat sinv = pd_inverse(s);
    w = sinv * ds;
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(sym_part(w),
                                         Eigen::EigenvaluesOnly);
  const double lam_min = es.eigenvalues().minCoeff();
  if (lam_min >= -1e-300) return inf;
  return -1.0 / lam_min;
}

inline double blocks_max_step(const Blocks& s, const Blocks& ds) {
  double alpha = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < s.size(); ++i)
    alpha = std::min(alpha, max_step_length(s[i], ds[i]));
  return alpha;
}

/// Primal-dual path-following interior point method with HKM scaling and a
/// Mehrotra predictor-corrector step. Deterministic: no randomized pivoting.
inline IpmResult ipm_solve(const StdProblem& prob, const IpmOptions& opt) {
  const size_t nb = prob.block_sizes.size();
  const Eigen::Index np = prob.b.size();
  double total_dim = 0.0;
  for (auto s : prob.block_sizes) total_dim += static_cast<double>(s);

  // Per-constraint active blocks; zero blocks are skipped in Schur assembly.
  std::vector<std::vector<size_t>> active(static_cast<size_t>(np));
  for (Eigen::Index i = 0; i < np; ++i)
    for (size_t blk = 0; blk < nb; ++blk)
      if (prob.A[static_cast<size_t>(i)][blk].squaredNorm() > 0.0)
        active[static_cast<size_t>(i)].push_back(blk);

  auto apply_A = [&](const Blocks& x) {
    RVec r(np);
    for (Eigen::Index i = 0; i < np; ++i) {
      double sum = 0.0;
      for (size_t blk : active[static_cast<size_t>(i)])
        sum += prob.A[static_cast<size_t>(i)][blk].cwiseProduct(x[blk]).sum();
      r(i) = sum;
    }
    return r;
  };
  auto add_At = [&](const RVec& y, Blocks& out, double scale) {
    for (Eigen::Index i = 0; i < np; ++i) {
      const double c = scale * y(i);
      if (c == 0.0) continue;
      for (size_t blk : active[static_cast<size_t>(i)])
        out[blk] += c * prob.A[static_cast<size_t>(i)][blk];
    }
  };

  const double norm_c = blocks_norm(prob.C);
  const double norm_b = prob.b.norm();
  const double norm_b_inf = np > 0 ? prob.b.cwiseAbs().maxCoeff() : 0.0;
  double max_a = 0.0;
  for (const auto& ai : prob.A) max_a = std::max(max_a, blocks_norm(ai));

  const double xi = std::max({10.0, norm_c, max_a, norm_b_inf});
  Blocks X = scaled_identity_blocks(prob.block_sizes, xi);
  Blocks Z = scaled_identity_blocks(prob.block_sizes, xi);
  RVec y = RVec::Zero(np);

  IpmResult result;
  result.gap_history.reserve(static_cast<size_t>(opt.max_iters) + 1);
  double best_merit = std::numeric_limits<double>::infinity();
  int last_improvement = 0;
  bool diverge_primal_infeasible = false;
  bool diverge_unbounded = false;

  int iter = 0;
  for (; iter < opt.max_iters; ++iter) {
    const RVec rp = prob.b - apply_A(X);
    Blocks Rd = prob.C;
    for (size_t blk = 0; blk < nb; ++blk) Rd[blk] -= Z[blk];
    add_At(y, Rd, -1.0);

    const double pobj = blocks_dot(prob.C, X);
    const double dobj = prob.b.dot(y);
    const double rel_p = rp.norm() / (1.0 + norm_b);
    const double rel_d = blocks_norm(Rd) / (1.0 + norm_c);
    const double gap_abs = std::abs(pobj - dobj);
    result.gap_history.push_back(gap_abs /
                                 (1.0 + std::abs(pobj) + std::abs(dobj)));

    const double merit =
        std::max({rel_p / opt.tol_feas, rel_d / opt.tol_feas,
                  gap_abs / (opt.tol_gap * (1.0 + std::abs(pobj)))});
    if (merit < best_merit) {
      best_merit = merit;
      result.X = X;
      result.y = y;
      result.pobj = pobj;
      result.dobj = dobj;
      result.rel_primal = rel_p;
      result.rel_dual = rel_d;
      result.gap_abs = gap_abs;
      last_improvement = iter;
    }

    if (rel_p <= opt.tol_feas && rel_d <= opt.tol_feas &&
        gap_abs <= opt.tol_gap * (1.0 + std::abs(pobj))) {
      result.status = SolverStatus::Optimal;
      result.iterations = iter;
      return result;
    }
    diverge_primal_infeasible = dobj > 1e6 * (1.0 + norm_b_inf) && rel_d <= 1e-5;
    diverge_unbounded = pobj < -1e6 * (1.0 + norm_c) && rel_p <= 1e-5;
    if ((diverge_primal_infeasible && dobj > 1e10 * (1.0 + norm_b_inf)) ||
        (diverge_unbounded && pobj < -1e10 * (1.0 + norm_c)))
      break;
    if (iter - last_improvement > 30) break;  // stalled

    Blocks Zinv(nb);
    for (size_t blk = 0; blk < nb; ++blk) Zinv[blk] = pd_inverse(Z[blk]);
    const double mu = blocks_dot(X, Z) / total_dim;

    // Schur complement M_ij = <A_i, X A_j Z^{-1}>; symmetric PD for interior
    // iterates.
    std::vector<Blocks> W(static_cast<size_t>(np));
    for (Eigen::Index j = 0; j < np; ++j) {
      W[static_cast<size_t>(j)] = zero_blocks(prob.block_sizes);
      for (size_t blk : active[static_cast<size_t>(j)])
        W[static_cast<size_t>(j)][blk] =
            X[blk] * prob.A[static_cast<size_t>(j)][blk] * Zinv[blk];
    }
    RMat schur = RMat::Zero(np, np);
    for (Eigen::Index i = 0; i < np; ++i) {
      for (Eigen::Index j = i; j < np; ++j) {
        double sum = 0.0;
        for (size_t blk : active[static_cast<size_t>(i)])
          sum += prob.A[static_cast<size_t>(i)][blk]
                     .cwiseProduct(W[static_cast<size_t>(j)][blk])
                     .sum();
        schur(i, j) = sum;
        schur(j, i) = sum;
      }
    }

    Eigen::LLT<RMat> schur_llt;
    double ridge = 0.0;
    const double ridge_base =
        std::max(1e-30, 1e-14 * schur.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 12; ++attempt) {
      RMat reg = schur;
      if (ridge > 0.0) reg += ridge * RMat::Identity(np, np);
      schur_llt.compute(reg);
      if (schur_llt.info() == Eigen::Success) break;
      ridge = ridge == 0.0 ? ridge_base : ridge * 100.0;
    }
    if (schur_llt.info() != Eigen::Success) break;

    Blocks x_rd_z = zero_blocks(prob.block_sizes);
    for (size_t blk = 0; blk < nb; ++blk)
      x_rd_z[blk] = X[blk] * Rd[blk] * Zinv[blk];
    const RVec a_zinv = apply_A(Zinv);
    const RVec a_xrdz = apply_A(x_rd_z);

    // Predictor (affine scaling, sigma = 0).
    const RVec dy_aff = schur_llt.solve(prob.b + a_xrdz);
    Blocks dz_aff = Rd;
    add_At(dy_aff, dz_aff, -1.0);
    Blocks dx_aff(nb);
    for (size_t blk = 0; blk < nb; ++blk)
      dx_aff[blk] = sym_part(-X[blk] - X[blk] * dz_aff[blk] * Zinv[blk]);

    const double ap_aff = std::min(1.0, 0.98 * blocks_max_step(X, dx_aff));
    const double ad_aff = std::min(1.0, 0.98 * blocks_max_step(Z, dz_aff));
    double gap_now = blocks_dot(X, Z);
    double gap_aff = 0.0;
    for (size_t blk = 0; blk < nb; ++blk)
      gap_aff += (X[blk] + ap_aff * dx_aff[blk])
                     .cwiseProduct(Z[blk] + ad_aff * dz_aff[blk])
                     .sum();
    double sigma = 0.0;
    if (gap_now > 0.0)
      sigma = std::clamp(std::pow(gap_aff / gap_now, 3.0), 0.0, 1.0);

    // Corrector with Mehrotra second-order term.
    Blocks corr = zero_blocks(prob.block_sizes);
    for (size_t blk = 0; blk < nb; ++blk)
      corr[blk] = dx_aff[blk] * dz_aff[blk] * Zinv[blk];
    const RVec rhs = prob.b - sigma * mu * a_zinv + a_xrdz + apply_A(corr);
    const RVec dy = schur_llt.solve(rhs);
    Blocks dz = Rd;
    add_At(dy, dz, -1.0);
    Blocks dx(nb);
    for (size_t blk = 0; blk < nb; ++blk)
      dx[blk] = sym_part(sigma * mu * Zinv[blk] - X[blk] -
                         X[blk] * dz[blk] * Zinv[blk] - corr[blk]);

    double ap = std::min(1.0, 0.98 * blocks_max_step(X, dx));
    double ad = std::min(1.0, 0.98 * blocks_max_step(Z, dz));

    // Keep iterates strictly inside the cone.
    Blocks x_new(nb), z_new(nb);
    bool ok = false;
    for (int tries = 0; tries < 40; ++tries) {
      ok = true;
      for (size_t blk = 0; blk < nb && ok; ++blk) {
        x_new[blk] = X[blk] + ap * dx[blk];
        if (!is_pd(x_new[blk])) ok = false;
      }
      if (ok) break;
      ap *= 0.5;
    }
    if (!ok) break;
    ok = false;
    for (int tries = 0; tries < 40; ++tries) {
      ok = true;
      for (size_t blk = 0; blk < nb && ok; ++blk) {
        z_new[blk] = Z[blk] + ad * dz[blk];
        if (!is_pd(z_new[blk])) ok = false;
      }
      if (ok) break;
      ad *= 0.5;
    }
    if (!ok) break;
    if (ap < 1e-12 && ad < 1e-12) break;

    X = std::move(x_new);
    Z = std::move(z_new);
    y += ad * dy;
  }

  result.iterations = iter;
  if (diverge_primal_infeasible)
    result.status = SolverStatus::Infeasible;
  else if (diverge_unbounded)
    result.status = SolverStatus::Unbounded;
  else if (best_merit <= 1.0)
    result.status = SolverStatus::Optimal;
  else if (best_merit <= 1e3)
    result.status = SolverStatus::NearOptimal;
  else
    result.status = SolverStatus::MaxIters;
  return result;
}

/// Scalarize one Hermitian entry pairing into equality rows shared between
/// the lifted variable block and an optional slack PSD block.
struct PrimalTranslation {
  StdProblem prob;
  Eigen::Index herm_dim = 0;
};

inline PrimalTranslation translate_primal(const ConicProblem& problem) {
  PrimalTranslation tr;
  tr.herm_dim = problem.dim;

  std::vector<Eigen::Index>& sizes = tr.prob.block_sizes;
  sizes.push_back(2 * problem.dim);  // embedded V
  std::vector<size_t> ineq_block, side_block;
  for (size_t i = 0; i < problem.inequalities.size(); ++i) {
    ineq_block.push_back(sizes.size());
    sizes.push_back(1);
  }
  for (const auto& side : problem.psd_side) {
    side_block.push_back(sizes.size());
    sizes.push_back(2 * side.side_size);
  }

  tr.prob.C = zero_blocks(sizes);
  tr.prob.C[0] = -0.5 * embed_real(problem.cost);  // internal min form

  std::vector<double> rhs;
  auto add_row = [&](Blocks&& row, double b) {
    tr.prob.A.push_back(std::move(row));
    rhs.push_back(b);
  };

  for (const auto& eq : problem.equalities) {
    Blocks row = zero_blocks(sizes);
    row[0] = 0.5 * embed_real(eq.coeff);
    add_row(std::move(row), eq.rhs);
  }
  for (size_t i = 0; i < problem.inequalities.size(); ++i) {
    Blocks row = zero_blocks(sizes);
    row[0] = 0.5 * embed_real(problem.inequalities[i].coeff);
    row[ineq_block[i]](0, 0) = 1.0;
    add_row(std::move(row), problem.inequalities[i].rhs);
  }
  for (size_t s = 0; s < problem.psd_side.size(); ++s) {
    const auto& side = problem.psd_side[s];
    const Eigen::Index q = side.side_size;
    const double slack_sign = side.negative ? 1.0 : -1.0;  // expr -+ S = 0
    for (Eigen::Index i = 0; i < q; ++i) {
      for (Eigen::Index j = i; j < q; ++j) {
        const CMat k = side_entry_coeff(side, i, j);
        CMat unit = CMat::Zero(q, q);
        if (i == j) {
          unit(i, i) = 1.0;
          Blocks row = zero_blocks(sizes);
          row[0] = 0.5 * embed_real(symmetrize(k));
          row[side_block[s]] =
              slack_sign * 0.5 * embed_real(HermitianMatrix(unit));
          add_row(std::move(row), 0.0);
        } else {
          unit(i, j) = 0.5;
          unit(j, i) = 0.5;
          Blocks row_re = zero_blocks(sizes);
          row_re[0] = 0.5 * embed_real(symmetrize(k));
          row_re[side_block[s]] =
              slack_sign * 0.5 * embed_real(HermitianMatrix(unit));
          add_row(std::move(row_re), 0.0);

          CMat unit_im = CMat::Zero(q, q);
          unit_im(i, j) = Complex(0, 0.5);
          unit_im(j, i) = Complex(0, -0.5);
          Blocks row_im = zero_blocks(sizes);
          row_im[0] = 0.5 * embed_real(symmetrize(Complex(0, 1) * k));
          row_im[side_block[s]] =
              slack_sign * 0.5 * embed_real(HermitianMatrix(unit_im));
          add_row(std::move(row_im), 0.0);
        }
      }
    }
  }
  tr.prob.b = Eigen::Map<RVec>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return tr;
}

inline SolverStatus classify(const IpmResult& res, const SolverSettings& settings) {
  if (res.status == SolverStatus::Infeasible ||
      res.status == SolverStatus::Unbounded)
    return res.status;
  const double gap_bound = settings.tol_gap * (1.0 + std::abs(res.pobj));
  if (res.rel_primal <= settings.tol_feas && res.rel_dual <= settings.tol_feas &&
      res.gap_abs <= gap_bound)
    return SolverStatus::Optimal;
  if (res.rel_primal <= 1e3 * settings.tol_feas &&
      res.rel_dual <= 1e3 * settings.tol_feas && res.gap_abs <= 1e3 * gap_bound)
    return SolverStatus::NearOptimal;
  return SolverStatus::MaxIters;
}

}  // namespace hinf::detail

/// Solve the lifted primal SDP. The Hermitian variable is embedded into a
/// real symmetric cone, inequalities get scalar slacks and PSD side
/// constraints get their own slack cone block. The returned V is
/// symmetrized, de-embedded and eigenvalue-clipped.
inline SolverSolution solve(const ConicProblem& problem,
                            const SolverSettings& settings = {}) {
  if (problem.dim > settings.size_cap)
    throw SolverError("problem dimension exceeds the configured size cap");
  if (problem.dim <= 0) throw InputError("solve: empty problem");

  detail::PrimalTranslation tr = detail::translate_primal(problem);
  detail::IpmOptions opt{settings.tol_feas, settings.tol_gap, settings.max_iters};
  detail::IpmResult res = detail::ipm_solve(tr.prob, opt);

  SolverSolution sol;
  sol.status = detail::classify(res, settings);
  sol.iterations = res.iterations;
  sol.gap_history = std::move(res.gap_history);
  sol.objective = -res.pobj;
  sol.dual_objective = -res.dobj;
  sol.residuals.primal_eq = res.rel_primal;
  sol.residuals.duality_gap = res.gap_abs;

  if (res.X.empty()) {
    sol.V = HermitianMatrix::zero(problem.dim);
    return sol;
  }
  HermitianMatrix v_raw = deembed_real(res.X[0]);
  Eigen::SelfAdjointEigenSolver<CMat> es(v_raw.mat());
  const RVec lam = es.eigenvalues();
  sol.residuals.psd_violation = std::max(0.0, -lam.minCoeff());
  const RVec clipped = lam.cwiseMax(0.0);
  sol.V = HermitianMatrix(es.eigenvectors() * clipped.asDiagonal() *
                          es.eigenvectors().adjoint());
  return sol;
}

/// Solve a KYP-style dual LMI by self-dualization: the LMI slack, lambda and
/// (for bands) Q each become a cone block. The gap target is tightened
/// internally so that non-attained duals reveal themselves: the infimum is
/// then approached only along iterates whose ||P|| escapes beyond the cap,
/// which is reported as NearOptimal with the not_attained diagnostic.
inline DualSolution solve_dual_lmi(const DualProblem& dual,
                                   const SolverSettings& settings = {}) {
  const Eigen::Index n = dual.state_dim;
  const Eigen::Index m = dual.input_dim;
  const Eigen::Index lmi_dim = n + m;
  if (lmi_dim > settings.size_cap)
    throw SolverError("LMI dimension exceeds the configured size cap");

  const size_t n_p = dual.p_basis.size();
  const size_t n_q = dual.has_q ? dual.q_basis.size() : 0;
  const Eigen::Index nvar = static_cast<Eigen::Index>(1 + n_p + n_q);

  detail::StdProblem prob;
  prob.block_sizes.push_back(2 * lmi_dim);  // LMI slack
  prob.block_sizes.push_back(1);            // lambda
  if (dual.has_q) prob.block_sizes.push_back(2 * n);

  prob.C = detail::zero_blocks(prob.block_sizes);
  prob.C[0] = -0.5 * embed_real(dual.constant);

  prob.A.resize(static_cast<size_t>(nvar));
  prob.b = RVec::Zero(nvar);
  prob.A[0] = detail::zero_blocks(prob.block_sizes);
  prob.A[0][0] = 0.5 * embed_real(dual.lambda_coeff);
  prob.A[0][1](0, 0) = -1.0;
  prob.b(0) = -1.0;  // maximize -lambda
  for (size_t k = 0; k < n_p; ++k) {
    prob.A[1 + k] = detail::zero_blocks(prob.block_sizes);
    prob.A[1 + k][0] = 0.5 * embed_real(dual.p_coeffs[k]);
  }
  for (size_t k = 0; k < n_q; ++k) {
    prob.A[1 + n_p + k] = detail::zero_blocks(prob.block_sizes);
    prob.A[1 + n_p + k][0] = 0.5 * embed_real(dual.q_coeffs[k]);
    prob.A[1 + n_p + k][2] = -0.5 * embed_real(dual.q_basis[k]);
  }

  detail::IpmOptions opt{settings.tol_feas, std::min(settings.tol_gap, 1e-10),
                         settings.max_iters + 80};
  detail::IpmResult res = detail::ipm_solve(prob, opt);

  DualSolution out;
  out.status = detail::classify(res, settings);
  out.iterations = res.iterations;
  out.duality_gap = res.gap_abs;
  if (res.y.size() != nvar) {
    out.P = HermitianMatrix::zero(n);
    return out;
  }
  out.lambda = res.y(0);
  CMat p_mat = CMat::Zero(n, n);
  for (size_t k = 0; k < n_p; ++k)
    p_mat += res.y(static_cast<Eigen::Index>(1 + k)) * dual.p_basis[k].mat();
  out.P = HermitianMatrix(p_mat);
  if (dual.has_q) {
    CMat q_mat = CMat::Zero(n, n);
    for (size_t k = 0; k < n_q; ++k)
      q_mat += res.y(static_cast<Eigen::Index>(1 + n_p + k)) * dual.q_basis[k].mat();
    out.Q = HermitianMatrix(q_mat);
  }

  Eigen::SelfAdjointEigenSolver<CMat> es(out.P.mat(), Eigen::EigenvaluesOnly);
  out.p_norm = es.eigenvalues().size() > 0
                   ? es.eigenvalues().cwiseAbs().maxCoeff()
                   : 0.0;
  out.not_attained = out.p_norm > kDualNormCap;
  if (out.not_attained && out.status == SolverStatus::Optimal)
    out.status = SolverStatus::NearOptimal;
  return out;
}

}  // namespace hinf
