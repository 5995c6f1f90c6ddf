#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "hinf/hermitian.hpp"
#include "hinf/state_space.hpp"
#include "hinf/types.hpp"

namespace hinf {

/// One scalarized row <coeff, V> (= or <=) rhs over the Hermitian variable.
struct ScalarConstraint {
  HermitianMatrix coeff;
  double rhs = 0.0;
};

/// Hermitian-valued expression sum_t (L_t V R_t^* + R_t V L_t^*) that must be
/// PSD (or NSD when negative is set).
struct PsdSideConstraint {
  struct Term {
    CMat left;
    CMat right;
  };
  std::vector<Term> terms;
  Eigen::Index side_size = 0;
  bool negative = false;
};

/// Standard-form lifted problem: maximize <cost, V> over Hermitian V >= 0 of
/// the stated dimension, subject to scalar equalities/inequalities and
/// optional PSD side constraints.
struct ConicProblem {
  Eigen::Index dim = 0;
  Eigen::Index state_dim = 0;
  Eigen::Index input_dim = 0;
  HermitianMatrix cost;
  std::vector<ScalarConstraint> equalities;
  std::vector<ScalarConstraint> inequalities;
  std::vector<PsdSideConstraint> psd_side;
};

/// KYP-style dual: minimize lambda over Hermitian P (and PSD Q for band
/// problems) subject to
///   constant + lambda*lambda_coeff + sum p_k p_coeffs[k]
///            + sum q_k q_coeffs[k]  <=  0,   lambda >= 0.
/// p_basis/q_basis give the Hermitian matrices the real coordinates expand in.
struct DualProblem {
  Eigen::Index state_dim = 0;
  Eigen::Index input_dim = 0;
  HermitianMatrix constant;
  HermitianMatrix lambda_coeff;
  std::vector<HermitianMatrix> p_basis;
  std::vector<HermitianMatrix> p_coeffs;
  std::vector<HermitianMatrix> q_basis;
  std::vector<HermitianMatrix> q_coeffs;
  bool has_q = false;
};

namespace detail {

/// Real coordinates for Hermitian k x k matrices: k diagonal units, then for
/// each i < j one real-part unit and one imaginary-part unit.
inline std::vector<HermitianMatrix> hermitian_basis(Eigen::Index k) {
  std::vector<HermitianMatrix> basis;
  basis.reserve(static_cast<size_t>(k * k));
  for (Eigen::Index i = 0; i < k; ++i) {
    CMat e = CMat::Zero(k, k);
    e(i, i) = 1.0;
    basis.emplace_back(e);
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      CMat re = CMat::Zero(k, k);
      re(i, j) = 1.0;
      re(j, i) = 1.0;
      basis.emplace_back(re);
      CMat im = CMat::Zero(k, k);
      im(i, j) = Complex(0, 1);
      im(j, i) = Complex(0, -1);
      basis.emplace_back(im);
    }
  }
  return basis;
}

/// Scalarize the Hermitian matrix equality F V F^* = G V G^* over the upper
/// triangle only: n real diagonal rows plus one (re, im) pair per i < j.
inline std::vector<ScalarConstraint> scalarize_matrix_equality(const CMat& f,
                                                               const CMat& g) {
  const Eigen::Index rows = f.rows();
  std::vector<ScalarConstraint> out;
  out.reserve(static_cast<size_t>(rows * rows));
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = i; j < rows; ++j) {
      const CMat k = f.row(i).adjoint() * f.row(j) - g.row(i).adjoint() * g.row(j);
      out.push_back({symmetrize(k), 0.0});
      if (j > i) out.push_back({symmetrize(Complex(0, 1) * k), 0.0});
    }
  }
  return out;
}

/// Entry (i, j) of a PSD side expression as a complex pairing <K, V>.
inline CMat side_entry_coeff(const PsdSideConstraint& side, Eigen::Index i,
                             Eigen::Index j) {
  const Eigen::Index dim = side.terms.front().left.cols();
  CMat k = CMat::Zero(dim, dim);
  for (const auto& term : side.terms) {
    k += term.left.row(i).adjoint() * term.right.row(j);
    k += term.right.row(i).adjoint() * term.left.row(j);
  }
  return k;
}

/// Evaluate a PSD side expression at V (used by tests and feasibility checks).
inline CMat eval_psd_side(const PsdSideConstraint& side, const CMat& v) {
  CMat out = CMat::Zero(side.side_size, side.side_size);
  for (const auto& term : side.terms)
    out += term.left * v * term.right.adjoint() +
           term.right * v * term.left.adjoint();
  return out;
}

/// Gamma(H) = [A B]^* H [A B] - [I 0]^* H [I 0]; the P-dependence of the KYP
/// inequality.
inline HermitianMatrix kyp_p_term(const StateSpace& sys, const HermitianMatrix& h) {
  const CMat g = sys.dynamics_block();
  const CMat f = sys.selector_block();
  return HermitianMatrix(g.adjoint() * h.mat() * g - f.adjoint() * h.mat() * f);
}

/// Xi(H) = [A B]^* H [I 0] + [I 0]^* H [A B] - 2 cos(theta0) [I 0]^* H [I 0];
/// the Q-dependence of the low-frequency generalized KYP inequality.
inline HermitianMatrix gkyp_q_term(const StateSpace& sys, const HermitianMatrix& h,
                                   double cos_theta0) {
  const CMat g = sys.dynamics_block();
  const CMat f = sys.selector_block();
  return HermitianMatrix(g.adjoint() * h.mat() * f + f.adjoint() * h.mat() * g -
                         2.0 * cos_theta0 * f.adjoint() * h.mat() * f);
}

inline PsdSideConstraint band_side_constraint(const StateSpace& sys,
                                              double theta0, bool high) {
  PsdSideConstraint side;
  side.side_size = sys.n();
  side.negative = high;
  const CMat g = sys.dynamics_block();
  const CMat f = sys.selector_block();
  side.terms.push_back({g, f});
  side.terms.push_back({-std::cos(theta0) * f, f});
  return side;
}

}  // namespace detail

/// Lifted primal SDP for the requested band: the variable V is the limiting
/// covariance of the stacked state and input, the objective is the output
/// power <[C D]^*[C D], V>, the equalities pin the state block of V to its
/// one-step update, and the input power is bounded by one. Low bands add the
/// 2cos(theta0) coupling as a PSD side constraint; High reverses it; Middle
/// is the Low problem of the modulation-shifted system.
inline ConicProblem build_primal(const StateSpace& sys, const FrequencyBand& band) {
  require_schur_stable(sys);
  const FrequencyBand b = band.canonical();
  if (b.kind() == FrequencyBand::Kind::Middle) {
    const ShiftedSystem shifted = shift_middle(sys, b.theta1(), b.theta2());
    return build_primal(shifted.sys, FrequencyBand::low(shifted.theta0));
  }

  ConicProblem problem;
  problem.dim = sys.n() + sys.m();
  problem.state_dim = sys.n();
  problem.input_dim = sys.m();

  const CMat h = sys.output_block();
  problem.cost = HermitianMatrix(h.adjoint() * h);
  problem.equalities =
      detail::scalarize_matrix_equality(sys.selector_block(), sys.dynamics_block());

  CMat input_selector = CMat::Zero(problem.dim, problem.dim);
  input_selector.bottomRightCorner(sys.m(), sys.m()) =
      CMat::Identity(sys.m(), sys.m());
  problem.inequalities.push_back({HermitianMatrix(input_selector), 1.0});

  if (b.kind() == FrequencyBand::Kind::Low)
    problem.psd_side.push_back(detail::band_side_constraint(sys, b.theta0(), false));
  if (b.kind() == FrequencyBand::Kind::High)
    problem.psd_side.push_back(detail::band_side_constraint(sys, b.theta0(), true));
  return problem;
}

/// KYP dual LMI: minimize lambda subject to
///   [A^*PA - P + C^*C, A^*PB + C^*D; B^*PA + D^*C, B^*PB + D^*D - lambda I] <= 0
/// with P Hermitian (sign-unconstrained) and lambda >= 0.
inline DualProblem build_dual_kyp(const StateSpace& sys) {
  DualProblem dual;
  dual.state_dim = sys.n();
  dual.input_dim = sys.m();
  const CMat h = sys.output_block();
  dual.constant = HermitianMatrix(h.adjoint() * h);

  CMat input_selector = CMat::Zero(sys.n() + sys.m(), sys.n() + sys.m());
  input_selector.bottomRightCorner(sys.m(), sys.m()) =
      CMat::Identity(sys.m(), sys.m());
  dual.lambda_coeff = HermitianMatrix(-input_selector);

  dual.p_basis = detail::hermitian_basis(sys.n());
  dual.p_coeffs.reserve(dual.p_basis.size());
  for (const auto& e : dual.p_basis) dual.p_coeffs.push_back(detail::kyp_p_term(sys, e));
  dual.has_q = false;
  return dual;
}

/// Generalized KYP dual LMI for band-restricted inputs. Low is built
/// directly; High flips the sign of the Q coupling; Middle reduces to Low on
/// the modulation-shifted system. Full is rejected (use build_dual_kyp).
inline DualProblem build_dual_gkyp(const StateSpace& sys, const FrequencyBand& band) {
  const FrequencyBand b = band.canonical();
  if (b.is_full())
    throw InputError("build_dual_gkyp: full band has no Q multiplier; use build_dual_kyp");
  if (b.kind() == FrequencyBand::Kind::Middle) {
    const ShiftedSystem shifted = shift_middle(sys, b.theta1(), b.theta2());
    return build_dual_gkyp(shifted.sys, FrequencyBand::low(shifted.theta0));
  }

  DualProblem dual = build_dual_kyp(sys);
  const double sign = (b.kind() == FrequencyBand::Kind::High) ? -1.0 : 1.0;
  dual.q_basis = detail::hermitian_basis(sys.n());
  dual.q_coeffs.reserve(dual.q_basis.size());
  for (const auto& e : dual.q_basis) {
    HermitianMatrix xi = detail::gkyp_q_term(sys, e, std::cos(b.theta0()));
    dual.q_coeffs.emplace_back(sign * xi.mat());
  }
  dual.has_q = true;
  return dual;
}

}  // namespace hinf
