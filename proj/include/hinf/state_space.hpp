#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hinf/types.hpp"

namespace hinf {

/// Discrete-time LTI system x_{k+1} = A x_k + B w_k, z_k = C x_k + D w_k.
/// Matrices are complex; real systems are the special case of zero
/// imaginary parts. Immutable after construction.
class StateSpace {
 public:
  StateSpace(CMat A, CMat B, CMat C, CMat D)
      : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
    if (A_.rows() == 0 || A_.rows() != A_.cols())
      throw DimensionError("A must be square and nonempty");
    if (B_.rows() != A_.rows() || B_.cols() == 0)
      throw DimensionError("B must be n x m with m >= 1");
    if (C_.cols() != A_.rows() || C_.rows() == 0)
      throw DimensionError("C must be l x n with l >= 1");
    if (D_.rows() != C_.rows() || D_.cols() != B_.cols())
      throw DimensionError("D must be l x m");
  }

  const CMat& A() const { return A_; }
  const CMat& B() const { return B_; }
  const CMat& C() const { return C_; }
  const CMat& D() const { return D_; }

  Eigen::Index n() const { return A_.rows(); }
  Eigen::Index m() const { return B_.cols(); }
  Eigen::Index l() const { return C_.rows(); }

  /// [A B], the state-update block row used throughout the lifted problem.
  CMat dynamics_block() const {
    CMat g(n(), n() + m());
    g << A_, B_;
    return g;
  }

  /// [I 0], the state-selection block row of matching shape.
  CMat selector_block() const {
    CMat f = CMat::Zero(n(), n() + m());
    f.leftCols(n()) = CMat::Identity(n(), n());
    return f;
  }

  /// [C D] as a single block row.
  CMat output_block() const {
    CMat h(l(), n() + m());
    h << C_, D_;
    return h;
  }

 private:
  CMat A_, B_, C_, D_;
};

/// Spectral restriction on the input's frequency.
class FrequencyBand {
 public:
  enum class Kind { Full, Low, High, Middle };

  static FrequencyBand full() { return FrequencyBand(Kind::Full, 0, 0); }

  static FrequencyBand low(double theta0) {
    check_theta0(theta0);
    return FrequencyBand(Kind::Low, theta0, 0);
  }

  static FrequencyBand high(double theta0) {
    check_theta0(theta0);
    return FrequencyBand(Kind::High, theta0, 0);
  }

  static FrequencyBand middle(double theta1, double theta2) {
    constexpr double pi = std::numbers::pi;
    if (!(theta1 < theta2) || theta1 < -pi - 1e-12 || theta2 > pi + 1e-12)
      throw InputError("middle band requires -pi <= theta1 < theta2 <= pi");
    return FrequencyBand(Kind::Middle, theta1, theta2);
  }

  Kind kind() const { return kind_; }
  bool is_full() const { return kind_ == Kind::Full; }

  double theta0() const { return a_; }   // Low/High half-width
  double theta1() const { return a_; }   // Middle lower edge
  double theta2() const { return b_; }   // Middle upper edge

  /// Middle bands of width 2*pi carry no restriction; treat them as Full.
  FrequencyBand canonical() const {
    constexpr double pi = std::numbers::pi;
    if (kind_ == Kind::Middle && b_ - a_ >= 2 * pi - 1e-12) return full();
    return *this;
  }

  bool contains(double theta, double tol) const {
    constexpr double pi = std::numbers::pi;
    switch (kind_) {
      case Kind::Full:
        return std::abs(theta) <= pi + tol;
      case Kind::Low:
        return std::abs(theta) <= a_ + tol;
      case Kind::High:
        return std::abs(theta) >= a_ - tol && std::abs(theta) <= pi + tol;
      case Kind::Middle:
        return theta >= a_ - tol && theta <= b_ + tol;
    }
    return false;
  }

  /// Closed theta-intervals covered by the band.
  std::vector<std::pair<double, double>> segments() const {
    constexpr double pi = std::numbers::pi;
    switch (kind_) {
      case Kind::Full:
        return {{-pi, pi}};
      case Kind::Low:
        return {{-a_, a_}};
      case Kind::High:
        return {{-pi, -a_}, {a_, pi}};
      case Kind::Middle:
        return {{a_, b_}};
    }
    return {};
  }

 private:
  FrequencyBand(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  static void check_theta0(double theta0) {
    if (!(theta0 > 0.0) || !(theta0 < std::numbers::pi))
      throw InputError("band edge theta0 must satisfy 0 < theta0 < pi");
  }

  Kind kind_;
  double a_, b_;
};

/// Complex sinusoid w_k = e^{j theta k} w_s. A zero direction is accepted
/// here (it drives simulations to zero power); certificate-level contracts
/// enforce nonzero inputs where the theory requires them.
struct Sinusoid {
  CVec w_s;
  double theta = 0.0;

  Sinusoid(CVec direction, double frequency)
      : w_s(std::move(direction)), theta(frequency) {
    if (w_s.size() == 0)
      throw InputError("sinusoid direction must have positive length");
  }
};

inline double spectral_radius(const CMat& A) {
  if (A.rows() != A.cols()) throw DimensionError("spectral_radius: A must be square");
  if (A.rows() == 0) return 0.0;
  Eigen::ComplexEigenSolver<CMat> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalError("spectral_radius: eigensolver did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline bool is_schur_stable(const StateSpace& sys) {
  return spectral_radius(sys.A()) < 1.0 - kStabilityMargin;
}

inline void require_schur_stable(const StateSpace& sys) {
  if (!is_schur_stable(sys))
    throw StabilityError("system is not Schur stable within margin 1e-9");
}

/// Transfer matrix H(e^{j theta}) = C (e^{j theta} I - A)^{-1} B + D.
inline CMat freq_response(const StateSpace& sys, double theta) {
  const auto n = sys.n();
  CMat resolvent = std::polar(1.0, theta) * CMat::Identity(n, n) - sys.A();
  Eigen::PartialPivLU<CMat> lu(resolvent);
  if (!(lu.rcond() > 1e-14))
    throw NumericalError("freq_response: resolvent is near singular");
  return sys.C() * lu.solve(sys.B()) + sys.D();
}

/// Largest singular value of the transfer matrix at theta.
inline double gain(const StateSpace& sys, double theta) {
  Eigen::JacobiSVD<CMat> svd(freq_response(sys, theta));
  return svd.singularValues()(0);
}

struct ShiftedSystem {
  StateSpace sys;
  double theta0;   // half-width of the centered band
  double theta_c;  // band center removed by the modulation
};

/// Modulate the dynamics so the band [theta1, theta2] becomes
/// [-theta0, theta0] for the shifted system: multiplying [A B] by
/// e^{-j theta_c} moves every gain by theta_c along the frequency axis
/// without changing singular values.
inline ShiftedSystem shift_middle(const StateSpace& sys, double theta1,
                                  double theta2) {
  if (!(theta1 < theta2)) throw InputError("shift_middle requires theta1 < theta2");
  const double theta_c = 0.5 * (theta1 + theta2);
  const double theta0 = 0.5 * (theta2 - theta1);
  const Complex rot = std::polar(1.0, -theta_c);
  return ShiftedSystem{
      StateSpace(rot * sys.A(), rot * sys.B(), sys.C(), sys.D()),
      theta0, theta_c};
}

/// Drive the system with the sinusoid from x_0 = 0 and return the running
/// power averages P_N = (1/N) sum_{k<N} z_k^* z_k for N = 1..steps. The whole
/// sequence is returned so convergence-rate assertions are possible.
inline std::vector<double> simulate(const StateSpace& sys, const Sinusoid& input,
                                    int steps) {
  require_schur_stable(sys);
  if (steps < 1) throw InputError("simulate requires at least one step");
  if (input.w_s.size() != sys.m())
    throw DimensionError("sinusoid direction does not match input count");

  std::vector<double> running(static_cast<size_t>(steps));
  CVec x = CVec::Zero(sys.n());
  double acc = 0.0;
  for (int k = 0; k < steps; ++k) {
    const CVec w = std::polar(1.0, input.theta * k) * input.w_s;
    const CVec z = sys.C() * x + sys.D() * w;
    acc += z.squaredNorm();
    running[static_cast<size_t>(k)] = acc / (k + 1);
    x = sys.A() * x + sys.B() * w;
  }
  return running;
}

}  // namespace hinf
