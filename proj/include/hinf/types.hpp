#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hinf {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Systems with spectral radius >= 1 - kStabilityMargin are rejected; the
// lifted SDP and the resolvent are ill-posed at the unit circle.
inline constexpr double kStabilityMargin = 1e-9;

// Relative singular-value cutoff for rank and pseudoinverse decisions.
inline constexpr double kDefaultRankTol = 1e-9;

// Certificate invariants and dilation preconditions; solver slack propagates
// into both, so they sit well above the solver tolerances.
inline constexpr double kCertificateTol = 1e-6;
inline constexpr double kDilationPreTol = 1e-6;

// Minimum usable input energy of a rank-one piece.
inline constexpr double kMinPieceEnergy = 1e-10;

// A dual iterate whose Lyapunov-like matrix exceeds this norm is treated as
// an escaping sequence (dual optimum not attained).
inline constexpr double kDualNormCap = 1e8;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct StabilityError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct NotPsdError : Error {
  using Error::Error;
};

/// Violated precondition or malformed argument.
struct InputError : Error {
  using Error::Error;
};

struct DegenerateDilationError : Error {
  using Error::Error;
};

struct DegenerateCertificateError : Error {
  using Error::Error;
};

struct ExtractionError : Error {
  using Error::Error;
};

struct SolverError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace hinf
