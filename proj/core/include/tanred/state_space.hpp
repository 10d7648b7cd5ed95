#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace tanred {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ScalarField { Real, Complex };

/// True when every entry has an imaginary part that compares equal to zero.
bool is_exactly_real(const CMatrix& m) noexcept;

/// Dense continuous-time realization G(s) = C (sI - A)^{-1} B + D.
///
/// Matrices are stored as complex; a Real field tag guarantees that every
/// imaginary part is exactly zero. Values are immutable once built.
class StateSpace {
 public:
  StateSpace() = default;

  /// Throws DimensionMismatch on inconsistent shapes and InvariantViolation
  /// if `field` is Real while some entry has a nonzero imaginary part.
  StateSpace(CMatrix a, CMatrix b, CMatrix c, CMatrix d, ScalarField field);

  /// Field is inferred: Real iff all four matrices are exactly real.
  static StateSpace from_complex(CMatrix a, CMatrix b, CMatrix c, CMatrix d);
  static StateSpace from_real(const RMatrix& a, const RMatrix& b, const RMatrix& c,
                              const RMatrix& d);

  /// Zero-state system with constant response `d`.
  static StateSpace static_gain(CMatrix d, ScalarField field);

  Index states() const noexcept { return a_.rows(); }
  Index outputs() const noexcept { return d_.rows(); }
  Index inputs() const noexcept { return d_.cols(); }

  const CMatrix& A() const noexcept { return a_; }
  const CMatrix& B() const noexcept { return b_; }
  const CMatrix& C() const noexcept { return c_; }
  const CMatrix& D() const noexcept { return d_; }

  ScalarField field() const noexcept { return field_; }
  bool is_real() const noexcept { return field_ == ScalarField::Real; }

  /// Eigenvalues of A.
  CVector poles() const;
  bool is_stable() const;

  /// Throws InvariantViolation naming the offending eigenvalue when some pole
  /// satisfies |Re(lambda)| <= 1e-10 (1 + |lambda|).
  void require_no_imaginary_poles() const;

 private:
  CMatrix a_, b_, c_, d_;
  ScalarField field_ = ScalarField::Real;
};

/// Relative threshold for the imaginary-axis pole test.
inline constexpr double kImaginaryPoleTol = 1e-10;

/// Reciprocal condition number below which resolvent solves are refused.
inline constexpr double kMinResolventRcond = 1e-14;

struct FreqResponse {
  double omega = 0.0;
  CMatrix value;
};

/// C (sI - A)^{-1} B + D by a pivoted LU solve. Throws SingularResolvent when
/// the estimated reciprocal condition of sI - A is below kMinResolventRcond.
CMatrix eval_tf(const StateSpace& sys, Complex s);

/// G(j omega) for every omega, reusing one Hessenberg reduction of A.
std::vector<FreqResponse> freq_sweep(const StateSpace& sys, std::span<const double> omegas);

/// Realization of lhs - rhs with the states of both stacked block-diagonally.
StateSpace series_sub(const StateSpace& lhs, const StateSpace& rhs);

}  // namespace tanred
