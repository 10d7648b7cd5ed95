#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "tanred/state_space.hpp"

namespace tanred {

/// Controllability Gramian in the two-sided frequency-integral convention
///
///   theta = (1 / 2 pi) * integral over the real line of
///           (j w I - A)^{-1} B B^* (j w I - A)^{-*} dw,
///
/// which for stable A is the solution of A theta + theta A^* + B B^* = 0.
struct GramianResult {
  CMatrix theta;
  /// Square-root factor with theta = factor * factor^* (n x n, PSD by construction).
  CMatrix factor;
  /// Frobenius residual of the Lyapunov equation(s) actually solved.
  double residual = 0.0;
  /// Scale the residual was measured against (||B B^*||_F in solver coordinates).
  double residual_scale = 0.0;
  bool real = true;
};

/// Relative Lyapunov residual above which a solve is rejected.
inline constexpr double kLyapunovResidualTol = 1e-8;

/// Solves T1 X + X T2^* = F for upper-triangular T1 (n x n) and T2 (m x m).
CMatrix solve_triangular_sylvester(const CMatrix& t1, const CMatrix& t2, const CMatrix& f);

/// Throws IllConditionedLyapunov when the residual check fails. Systems with
/// antistable modes are split into stable and antistable parts first; the
/// cross terms of the frequency integral vanish.
GramianResult controllability_gramian(const StateSpace& sys);

/// Controllability Gramian of the dual realization (A^*, C^*).
GramianResult observability_gramian(const StateSpace& sys);

/// tr(C theta C^*). Throws NonzeroFeedthrough if D != 0 unless
/// `project_strictly_proper` is set, in which case D is ignored.
double h2_norm_sq(const StateSpace& sys, bool project_strictly_proper = false);

struct PeakGain {
  /// Attaining frequency; +infinity when the supremum is only reached as w -> inf.
  double omega_star = 0.0;
  double gain = 0.0;

  bool at_infinity() const noexcept { return std::isinf(omega_star); }
};

inline constexpr double kDefaultPeakRtol = 1e-6;

/// L-infinity norm by Hamiltonian-eigenvalue bisection (Bruinsma-Steinbuch
/// style level-set iteration). `gain` is an attained value of
/// sigma_max(G(j omega_star)) and lies within rtol of the supremum.
PeakGain peak_gain(const StateSpace& sys, double rtol = kDefaultPeakRtol);

struct ErrorNorm {
  double value = 0.0;
  /// Set when the error system is unstable and grid quadrature was used.
  bool approximate = false;
};

/// sqrt(h2_norm_sq(g - r)) for a stable error system, otherwise trapezoidal
/// quadrature of ||E(jw)||_F^2 over `grid_fallback` (nonnegative frequencies,
/// mirrored to negative ones for complex systems).
ErrorNorm error_norm(const StateSpace& g, const StateSpace& r,
                     std::span<const double> grid_fallback);

/// Repeated error_norm(g, r_i) for one fixed stable g. Caches the Schur form
/// and Gramian of g so each evaluation costs a triangular Sylvester solve in
/// the reduced order instead of a Lyapunov solve of order n + r.
class H2ErrorEvaluator {
 public:
  H2ErrorEvaluator(const StateSpace& g, std::vector<double> grid_fallback);
  ~H2ErrorEvaluator();
  H2ErrorEvaluator(H2ErrorEvaluator&&) noexcept;
  H2ErrorEvaluator& operator=(H2ErrorEvaluator&&) noexcept;

  ErrorNorm operator()(const StateSpace& r) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Largest singular value of a dense matrix (0 for empty input).
double sigma_max(const CMatrix& m);

}  // namespace tanred
