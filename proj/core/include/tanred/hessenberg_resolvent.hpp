#pragma once

#include "tanred/state_space.hpp"

namespace tanred {

/// Cached unitary Hessenberg reduction A = Q H Q^* of a system.
///
/// Construction costs O(n^3); afterwards each shift s costs an O(n^2)
/// factorization of sI - H plus O(n^2) per right-hand side.
class HessenbergResolvent {
 public:
  explicit HessenbergResolvent(const StateSpace& sys);

  Index states() const noexcept { return h_.rows(); }

  /// G(s). Throws SingularResolvent on a numerically singular sI - A.
  CMatrix response(Complex s) const;

  /// Solves X (sI - A) = rows for X (rows is k x n).
  CMatrix solve_left(Complex s, const CMatrix& rows) const;

  /// left * C * (sI - A)^{-1} for a k x p weighting `left`.
  CMatrix output_resolvent(Complex s, const CMatrix& left) const;

  /// Solves (sI - A) X = rhs for X (rhs is n x k).
  CMatrix solve_right(Complex s, const CMatrix& rhs) const;

 private:
  class ShiftedLu;

  CMatrix q_;
  CMatrix h_;
  CMatrix cq_;   // C Q
  CMatrix qhb_;  // Q^* B
  CMatrix d_;
};

}  // namespace tanred
