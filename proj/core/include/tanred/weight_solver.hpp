#pragma once

#include "tanred/gramian_norms.hpp"
#include "tanred/interp_data.hpp"

namespace tanred {

struct WeightSolution {
  CMatrix w;  // p x r, exactly real for real data
  double gamma = 0.0;
  /// Numerical rank of Cscr Theta Cscr^* (number of independent rows).
  Index gram_rank = 0;
  /// True when gram_rank < r and the minimal-norm (F = 0) solution was taken.
  bool regularized = false;
};

/// A row of Cscr L whose component outside the span of the rows added before
/// it is below this fraction of its norm counts as dependent.
inline constexpr double kGramRankTol = 1e-8;

/// X = [C Th C^*, -C Th Cscr^*; -Cscr Th C^*, Cscr Th Cscr^*], (p + r) square.
CMatrix build_x(const StateSpace& sys, const GramianResult& theta, const InterpData& data);

/// Minimizer of gamma_of(X, W). Computed as the least-squares problem
/// min ||W (Cscr L) - C L||_F with theta = L L^*, rows taken in insertion order
/// so that gamma is nonincreasing as data is added. Same normal equations as
/// W Cscr Th Cscr^* = C Th Cscr^*, but never squares the
/// condition number. Throws GramianRankCollapse if Cscr Th Cscr^* == 0.
WeightSolution solve_weights(const StateSpace& sys, const GramianResult& theta,
                             const InterpData& data);

/// tr([I W] X [I; W^*]).
double gamma_of(const CMatrix& x, const CMatrix& w);

}  // namespace tanred
