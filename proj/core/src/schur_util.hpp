#pragma once

#include "tanred/state_space.hpp"

namespace tanred::detail {

/// Swaps diagonal entries k and k+1 of the complex Schur form T (A = Z T Z^*)
/// by one unitary rotation, updating Z.
void swap_adjacent_schur(CMatrix& t, CMatrix& z, Index k);

/// Reorders the Schur form so eigenvalues with negative real part come first.
/// Returns the number of such eigenvalues.
Index order_schur_stable_first(CMatrix& t, CMatrix& z);

/// Y with T11 Y - Y T22 = -T12, so that [I Y; 0 I] block-diagonalizes T.
CMatrix solve_block_decoupling(const CMatrix& t11, const CMatrix& t22, const CMatrix& t12);

/// L with theta = L L^*, clipping negative eigenvalues of the Hermitian theta.
CMatrix psd_factor(const CMatrix& theta, bool real);

}  // namespace tanred::detail
