#pragma once

#include <vector>

#include "tanred/hessenberg_resolvent.hpp"
#include "tanred/state_space.hpp"

namespace tanred {

/// One left-tangential interpolation record: frequency plus the slice of the
/// SVD of G(j omega) covering singular indices first_index .. first_index+rank-1.
struct InterpPoint {
  double omega = 0.0;
  /// 1-based index of the first singular triple held in u, sigma, v.
  Index first_index = 1;
  CMatrix u;      // p x rank, orthonormal columns
  RVector sigma;  // strictly positive, nonincreasing
  CMatrix v;      // q x rank, orthonormal columns

  Index rank() const noexcept { return sigma.size(); }
};

/// Singular values below this fraction of sigma_1 count as numerically zero.
inline constexpr double kNumericalRankTol = 1e-12;

/// Singular triples r_min..r_max (1-based, inclusive) of resp.value. Each
/// column of U is rotated so its first nonzero entry is real and positive,
/// with V rotated to match. Exactly real responses use a real SVD.
/// Throws RankDeficient when sigma_{r_max} <= 1e-12 sigma_1.
InterpPoint truncated_point(const FreqResponse& resp, Index r_min, Index r_max);

/// Interpolation data matrices (script-A, B_M, B_N, script-C) assembled
/// point by point; each point's states stay contiguous.
class InterpData {
 public:
  struct Block {
    InterpPoint point;
    /// U^* C (j omega I - A)^{-1}, rank x n.
    CMatrix c_complex;
    Index offset = 0;
    Index size = 0;
    /// Real pairing of +-j omega (real system, omega != 0).
    bool paired = false;
    /// Insertion sequence number of each singular triple.
    std::vector<Index> stamps;
  };

  InterpData() = default;
  /// Empty data for a system with the given field and dimensions.
  InterpData(ScalarField field, Index outputs, Index inputs, Index states);
  static InterpData empty_for(const StateSpace& sys);

  ScalarField field() const noexcept { return field_; }
  Index outputs() const noexcept { return p_; }
  Index inputs() const noexcept { return q_; }
  Index parent_states() const noexcept { return n_; }
  Index total_order() const noexcept { return acal_.rows(); }

  const CMatrix& acal() const noexcept { return acal_; }
  const CMatrix& bm() const noexcept { return bm_; }
  const CMatrix& bn() const noexcept { return bn_; }
  const CMatrix& cscr() const noexcept { return cscr_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  /// Row indices of cscr() in the order they were added (the two real rows of
  /// a paired triple are adjacent). Earlier rows never move in this order.
  const std::vector<Index>& insertion_order() const noexcept { return order_; }

  friend InterpData append_point(const InterpData& data, const HessenbergResolvent& resolvent,
                                 const InterpPoint& pt);
  friend InterpData extend_point(const InterpData& data, const HessenbergResolvent& resolvent,
                                 Index index, const InterpPoint& extra);

 private:
  void rebuild();

  ScalarField field_ = ScalarField::Real;
  Index p_ = 0;
  Index q_ = 0;
  Index n_ = 0;
  std::vector<Block> blocks_;
  Index next_stamp_ = 0;
  std::vector<Index> order_;
  CMatrix acal_, bm_, bn_, cscr_;
};

/// Adds a new frequency. Throws DuplicateFrequency if omega is present and
/// InvalidArgument for negative omega on a real system.
InterpData append_point(const InterpData& data, const HessenbergResolvent& resolvent,
                        const InterpPoint& pt);
InterpData append_point(const InterpData& data, const StateSpace& sys, const InterpPoint& pt);

/// Widens point `index` with further singular triples at the same frequency.
InterpData extend_point(const InterpData& data, const HessenbergResolvent& resolvent, Index index,
                        const InterpPoint& extra);
InterpData extend_point(const InterpData& data, const StateSpace& sys, Index index,
                        const InterpPoint& extra);

/// R = [Acal - Bm W, Bn - Bm D; W, D].
StateSpace realize_r(const InterpData& data, const CMatrix& w, const CMatrix& d);

/// H = N - M G = [A, B; [-C; Cscr], 0].
StateSpace realize_h(const InterpData& data, const StateSpace& sys);

}  // namespace tanred
