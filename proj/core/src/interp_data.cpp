#include "tanred/interp_data.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include <Eigen/SVD>

#include "tanred/error.hpp"

namespace tanred {

namespace {

// Rotate each U column so its first nonzero entry is real positive; V follows.
void normalize_phases(CMatrix& u, CMatrix& v) {
  for (Index k = 0; k < u.cols(); ++k) {
    for (Index i = 0; i < u.rows(); ++i) {
      const double mag = std::abs(u(i, k));
      if (mag > kNumericalRankTol) {
        const Complex phase = std::conj(u(i, k)) / mag;
        u.col(k) *= phase;
        v.col(k) *= phase;
        u(i, k) = mag;
        break;
      }
    }
  }
}

}  // namespace

InterpPoint truncated_point(const FreqResponse& resp, Index r_min, Index r_max) {
  const CMatrix& g = resp.value;
  const Index full = std::min(g.rows(), g.cols());
  if (r_min < 1 || r_max < r_min)
    throw Error(ErrorKind::InvalidArgument, "truncated_point: need 1 <= r_min <= r_max");
  if (r_max > full) {
    std::ostringstream os;
    os << "truncated_point: r_max = " << r_max << " exceeds min(p, q) = " << full;
    throw Error(ErrorKind::RankDeficient, os.str());
  }
  RVector s;
  CMatrix u, v;
  if (is_exactly_real(g)) {
    Eigen::JacobiSVD<RMatrix> svd(g.real(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    s = svd.singularValues();
    u = svd.matrixU().cast<Complex>();
    v = svd.matrixV().cast<Complex>();
  } else {
    Eigen::JacobiSVD<CMatrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    s = svd.singularValues();
    u = svd.matrixU();
    v = svd.matrixV();
  }
  if (!(s(0) > 0.0) || !(s(r_max - 1) > kNumericalRankTol * s(0))) {
    std::ostringstream os;
    os << "truncated_point: sigma_" << r_max << " is numerically zero at omega = " << resp.omega;
    throw Error(ErrorKind::RankDeficient, os.str());
  }
  const Index r = r_max - r_min + 1;
  InterpPoint pt;
  pt.omega = resp.omega;
  pt.first_index = r_min;
  pt.u = u.middleCols(r_min - 1, r);
  pt.v = v.middleCols(r_min - 1, r);
  pt.sigma = s.segment(r_min - 1, r);
  normalize_phases(pt.u, pt.v);
  return pt;
}

InterpData::InterpData(ScalarField field, Index outputs, Index inputs, Index states)
    : field_(field), p_(outputs), q_(inputs), n_(states) {
  rebuild();
}

InterpData InterpData::empty_for(const StateSpace& sys) {
  return InterpData(sys.field(), sys.outputs(), sys.inputs(), sys.states());
}

void InterpData::rebuild() {
  Index total = 0;
  for (auto& b : blocks_) {
    b.paired = field_ == ScalarField::Real && b.point.omega != 0.0;
    b.offset = total;
    b.size = b.paired ? 2 * b.point.rank() : b.point.rank();
    total += b.size;
  }
  acal_ = CMatrix::Zero(total, total);
  bm_.resize(total, p_);
  bn_.resize(total, q_);
  cscr_.resize(total, n_);
  std::vector<std::pair<Index, Index>> stamped;  // (stamp, row)
  for (const auto& b : blocks_) {
    const Index r = b.point.rank();
    for (Index i = 0; i < r; ++i) {
      stamped.emplace_back(b.stamps[static_cast<std::size_t>(i)], b.offset + i);
      if (b.paired) stamped.emplace_back(b.stamps[static_cast<std::size_t>(i)], b.offset + r + i);
    }
  }
  std::stable_sort(stamped.begin(), stamped.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  order_.clear();
  for (const auto& sr : stamped) order_.push_back(sr.second);
  for (const auto& b : blocks_) {
    const InterpPoint& pt = b.point;
    const Index r = pt.rank();
    const double w = pt.omega;
    const CMatrix uh = pt.u.adjoint();
    const CMatrix svh = pt.sigma.cast<Complex>().asDiagonal() * pt.v.adjoint();
    if (b.paired) {
      // Real coordinates of the conjugate pair: x = y1 - j y2.
      auto a = acal_.block(b.offset, b.offset, 2 * r, 2 * r);
      a.topRightCorner(r, r).diagonal().setConstant(w);
      a.bottomLeftCorner(r, r).diagonal().setConstant(-w);
      bm_.middleRows(b.offset, r) = uh.real().cast<Complex>();
      bm_.middleRows(b.offset + r, r) = (-uh.imag()).cast<Complex>();
      bn_.middleRows(b.offset, r) = svh.real().cast<Complex>();
      bn_.middleRows(b.offset + r, r) = (-svh.imag()).cast<Complex>();
      cscr_.middleRows(b.offset, r) = b.c_complex.real().cast<Complex>();
      cscr_.middleRows(b.offset + r, r) = (-b.c_complex.imag()).cast<Complex>();
    } else if (field_ == ScalarField::Real) {
      // omega = 0 on a real system: everything is real up to roundoff.
      bm_.middleRows(b.offset, r) = uh.real().cast<Complex>();
      bn_.middleRows(b.offset, r) = svh.real().cast<Complex>();
      cscr_.middleRows(b.offset, r) = b.c_complex.real().cast<Complex>();
    } else {
      acal_.block(b.offset, b.offset, r, r).diagonal().setConstant(Complex(0.0, w));
      bm_.middleRows(b.offset, r) = uh;
      bn_.middleRows(b.offset, r) = svh;
      cscr_.middleRows(b.offset, r) = b.c_complex;
    }
  }
}

namespace {

void check_point_dims(const InterpData& data, const InterpPoint& pt) {
  if (pt.u.rows() != data.outputs() || pt.v.rows() != data.inputs() ||
      pt.u.cols() != pt.rank() || pt.v.cols() != pt.rank())
    throw Error(ErrorKind::DimensionMismatch, "interpolation point has wrong dimensions");
  if (pt.rank() == 0) throw Error(ErrorKind::InvalidArgument, "interpolation point has rank 0");
}

void check_resolvent(const InterpData& data, const HessenbergResolvent& res) {
  if (res.states() != data.parent_states())
    throw Error(ErrorKind::DimensionMismatch, "resolvent and interpolation data differ in n");
}

}  // namespace

InterpData append_point(const InterpData& data, const HessenbergResolvent& resolvent,
                        const InterpPoint& pt) {
  check_point_dims(data, pt);
  check_resolvent(data, resolvent);
  if (data.field() == ScalarField::Real && pt.omega < 0.0)
    throw Error(ErrorKind::InvalidArgument,
                "negative frequency on a real system (its conjugate is implied)");
  for (const auto& b : data.blocks()) {
    if (b.point.omega == pt.omega) {
      std::ostringstream os;
      os << "frequency " << pt.omega << " is already interpolated";
      throw Error(ErrorKind::DuplicateFrequency, os.str());
    }
  }
  InterpData out = data;
  InterpData::Block blk;
  blk.point = pt;
  blk.c_complex = resolvent.output_resolvent(Complex(0.0, pt.omega), pt.u.adjoint());
  for (Index i = 0; i < pt.rank(); ++i) blk.stamps.push_back(out.next_stamp_++);
  out.blocks_.push_back(std::move(blk));
  out.rebuild();
  return out;
}

InterpData append_point(const InterpData& data, const StateSpace& sys, const InterpPoint& pt) {
  return append_point(data, HessenbergResolvent(sys), pt);
}

InterpData extend_point(const InterpData& data, const HessenbergResolvent& resolvent, Index index,
                        const InterpPoint& extra) {
  if (index < 0 || index >= static_cast<Index>(data.blocks().size())) {
    std::ostringstream os;
    os << "extend_point: index " << index << " out of range [0, " << data.blocks().size() << ")";
    throw Error(ErrorKind::IndexOutOfRange, os.str());
  }
  check_point_dims(data, extra);
  check_resolvent(data, resolvent);
  const InterpPoint& old = data.blocks()[static_cast<std::size_t>(index)].point;
  if (extra.omega != old.omega)
    throw Error(ErrorKind::InvalidArgument, "extend_point: frequency differs from stored point");
  if (extra.first_index != old.first_index + old.rank())
    throw Error(ErrorKind::InvalidArgument,
                "extend_point: extra triples must continue the stored singular indices");

  InterpData out = data;
  InterpData::Block& blk = out.blocks_[static_cast<std::size_t>(index)];
  const Index r0 = old.rank();
  const Index r1 = extra.rank();
  InterpPoint merged;
  merged.omega = old.omega;
  merged.first_index = old.first_index;
  merged.u.resize(data.outputs(), r0 + r1);
  merged.u << old.u, extra.u;
  merged.v.resize(data.inputs(), r0 + r1);
  merged.v << old.v, extra.v;
  merged.sigma.resize(r0 + r1);
  merged.sigma << old.sigma, extra.sigma;
  const CMatrix c_extra = resolvent.output_resolvent(Complex(0.0, old.omega), extra.u.adjoint());
  CMatrix c_all(r0 + r1, data.parent_states());
  c_all << blk.c_complex, c_extra;
  blk.point = std::move(merged);
  blk.c_complex = std::move(c_all);
  for (Index i = 0; i < r1; ++i) blk.stamps.push_back(out.next_stamp_++);
  out.rebuild();
  return out;
}

InterpData extend_point(const InterpData& data, const StateSpace& sys, Index index,
                        const InterpPoint& extra) {
  return extend_point(data, HessenbergResolvent(sys), index, extra);
}

StateSpace realize_r(const InterpData& data, const CMatrix& w, const CMatrix& d) {
  const Index r = data.total_order();
  if (w.rows() != data.outputs() || w.cols() != r)
    throw Error(ErrorKind::DimensionMismatch, "realize_r: W must be p x r");
  if (d.rows() != data.outputs() || d.cols() != data.inputs())
    throw Error(ErrorKind::DimensionMismatch, "realize_r: D must be p x q");
  const bool real = data.field() == ScalarField::Real && is_exactly_real(w) && is_exactly_real(d);
  if (real) {
    const RMatrix bm = data.bm().real();
    const RMatrix wr = w.real();
    const RMatrix dr = d.real();
    const RMatrix a = data.acal().real() - bm * wr;
    const RMatrix b = data.bn().real() - bm * dr;
    return StateSpace::from_real(a, b, wr, dr);
  }
  return StateSpace(data.acal() - data.bm() * w, data.bn() - data.bm() * d, w, d,
                    ScalarField::Complex);
}

StateSpace realize_h(const InterpData& data, const StateSpace& sys) {
  if (sys.states() != data.parent_states() || sys.outputs() != data.outputs() ||
      sys.inputs() != data.inputs())
    throw Error(ErrorKind::DimensionMismatch, "realize_h: system does not match interpolation data");
  const Index p = sys.outputs();
  const Index r = data.total_order();
  CMatrix c(p + r, sys.states());
  c << -sys.C(), data.cscr();
  const CMatrix d = CMatrix::Zero(p + r, sys.inputs());
  const ScalarField f = sys.is_real() && data.field() == ScalarField::Real ? ScalarField::Real
                                                                           : ScalarField::Complex;
  return StateSpace(sys.A(), sys.B(), c, d, f);
}

}  // namespace tanred
