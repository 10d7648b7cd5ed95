#include "tanred/hessenberg_resolvent.hpp"

#include <algorithm>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tanred/error.hpp"

namespace tanred {

/// LU factorization of the upper Hessenberg matrix sI - H with adjacent-row
/// partial pivoting. Stored as the upper factor plus one multiplier and one
/// swap flag per eliminated subdiagonal entry.
class HessenbergResolvent::ShiftedLu {
 public:
  ShiftedLu(const CMatrix& h, Complex s) : u_(-h), mult_(h.rows()), swap_(h.rows(), false) {
    const Index n = u_.rows();
    u_.diagonal().array() += s;
    norm1_ = n == 0 ? 0.0 : u_.cwiseAbs().colwise().sum().maxCoeff();
    for (Index k = 0; k + 1 < n; ++k) {
      if (std::abs(u_(k + 1, k)) > std::abs(u_(k, k))) {
        u_.row(k).tail(n - k).swap(u_.row(k + 1).tail(n - k));
        swap_[static_cast<std::size_t>(k)] = true;
      }
      const Complex pivot = u_(k, k);
      const Complex l = pivot == Complex(0.0) ? Complex(0.0) : u_(k + 1, k) / pivot;
      mult_(k) = l;
      if (l != Complex(0.0)) u_.row(k + 1).tail(n - k) -= l * u_.row(k).tail(n - k);
      u_(k + 1, k) = 0.0;
    }
    u_.triangularView<Eigen::StrictlyLower>().setZero();
    check(s);
  }

  /// (sI - H) X = B.
  CMatrix solve(CMatrix b) const {
    const Index n = u_.rows();
    for (Index k = 0; k + 1 < n; ++k) {
      if (swap_[static_cast<std::size_t>(k)]) b.row(k).swap(b.row(k + 1));
      if (mult_(k) != Complex(0.0)) b.row(k + 1) -= mult_(k) * b.row(k);
    }
    u_.triangularView<Eigen::Upper>().solveInPlace(b);
    return b;
  }

  /// X (sI - H) = B.
  CMatrix solve_left(CMatrix b) const {
    const Index n = u_.rows();
    u_.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(b);
    for (Index k = n - 2; k >= 0; --k) {
      if (mult_(k) != Complex(0.0)) b.col(k) -= mult_(k) * b.col(k + 1);
      if (swap_[static_cast<std::size_t>(k)]) b.col(k).swap(b.col(k + 1));
    }
    return b;
  }

 private:
  // Hager/Higham 1-norm estimate of inv(sI - H); rejects near-singular shifts.
  void check(Complex s) const {
    const Index n = u_.rows();
    if (n == 0) return;
    const double umax = u_.diagonal().cwiseAbs().maxCoeff();
    bool singular = !(umax > 0.0) || !std::isfinite(umax);
    for (Index i = 0; i < n && !singular; ++i)
      if (u_(i, i) == Complex(0.0)) singular = true;
    double rcond = 0.0;
    if (!singular) {
      CMatrix x = CMatrix::Constant(n, 1, Complex(1.0 / static_cast<double>(n)));
      double est = 0.0;
      for (int iter = 0; iter < 5; ++iter) {
        const CMatrix y = solve(x);
        const double new_est = y.cwiseAbs().sum();
        if (iter > 0 && new_est <= est) break;
        est = new_est;
        CMatrix xi(n, 1);
        for (Index i = 0; i < n; ++i) {
          const double a = std::abs(y(i, 0));
          xi(i, 0) = a > 0.0 ? y(i, 0) / a : Complex(1.0);
        }
        // z = (sI - H)^{-*} xi, i.e. z^* = xi^* (sI - H)^{-1}.
        const CMatrix z = solve_left(xi.adjoint()).adjoint();
        Index j = 0;
        Index jc = 0;
        const double zmax = z.cwiseAbs().maxCoeff(&j, &jc);
        const double zx = (z.adjoint() * x)(0, 0).real();
        if (iter > 0 && zmax <= zx) break;
        x.setZero();
        x(j, 0) = 1.0;
      }
      rcond = est > 0.0 && std::isfinite(est) ? 1.0 / (norm1_ * est) : 0.0;
    }
    if (singular || !(rcond >= kMinResolventRcond)) {
      std::ostringstream os;
      os << "sI - A is numerically singular at s = " << s << " (rcond " << rcond << ")";
      throw Error(ErrorKind::SingularResolvent, os.str());
    }
  }

  CMatrix u_;
  CVector mult_;
  std::vector<bool> swap_;
  double norm1_ = 0.0;
};

HessenbergResolvent::HessenbergResolvent(const StateSpace& sys) : d_(sys.D()) {
  const Index n = sys.states();
  if (n == 0) {
    q_.resize(0, 0);
    h_.resize(0, 0);
    cq_.resize(sys.outputs(), 0);
    qhb_.resize(0, sys.inputs());
    return;
  }
  if (sys.is_real()) {
    Eigen::HessenbergDecomposition<RMatrix> hd(sys.A().real());
    const RMatrix q = hd.matrixQ();
    const RMatrix h = hd.matrixH();
    q_ = q.cast<Complex>();
    h_ = h.cast<Complex>();
    cq_ = (sys.C().real() * q).cast<Complex>();
    qhb_ = (q.transpose() * sys.B().real()).cast<Complex>();
  } else {
    Eigen::HessenbergDecomposition<CMatrix> hd(sys.A());
    q_ = hd.matrixQ();
    h_ = hd.matrixH();
    cq_ = sys.C() * q_;
    qhb_ = q_.adjoint() * sys.B();
  }
}

CMatrix HessenbergResolvent::response(Complex s) const {
  if (states() == 0) return d_;
  const ShiftedLu lu(h_, s);
  return cq_ * lu.solve(qhb_) + d_;
}

CMatrix HessenbergResolvent::solve_left(Complex s, const CMatrix& rows) const {
  if (rows.cols() != states())
    throw Error(ErrorKind::DimensionMismatch, "solve_left: row width differs from state count");
  if (states() == 0) return rows;
  const ShiftedLu lu(h_, s);
  return lu.solve_left(rows * q_) * q_.adjoint();
}

CMatrix HessenbergResolvent::output_resolvent(Complex s, const CMatrix& left) const {
  if (left.cols() != cq_.rows())
    throw Error(ErrorKind::DimensionMismatch, "output_resolvent: weighting width differs from p");
  if (states() == 0) return CMatrix(left.rows(), 0);
  const ShiftedLu lu(h_, s);
  return lu.solve_left(left * cq_) * q_.adjoint();
}

CMatrix HessenbergResolvent::solve_right(Complex s, const CMatrix& rhs) const {
  if (rhs.rows() != states())
    throw Error(ErrorKind::DimensionMismatch, "solve_right: row count differs from state count");
  if (states() == 0) return rhs;
  const ShiftedLu lu(h_, s);
  return q_ * lu.solve(q_.adjoint() * rhs);
}

}  // namespace tanred
