#include "tanred/weight_solver.hpp"

#include <algorithm>
#include <vector>

#include <Eigen/QR>

#include "tanred/error.hpp"

namespace tanred {

namespace {

void check_inputs(const StateSpace& sys, const GramianResult& theta, const InterpData& data) {
  if (theta.factor.rows() != sys.states())
    throw Error(ErrorKind::DimensionMismatch, "Gramian factor does not match the system");
  if (data.parent_states() != sys.states() || data.outputs() != sys.outputs())
    throw Error(ErrorKind::DimensionMismatch, "interpolation data was built for another system");
}

// Row by row, so a row's bits do not depend on how many other rows there are.
template <typename Mat>
Mat rowwise_product(const Mat& rows, const Mat& l) {
  Mat out(rows.rows(), l.cols());
  for (Index i = 0; i < rows.rows(); ++i) out.row(i).noalias() = rows.row(i) * l;
  return out;
}

// Least squares W * cl ~= yl over the numerical range of cl^*.
//
// The columns of cl^* are orthogonalized in insertion order and a column whose
// new component is below kGramRankTol of its own norm is treated as dependent.
// Data added later therefore only ever enlarges the retained subspace, so gamma
// cannot grow from one iteration to the next. W is the minimal-norm solution
// over that subspace.
template <typename Mat>
WeightSolution least_squares(const Mat& cl, const Mat& yl, const std::vector<Index>& order) {
  WeightSolution sol;
  const Index r = cl.rows();
  const Index n = cl.cols();
  const Index p = yl.rows();
  if (r == 0) {
    sol.w = CMatrix::Zero(p, 0);
    sol.gamma = yl.squaredNorm();
    return sol;
  }
  const Mat cols = cl.adjoint();  // n x r
  Mat q(n, std::min(n, r));
  Index k = 0;
  for (const Index j : order) {
    const auto c = cols.col(j);
    const double c_norm = c.norm();
    if (!(c_norm > 0.0)) continue;
    Mat v = c;
    for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(k) * (q.leftCols(k).adjoint() * v);
    const double v_norm = v.norm();
    if (v_norm > kGramRankTol * c_norm && k < n) q.col(k++) = v / v_norm;
  }
  if (k == 0)
    throw Error(ErrorKind::GramianRankCollapse,
                "Cscr Theta Cscr^* vanishes; interpolation data carries no information");
  const auto qk = q.leftCols(k);
  Mat resid = yl.adjoint();
  for (int pass = 0; pass < 2; ++pass) resid -= qk * (qk.adjoint() * resid);

  // Minimal-norm W^* with (Q^* cl^*) W^* = Q^* yl^*, via a QR factorization of
  // (Q^* cl^*)^* = P T.
  const Mat m_adj = (qk.adjoint() * cols).adjoint();  // r x k
  Eigen::HouseholderQR<Mat> qr(m_adj);
  const Mat pk = qr.householderQ() * Mat::Identity(r, k);
  const Mat t = qr.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Mat z = t.adjoint().template triangularView<Eigen::Lower>().solve(qk.adjoint() * yl.adjoint());
  const Mat w = (pk * z).adjoint();  // p x r
  sol.gram_rank = k;
  sol.regularized = k < r;
  sol.gamma = resid.squaredNorm();
  sol.w = w.template cast<Complex>();
  return sol;
}

}  // namespace

CMatrix build_x(const StateSpace& sys, const GramianResult& theta, const InterpData& data) {
  check_inputs(sys, theta, data);
  const Index p = sys.outputs();
  const Index r = data.total_order();
  CMatrix y(p + r, sys.states());
  y << sys.C(), data.cscr();
  y *= theta.factor;
  CMatrix x = y * y.adjoint();
  x.topRightCorner(p, r) *= -1.0;
  x.bottomLeftCorner(r, p) *= -1.0;
  return x;
}

WeightSolution solve_weights(const StateSpace& sys, const GramianResult& theta,
                             const InterpData& data) {
  check_inputs(sys, theta, data);
  const bool real = sys.is_real() && data.field() == ScalarField::Real && theta.real &&
                    is_exactly_real(theta.factor);
  if (real) {
    const RMatrix l = theta.factor.real();
    const RMatrix cl = rowwise_product<RMatrix>(data.cscr().real(), l);
    const RMatrix yl = sys.C().real() * l;
    return least_squares<RMatrix>(cl, yl, data.insertion_order());
  }
  const CMatrix cl = rowwise_product<CMatrix>(data.cscr(), theta.factor);
  const CMatrix yl = sys.C() * theta.factor;
  return least_squares<CMatrix>(cl, yl, data.insertion_order());
}

double gamma_of(const CMatrix& x, const CMatrix& w) {
  const Index p = w.rows();
  const Index r = w.cols();
  if (x.rows() != p + r || x.cols() != p + r)
    throw Error(ErrorKind::DimensionMismatch, "gamma_of: X must be (p + r) square");
  CMatrix iw(p, p + r);
  iw << CMatrix::Identity(p, p), w;
  return (iw * x * iw.adjoint()).trace().real();
}

}  // namespace tanred
