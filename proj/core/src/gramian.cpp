#include <sstream>

#include <Eigen/Eigenvalues>

#include "tanred/error.hpp"
#include "tanred/gramian_norms.hpp"
#include "schur_util.hpp"

namespace tanred {

CMatrix solve_triangular_sylvester(const CMatrix& t1, const CMatrix& t2, const CMatrix& f) {
  const Index n = t1.rows();
  const Index m = t2.rows();
  if (t1.cols() != n || t2.cols() != m || f.rows() != n || f.cols() != m)
    throw Error(ErrorKind::DimensionMismatch, "solve_triangular_sylvester: shape mismatch");
  CMatrix x = CMatrix::Zero(n, m);
  // Column j of X T2^* only involves columns k >= j of X.
  for (Index j = m - 1; j >= 0; --j) {
    CVector rhs = f.col(j);
    const Index tail = m - 1 - j;
    if (tail > 0) rhs.noalias() -= x.rightCols(tail) * t2.row(j).tail(tail).adjoint();
    CMatrix shifted = t1;
    shifted.diagonal().array() += std::conj(t2(j, j));
    x.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return x;
}

namespace detail {

void swap_adjacent_schur(CMatrix& t, CMatrix& z, Index k) {
  const Index n = t.rows();
  const Complex a = t(k, k);
  const Complex b = t(k + 1, k + 1);
  const Complex v1 = t(k, k + 1);
  const Complex v2 = b - a;
  const double nv = std::hypot(std::abs(v1), std::abs(v2));
  if (nv == 0.0) return;
  const Complex c = v1 / nv;
  const Complex s = v2 / nv;
  Eigen::Matrix2cd g;
  g << c, -std::conj(s), s, std::conj(c);
  t.block(k, k, 2, n - k) = (g.adjoint() * t.block(k, k, 2, n - k)).eval();
  t.block(0, k, k + 2, 2) = (t.block(0, k, k + 2, 2) * g).eval();
  z.middleCols(k, 2) = (z.middleCols(k, 2) * g).eval();
  t(k + 1, k) = 0.0;
  t(k, k) = b;
  t(k + 1, k + 1) = a;
}

Index order_schur_stable_first(CMatrix& t, CMatrix& z) {
  const Index n = t.rows();
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (Index k = 0; k + 1 < n; ++k) {
      if (!(t(k, k).real() < 0.0) && t(k + 1, k + 1).real() < 0.0) {
        swap_adjacent_schur(t, z, k);
        swapped = true;
      }
    }
  }
  Index stable = 0;
  while (stable < n && t(stable, stable).real() < 0.0) ++stable;
  return stable;
}

CMatrix solve_block_decoupling(const CMatrix& t11, const CMatrix& t22, const CMatrix& t12) {
  // T11 Y - Y T22 = -T12, columns in increasing order.
  const Index k = t11.rows();
  const Index m = t22.rows();
  CMatrix y = CMatrix::Zero(k, m);
  for (Index j = 0; j < m; ++j) {
    CVector rhs = -t12.col(j);
    if (j > 0) rhs.noalias() += y.leftCols(j) * t22.col(j).head(j);
    CMatrix shifted = t11;
    shifted.diagonal().array() -= t22(j, j);
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return y;
}

CMatrix psd_factor(const CMatrix& theta, bool real) {
  const Index n = theta.rows();
  if (n == 0) return CMatrix(0, 0);
  if (real) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(theta.real());
    const RVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const RMatrix l = es.eigenvectors() * lam.asDiagonal();
    return l.cast<Complex>();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(theta);
  const RVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.cast<Complex>().asDiagonal();
}

}  // namespace detail

namespace {

GramianResult gramian_of(const CMatrix& a, const CMatrix& b, bool real) {
  GramianResult out;
  out.real = real;
  const Index n = a.rows();
  if (n == 0) {
    out.theta.resize(0, 0);
    out.factor.resize(0, 0);
    return out;
  }
  Eigen::ComplexSchur<CMatrix> schur(a);
  CMatrix t = schur.matrixT();
  CMatrix z = schur.matrixU();
  const Index ns = detail::order_schur_stable_first(t, z);
  const CMatrix bt = z.adjoint() * b;

  CMatrix theta;
  if (ns == n) {
    const CMatrix p = solve_triangular_sylvester(t, t, -(bt * bt.adjoint()));
    theta = z * p * z.adjoint();
    const CMatrix bb = b * b.adjoint();
    out.residual = (a * theta + theta * a.adjoint() + bb).norm();
    out.residual_scale = bb.norm();
  } else {
    const Index nu = n - ns;
    const CMatrix t11 = t.topLeftCorner(ns, ns);
    const CMatrix t22 = t.bottomRightCorner(nu, nu);
    const CMatrix y = detail::solve_block_decoupling(t11, t22, t.topRightCorner(ns, nu));
    const CMatrix bs = bt.topRows(ns) - y * bt.bottomRows(nu);
    const CMatrix bu = bt.bottomRows(nu);
    const CMatrix bbs = bs * bs.adjoint();
    const CMatrix bbu = bu * bu.adjoint();
    const CMatrix ps = solve_triangular_sylvester(t11, t11, -bbs);
    const CMatrix pu = solve_triangular_sylvester(t22, t22, bbu);
    const CMatrix v1 = z.leftCols(ns);
    const CMatrix v2 = z.leftCols(ns) * y + z.rightCols(nu);
    theta = v1 * ps * v1.adjoint() + v2 * pu * v2.adjoint();
    out.residual = (t11 * ps + ps * t11.adjoint() + bbs).norm() +
                   (t22 * pu + pu * t22.adjoint() - bbu).norm();
    out.residual_scale = bbs.norm() + bbu.norm();
  }
  theta = (0.5 * (theta + theta.adjoint())).eval();
  if (real) theta = theta.real().cast<Complex>();

  if (!(out.residual <= kLyapunovResidualTol * out.residual_scale) &&
      !(out.residual_scale == 0.0 && out.residual == 0.0)) {
    std::ostringstream os;
    os << "Lyapunov residual " << out.residual << " exceeds " << kLyapunovResidualTol
       << " * " << out.residual_scale;
    throw Error(ErrorKind::IllConditionedLyapunov, os.str());
  }
  out.factor = detail::psd_factor(theta, real);
  out.theta = std::move(theta);
  return out;
}

}  // namespace

GramianResult controllability_gramian(const StateSpace& sys) {
  return gramian_of(sys.A(), sys.B(), sys.is_real());
}

GramianResult observability_gramian(const StateSpace& sys) {
  return gramian_of(sys.A().adjoint(), sys.C().adjoint(), sys.is_real());
}

double h2_norm_sq(const StateSpace& sys, bool project_strictly_proper) {
  if (!project_strictly_proper && sys.D().size() > 0 && sys.D().cwiseAbs().maxCoeff() > 0.0)
    throw Error(ErrorKind::NonzeroFeedthrough,
                "H2 norm requested for a system with nonzero feedthrough");
  if (sys.states() == 0) return 0.0;
  const GramianResult g = controllability_gramian(sys);
  const CMatrix cl = sys.C() * g.factor;
  return cl.squaredNorm();
}

}  // namespace tanred
