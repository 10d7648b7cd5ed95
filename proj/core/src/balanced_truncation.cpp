#include <sstream>

#include <Eigen/SVD>

#include "tanred/error.hpp"
#include "tanred/reducer.hpp"

namespace tanred {

namespace {

void require_stable(const StateSpace& sys) {
  if (!sys.is_stable())
    throw Error(ErrorKind::UnstableSystem, "balanced truncation needs a stable system");
}

// Square-root method: Lo^* Lc = U S V^*, T_l = S^-1/2 U^* Lo^*, T_r = Lc V S^-1/2.
template <typename Mat>
StateSpace truncate(const Mat& a, const Mat& b, const Mat& c, const Mat& d, const Mat& lc,
                    const Mat& lo, Index order, ScalarField field) {
  Eigen::JacobiSVD<Mat> svd(lo.adjoint() * lc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  if (!(s(order - 1) > 0.0)) {
    std::ostringstream os;
    os << "balanced truncation: Hankel value " << order << " is zero";
    throw Error(ErrorKind::RankDeficient, os.str());
  }
  const RVector scale = s.head(order).cwiseSqrt().cwiseInverse();
  const Mat tl = scale.asDiagonal() * svd.matrixU().leftCols(order).adjoint() * lo.adjoint();
  const Mat tr = lc * svd.matrixV().leftCols(order) * scale.asDiagonal();
  return StateSpace((tl * a * tr).template cast<Complex>(), (tl * b).template cast<Complex>(),
                    (c * tr).template cast<Complex>(), d.template cast<Complex>(), field);
}

}  // namespace

RVector hankel_singular_values(const StateSpace& sys) {
  require_stable(sys);
  if (sys.states() == 0) return RVector(0);
  const GramianResult wc = controllability_gramian(sys);
  const GramianResult wo = observability_gramian(sys);
  return (wo.factor.adjoint() * wc.factor).jacobiSvd().singularValues();
}

StateSpace balanced_truncation(const StateSpace& sys, Index order) {
  if (order < 1 || order > sys.states()) {
    std::ostringstream os;
    os << "balanced truncation order " << order << " outside 1.." << sys.states();
    throw Error(ErrorKind::IndexOutOfRange, os.str());
  }
  require_stable(sys);
  const GramianResult wc = controllability_gramian(sys);
  const GramianResult wo = observability_gramian(sys);
  if (sys.is_real())
    return truncate<RMatrix>(sys.A().real(), sys.B().real(), sys.C().real(), sys.D().real(),
                             wc.factor.real(), wo.factor.real(), order, ScalarField::Real);
  return truncate<CMatrix>(sys.A(), sys.B(), sys.C(), sys.D(), wc.factor, wo.factor, order,
                           ScalarField::Complex);
}

}  // namespace tanred
