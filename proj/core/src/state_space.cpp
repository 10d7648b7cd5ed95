#include "tanred/state_space.hpp"

#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "tanred/error.hpp"
#include "tanred/hessenberg_resolvent.hpp"

namespace tanred {

bool is_exactly_real(const CMatrix& m) noexcept {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j).imag() != 0.0) return false;
  return true;
}

namespace {

std::string shape(const CMatrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

StateSpace::StateSpace(CMatrix a, CMatrix b, CMatrix c, CMatrix d, ScalarField field)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), field_(field) {
  const Index n = a_.rows();
  if (a_.cols() != n || b_.rows() != n || c_.cols() != n || d_.rows() != c_.rows() ||
      d_.cols() != b_.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "inconsistent realization: A " + shape(a_) + ", B " + shape(b_) + ", C " +
                    shape(c_) + ", D " + shape(d_));
  }
  if (field_ == ScalarField::Real &&
      !(is_exactly_real(a_) && is_exactly_real(b_) && is_exactly_real(c_) && is_exactly_real(d_))) {
    throw Error(ErrorKind::InvariantViolation,
                "system tagged real has entries with nonzero imaginary part");
  }
}

StateSpace StateSpace::from_complex(CMatrix a, CMatrix b, CMatrix c, CMatrix d) {
  const bool real = is_exactly_real(a) && is_exactly_real(b) && is_exactly_real(c) &&
                    is_exactly_real(d);
  return StateSpace(std::move(a), std::move(b), std::move(c), std::move(d),
                    real ? ScalarField::Real : ScalarField::Complex);
}

StateSpace StateSpace::from_real(const RMatrix& a, const RMatrix& b, const RMatrix& c,
                                 const RMatrix& d) {
  return StateSpace(a.cast<Complex>(), b.cast<Complex>(), c.cast<Complex>(), d.cast<Complex>(),
                    ScalarField::Real);
}

StateSpace StateSpace::static_gain(CMatrix d, ScalarField field) {
  const Index p = d.rows();
  const Index q = d.cols();
  return StateSpace(CMatrix(0, 0), CMatrix(0, q), CMatrix(p, 0), std::move(d), field);
}

CVector StateSpace::poles() const {
  if (states() == 0) return CVector(0);
  if (is_real()) {
    Eigen::EigenSolver<RMatrix> es(a_.real(), false);
    return es.eigenvalues();
  }
  Eigen::ComplexEigenSolver<CMatrix> es(a_, false);
  return es.eigenvalues();
}

bool StateSpace::is_stable() const {
  const CVector p = poles();
  for (Index i = 0; i < p.size(); ++i)
    if (!(p(i).real() < 0.0)) return false;
  return true;
}

void StateSpace::require_no_imaginary_poles() const {
  const CVector p = poles();
  for (Index i = 0; i < p.size(); ++i) {
    const Complex lam = p(i);
    if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag()) ||
        std::abs(lam.real()) <= kImaginaryPoleTol * (1.0 + std::abs(lam))) {
      std::ostringstream os;
      os.precision(17);
      os << "A has an eigenvalue on the imaginary axis: " << lam.real()
         << (lam.imag() < 0 ? "-" : "+") << std::abs(lam.imag()) << "j";
      throw Error(ErrorKind::InvariantViolation, os.str());
    }
  }
}

CMatrix eval_tf(const StateSpace& sys, Complex s) {
  const Index n = sys.states();
  if (n == 0) return sys.D();
  CMatrix m = -sys.A();
  m.diagonal().array() += s;
  Eigen::PartialPivLU<CMatrix> lu(m);
  const double rc = lu.rcond();
  if (!(rc >= kMinResolventRcond)) {
    std::ostringstream os;
    os << "sI - A is numerically singular at s = " << s << " (rcond " << rc << ")";
    throw Error(ErrorKind::SingularResolvent, os.str());
  }
  return sys.C() * lu.solve(sys.B()) + sys.D();
}

std::vector<FreqResponse> freq_sweep(const StateSpace& sys, std::span<const double> omegas) {
  std::vector<FreqResponse> out;
  if (omegas.empty()) return out;
  out.reserve(omegas.size());
  const HessenbergResolvent resolvent(sys);
  for (const double w : omegas) out.push_back({w, resolvent.response(Complex(0.0, w))});
  return out;
}

StateSpace series_sub(const StateSpace& lhs, const StateSpace& rhs) {
  if (lhs.outputs() != rhs.outputs() || lhs.inputs() != rhs.inputs()) {
    throw Error(ErrorKind::DimensionMismatch,
                "series_sub: operands have different input/output dimensions");
  }
  const Index n1 = lhs.states();
  const Index n2 = rhs.states();
  const Index p = lhs.outputs();
  const Index q = lhs.inputs();
  CMatrix a = CMatrix::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1) = lhs.A();
  a.bottomRightCorner(n2, n2) = rhs.A();
  CMatrix b(n1 + n2, q);
  b.topRows(n1) = lhs.B();
  b.bottomRows(n2) = rhs.B();
  CMatrix c(p, n1 + n2);
  c.leftCols(n1) = lhs.C();
  c.rightCols(n2) = -rhs.C();
  CMatrix d = lhs.D() - rhs.D();
  const ScalarField field =
      lhs.is_real() && rhs.is_real() ? ScalarField::Real : ScalarField::Complex;
  return StateSpace(std::move(a), std::move(b), std::move(c), std::move(d), field);
}

}  // namespace tanred
