#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "tanred/error.hpp"
#include "tanred/gramian_norms.hpp"
#include "tanred/hessenberg_resolvent.hpp"

namespace tanred {

double sigma_max(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

namespace {

// Eigenvalues of the Hamiltonian whose imaginary-axis eigenvalues j w are
// exactly the frequencies where gamma is a singular value of G(j w).
CVector hamiltonian_eigenvalues(const StateSpace& sys, double gamma) {
  const Index n = sys.states();
  const CMatrix& a = sys.A();
  const CMatrix& b = sys.B();
  const CMatrix& c = sys.C();
  const CMatrix& d = sys.D();
  const double g2 = gamma * gamma;
  CMatrix r = d.adjoint() * d;
  r.diagonal().array() -= g2;
  CMatrix s = d * d.adjoint();
  s.diagonal().array() -= g2;
  const CMatrix r_inv = r.partialPivLu().inverse();
  const CMatrix s_inv = s.partialPivLu().inverse();
  CMatrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = a - b * r_inv * d.adjoint() * c;
  h.topRightCorner(n, n) = -gamma * (b * r_inv * b.adjoint());
  h.bottomLeftCorner(n, n) = gamma * (c.adjoint() * s_inv * c);
  h.bottomRightCorner(n, n) = -a.adjoint() + c.adjoint() * d * r_inv * b.adjoint();
  if (sys.is_real()) {
    Eigen::EigenSolver<RMatrix> es(h.real(), false);
    return es.eigenvalues();
  }
  Eigen::ComplexEigenSolver<CMatrix> es(h, false);
  return es.eigenvalues();
}

constexpr double kImaginaryEigTol = 1e-7;
constexpr int kMaxLevelSetIterations = 60;

}  // namespace

PeakGain peak_gain(const StateSpace& sys, double rtol) {
  if (!(rtol > 0.0 && rtol < 0.5))
    throw Error(ErrorKind::InvalidArgument, "peak_gain: rtol must lie in (0, 0.5)");
  const double d_gain = sigma_max(sys.D());
  PeakGain best{std::numeric_limits<double>::infinity(), d_gain};
  if (sys.states() == 0) return best;

  const HessenbergResolvent resolvent(sys);
  auto probe = [&](double w) {
    double g = 0.0;
    try {
      g = sigma_max(resolvent.response(Complex(0.0, w)));
    } catch (const Error&) {
      return false;
    }
    // A finite frequency attaining the feedthrough gain replaces the sentinel.
    if (g > best.gain || (best.at_infinity() && g > 0.0 && g >= best.gain)) {
      best.gain = g;
      best.omega_star = w;
      return true;
    }
    return false;
  };

  // Initial lower bound from DC and pole-derived frequencies.
  std::vector<double> candidates{0.0};
  const CVector poles = sys.poles();
  for (Index i = 0; i < poles.size(); ++i) {
    const Complex lam = poles(i);
    if (sys.is_real()) {
      candidates.push_back(std::abs(lam.imag()));
      candidates.push_back(std::abs(lam));
    } else {
      candidates.push_back(lam.imag());
      const double sign = lam.imag() < 0.0 ? -1.0 : 1.0;
      candidates.push_back(sign * std::abs(lam));
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (const double w : candidates) probe(w);

  for (int iter = 0; iter < kMaxLevelSetIterations; ++iter) {
    const double level = (1.0 + rtol) * best.gain;
    if (!(level > 0.0)) break;
    const CVector eig = hamiltonian_eigenvalues(sys, level);
    std::vector<double> crossings;
    for (Index i = 0; i < eig.size(); ++i) {
      const Complex lam = eig(i);
      if (std::abs(lam.real()) <= kImaginaryEigTol * (1.0 + std::abs(lam)))
        crossings.push_back(lam.imag());
    }
    if (crossings.empty()) break;
    std::sort(crossings.begin(), crossings.end());
    std::vector<double> trial;
    for (std::size_t i = 0; i < crossings.size(); ++i) {
      trial.push_back(crossings[i]);
      if (i + 1 < crossings.size()) trial.push_back(0.5 * (crossings[i] + crossings[i + 1]));
    }
    bool any = false;
    for (const double w : trial) {
      if (sys.is_real() && w < 0.0) continue;
      any = probe(w) || any;
    }
    if (!any) break;
  }
  return best;
}

namespace {

bool all_stable(const CVector& poles) {
  for (Index i = 0; i < poles.size(); ++i)
    if (!(poles(i).real() < 0.0)) return false;
  return true;
}

double quadrature_error_sq(const StateSpace& e, std::span<const double> grid) {
  std::vector<double> w(grid.begin(), grid.end());
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  if (w.size() < 2) return 0.0;
  const HessenbergResolvent resolvent(e);
  auto energy = [&](double omega) {
    try {
      return resolvent.response(Complex(0.0, omega)).squaredNorm();
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  auto trapezoid = [&](double sign) {
    double total = 0.0;
    double prev = energy(sign * w[0]);
    for (std::size_t i = 1; i < w.size(); ++i) {
      const double cur = energy(sign * w[i]);
      if (std::isfinite(prev) && std::isfinite(cur)) total += 0.5 * (prev + cur) * (w[i] - w[i - 1]);
      prev = cur;
    }
    return total;
  };
  if (e.is_real()) return trapezoid(1.0) / std::numbers::pi;
  return (trapezoid(1.0) + trapezoid(-1.0)) / (2.0 * std::numbers::pi);
}

void check_same_io(const StateSpace& g, const StateSpace& r) {
  if (g.outputs() != r.outputs() || g.inputs() != r.inputs())
    throw Error(ErrorKind::DimensionMismatch, "error_norm: systems have different I/O sizes");
}

}  // namespace

ErrorNorm error_norm(const StateSpace& g, const StateSpace& r,
                     std::span<const double> grid_fallback) {
  check_same_io(g, r);
  const StateSpace e = series_sub(g, r);
  if (all_stable(g.poles()) && all_stable(r.poles()))
    return {std::sqrt(std::max(0.0, h2_norm_sq(e))), false};
  return {std::sqrt(std::max(0.0, quadrature_error_sq(e, grid_fallback))), true};
}

struct H2ErrorEvaluator::Impl {
  StateSpace g;
  std::vector<double> grid;
  bool stable = false;
  CMatrix t;   // Schur factor of A_g
  CMatrix bt;  // Z^* B_g
  CMatrix ct;  // C_g Z
  double gg = 0.0;
};

H2ErrorEvaluator::H2ErrorEvaluator(const StateSpace& g, std::vector<double> grid_fallback)
    : impl_(std::make_unique<Impl>()) {
  impl_->g = g;
  impl_->grid = std::move(grid_fallback);
  impl_->stable = all_stable(g.poles());
  if (!impl_->stable || g.states() == 0) return;
  Eigen::ComplexSchur<CMatrix> schur(g.A());
  impl_->t = schur.matrixT();
  const CMatrix z = schur.matrixU();
  impl_->bt = z.adjoint() * g.B();
  impl_->ct = g.C() * z;
  const CMatrix p = solve_triangular_sylvester(impl_->t, impl_->t, -(impl_->bt * impl_->bt.adjoint()));
  impl_->gg = (impl_->ct * p * impl_->ct.adjoint()).trace().real();
}

H2ErrorEvaluator::~H2ErrorEvaluator() = default;
H2ErrorEvaluator::H2ErrorEvaluator(H2ErrorEvaluator&&) noexcept = default;
H2ErrorEvaluator& H2ErrorEvaluator::operator=(H2ErrorEvaluator&&) noexcept = default;

ErrorNorm H2ErrorEvaluator::operator()(const StateSpace& r) const {
  const Impl& s = *impl_;
  check_same_io(s.g, r);
  if (!s.stable || !all_stable(r.poles()) || s.g.states() == 0)
    return error_norm(s.g, r, s.grid);
  if ((s.g.D() - r.D()).cwiseAbs().maxCoeff() > 0.0)
    throw Error(ErrorKind::NonzeroFeedthrough, "error system has nonzero feedthrough");
  if (r.states() == 0) return {std::sqrt(std::max(0.0, s.gg)), false};
  Eigen::ComplexSchur<CMatrix> schur(r.A());
  const CMatrix tr = schur.matrixT();
  const CMatrix zr = schur.matrixU();
  const CMatrix br = zr.adjoint() * r.B();
  const CMatrix cr = r.C() * zr;
  const CMatrix pr = solve_triangular_sylvester(tr, tr, -(br * br.adjoint()));
  const CMatrix pgr = solve_triangular_sylvester(s.t, tr, -(s.bt * br.adjoint()));
  const double rr = (cr * pr * cr.adjoint()).trace().real();
  const double gr = (s.ct * pgr * cr.adjoint()).trace().real();
  return {std::sqrt(std::max(0.0, s.gg + rr - 2.0 * gr)), false};
}

}  // namespace tanred
