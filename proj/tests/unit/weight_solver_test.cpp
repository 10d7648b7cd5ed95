#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "tanred/error.hpp"
#include "tanred/weight_solver.hpp"
#include "test_systems.hpp"

namespace tanred {
namespace {

using testing::Rng;

InterpPoint point_at(const StateSpace& g, double w, Index r_min, Index r_max) {
  return truncated_point({w, testing::oracle_tf(g, Complex(0.0, w))}, r_min, r_max);
}

StateSpace weighted_h(const StateSpace& h, const CMatrix& w) {
  const Index p = w.rows();
  CMatrix iw(p, p + w.cols());
  iw << CMatrix::Identity(p, p), w;
  return StateSpace(h.A(), h.B(), iw * h.C(), CMatrix::Zero(p, h.inputs()), ScalarField::Complex);
}

TEST(WeightSolver, ScalarExample) {
  const StateSpace g = StateSpace::from_real(RMatrix::Constant(1, 1, -1.0), RMatrix::Ones(1, 1),
                                             RMatrix::Ones(1, 1), RMatrix::Zero(1, 1));
  const GramianResult th = controllability_gramian(g);
  const InterpData d = append_point(InterpData::empty_for(g), g, point_at(g, 0.0, 1, 1));
  const CMatrix x = build_x(g, th, d);
  CMatrix expect(2, 2);
  expect << 0.5, -0.5, -0.5, 0.5;
  EXPECT_LE((x - expect).norm(), 1e-15);
  const WeightSolution sol = solve_weights(g, th, d);
  EXPECT_NEAR(sol.w(0, 0).real(), 1.0, 1e-14);
  EXPECT_NEAR(sol.gamma, 0.0, 1e-15);
  EXPECT_NEAR(gamma_of(x, sol.w), 0.0, 1e-15);
  EXPECT_EQ(sol.gram_rank, 1);
}

TEST(WeightSolver, EmptyDataGivesGammaZero) {
  Rng rng(51);
  const StateSpace g = testing::random_stable_real(rng, 7, 2, 3, true);
  const GramianResult th = controllability_gramian(g);
  const InterpData d = InterpData::empty_for(g);
  const WeightSolution sol = solve_weights(g, th, d);
  EXPECT_EQ(sol.w.cols(), 0);
  const double h2 = h2_norm_sq(g, true);
  EXPECT_NEAR(sol.gamma, h2, 1e-12 * h2);
  EXPECT_NEAR(gamma_of(build_x(g, th, d), sol.w), h2, 1e-12 * h2);
}

TEST(WeightSolver, BuildXMatchesQuadratureOfH) {
  Rng rng(52);
  const StateSpace g = testing::random_stable_real(rng, 6, 2, 2);
  const GramianResult th = controllability_gramian(g);
  InterpData d = InterpData::empty_for(g);
  d = append_point(d, g, point_at(g, 0.5, 1, 1));
  const CMatrix x = build_x(g, th, d);
  EXPECT_LE((x - x.adjoint()).norm(), 1e-14 * x.norm());
  // (1 / 2 pi) integral of H H^* over the real line, H = realize_h.
  const StateSpace h = realize_h(d, g);
  CMatrix quad = CMatrix::Zero(x.rows(), x.cols());
  const int panels = 20000;
  const double hstep = std::numbers::pi / panels;
  for (int k = 0; k < panels; ++k) {
    const double th_mid = -std::numbers::pi / 2.0 + (k + 0.5) * hstep;
    const double w = std::tan(th_mid);
    const CMatrix hv = testing::oracle_tf(h, Complex(0.0, w));
    quad += hv * hv.adjoint() * (hstep / (std::cos(th_mid) * std::cos(th_mid)));
  }
  quad /= 2.0 * std::numbers::pi;
  EXPECT_LE((quad - x).norm(), 1e-4 * x.norm());
}

TEST(WeightSolver, MatchesNormalEquationsOracle) {
  Rng rng(53);
  for (int trial = 0; trial < 4; ++trial) {
    const StateSpace g = trial % 2 ? testing::random_stable_complex(rng, 10, 3, 3)
                                   : testing::random_stable_real(rng, 10, 3, 3);
    const GramianResult th = controllability_gramian(g);
    const InterpData d = append_point(InterpData::empty_for(g), g, point_at(g, 0.9, 1, 1));
    const CMatrix x = build_x(g, th, d);
    const Index p = g.outputs();
    const Index r = d.total_order();
    // gamma(W) minimized where W X22 = -X12.
    const CMatrix x22 = x.bottomRightCorner(r, r);
    const CMatrix x12 = x.topRightCorner(p, r);
    const CMatrix w_ref = -x22.transpose().fullPivLu().solve(x12.transpose()).transpose();
    const double gamma_ref = gamma_of(x, w_ref);
    const WeightSolution sol = solve_weights(g, th, d);
    EXPECT_NEAR(sol.gamma, gamma_ref, 1e-8 * gamma_ref);
    EXPECT_LE((sol.w - w_ref).norm(), 1e-8 * w_ref.norm());
    // Stationarity: W Cscr Th Cscr^* = C Th Cscr^*.
    EXPECT_LE((sol.w * x22 + x12).norm(), 1e-8 * x12.norm());
    EXPECT_EQ(g.is_real(), testing::bitwise_real(sol.w));
  }
}

TEST(WeightSolver, LocalOptimalityProbes) {
  Rng rng(54);
  const StateSpace g = testing::random_stable_real(rng, 12, 3, 2);
  const GramianResult th = controllability_gramian(g);
  InterpData d = InterpData::empty_for(g);
  d = append_point(d, g, point_at(g, 0.0, 1, 2));
  d = append_point(d, g, point_at(g, 2.0, 1, 1));
  const CMatrix x = build_x(g, th, d);
  const WeightSolution sol = solve_weights(g, th, d);
  const double g0 = gamma_of(x, sol.w);
  EXPECT_NEAR(g0, sol.gamma, 1e-10 * x.norm());
  for (int k = 0; k < 100; ++k) {
    CMatrix dw = testing::random_complex(rng, sol.w.rows(), sol.w.cols());
    dw *= 1e-3 * sol.w.norm() / dw.norm();
    EXPECT_GE(gamma_of(x, sol.w + dw), g0 - 1e-10);
  }
}

TEST(WeightSolver, WeightedResidualIdentity) {
  Rng rng(55);
  for (const bool complex_field : {false, true}) {
    const StateSpace g = complex_field ? testing::random_stable_complex(rng, 9, 2, 2)
                                       : testing::random_stable_real(rng, 9, 2, 2);
    const GramianResult th = controllability_gramian(g);
    InterpData d = InterpData::empty_for(g);
    d = append_point(d, g, point_at(g, 0.4, 1, 1));
    d = append_point(d, g, point_at(g, 3.0, 1, 2));
    const WeightSolution sol = solve_weights(g, th, d);
    const double h2 = h2_norm_sq(weighted_h(realize_h(d, g), sol.w));
    EXPECT_NEAR(sol.gamma, h2, 1e-6 * h2);
  }
}

TEST(WeightSolver, SaturationAndRankDeficientRegime) {
  Rng rng(56);
  const Index n = 5;
  const StateSpace g = testing::random_stable_real(rng, n, 2, 2);
  const GramianResult th = controllability_gramian(g);
  const double gamma0 = solve_weights(g, th, InterpData::empty_for(g)).gamma;
  InterpData d = InterpData::empty_for(g);
  double w = 0.0;
  double prev = gamma0;
  while (d.total_order() < n + 3) {
    d = append_point(d, g, point_at(g, w, 1, 1));
    const WeightSolution sol = solve_weights(g, th, d);
    EXPECT_LE(sol.gamma, prev + 1e-10 * gamma0);
    prev = sol.gamma;
    if (d.total_order() >= n) {
      EXPECT_LE(sol.gamma, 1e-8 * gamma0);
    }
    if (d.total_order() > n) {
      EXPECT_TRUE(sol.regularized);
      EXPECT_EQ(sol.gram_rank, n);
    }
    w = w == 0.0 ? 0.5 : 2.3 * w;
  }
}

TEST(WeightSolver, ClusteredFrequenciesKeepGammaMonotone) {
  Rng rng(58);
  const StateSpace g = testing::random_stable_real(rng, 16, 2, 2);
  const GramianResult th = controllability_gramian(g);
  InterpData d = InterpData::empty_for(g);
  double prev = solve_weights(g, th, d).gamma;
  const double gamma0 = prev;
  for (const double w : {0.1, 0.1013, 0.1021, 0.1037, 0.1049, 0.1062, 0.1078, 3.0}) {
    d = append_point(d, g, point_at(g, w, 1, 1));
    const WeightSolution sol = solve_weights(g, th, d);
    EXPECT_LE(sol.gamma, prev + 1e-14 * gamma0) << "omega " << w;
    prev = sol.gamma;
  }
}

TEST(WeightSolver, CollapsedGramianIsReported) {
  // C = 0 with a nonzero feedthrough: Cscr vanishes identically.
  Rng rng(57);
  const StateSpace g0 = testing::random_stable_real(rng, 4, 2, 2);
  const StateSpace g = StateSpace::from_real(g0.A().real(), g0.B().real(), RMatrix::Zero(2, 4),
                                             RMatrix::Identity(2, 2));
  const GramianResult th = controllability_gramian(g);
  const InterpData d = append_point(InterpData::empty_for(g), g, point_at(g, 1.0, 1, 1));
  try {
    solve_weights(g, th, d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GramianRankCollapse);
  }
}

}  // namespace
}  // namespace tanred
