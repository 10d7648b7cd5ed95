#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "tanred/error.hpp"
#include "tanred/reducer.hpp"
#include "test_systems.hpp"

namespace tanred {
namespace {

using testing::Rng;

StateSpace scalar_lowpass() {
  return StateSpace::from_real(RMatrix::Constant(1, 1, -1.0), RMatrix::Ones(1, 1),
                               RMatrix::Ones(1, 1), RMatrix::Zero(1, 1));
}

ReducerConfig config_for(StrategyKind kind, Index max_order) {
  ReducerConfig cfg;
  cfg.strategy.kind = kind;
  cfg.max_order = max_order;
  cfg.timing = false;
  if (kind == StrategyKind::Discrete) {
    for (int i = 0; i < 60; ++i) cfg.strategy.grid.push_back(std::pow(10.0, -2.0 + 4.0 * i / 59.0));
  }
  cfg.strategy.omega_min = 1e-2;
  cfg.strategy.omega_max = 1e2;
  cfg.strategy.K = 40;
  return cfg;
}

TEST(Reduce, ScalarConvergesInOneIteration) {
  for (const auto kind : {StrategyKind::MaxError, StrategyKind::Discrete, StrategyKind::Random}) {
    const ReductionTrace t = reduce(scalar_lowpass(), config_for(kind, 5));
    ASSERT_EQ(t.rows.size(), 1u) << strategy_name(kind);
    // A nonzero frequency enters as a real pair.
    EXPECT_EQ(t.rows[0].order, t.rows[0].omega == 0.0 ? 1 : 2);
    EXPECT_LE(t.rows[0].gamma, 1e-15);
    EXPECT_EQ(t.stop, StopReason::GammaTol);
    EXPECT_LE(t.rows[0].error_norm, 1e-7);
  }
}

TEST(Reduce, ExactRecoveryOfRandomSystem) {
  Rng rng(71);
  const StateSpace g = testing::random_stable_real(rng, 8, 2, 2);
  const ReductionTrace t = reduce(g, config_for(StrategyKind::MaxError, 8));
  ASSERT_FALSE(t.rows.empty());
  EXPECT_GE(t.rows.back().order, 8);
  EXPECT_LE(t.rows.back().gamma, 1e-8 * t.gamma0);
  const std::vector<double> grid;
  const double rel = error_norm(g, t.reduced, grid).value / std::sqrt(t.gamma0);
  EXPECT_LE(rel, 1e-6);
  EXPECT_TRUE(t.reduced.is_real());
}

TEST(Reduce, TraceInvariantsForAllStrategies) {
  Rng rng(72);
  for (int trial = 0; trial < 6; ++trial) {
    const StateSpace g = testing::random_stable_real(rng, 20, 3, 3);
    for (const auto kind : {StrategyKind::MaxError, StrategyKind::Discrete, StrategyKind::Random}) {
      ReducerConfig cfg = config_for(kind, 16);
      cfg.strategy.seed = static_cast<std::uint64_t>(trial);
      const ReductionTrace t = reduce(g, cfg, true);
      ASSERT_FALSE(t.rows.empty());
      double prev_gamma = t.gamma0;
      Index prev_order = 0;
      for (const TraceRow& row : t.rows) {
        EXPECT_LE(row.gamma, prev_gamma + 1e-10 * t.gamma0);
        EXPECT_GT(row.order, prev_order);
        prev_gamma = row.gamma;
        prev_order = row.order;
      }
      EXPECT_EQ(t.models.size(), t.rows.size());
      EXPECT_TRUE(testing::bitwise_real(t.w));
      // Interpolation identity at every stored point of the final model.
      for (const auto& blk : t.data.blocks()) {
        const Complex s(0.0, blk.point.omega);
        const CMatrix diff =
            blk.point.u.adjoint() * (testing::oracle_tf(t.reduced, s) - testing::oracle_tf(g, s));
        EXPECT_LE(diff.norm(), 1e-8 * (1.0 + blk.point.sigma.norm()));
      }
    }
  }
}

TEST(Reduce, DeterministicReruns) {
  Rng rng(73);
  const StateSpace g = testing::random_stable_real(rng, 15, 2, 2);
  for (const auto kind : {StrategyKind::MaxError, StrategyKind::Discrete, StrategyKind::Random}) {
    ReducerConfig cfg = config_for(kind, 10);
    cfg.strategy.seed = 7;
    const ReductionTrace a = reduce(g, cfg);
    const ReductionTrace b = reduce(g, cfg);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      EXPECT_EQ(a.rows[i].omega, b.rows[i].omega);
      EXPECT_EQ(a.rows[i].gamma, b.rows[i].gamma);
    }
    EXPECT_EQ(a.reduced.A(), b.reduced.A());
  }
}

TEST(Reduce, ErrorNormCrossCheckedByQuadrature) {
  Rng rng(74);
  const StateSpace g = testing::random_stable_complex(rng, 10, 2, 2);
  const ReductionTrace t = reduce(g, config_for(StrategyKind::MaxError, 4));
  ASSERT_FALSE(t.rows.empty());
  if (!t.reduced.is_stable()) GTEST_SKIP() << "reduced model unstable for this draw";
  const double ref = std::sqrt(testing::oracle_h2_sq(series_sub(g, t.reduced)));
  EXPECT_NEAR(t.rows.back().error_norm, ref, 1e-3 * ref);
}

TEST(Reduce, StopsGracefullyWhenRankIsExhausted) {
  // Three states, rank-one response everywhere: one grid point cannot recover
  // G, and the second visit to it finds no further singular direction.
  RMatrix a = RMatrix::Zero(3, 3);
  a.diagonal() << -1.0, -2.0, -3.0;
  RMatrix b(3, 2);
  b << 1.0, 0.5, 1.0, 0.5, 1.0, 0.5;
  RMatrix c(2, 3);
  c << 1.0, 1.0, 1.0, -1.0, -1.0, -1.0;
  const StateSpace g = StateSpace::from_real(a, b, c, RMatrix::Zero(2, 2));
  ReducerConfig cfg = config_for(StrategyKind::Discrete, 10);
  cfg.strategy.grid = {1.0};
  cfg.gamma_rel_tol = 1e-300;
  const ReductionTrace t = reduce(g, cfg);
  ASSERT_GE(t.rows.size(), 1u);
  EXPECT_EQ(t.stop, StopReason::Failure);
  EXPECT_NE(t.failure.find("RankExhausted"), std::string::npos);
  EXPECT_EQ(t.reduced.states(), t.rows.back().order);
}

TEST(Reduce, MaxOrderAndErrorTolerance) {
  Rng rng(75);
  const StateSpace g = testing::random_stable_real(rng, 30, 3, 3);
  ReducerConfig cfg = config_for(StrategyKind::MaxError, 6);
  const ReductionTrace t = reduce(g, cfg);
  EXPECT_EQ(t.stop, StopReason::MaxOrder);
  EXPECT_LE(t.rows.back().order, 7);
  cfg.max_order = 30;
  cfg.error_rel_tol = 0.5;
  const ReductionTrace e = reduce(g, cfg);
  EXPECT_EQ(e.stop, StopReason::ErrorTol);
  EXPECT_LE(e.rows.back().error_norm, 0.5 * std::sqrt(e.gamma0));
}

TEST(Reduce, RejectsBadConfig) {
  ReducerConfig cfg;
  cfg.max_order = 0;
  EXPECT_THROW(reduce(scalar_lowpass(), cfg), Error);
  cfg = ReducerConfig{};
  cfg.rho = 1.5;
  EXPECT_THROW(reduce(scalar_lowpass(), cfg), Error);
}

TEST(BalancedTruncation, FullOrderReproducesSystem) {
  Rng rng(76);
  const StateSpace g = testing::random_stable_real(rng, 7, 2, 3, true);
  const StateSpace bt = balanced_truncation(g, 7);
  EXPECT_TRUE(bt.is_real());
  for (const double w : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    const Complex s(0.0, w);
    EXPECT_LE((testing::oracle_tf(bt, s) - testing::oracle_tf(g, s)).norm(), 1e-8);
  }
}

TEST(BalancedTruncation, TwoStateAnalyticHankelValues) {
  // G = 1/(s+1) + eps/(s+10), diagonal realization with b = c.
  const double eps = 1e-4;
  RMatrix a = RMatrix::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -10.0;
  RMatrix b(2, 1);
  b << 1.0, std::sqrt(eps);
  const RMatrix c = b.transpose();
  const StateSpace g = StateSpace::from_real(a, b, c, RMatrix::Zero(1, 1));
  // Hankel values are the eigenvalues of P Q with P = Q = [b_i b_j / (l_i + l_j)].
  RMatrix p(2, 2);
  const double l[2] = {1.0, 10.0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) p(i, j) = b(i) * b(j) / (l[i] + l[j]);
  const RVector ref = (p * p).eigenvalues().real().cwiseSqrt();
  RVector hsv = hankel_singular_values(g);
  const double hi = std::max(ref(0), ref(1));
  const double lo = std::min(ref(0), ref(1));
  EXPECT_NEAR(hsv(0), hi, 1e-12);
  EXPECT_NEAR(hsv(1), lo, 1e-12);
  const StateSpace r = balanced_truncation(g, 1);
  EXPECT_EQ(r.states(), 1);
  const double dc_err = std::abs((testing::oracle_tf(r, 0.0) - testing::oracle_tf(g, 0.0))(0, 0));
  EXPECT_LE(dc_err, 2.0 * hsv(1) + 1e-12);
}

TEST(BalancedTruncation, ErrorContracts) {
  Rng rng(77);
  const StateSpace g = testing::random_stable_real(rng, 4, 1, 1);
  try {
    balanced_truncation(g, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
  const StateSpace u = StateSpace::from_real(RMatrix::Constant(1, 1, 1.0), RMatrix::Ones(1, 1),
                                             RMatrix::Ones(1, 1), RMatrix::Zero(1, 1));
  try {
    balanced_truncation(u, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnstableSystem);
  }
}

TEST(SweepOrders, EmptyAndScalar) {
  EXPECT_TRUE(sweep_orders(scalar_lowpass(), config_for(StrategyKind::MaxError, 5), {}).empty());
  const auto rows = sweep_orders(scalar_lowpass(), config_for(StrategyKind::MaxError, 5), {1});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].tangential_order, 1);
  EXPECT_LE(rows[0].tangential_error, 1e-7);
  EXPECT_LE(rows[0].balanced_error, 1e-7);
}

TEST(SweepOrders, SurrogateTracksBalancedTruncation) {
  // Synthetic lightly damped structural model (not the ISS benchmark).
  Rng rng(78);
  const StateSpace g = testing::flexural_surrogate(rng, 30, 3, 3);
  ReducerConfig cfg = config_for(StrategyKind::MaxError, 20);
  const auto rows = sweep_orders(g, cfg, {4, 8, 12, 16, 20});
  ASSERT_EQ(rows.size(), 5u);
  for (const CompareRow& row : rows) {
    EXPECT_TRUE(std::isfinite(row.tangential_error));
    EXPECT_LE(row.tangential_error, 10.0 * row.balanced_error) << "order " << row.order;
  }
  EXPECT_LT(rows.back().tangential_error, rows.front().tangential_error);
}

}  // namespace
}  // namespace tanred
