#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tanred/error.hpp"
#include "tanred/freq_select.hpp"
#include "test_systems.hpp"

namespace tanred {
namespace {

using testing::Rng;

StateSpace scalar_lowpass() {
  return StateSpace::from_real(RMatrix::Constant(1, 1, -1.0), RMatrix::Ones(1, 1),
                               RMatrix::Ones(1, 1), RMatrix::Zero(1, 1));
}

StateSpace resonance(double w0, double zeta) {
  RMatrix a(2, 2);
  a << 0.0, 1.0, -w0 * w0, -2.0 * zeta * w0;
  RMatrix b(2, 1);
  b << 0.0, 1.0;
  RMatrix c(1, 2);
  c << 1.0, 0.0;
  return StateSpace::from_real(a, b, c, RMatrix::Zero(1, 1));
}

StateSpace zero_model(const StateSpace& g) { return StateSpace::static_gain(g.D(), g.field()); }

TEST(SplitMix64, ReferenceStream) {
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(SelectMaxError, LowpassPeaksAtDc) {
  const StateSpace g = scalar_lowpass();
  EXPECT_NEAR(select_max_error(g, zero_model(g)), 0.0, 1e-8);
}

TEST(SelectMaxError, FindsResonance) {
  const StateSpace g = resonance(4.0, 0.02);
  EXPECT_NEAR(select_max_error(g, zero_model(g)), 4.0, 0.01);
}

TEST(SelectMaxError, InfinitySentinelIsMappedToFiniteFrequency) {
  // G - R = 2 - 1/(s+1) - 0 peaks at infinity.
  const StateSpace g = StateSpace::from_real(RMatrix::Constant(1, 1, -1.0), RMatrix::Ones(1, 1),
                                             RMatrix::Constant(1, 1, -1.0), RMatrix::Constant(1, 1, 2.0));
  const StateSpace r = StateSpace::static_gain(CMatrix::Zero(1, 1), ScalarField::Real);
  EXPECT_DOUBLE_EQ(select_max_error(g, r), 10.0);
}

TEST(SelectDiscrete, SingletonAndEmptyGrid) {
  const StateSpace g = resonance(2.0, 0.05);
  const std::vector<double> one{0.0};
  EXPECT_EQ(select_discrete(g, zero_model(g), one), 0.0);
  try {
    select_discrete(g, zero_model(g), std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyGrid);
  }
}

TEST(SelectDiscrete, NearestGridPointToResonanceWins) {
  const StateSpace g = resonance(3.0, 0.01);
  const std::vector<double> grid{0.5, 1.0, 2.0, 2.9, 3.2, 5.0, 10.0};
  EXPECT_EQ(select_discrete(g, zero_model(g), grid), 2.9);
}

TEST(SelectDiscrete, TiesGoToSmallestFrequency) {
  // Constant error |G - R| = 1 everywhere.
  const StateSpace g = StateSpace::static_gain(CMatrix::Ones(1, 1), ScalarField::Real);
  const StateSpace r = StateSpace::static_gain(CMatrix::Zero(1, 1), ScalarField::Real);
  const std::vector<double> grid{0.5, 1.0, 4.0};
  EXPECT_EQ(select_discrete(g, r, grid), 0.5);
}

TEST(SelectRandom, SingleDrawAndDeterminism) {
  const StateSpace g = resonance(3.0, 0.01);
  SelectionStrategy cfg;
  cfg.kind = StrategyKind::Random;
  cfg.omega_min = 0.1;
  cfg.omega_max = 100.0;
  cfg.K = 1;
  const RandomPick one = select_random(g, zero_model(g), cfg, SplitMix64(5));
  SplitMix64 replay(5);
  const double u = replay.uniform();
  EXPECT_NEAR(one.omega, std::pow(10.0, -1.0 + 3.0 * u), 1e-12);
  EXPECT_EQ(one.rng.state(), replay.state());

  cfg.K = 50;
  SplitMix64 a(9), b(9);
  for (int i = 0; i < 5; ++i) {
    const RandomPick pa = select_random(g, zero_model(g), cfg, a);
    const RandomPick pb = select_random(g, zero_model(g), cfg, b);
    EXPECT_EQ(pa.omega, pb.omega);
    EXPECT_GE(pa.omega, cfg.omega_min);
    EXPECT_LE(pa.omega, cfg.omega_max);
    a = pa.rng;
    b = pb.rng;
  }
}

TEST(Refine, WindowFromSingularValues) {
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 10.0;
  d(1, 1) = 9.5;
  d(2, 2) = 0.1;
  const StateSpace g = StateSpace::static_gain(d, ScalarField::Real);
  const Refinement ref = refine(g, {}, 1.0, 1e-3, 0.9);
  EXPECT_EQ(ref.r_min, 1);
  EXPECT_EQ(ref.r_max, 2);
  EXPECT_FALSE(ref.merged_index.has_value());
  EXPECT_EQ(refine(g, {}, 1.0, 1e-3, 1.0).r_max, 1);
  EXPECT_EQ(refine(g, {}, 1.0, 1e-3, 0.001).r_max, 3);
}

TEST(Refine, MergesNearbyFrequency) {
  Rng rng(61);
  const StateSpace g = testing::random_stable_real(rng, 6, 3, 3);
  InterpPoint existing = truncated_point({1.0, testing::oracle_tf(g, Complex(0.0, 1.0))}, 1, 1);
  const Refinement ref = refine(g, {existing}, 1.0005, 1e-3, 0.95);
  ASSERT_TRUE(ref.merged_index.has_value());
  EXPECT_EQ(*ref.merged_index, 0u);
  EXPECT_EQ(ref.omega, 1.0);
  EXPECT_EQ(ref.r_min, 2);
  const Refinement apart = refine(g, {existing}, 1.01, 1e-3, 0.95);
  EXPECT_FALSE(apart.merged_index.has_value());
  EXPECT_EQ(apart.r_min, 1);
}

TEST(Refine, ZeroFrequencyMergesOnlyWithZero) {
  Rng rng(62);
  const StateSpace g = testing::random_stable_real(rng, 6, 3, 3);
  const InterpPoint at0 = truncated_point({0.0, testing::oracle_tf(g, 0.0)}, 1, 1);
  const Refinement ref = refine(g, {at0}, 0.0, 0.0, 0.95);
  ASSERT_TRUE(ref.merged_index.has_value());
  EXPECT_EQ(ref.r_min, 2);
  const InterpPoint at1 = truncated_point({1e-9, testing::oracle_tf(g, Complex(0.0, 1e-9))}, 1, 1);
  EXPECT_FALSE(refine(g, {at1}, 0.0, 0.5, 0.95).merged_index.has_value());
}

TEST(Refine, RankExhaustion) {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  const StateSpace g = StateSpace::static_gain(d, ScalarField::Real);
  const InterpPoint pt = truncated_point({2.0, d}, 1, 1);
  try {
    refine(g, {pt}, 2.0, 1e-3, 0.95);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankExhausted);
  }
}

TEST(Refine, RhoMonotonicity) {
  Rng rng(63);
  const StateSpace g = testing::random_stable_complex(rng, 8, 4, 4);
  Index prev = 100;
  for (const double rho : {0.01, 0.1, 0.3, 0.6, 0.9, 1.0}) {
    const Index rm = refine(g, {}, 0.7, 1e-3, rho).r_max;
    EXPECT_LE(rm, prev);
    prev = rm;
  }
  EXPECT_EQ(prev, 1);
}

}  // namespace
}  // namespace tanred
