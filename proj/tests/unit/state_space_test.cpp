#include <gtest/gtest.h>

#include <vector>

#include "tanred/error.hpp"
#include "tanred/hessenberg_resolvent.hpp"
#include "tanred/state_space.hpp"
#include "test_systems.hpp"

namespace tanred {
namespace {

using testing::Rng;

StateSpace scalar_lowpass() {
  return StateSpace::from_real(RMatrix::Constant(1, 1, -1.0), RMatrix::Constant(1, 1, 1.0),
                               RMatrix::Constant(1, 1, 1.0), RMatrix::Zero(1, 1));
}

TEST(StateSpace, RejectsInconsistentShapes) {
  EXPECT_THROW(StateSpace(CMatrix::Zero(2, 2), CMatrix::Zero(3, 1), CMatrix::Zero(1, 2),
                          CMatrix::Zero(1, 1), ScalarField::Complex),
               Error);
  try {
    StateSpace(CMatrix::Zero(2, 3), CMatrix::Zero(2, 1), CMatrix::Zero(1, 2), CMatrix::Zero(1, 1),
               ScalarField::Complex);
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(StateSpace, RealTagRequiresZeroImaginaryParts) {
  CMatrix a = CMatrix::Constant(1, 1, Complex(-1.0, 0.5));
  try {
    StateSpace(a, CMatrix::Ones(1, 1), CMatrix::Ones(1, 1), CMatrix::Zero(1, 1), ScalarField::Real);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvariantViolation);
  }
  EXPECT_FALSE(StateSpace::from_complex(a, CMatrix::Ones(1, 1), CMatrix::Ones(1, 1),
                                        CMatrix::Zero(1, 1))
                   .is_real());
  EXPECT_TRUE(scalar_lowpass().is_real());
}

TEST(StateSpace, ScalarLowpassResponse) {
  const StateSpace g = scalar_lowpass();
  const CMatrix v = eval_tf(g, Complex(0.0, 1.0));
  EXPECT_NEAR(std::abs(v(0, 0) - 1.0 / Complex(1.0, 1.0)), 0.0, 1e-15);
  EXPECT_EQ(eval_tf(g, 0.0)(0, 0), Complex(1.0));
}

TEST(StateSpace, SingularResolventIsReported) {
  const StateSpace g = scalar_lowpass();
  try {
    eval_tf(g, Complex(-1.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularResolvent);
  }
  const HessenbergResolvent res(g);
  EXPECT_THROW(res.response(Complex(-1.0, 0.0)), Error);
}

TEST(StateSpace, SweepMatchesPointwiseEvaluation) {
  Rng rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    const StateSpace g = trial % 2 ? testing::random_stable_complex(rng, 25, 3, 2, true)
                                   : testing::random_stable_real(rng, 25, 3, 2, true);
    std::vector<double> w{0.0, 0.01, 0.3, 1.0, 7.0, 150.0, -2.0};
    const auto sweep = freq_sweep(g, w);
    ASSERT_EQ(sweep.size(), w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const CMatrix ref = testing::oracle_tf(g, Complex(0.0, w[i]));
      EXPECT_EQ(sweep[i].omega, w[i]);
      EXPECT_LE((sweep[i].value - ref).norm(), 1e-10 * (1.0 + ref.norm()));
    }
  }
}

TEST(StateSpace, ResolventSolvesBothSides) {
  Rng rng(12);
  const StateSpace g = testing::random_stable_complex(rng, 15, 2, 2);
  const HessenbergResolvent res(g);
  const Complex s(0.2, 1.7);
  CMatrix m = -g.A();
  m.diagonal().array() += s;
  const CMatrix rows = testing::random_complex(rng, 3, 15);
  const CMatrix x = res.solve_left(s, rows);
  EXPECT_LE((x * m - rows).norm(), 1e-11 * rows.norm());
  const CMatrix rhs = testing::random_complex(rng, 15, 2);
  const CMatrix y = res.solve_right(s, rhs);
  EXPECT_LE((m * y - rhs).norm(), 1e-11 * rhs.norm());
  const CMatrix left = testing::random_complex(rng, 2, 2);
  const CMatrix z = res.output_resolvent(s, left);
  EXPECT_LE((z * m - left * g.C()).norm(), 1e-11 * (left * g.C()).norm());
}

TEST(StateSpace, SeriesSubtractionRealization) {
  Rng rng(13);
  const StateSpace a = testing::random_stable_real(rng, 4, 2, 3, true);
  const StateSpace b = testing::random_stable_real(rng, 3, 2, 3, true);
  const StateSpace e = series_sub(a, b);
  EXPECT_EQ(e.states(), 7);
  EXPECT_TRUE(e.is_real());
  const Complex s(0.0, 0.9);
  EXPECT_LE((eval_tf(e, s) - (eval_tf(a, s) - eval_tf(b, s))).norm(), 1e-12);
  const StateSpace c = testing::random_stable_complex(rng, 2, 2, 3);
  EXPECT_FALSE(series_sub(a, c).is_real());
  EXPECT_THROW(series_sub(a, testing::random_stable_real(rng, 2, 3, 3)), Error);
}

TEST(StateSpace, ImaginaryAxisPolesAreNamed) {
  RMatrix a(2, 2);
  a << 0.0, 2.0, -2.0, 0.0;  // poles at +-2j
  const StateSpace g = StateSpace::from_real(a, RMatrix::Ones(2, 1), RMatrix::Ones(1, 2), RMatrix::Zero(1, 1));
  try {
    g.require_no_imaginary_poles();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvariantViolation);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
  EXPECT_NO_THROW(scalar_lowpass().require_no_imaginary_poles());
  EXPECT_FALSE(g.is_stable());
}

TEST(StateSpace, StaticGainHasNoStates) {
  const StateSpace d = StateSpace::static_gain(CMatrix::Ones(2, 3), ScalarField::Real);
  EXPECT_EQ(d.states(), 0);
  EXPECT_EQ(eval_tf(d, Complex(0.0, 5.0)), CMatrix::Ones(2, 3));
  const std::vector<double> w{1.0};
  EXPECT_EQ(freq_sweep(d, w)[0].value, CMatrix::Ones(2, 3));
}

}  // namespace
}  // namespace tanred
