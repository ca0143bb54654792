#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shiftsparse/spectral.hpp"
#include "test_support.hpp"

namespace shiftsparse {
namespace {

using testing::random_vector;

TEST(Dft, ImpulseTransformsToAllOnes) {
  Signal s = Signal::Zero(4);
  s[0] = 1.0;
  const Spectrum X = dft(s);
  for (int f = 0; f < 4; ++f) EXPECT_NEAR(std::abs(X[f] - Complex(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Dft, ConstantIsDcOnly) {
  const Spectrum X = dft(Signal(Signal::Ones(4)));
  EXPECT_NEAR(std::abs(X[0] - Complex(4.0, 0.0)), 0.0, 1e-15);
  for (int f = 1; f < 4; ++f) EXPECT_NEAR(std::abs(X[f]), 0.0, 1e-15);
}

TEST(Dft, MatchesTextbookSumAndIsConjugateSymmetric) {
  std::mt19937_64 rng(11);
  const Signal s = random_vector(13, rng);
  const Spectrum X = dft(s);
  const auto ref = testing::naive_dft(s);
  for (int f = 0; f < 13; ++f) EXPECT_NEAR(std::abs(X[f] - ref[static_cast<std::size_t>(f)]), 0.0, 1e-12);
  for (int f = 1; f < 13; ++f) EXPECT_NEAR(std::abs(X[13 - f] - std::conj(X[f])), 0.0, 1e-12);
}

TEST(Idft, DcSpectrumGivesConstantSignal) {
  Spectrum X = Spectrum::Zero(5);
  X[0] = 5.0;
  const ComplexSignal s = idft(X);
  for (int t = 0; t < 5; ++t) EXPECT_NEAR(std::abs(s[t] - Complex(1.0, 0.0)), 0.0, 1e-15);
  EXPECT_EQ(idft(Spectrum::Zero(6)).norm(), 0.0);
}

TEST(Idft, RoundTripRecoversRealSignal) {
  std::mt19937_64 rng(3);
  const Signal s = random_vector(16, rng);
  const ComplexSignal back = idft(dft(s));
  EXPECT_LT((back.real() - s).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(back.imag().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CircularShift, DelaysByK) {
  const Signal s = (Signal(4) << 1, 2, 3, 4).finished();
  EXPECT_EQ(circular_shift<double>(s, 1), (Signal(4) << 4, 1, 2, 3).finished());
  EXPECT_EQ(circular_shift<double>(s, -1), (Signal(4) << 2, 3, 4, 1).finished());
  EXPECT_EQ(circular_shift<double>(s, 0), s);
  EXPECT_EQ(circular_shift<double>(s, 4), s);
  EXPECT_EQ(circular_shift<double>(s, 9), circular_shift<double>(s, 1));
}

TEST(ShiftAngle, CanonicalizesIntoHalfOpenRange) {
  EXPECT_DOUBLE_EQ(ShiftAngle(-0.5).radians(), kTwoPi - 0.5);
  EXPECT_EQ(ShiftAngle(kTwoPi).radians(), 0.0);
  EXPECT_NEAR(ShiftAngle(3.0 * kTwoPi + 1.0).radians(), 1.0, 1e-12);
  EXPECT_EQ(ShiftAngle(-1e-18).radians(), 0.0);
  EXPECT_NEAR(ShiftAngle::from_samples(5, 40).samples(40), 5.0, 1e-12);
  EXPECT_LT(ShiftAngle(std::nextafter(kTwoPi, 0.0)).samples(40), 40.0);
  EXPECT_THROW(ShiftAngle(std::nan("")), InvalidArgument);
}

TEST(PhaseRamp, ZeroAngleIsIdentity) {
  std::mt19937_64 rng(5);
  const Spectrum X = dft(Signal(random_vector(9, rng)));
  EXPECT_EQ(apply_phase_ramp(X, ShiftAngle(0.0)), X);
}

TEST(PhaseRamp, UnitStepAdvancesSignalByOneSample) {
  std::mt19937_64 rng(8);
  const Signal s = random_vector(8, rng);
  const Spectrum ramped = apply_phase_ramp(dft(s), ShiftAngle(kTwoPi / 8.0));
  const Spectrum oracle = dft(circular_shift<double>(s, -1));
  EXPECT_LT((ramped - oracle).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PhaseRamp, ComposesAdditively) {
  std::mt19937_64 rng(9);
  const Spectrum X = dft(Signal(random_vector(12, rng)));
  const Spectrum twice = apply_phase_ramp(apply_phase_ramp(X, ShiftAngle(2.5)), ShiftAngle(5.1));
  EXPECT_LT((twice - apply_phase_ramp(X, ShiftAngle(7.6))).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(MRamp, ScalesBinsByJf) {
  const Spectrum out = apply_m_ramp(Spectrum::Ones(4));
  for (int f = 0; f < 4; ++f) EXPECT_EQ(out[f], Complex(0.0, f));
  std::mt19937_64 rng(1);
  EXPECT_EQ(apply_m_ramp(dft(Signal(random_vector(7, rng))))[0], Complex(0.0, 0.0));
}

TEST(MRamp, IsTheAngleDerivativeOfThePhaseRamp) {
  std::mt19937_64 rng(21);
  const Spectrum X = dft(Signal(random_vector(10, rng)));
  const double h = 1e-6;
  for (const double theta : {0.3, 1.7, 4.0}) {
    const Spectrum fd =
        (apply_phase_ramp(X, ShiftAngle(theta + h)) - apply_phase_ramp(X, ShiftAngle(theta - h))) / (2.0 * h);
    const Spectrum analytic = apply_m_ramp(apply_phase_ramp(X, ShiftAngle(theta)));
    EXPECT_LT((fd - analytic).norm() / analytic.norm(), 1e-6);
  }
}

TEST(FractionalShift, IntegerShiftMatchesCircularShift) {
  std::mt19937_64 rng(4);
  const Signal s = random_vector(10, rng);
  const ComplexSignal shifted = fractional_shift(s, 3.0);
  EXPECT_LT((shifted.real() - circular_shift<double>(s, 3)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(shifted.imag().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT(fractional_shift(s, 2.5).imag().cwiseAbs().maxCoeff(), 1e-6);
}

// Property sweep over random sizes and signals.
TEST(SpectralProperties, ParsevalShiftTheoremUnitarityAndDerivative) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 33);
  std::uniform_int_distribution<long long> shift(-100, 100);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    const Signal s = random_vector(n, rng);
    const Spectrum X = dft(s);

    EXPECT_NEAR(X.squaredNorm(), n * s.squaredNorm(), 1e-10 * n * s.squaredNorm());

    const long long k = shift(rng);
    const Spectrum shifted = dft(circular_shift<double>(s, k));
    for (int f = 0; f < n; ++f) {
      const double phase = -kTwoPi * static_cast<double>(((k % n + n) % n) * f % n) / n;
      EXPECT_LT(std::abs(shifted[f] - std::polar(1.0, phase) * X[f]), 1e-10 * (1.0 + std::abs(X[f])));
    }

    const ShiftAngle theta(angle(rng));
    const Spectrum Y = dft(Signal(random_vector(n, rng)));
    const Spectrum lhs = apply_phase_ramp(2.0 * X - Y, theta);
    const Spectrum rhs = 2.0 * apply_phase_ramp(X, theta) - apply_phase_ramp(Y, theta);
    EXPECT_LT((lhs - rhs).norm(), 1e-12 * (1.0 + lhs.norm()));
    EXPECT_NEAR(apply_phase_ramp(X, theta).norm(), X.norm(), 1e-12 * X.norm());

    const double h = 1e-6;
    const Spectrum fd = (apply_phase_ramp(X, ShiftAngle(theta.radians() + h)) -
                         apply_phase_ramp(X, ShiftAngle(theta.radians() - h))) / (2.0 * h);
    const Spectrum analytic = apply_m_ramp(apply_phase_ramp(X, theta));
    if (analytic.norm() > 0.0) {
      EXPECT_LT((fd - analytic).norm() / analytic.norm(), 1e-6);
    }

    EXPECT_LT((idft(X).real() - s).cwiseAbs().maxCoeff(), 1e-12);
  }
}

}  // namespace
}  // namespace shiftsparse
