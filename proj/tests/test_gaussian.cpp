#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "difga/gaussian.hpp"
#include "random_states.hpp"

using namespace difga;

namespace {

void expect_state_near(const State& a, const State& b, double tol) {
  ASSERT_EQ(a.num_modes, b.num_modes);
  EXPECT_LE(max_abs_diff(a.mean, b.mean), tol);
  EXPECT_LE(max_abs_diff(a.cov, b.cov), tol);
}

State displaced_vacuum(double re) { return apply_displacement(vacuum_state(1), 0, re, 0.0); }

}  // namespace

TEST(Vacuum, SingleMode) {
  const State s = vacuum_state(1);
  EXPECT_EQ(s.mean, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(max_abs_diff(s.cov, Matrix<double>::identity(2)), 0.0);
}

TEST(Vacuum, ThreeModes) {
  const State s = vacuum_state(3);
  EXPECT_EQ(s.mean, std::vector<double>(6, 0.0));
  EXPECT_EQ(max_abs_diff(s.cov, Matrix<double>::identity(6)), 0.0);
}

TEST(Vacuum, FiveModesIsPure) {
  for (double nu : symplectic_eigenvalues(vacuum_state(5).cov)) EXPECT_NEAR(nu, 1.0, 1e-12);
}

TEST(Vacuum, RejectsZeroModes) { EXPECT_THROW(vacuum_state(0), std::invalid_argument); }

TEST(Rotation, ZeroIsIdentity) {
  std::mt19937_64 rng(1);
  const State s = testkit::random_mixed_state(rng, 2);
  const State r = apply_rotation(s, 1, 0.0);
  EXPECT_EQ(r.mean, s.mean);
  EXPECT_EQ(max_abs_diff(r.cov, s.cov), 0.0);
}

TEST(Rotation, QuarterTurnMovesXIntoP) {
  const State r = apply_rotation(displaced_vacuum(0.8), 0, std::numbers::pi / 2);
  EXPECT_NEAR(mean_x(r, 0), 0.0, 1e-15);
  EXPECT_NEAR(mean_p(r, 0), 1.6, 1e-15);
}

TEST(Rotation, InverseRestoresState) {
  std::mt19937_64 rng(2);
  const State s = testkit::random_mixed_state(rng, 3);
  expect_state_near(apply_rotation(apply_rotation(s, 2, 0.9), 2, -0.9), s, 1e-12);
}

TEST(Rotation, HalfTurnNegatesMeans) {
  const State s = apply_displacement(vacuum_state(1), 0, 0.3, -0.7);
  const State r = apply_rotation(s, 0, std::numbers::pi);
  EXPECT_NEAR(mean_x(r, 0), -mean_x(s, 0), 1e-15);
  EXPECT_NEAR(mean_p(r, 0), -mean_p(s, 0), 1e-15);
}

TEST(Rotation, RejectsBadMode) { EXPECT_THROW(apply_rotation(vacuum_state(2), 2, 0.1), std::out_of_range); }

TEST(Squeezing, ZeroIsIdentity) {
  std::mt19937_64 rng(3);
  const State s = testkit::random_mixed_state(rng, 2);
  const State q = apply_squeezing(s, 0, 0.0, 0.4);
  EXPECT_EQ(q.mean, s.mean);
  EXPECT_EQ(max_abs_diff(q.cov, s.cov), 0.0);
}

TEST(Squeezing, VacuumClosedForm) {
  // Real squeezing of vacuum: cov = diag(e^{-2r}, e^{2r}).
  const State q = apply_squeezing(vacuum_state(1), 0, 0.6, 0.0);
  EXPECT_NEAR(q.cov(0, 0), std::exp(-1.2), 1e-14);
  EXPECT_NEAR(q.cov(1, 1), std::exp(1.2), 1e-14);
  EXPECT_NEAR(q.cov(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(symplectic_eigenvalues(q.cov)[0], 1.0, 1e-12);
  EXPECT_EQ(q.mean, (std::vector<double>{0.0, 0.0}));
}

TEST(Squeezing, RejectsNonFinite) {
  EXPECT_THROW(apply_squeezing(vacuum_state(1), 0, std::nan(""), 0.0), std::invalid_argument);
  EXPECT_THROW(apply_squeezing(vacuum_state(1), 1, 0.1, 0.0), std::out_of_range);
}

TEST(Displacement, ShiftRule) {
  const State d = displaced_vacuum(0.8);
  EXPECT_DOUBLE_EQ(mean_x(d, 0), 1.6);
  EXPECT_DOUBLE_EQ(mean_p(d, 0), 0.0);
  EXPECT_EQ(max_abs_diff(d.cov, Matrix<double>::identity(2)), 0.0);
}

TEST(Displacement, ZeroAndInverse) {
  std::mt19937_64 rng(4);
  const State s = testkit::random_mixed_state(rng, 2);
  EXPECT_EQ(apply_displacement(s, 1, 0.0, 0.0).mean, s.mean);
  expect_state_near(apply_displacement(apply_displacement(s, 1, 0.37, -1.2), 1, -0.37, 1.2), s, 1e-12);
}

TEST(BeamSplitter, ZeroAngleIsIdentity) {
  std::mt19937_64 rng(5);
  const State s = testkit::random_mixed_state(rng, 2);
  expect_state_near(apply_beamsplitter(s, 0, 1, 0.0, 0.8), s, 0.0);
}

TEST(BeamSplitter, ScalesSignalByCosineWithZeroMeanPartner) {
  State s = apply_displacement(vacuum_state(2), 0, 0.8, 0.0);
  s = apply_squeezing(std::move(s), 1, 0.4, 0.1);
  for (double phi : {0.0, 0.2, 1.3, -2.0}) {
    const State b = apply_beamsplitter(s, 0, 1, 0.7, phi);
    EXPECT_NEAR(std::hypot(mean_x(b, 0), mean_p(b, 0)), 1.6 * std::cos(0.7), 1e-14);
  }
}

TEST(BeamSplitter, RejectsEqualModes) {
  EXPECT_THROW(apply_beamsplitter(vacuum_state(2), 1, 1, 0.3, 0.0), std::invalid_argument);
  EXPECT_THROW(apply_beamsplitter(vacuum_state(2), 0, 2, 0.3, 0.0), std::out_of_range);
}

TEST(Symplectic, EveryPrimitiveIsSymplectic) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    EXPECT_LE(symplectic_residual(embed(rotation_op(1, u(rng)), 3).S), 1e-12);
    EXPECT_LE(symplectic_residual(embed(squeezing_op(0, std::abs(u(rng)) / 3.0, u(rng)), 3).S), 1e-12);
    EXPECT_LE(symplectic_residual(embed(displacement_op(2, u(rng), u(rng)), 3).S), 1e-12);
    EXPECT_LE(symplectic_residual(embed(beamsplitter_op(0, 2, u(rng), u(rng)), 3).S), 1e-12);
  }
}

TEST(Symplectic, LocalApplicationMatchesDenseMap) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const auto c = testkit::random_pure_circuit(rng, 3, 10);
    expect_state_near(apply(vacuum_state(3), c.map), c.state, 1e-10);
  }
}

TEST(Symplectic, PureStatesStayPure) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto c = testkit::random_pure_circuit(rng, 1 + i % 4, 15);
    for (double nu : symplectic_eigenvalues(c.state.cov)) EXPECT_NEAR(nu, 1.0, 1e-9);
    EXPECT_NO_THROW(validate(c.state));
  }
}

TEST(Loss, ViaEnvironmentIdentityAtUnitTransmissivity) {
  State s = apply_displacement(vacuum_state(2), 0, 0.8, 0.1);
  s = apply_squeezing(std::move(s), 0, 0.5, 0.2);
  expect_state_near(apply_loss_via_env(s, 0, 1, 1.0), s, 1e-15);
}

TEST(Loss, ViaEnvironmentScalesAmplitude) {
  const State s = apply_displacement(vacuum_state(2), 0, 0.8, 0.0);
  EXPECT_NEAR(mean_x(apply_loss_via_env(s, 0, 1, 0.55), 0), std::sqrt(0.55) * 1.6, 1e-14);
}

TEST(Loss, FullLossLeavesVacuum) {
  State s = apply_squeezing(vacuum_state(2), 0, 0.6, 0.3);
  s = apply_displacement(std::move(s), 0, 0.8, 0.0);
  const State l = apply_loss_via_env(s, 0, 1, 0.0);
  EXPECT_NEAR(mean_x(l, 0), 0.0, 1e-15);
  EXPECT_NEAR(mean_p(l, 0), 0.0, 1e-15);
  EXPECT_NEAR(l.cov(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(l.cov(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(l.cov(0, 1), 0.0, 1e-15);
}

TEST(Loss, RejectsBadTransmissivityAndBusyEnvironment) {
  EXPECT_THROW(apply_loss_via_env(vacuum_state(2), 0, 1, 1.2), std::invalid_argument);
  EXPECT_THROW(apply_loss_via_env(vacuum_state(2), 0, 1, -0.1), std::invalid_argument);
  EXPECT_THROW(apply_loss_channel(vacuum_state(1), 0, 1.01), std::invalid_argument);
  const State busy = apply_displacement(vacuum_state(2), 1, 0.1, 0.0);
  EXPECT_THROW(apply_loss_via_env(busy, 0, 1, 0.5), std::invalid_argument);
}

TEST(Loss, ChannelFixesVacuum) {
  for (double eta : {0.0, 0.3, 0.55, 1.0}) expect_state_near(apply_loss_channel(vacuum_state(2), 1, eta), vacuum_state(2), 1e-15);
}

TEST(Loss, ChannelIdentityAtUnitTransmissivity) {
  std::mt19937_64 rng(9);
  const State s = testkit::random_mixed_state(rng, 3);
  expect_state_near(apply_loss_channel(s, 1, 1.0), s, 0.0);
}

// Direct channel against its beam-splitter dilation with the environment traced out.
TEST(Loss, ChannelMatchesDilation) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const State s = testkit::random_mixed_state(rng, 3);
    const std::size_t mode = i % 3;
    const double eta = unit(rng);
    State extended = s;
    extended.num_modes = 4;
    extended.mean.resize(8, 0.0);
    Matrix<double> cov = Matrix<double>::identity(8);
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 6; ++c) cov(r, c) = s.cov(r, c);
    extended.cov = cov;
    const State dilated = discard_mode(apply_loss_via_env(extended, mode, 3, eta), 3);
    expect_state_near(apply_loss_channel(s, mode, eta), dilated, 1e-12);
  }
}

TEST(Loss, MixedStatesRemainPhysical) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) EXPECT_NO_THROW(validate(testkit::random_mixed_state(rng, 3)));
}

TEST(Validate, RejectsUnphysicalCovariance) {
  State s = vacuum_state(1);
  s.cov(0, 0) = 0.5;
  s.cov(1, 1) = 0.5;
  EXPECT_THROW(validate(s), std::invalid_argument);
  State t = vacuum_state(1);
  t.cov(0, 1) = 0.1;
  EXPECT_THROW(validate(t), std::invalid_argument);
}

TEST(Means, AccessorsAndBounds) {
  const State s = apply_displacement(vacuum_state(2), 1, 0.25, -0.5);
  EXPECT_EQ(mean_x(s, 0), 0.0);
  EXPECT_DOUBLE_EQ(mean_x(s, 1), 0.5);
  EXPECT_DOUBLE_EQ(mean_p(s, 1), -1.0);
  EXPECT_THROW(mean_x(s, 2), std::out_of_range);
  EXPECT_THROW(mean_p(s, 5), std::out_of_range);
}

TEST(Degradation, EndpointsAndMidpoint) {
  EXPECT_EQ(entanglement_degradation(1.0), 0.0);
  EXPECT_EQ(entanglement_degradation(0.0), 1.0);
  EXPECT_NEAR(entanglement_degradation(0.55), (0.45 / 1.55) * (0.45 / 1.55), 1e-15);
  EXPECT_NEAR(entanglement_degradation(0.55), 0.084287, 1e-6);
  EXPECT_THROW(entanglement_degradation(1.5), std::invalid_argument);
}

TEST(Symplectic, HeavilySqueezedPureStateHasUnitEigenvalues) {
  State s = vacuum_state(5);
  for (std::size_t m = 0; m < 5; ++m) s = apply_squeezing(std::move(s), m, 1.2 + 0.1 * m, 0.4 * m);
  for (std::size_t m = 0; m + 1 < 5; ++m) s = apply_beamsplitter(std::move(s), m, m + 1, 0.9, 0.3);
  s = apply_squeezing(std::move(s), 2, 1.5, 1.1);
  const auto nus = symplectic_eigenvalues(s.cov);
  ASSERT_EQ(nus.size(), 5u);
  for (double nu : nus) EXPECT_NEAR(nu, 1.0, 1e-9);
}

TEST(Symplectic, ThermalEigenvalues) {
  State s = vacuum_state(2);
  s.cov(0, 0) = s.cov(1, 1) = 3.0;
  s.cov(2, 2) = s.cov(3, 3) = 1.5;
  s = apply_beamsplitter(std::move(s), 0, 1, 0.4, 0.2);
  const auto nus = symplectic_eigenvalues(s.cov);
  EXPECT_NEAR(nus[0], 1.5, 1e-12);
  EXPECT_NEAR(nus[1], 3.0, 1e-12);
}
