#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "difga/noise.hpp"

using namespace difga;

TEST(Kicks, ZeroDeltaGivesZeroKicks) {
  const NoiseModel m{0.0, 0.6, 5, 7};
  const auto k = sample_kicks(m, 2, 3);
  ASSERT_EQ(k.size(), 5u);
  for (const auto& set : k) EXPECT_EQ(set, KickSet(3, 0.0));
}

TEST(Kicks, DeterministicPerSeedStreamStep) {
  const NoiseModel m{0.3, 0.6, 8, 99};
  EXPECT_EQ(sample_kicks(m, 1, 4), sample_kicks(m, 1, 4));
  EXPECT_NE(sample_kicks(m, 1, 4), sample_kicks(m, 1, 5));
  EXPECT_NE(sample_kicks(m, 1, 4, Stream::training), sample_kicks(m, 1, 4, Stream::evaluation));
  NoiseModel other = m;
  other.seed = 100;
  EXPECT_NE(sample_kicks(m, 1, 4), sample_kicks(other, 1, 4));
}

TEST(Kicks, MomentsMatchNoiseModel) {
  const NoiseModel m{0.5, 0.6, 40000, 1};
  const auto k = sample_kicks(m, 1, 0);
  double s0 = 0, s1 = 0, q0 = 0, q1 = 0;
  for (const auto& set : k) {
    s0 += set[0];
    s1 += set[1];
    q0 += set[0] * set[0];
    q1 += set[1] * set[1];
  }
  const double n = static_cast<double>(k.size());
  EXPECT_NEAR(s0 / n, 0.0, 5 * 0.5 / std::sqrt(n));
  EXPECT_NEAR(s1 / n, 0.0, 5 * 0.3 / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(q0 / n), 0.5, 0.01);
  EXPECT_NEAR(std::sqrt(q1 / n), 0.3, 0.01);
}

TEST(Kicks, RejectsInvalidModel) {
  EXPECT_THROW(sample_kicks(NoiseModel{-0.1, 0.6, 4, 1}, 1, 0), std::invalid_argument);
  EXPECT_THROW(sample_kicks(NoiseModel{0.1, 0.6, 0, 1}, 1, 0), std::invalid_argument);
}

TEST(MonteCarlo, ZeroDeltaIsDeterministicCircuit) {
  const CircuitSpec spec;
  const RecoveryParams rec{{0.1, 0.2, -0.1, 0.0, 0.05, 0.0}};
  const auto mc = mc_expectations(spec, rec, NoiseModel{0.0, 0.6, 16, 3}, 0);
  const auto exact = signal_expectations(build_noisy(spec, rec, KickSet{0.0, 0.0}));
  EXPECT_EQ(mc, exact);
}

TEST(MonteCarlo, SingleKickSetMatchesDirectCircuit) {
  const CircuitSpec spec;
  const RecoveryParams rec = RecoveryParams::zeros(1);
  const std::vector<KickSet> kicks{{0.3, -0.2}};
  const auto mc = mc_expectations<double>(build_lossy(spec), spec, rec.values, kicks);
  EXPECT_EQ(mc, signal_expectations(build_noisy(spec, rec, kicks[0])));
  EXPECT_THROW(mc_expectations<double>(build_lossy(spec), spec, rec.values, std::vector<KickSet>{}),
               std::invalid_argument);
}

// A Gaussian phase kick of width delta averages a rotation to exp(-delta^2/2) I.
TEST(MonteCarlo, UnbiasedOverSeeds) {
  CircuitSpec spec;
  spec.num_ancillas = 0;
  spec.eta = 0.8;
  const double delta = 0.4;
  const RecoveryParams rec{{0.2, 0.1, 0.05}};
  const auto clean = signal_expectations(build_noisy(spec, rec, KickSet{0.0}));
  const double damp = std::exp(-delta * delta / 2);
  std::vector<double> xs, ps;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto [x, p] = mc_expectations(spec, rec, NoiseModel{delta, 0.6, 200, seed}, 0);
    xs.push_back(x);
    ps.push_back(p);
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / 50.0;
  const double mp = std::accumulate(ps.begin(), ps.end(), 0.0) / 50.0;
  // Single-kick std of x is below |mean| * delta; 10000 draws in total.
  const double tol = 5 * std::hypot(clean.first, clean.second) * delta / 100.0;
  EXPECT_NEAR(mx, damp * clean.first, tol);
  EXPECT_NEAR(mp, damp * clean.second, tol);
}

TEST(MonteCarlo, AncillaKicksDoNotMoveSignalMeanAfterRecovery) {
  const CircuitSpec spec;
  const RecoveryParams rec{{0.1, 0.2, 0.0, 0.3, 0.0, 0.1}};
  const auto a = signal_expectations(build_noisy(spec, rec, KickSet{0.2, 0.0}));
  const auto b = signal_expectations(build_noisy(spec, rec, KickSet{0.2, 0.9}));
  EXPECT_NEAR(a.first, b.first, 1e-14);
  EXPECT_NEAR(a.second, b.second, 1e-14);
}

TEST(MonteCarlo, DualAndDoubleAgree) {
  const CircuitSpec spec;
  const NoiseModel m{0.3, 0.6, 8, 5};
  const std::vector<double> theta{0.1, 0.2, -0.1, 0.0, 0.05, 0.3};
  const auto d = mc_expectations<double>(spec, theta, m, 2);
  std::vector<Dual> dual(theta.begin(), theta.end());
  const auto g = mc_expectations<Dual>(spec, std::span<const Dual>(dual), m, 2);
  EXPECT_NEAR(g.first.value(), d.first, 1e-14);
  EXPECT_NEAR(g.second.value(), d.second, 1e-14);
}
