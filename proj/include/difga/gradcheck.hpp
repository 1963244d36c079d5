#pragma once

// Randomized comparison of forward-mode gradients against central finite
// differences on the full Monte-Carlo objective with frozen kick-sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "difga/diffprop.hpp"
#include "difga/trainer.hpp"

namespace difga {

struct GradcheckCase {
  CircuitSpec spec;
  NoiseModel model;
  std::vector<double> theta;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  bool passed = false;
};

struct GradcheckTolerance {
  double step = 1e-6;
  double abs_tol = 1e-8;
  double rel_tol = 1e-5;
};

/// Agreement test for one case: |ad - fd| <= max(abs_tol, rel_tol |fd|) per slot.
inline void check_case(GradcheckCase& c, const GradcheckTolerance& tol = {}) {
  const Objective objective(c.spec, c.model);
  const auto kicks = objective.kicks(0);
  const auto ad = gradient([&](std::span<const Dual> r) { return objective.evaluate<Dual>(r, kicks); }, c.theta);
  const auto fd = finite_diff_gradient(
      [&](std::span<const double> r) { return objective.evaluate<double>(r, kicks); }, c.theta, tol.step);
  c.passed = true;
  c.max_abs_error = c.max_rel_error = 0.0;
  for (std::size_t i = 0; i < ad.size(); ++i) {
    const double err = std::abs(ad[i] - fd[i]);
    c.max_abs_error = std::max(c.max_abs_error, err);
    if (fd[i] != 0.0) c.max_rel_error = std::max(c.max_rel_error, err / std::abs(fd[i]));
    if (err > std::max(tol.abs_tol, tol.rel_tol * std::abs(fd[i]))) c.passed = false;
  }
}

/// `count` random configurations: eta in [0.3, 0.95], delta in [0, 0.7],
/// 0..3 ancillas (M = 2..5), K in [1, 16], parameters uniform in [-0.5, 0.5].
inline std::vector<GradcheckCase> gradcheck_suite(std::size_t count, std::uint64_t seed,
                                                  const GradcheckTolerance& tol = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GradcheckCase> cases(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& c = cases[i];
    c.spec.eta = 0.3 + 0.65 * unit(rng);
    c.spec.num_ancillas = static_cast<std::size_t>(rng() % 4);
    c.spec.kick_placement = (rng() % 2) ? KickPlacement::after_recovery : KickPlacement::before_recovery;
    c.model.delta = 0.7 * unit(rng);
    c.model.samples = 1 + static_cast<std::size_t>(rng() % 16);
    c.model.seed = rng();
    c.theta.resize(c.spec.num_recovery_params());
    for (auto& t : c.theta) t = unit(rng) - 0.5;
    check_case(c, tol);
  }
  return cases;
}

}  // namespace difga
