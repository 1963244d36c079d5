#include <cmath>
#include <string>
#include <variant>

#include <gtest/gtest.h>

#include "difga/experiments.hpp"

using namespace difga;

namespace {

ExperimentConfig quick(std::size_t steps = 3) {
  ExperimentConfig cfg;
  cfg.overrides.steps = steps;
  cfg.overrides.samples = 2;
  cfg.overrides.eval_samples = 4;
  cfg.threads = 2;
  cfg.timing_min_seconds = 0.0;
  return cfg;
}

double num(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return static_cast<double>(std::get<std::int64_t>(c));
}

}  // namespace

TEST(Experiments, ClosedFormBaseline) {
  EXPECT_NEAR(baseline_error_closed_form(0.55, 0.8, 0.7, 0), 0.1709064, 1e-7);
  EXPECT_NEAR(baseline_error_closed_form(0.55, 0.8, 0.7, 1), 0.0999774, 1e-7);
  EXPECT_NEAR(baseline_error_closed_form(0.55, 0.8, 0.7, 3), 0.0342129, 1e-7);
  EXPECT_NEAR(baseline_error_closed_form(0.30, 0.8, 0.7, 1), 0.306333, 1e-6);
}

TEST(Experiments, LinearFitRecoversLine) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto [a, b, r2] = linear_fit(x, y);
  EXPECT_NEAR(a, 1.0, 1e-12);
  EXPECT_NEAR(b, 2.0, 1e-12);
  EXPECT_NEAR(r2, 1.0, 1e-12);
}

TEST(Experiments, EveryExperimentProducesWellFormedRows) {
  // The samples override pins runtime_vs_k to the reference row plus one K.
  const std::vector<std::size_t> expected_rows = {7, 4, 56, 5, 9, 4, 4, 2};
  for (std::size_t i = 0; i < experiment_ids().size(); ++i) {
    const auto& id = experiment_ids()[i];
    const auto r = run_experiment(id, quick());
    EXPECT_TRUE(r.ok()) << id;
    EXPECT_EQ(r.experiment_id, id);
    EXPECT_EQ(r.rows.size(), expected_rows[i]) << id;
    for (const auto& row : r.rows) EXPECT_EQ(row.size(), r.columns.size()) << id;
    EXPECT_EQ(r.config_snapshot.at("experiment_id"), id);
  }
}

TEST(Experiments, UnknownIdThrows) { EXPECT_THROW(run_experiment("nope"), std::invalid_argument); }

TEST(Experiments, PinnedOverrideCollapsesSweep) {
  auto cfg = quick();
  cfg.overrides.eta = 0.7;
  const auto r = run_loss_sweep(cfg);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(num(r.rows[0][0]), 0.7);
}

TEST(Experiments, LossSweepBaselineMatchesClosedForm) {
  const auto r = run_loss_sweep(quick(1));
  for (const auto& row : r.rows)
    EXPECT_NEAR(num(row[1]), baseline_error_closed_form(num(row[0]), 0.8, 0.7, 1), 1e-12);
}

TEST(Experiments, InvalidOverrideIsReportedPerRow) {
  auto cfg = quick();
  cfg.overrides.eta = 1.5;
  const auto r = run_loss_sweep(cfg);
  EXPECT_FALSE(r.ok());
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(std::isnan(num(r.rows[0][1])));
}

TEST(Experiments, DeterministicAcrossThreadCounts) {
  auto one = quick();
  one.threads = 1;
  auto two = quick();
  two.threads = 2;
  auto a = run_phase_diagram(one);
  auto b = run_phase_diagram(two);
  a.config_snapshot = b.config_snapshot = nullptr;
  EXPECT_TRUE(a == b);
}

TEST(Experiments, JsonRoundTrip) {
  const auto r = run_critical_threshold(quick());
  EXPECT_TRUE(result_from_json(to_json(r)) == r);
  auto cfg = quick();
  cfg.overrides.frozen_noise = false;
  cfg.circuit.kick_placement = KickPlacement::before_recovery;
  const auto back = experiment_config_from_json(to_json(cfg));
  EXPECT_EQ(back.seed, cfg.seed);
  EXPECT_EQ(back.overrides.steps, cfg.overrides.steps);
  EXPECT_EQ(back.overrides.frozen_noise, cfg.overrides.frozen_noise);
  EXPECT_FALSE(back.overrides.eta.has_value());
  EXPECT_EQ(back.circuit.kick_placement, KickPlacement::before_recovery);
}

TEST(Experiments, RerunFromSnapshotReproduces) {
  const auto r = run_mode_scaling(quick());
  EXPECT_TRUE(rerun(r.config_snapshot) == r);
}
