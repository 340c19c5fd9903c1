// Copyright 2026 The ddc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ddc/experiments.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "ddc/errors.hpp"
#include "ddc/seeding.hpp"

namespace ddc {
namespace {

TEST(Seeding, MatchesPublishedConstants) {
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
  const std::uint64_t fnv_a = 0xaf63dc4c8601ec8cULL;
  EXPECT_EQ(derive_seed(7, 3, "a"), mix64(mix64(mix64(7) ^ 3) ^ fnv_a));
  EXPECT_EQ(derive_seed(7, 3, ""), mix64(mix64(mix64(7) ^ 3) ^ 0xcbf29ce484222325ULL));
}

TEST(Seeding, DistinctAcrossIndicesTagsAndMasters) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {0ULL, 1ULL, 42ULL}) {
    for (std::uint64_t j = 0; j < 50; ++j) {
      for (const char* tag : {"sample", "random", "hypothetical"}) {
        seen.insert(derive_seed(master, j, tag));
      }
    }
  }
  EXPECT_EQ(seen.size(), 3u * 50u * 3u);
}

ExperimentReport SyntheticReport(const EpsGrid& grid, const std::vector<std::optional<double>>& stars,
                                 double tau) {
  ExperimentReport r;
  r.config.eps_grid = grid;
  r.config.n_all = static_cast<int>(stars.size());
  r.config.tau = tau;
  for (std::size_t j = 0; j < stars.size(); ++j) {
    SampleRecord s;
    s.index = static_cast<int>(j);
    s.clean_ok = true;
    s.attack.success = stars[j].has_value();
    s.attack.eps_star = stars[j];
    s.attack.synth_calls = 1;
    r.samples.push_back(s);
  }
  aggregate(r);
  return r;
}

TEST(Aggregate, MonotoneClosureAndEpsBar) {
  const EpsGrid grid = {1e-3, 1e-2, 1e-1, 1.0};
  const ExperimentReport r = SyntheticReport(grid, {1e-2, 1e-1, std::nullopt, 1e-2, 1.0}, 0.6);
  EXPECT_EQ(r.n_unstable, (std::vector<int>{0, 2, 3, 4}));
  EXPECT_DOUBLE_EQ(r.ratio[1], 0.4);
  EXPECT_DOUBLE_EQ(r.ratio[3], 0.8);
  ASSERT_TRUE(r.eps_bar.has_value());
  EXPECT_EQ(*r.eps_bar, 1e-1);
  EXPECT_EQ(r.synth_calls, 5);
}

TEST(Aggregate, ZeroTauGivesFirstGridPoint) {
  const ExperimentReport r = SyntheticReport({1e-3, 1e-2}, {std::nullopt}, 0.0);
  EXPECT_EQ(*r.eps_bar, 1e-3);
}

TEST(Aggregate, NoSuccessMeansNotReached) {
  const ExperimentReport r = SyntheticReport({1e-3, 1e-2}, {std::nullopt, std::nullopt}, 0.8);
  EXPECT_FALSE(r.eps_bar.has_value());
  EXPECT_EQ(r.n_unstable, (std::vector<int>{0, 0}));
}

TEST(Aggregate, PropertiesOnRandomTables) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 200; ++trial) {
    const EpsGrid grid = geometric_grid(1e-4, 1.0, 12);
    const int n = 1 + static_cast<int>(gen() % 30);
    std::vector<std::optional<double>> stars;
    for (int j = 0; j < n; ++j) {
      const std::size_t k = gen() % (grid.size() + 1);
      stars.push_back(k == grid.size() ? std::nullopt : std::optional<double>(grid[k]));
    }
    const double tau = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    const ExperimentReport r = SyntheticReport(grid, stars, tau);
    std::optional<double> expected_bar;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      EXPECT_GE(r.ratio[k], 0.0);
      EXPECT_LE(r.ratio[k], 1.0);
      if (k > 0) EXPECT_GE(r.n_unstable[k], r.n_unstable[k - 1]);
      const int count = static_cast<int>(std::count_if(
          stars.begin(), stars.end(), [&](const auto& s) { return s && *s <= grid[k]; }));
      EXPECT_EQ(r.n_unstable[k], count);
      if (!expected_bar && static_cast<double>(count) / n >= tau) expected_bar = grid[k];
    }
    EXPECT_EQ(r.eps_bar, expected_bar);
  }
}

TEST(Scenario, ValidateNamesTheField) {
  const auto expect_field = [](ScenarioConfig cfg, const std::string& field) {
    try {
      cfg.validate();
      ADD_FAILURE() << "no error for " << field;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  EXPECT_NO_THROW(pendulum_scenario().validate());
  EXPECT_NO_THROW(fig1_scenario().validate());
  ScenarioConfig c = pendulum_scenario();
  c.n_all = 0;
  expect_field(c, "n_all");
  c = pendulum_scenario();
  c.tau = 1.5;
  expect_field(c, "tau");
  c = pendulum_scenario();
  c.horizon = 0;
  expect_field(c, "horizon");
  c = pendulum_scenario();
  c.x0 = VectorXd::Zero(2);
  expect_field(c, "x0");
  c = pendulum_scenario();
  c.eps_grid = {1e-2, 1e-3};
  expect_field(c, "eps_grid");
  c = pendulum_scenario();
  c.regularizer = RegularizerMode::certainty_equivalence(-1.0);
  expect_field(c, "regularizer");
  c = pendulum_scenario();
  c.disturbance_std = -0.1;
  expect_field(c, "disturbance_std");
}

TEST(Scenario, AttackKindNamesRoundTrip) {
  for (AttackKind k : {AttackKind::kDgsm, AttackKind::kRandom, AttackKind::kDgsmTransferData,
                       AttackKind::kDgsmTransferParam}) {
    EXPECT_EQ(attack_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(attack_kind_from_string("pgd"), std::invalid_argument);
}

TEST(Samples, GenerationIsSeededAndShaped) {
  ScenarioConfig cfg = pendulum_scenario();
  const TrajectoryData a = generate_sample(cfg, 5);
  const TrajectoryData b = generate_sample(cfg, 5);
  const TrajectoryData c = generate_sample(cfg, 6);
  EXPECT_EQ(a.u0(), b.u0());
  EXPECT_EQ(a.x(), b.x());
  EXPECT_NE(a.u0(), c.u0());
  EXPECT_EQ(a.u0().cols(), 10);
  EXPECT_EQ(a.x().cols(), 11);
  EXPECT_TRUE(a.x().col(0).isZero(0.0));
  EXPECT_TRUE(a.d0().isZero(0.0));

  cfg.disturbance_std = 0.05;
  const TrajectoryData noisy = generate_sample(cfg, 5);
  EXPECT_EQ(noisy.u0(), a.u0());
  EXPECT_FALSE(noisy.d0().isZero(0.0));
  const TrajectoryData hyp = hypothetical_sample(cfg, 5);
  EXPECT_EQ(hyp.u0(), a.u0());
  EXPECT_TRUE(hyp.d0().isZero(0.0));
}

ScenarioConfig SmallPendulum(AttackKind kind, int n_all) {
  ScenarioConfig cfg = pendulum_scenario();
  cfg.attack_kind = kind;
  cfg.n_all = n_all;
  cfg.eps_grid = geometric_grid(1e-7, 1e-3, 5);
  return cfg;
}

TEST(RunScenario, HeavyRegularizationTinyGridNotReached) {
  ScenarioConfig cfg = SmallPendulum(AttackKind::kDgsm, 1);
  cfg.regularizer = RegularizerMode::certainty_equivalence(1e3);
  cfg.eps_grid = {1e-10, 1e-9};
  const ExperimentReport r = run_scenario(cfg);
  EXPECT_FALSE(r.eps_bar.has_value());
  EXPECT_EQ(r.clean_failures, 0);
}

TEST(RunScenario, ScheduleDoesNotChangeResults) {
  const ScenarioConfig cfg = SmallPendulum(AttackKind::kDgsm, 4);
  const ExperimentReport one = run_scenario(cfg, 1);
  const ExperimentReport four = run_scenario(cfg, 4);
  EXPECT_EQ(one.n_unstable, four.n_unstable);
  EXPECT_EQ(one.ratio, four.ratio);
  EXPECT_EQ(one.eps_bar, four.eps_bar);
  EXPECT_EQ(one.synth_calls, four.synth_calls);
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(one.samples[j].seed, four.samples[j].seed);
    EXPECT_EQ(one.samples[j].attack.eps_star, four.samples[j].attack.eps_star);
    EXPECT_EQ(one.samples[j].clean_J, four.samples[j].clean_J);
  }
}

TEST(RunScenario, ArmsSharePairedCleanData) {
  const ExperimentReport dgsm = run_scenario(SmallPendulum(AttackKind::kDgsm, 2));
  const ExperimentReport rnd = run_scenario(SmallPendulum(AttackKind::kRandom, 2));
  for (int j = 0; j < 2; ++j) {
    EXPECT_EQ(dgsm.samples[j].seed, rnd.samples[j].seed);
    EXPECT_EQ(dgsm.samples[j].clean_J, rnd.samples[j].clean_J);
    EXPECT_EQ(dgsm.samples[j].attack.eigs_clean, rnd.samples[j].attack.eigs_clean);
  }
}

TEST(Sweep, SingleValueWrapsRunScenario) {
  const ScenarioConfig cfg = SmallPendulum(AttackKind::kRandom, 3);
  const auto sweep = sweep_regularizer(cfg, {0.1}, SweepParameter::kGamma);
  ASSERT_EQ(sweep.size(), 1u);
  const ExperimentReport direct = run_scenario(cfg);
  EXPECT_EQ(sweep[0].report.n_unstable, direct.n_unstable);
  EXPECT_EQ(sweep[0].report.eps_bar, direct.eps_bar);
  EXPECT_THROW(sweep_regularizer(cfg, {}, SweepParameter::kRho), std::invalid_argument);
}

TEST(Compare, IdenticalConfigsGiveIdenticalColumns) {
  const ScenarioConfig cfg = SmallPendulum(AttackKind::kRandom, 3);
  const RegularizerComparison c = compare_regularizers(cfg, cfg);
  EXPECT_EQ(c.ce.ratio, c.robust.ratio);
  EXPECT_EQ(c.mean_J_ce, c.mean_J_robust);
  ScenarioConfig other = cfg;
  other.master_seed = 1;
  EXPECT_THROW(compare_regularizers(cfg, other), std::invalid_argument);
}

TEST(Transfer, ParamModeAtTrueStrengthEqualsDataMode) {
  ScenarioConfig cfg = SmallPendulum(AttackKind::kDgsm, 2);
  cfg.hypothetical_strength = 0.1;
  const TransferReport data = run_transferability(cfg, TransferMode::kData);
  const TransferReport param = run_transferability(cfg, TransferMode::kDataParam);
  EXPECT_EQ(data.gray_box.n_unstable, param.gray_box.n_unstable);
  for (int j = 0; j < 2; ++j) {
    EXPECT_EQ(data.gray_box.samples[j].attack.eps_star, param.gray_box.samples[j].attack.eps_star);
  }
  EXPECT_EQ(data.full_knowledge.n_unstable, param.full_knowledge.n_unstable);
}

TEST(LaplacianDemo, BudgetAndCleanSpectrum) {
  const Fig1Result r = fig1_demo(0);
  EXPECT_EQ(r.delta.max_abs(), 0.16);
  EXPECT_TRUE(r.delta.within_budget());
  EXPECT_LT(spectral_radius(r.clean_eigs), 0.5);
  EXPECT_EQ(r.clean.horizon(), 15);
  EXPECT_EQ(r.perturbed.u0(), r.clean.u0() + r.delta.dU);
  EXPECT_EQ(r.destabilized, spectral_radius(r.perturbed_eigs) > 1.0);
}

}  // namespace
}  // namespace ddc
