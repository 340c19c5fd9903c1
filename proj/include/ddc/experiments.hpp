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

#pragma once

// Seeded Monte Carlo harness for the attack experiments.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddc/attack.hpp"
#include "ddc/lti.hpp"
#include "ddc/synthesis.hpp"

namespace ddc {

enum class AttackKind { kDgsm, kRandom, kDgsmTransferData, kDgsmTransferParam };
std::string to_string(AttackKind kind);
/// Inverse of to_string; throws std::invalid_argument.
AttackKind attack_kind_from_string(const std::string& name);

LinearSystem pendulum_system();
/// A = I + 0.01 * (tridiagonal pattern of ones), B = I.
LinearSystem laplacian_system();

struct ScenarioConfig {
  std::string system_name = "pendulum";  // pendulum, laplacian or custom
  LinearSystem system = pendulum_system();
  int horizon = 10;
  double disturbance_std = 0.0;
  VectorXd x0;  // empty means the origin
  bool random_x0 = false;  // draw x0 ~ N(0, I) per sample instead
  LqrWeights weights;
  RegularizerMode regularizer;
  MatrixNorm norm = MatrixNorm::kTwoInduced;
  double solver_tol = 1e-8;
  AttackKind attack_kind = AttackKind::kDgsm;
  double hypothetical_strength = 0.1;  // crafting gamma or rho in param transfer
  EpsGrid eps_grid = default_eps_grid();
  int n_all = 50;
  double tau = 0.8;
  std::uint64_t master_seed = 0;
  FiniteDifference fd;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  SynthesisConfig synthesis() const;
  bool operator==(const ScenarioConfig& other) const;
};

/// Pendulum with Q = I, R = 1e-5 I, T = 10, no disturbance, N_all = 50 and
/// tau = 0.8 over a budget grid matched to the data scale.
ScenarioConfig pendulum_scenario();
/// Laplacian, disturbance std 0.05, R = 1e-3 I, T = 15, gamma = 1e-3.
ScenarioConfig fig1_scenario();

/// Standard-normal inputs and disturbance draws from \p seed, simulated from
/// the configured initial state.
TrajectoryData generate_sample(const ScenarioConfig& cfg, std::uint64_t seed);
/// Fresh inputs, zero disturbance, same initial state and model.
TrajectoryData hypothetical_sample(const ScenarioConfig& cfg, std::uint64_t seed);

struct SampleRecord {
  int index = 0;
  std::uint64_t seed = 0;
  bool clean_ok = false;
  double clean_J = 0.0;  // NaN when the clean closed loop is unstable
  AttackResult attack;
  std::string error;
};

struct ExperimentReport {
  ScenarioConfig config;
  std::vector<SampleRecord> samples;
  std::vector<int> n_unstable;  // per grid point, monotone closure
  std::vector<double> ratio;
  std::optional<double> eps_bar;
  int clean_failures = 0;
  long long synth_calls = 0;
  double wall_seconds = 0.0;
};

/// Counts of samples whose first destabilizing budget is at or below each
/// grid point, and the smallest budget whose ratio reaches tau.
void aggregate(ExperimentReport& report);

ExperimentReport run_scenario(const ScenarioConfig& cfg, int jobs = 1);

enum class SweepParameter { kGamma, kRho };

struct SweepPoint {
  double value = 0.0;
  ExperimentReport report;
};

/// Same master seed at every value, so samples are paired across the sweep.
std::vector<SweepPoint> sweep_regularizer(const ScenarioConfig& base,
                                          const std::vector<double>& values,
                                          SweepParameter which, int jobs = 1);

struct RegularizerComparison {
  EpsGrid grid;
  ExperimentReport ce;
  ExperimentReport robust;
  double mean_J_ce = 0.0;
  double mean_J_robust = 0.0;
};

RegularizerComparison compare_regularizers(const ScenarioConfig& cfg_ce,
                                           const ScenarioConfig& cfg_robust, int jobs = 1);

enum class TransferMode { kData, kDataParam };

struct TransferReport {
  ExperimentReport full_knowledge;
  ExperimentReport gray_box;
};

TransferReport run_transferability(const ScenarioConfig& cfg, TransferMode mode,
                                   int jobs = 1);

struct Fig1Result {
  std::uint64_t seed = 0;
  bool destabilized = false;
  Spectrum clean_eigs;
  Spectrum perturbed_eigs;
  Perturbation delta;
  TrajectoryData clean;
  TrajectoryData perturbed;
};

/// DGSM on one sample of \p cfg at the largest budget of its grid.
Fig1Result fig1_demo(const ScenarioConfig& cfg, std::uint64_t seed, int jobs = 1);
/// fig1_demo on fig1_scenario().
Fig1Result fig1_demo(std::uint64_t seed, int jobs = 1);

}  // namespace ddc
