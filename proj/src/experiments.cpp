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

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ddc/errors.hpp"
#include "ddc/parallel.hpp"
#include "ddc/seeding.hpp"

namespace ddc {
namespace {

MatrixXd NormalMatrix(std::mt19937_64& gen, int rows, int cols, double stddev) {
  MatrixXd M(rows, cols);
  if (stddev == 0.0) return MatrixXd::Zero(rows, cols);
  std::normal_distribution<double> dist(0.0, stddev);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) M(r, c) = dist(gen);
  }
  return M;
}

VectorXd InitialState(const ScenarioConfig& cfg, std::mt19937_64& gen) {
  if (cfg.random_x0) return NormalMatrix(gen, cfg.system.n(), 1, 1.0);
  return cfg.x0.size() == 0 ? VectorXd::Zero(cfg.system.n()) : cfg.x0;
}

void Require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

SampleRecord RunSample(const ScenarioConfig& cfg, int j) {
  SampleRecord rec;
  rec.index = j;
  rec.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(j), "sample");
  const TrajectoryData data = generate_sample(cfg, rec.seed);
  const SynthesisConfig scfg = cfg.synthesis();
  FiniteDifference fd = cfg.fd;
  fd.jobs = 1;
  try {
    const SynthesisResult clean = synthesize(data, scfg);
    rec.clean_ok = clean.optimal();
    if (!rec.clean_ok) {
      rec.error = "clean synthesis: " + to_string(clean.status);
      return rec;
    }
    try {
      rec.clean_J = closed_loop_cost(cfg.system, clean.K, cfg.weights);
    } catch (const UnstableClosedLoopError&) {
      rec.clean_J = std::numeric_limits<double>::quiet_NaN();
    }
    switch (cfg.attack_kind) {
      case AttackKind::kDgsm:
        rec.attack = dgsm_search(cfg.eps_grid, data, cfg.system, scfg, fd);
        break;
      case AttackKind::kRandom:
        rec.attack = random_search(cfg.eps_grid, data, cfg.system, scfg,
                                   derive_seed(cfg.master_seed, j, "random"));
        break;
      case AttackKind::kDgsmTransferData:
      case AttackKind::kDgsmTransferParam: {
        const TrajectoryData hyp =
            hypothetical_sample(cfg, derive_seed(cfg.master_seed, j, "hypothetical"));
        SynthesisConfig crafting = scfg;
        if (cfg.attack_kind == AttackKind::kDgsmTransferParam) {
          crafting.regularizer.strength = cfg.hypothetical_strength;
        }
        rec.attack = dgsm_search_transfer(cfg.eps_grid, data, hyp, cfg.system, scfg,
                                          crafting, fd);
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.clean_ok = false;
    rec.error = e.what();
  }
  return rec;
}

double MeanCleanJ(const ExperimentReport& r) {
  double sum = 0.0;
  int count = 0;
  for (const auto& s : r.samples) {
    if (s.clean_ok && std::isfinite(s.clean_J)) {
      sum += s.clean_J;
      ++count;
    }
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::kDgsm: return "dgsm";
    case AttackKind::kRandom: return "random";
    case AttackKind::kDgsmTransferData: return "dgsm_transfer_data";
    case AttackKind::kDgsmTransferParam: return "dgsm_transfer_param";
  }
  return "unknown";
}

AttackKind attack_kind_from_string(const std::string& name) {
  for (AttackKind k : {AttackKind::kDgsm, AttackKind::kRandom, AttackKind::kDgsmTransferData,
                       AttackKind::kDgsmTransferParam}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown attack kind '" + name + "'");
}

LinearSystem pendulum_system() {
  LinearSystem sys;
  sys.A.resize(3, 3);
  sys.A << 0.9844, 0.0466, 0.0347,
           0.0397, 1.0009, 0.0007,
           0.0004, 0.0200, 1.0000;
  sys.B = MatrixXd::Zero(3, 1);
  sys.B(0, 0) = 0.25;
  return sys;
}

LinearSystem laplacian_system() {
  LinearSystem sys;
  sys.A.resize(3, 3);
  sys.A << 1.01, 0.01, 0.00,
           0.01, 1.01, 0.01,
           0.00, 0.01, 1.01;
  sys.B = MatrixXd::Identity(3, 3);
  return sys;
}

void ScenarioConfig::validate() const {
  try {
    system.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
  const int n = system.n(), m = system.m();
  Require(horizon >= 1, "horizon", "must be at least 1");
  Require(std::isfinite(disturbance_std) && disturbance_std >= 0.0, "disturbance_std",
          "must be finite and nonnegative");
  Require(x0.size() == 0 || x0.size() == n, "x0", "must have n entries");
  try {
    weights.validate(n, m);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("weights: ") + e.what());
  }
  try {
    regularizer.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("regularizer.strength: ") + e.what());
  }
  Require(solver_tol > 0.0, "solver_tol", "must be positive");
  if (attack_kind == AttackKind::kDgsmTransferParam) {
    Require(regularizer.kind != RegularizerMode::Kind::kNone, "attack_kind",
            "parameter transfer needs a regularizer");
    Require(std::isfinite(hypothetical_strength) && hypothetical_strength >= 0.0,
            "hypothetical_strength", "must be finite and nonnegative");
  }
  try {
    validate_grid(eps_grid);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("eps_grid: ") + e.what());
  }
  Require(n_all >= 1, "n_all", "must be at least 1");
  Require(tau >= 0.0 && tau <= 1.0, "tau", "must lie in [0, 1]");
  Require(fd.step >= 0.0, "fd_step", "must be nonnegative");
  Require(fd.solver_tol > 0.0, "fd_solver_tol", "must be positive");
  Require(fd.center_mu >= 0.0, "fd_center_mu", "must be nonnegative");
}

SynthesisConfig ScenarioConfig::synthesis() const {
  SynthesisConfig s;
  s.weights = weights;
  s.regularizer = regularizer;
  s.solver_tol = solver_tol;
  s.norm = norm;
  return s;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return system_name == o.system_name && system.A == o.system.A && system.B == o.system.B &&
         horizon == o.horizon && disturbance_std == o.disturbance_std && x0 == o.x0 &&
         weights.Q == o.weights.Q && weights.R == o.weights.R &&
         regularizer == o.regularizer && norm == o.norm && solver_tol == o.solver_tol &&
         attack_kind == o.attack_kind && hypothetical_strength == o.hypothetical_strength &&
         eps_grid == o.eps_grid && n_all == o.n_all && tau == o.tau &&
         master_seed == o.master_seed && random_x0 == o.random_x0 && fd.step == o.fd.step &&
         fd.solver_tol == o.fd.solver_tol && fd.center_mu == o.fd.center_mu;
}

ScenarioConfig pendulum_scenario() {
  ScenarioConfig cfg;
  cfg.system_name = "pendulum";
  cfg.system = pendulum_system();
  cfg.horizon = 10;
  cfg.weights = {MatrixXd::Identity(3, 3), 1e-5 * MatrixXd::Identity(1, 1)};
  cfg.regularizer = RegularizerMode::certainty_equivalence(0.1);
  cfg.eps_grid = geometric_grid(1e-7, 1e-1, 49);
  return cfg;
}

ScenarioConfig fig1_scenario() {
  ScenarioConfig cfg;
  cfg.system_name = "laplacian";
  cfg.system = laplacian_system();
  cfg.horizon = 15;
  cfg.disturbance_std = 0.05;
  cfg.weights = {MatrixXd::Identity(3, 3), 1e-3 * MatrixXd::Identity(3, 3)};
  cfg.regularizer = RegularizerMode::certainty_equivalence(1e-3);
  cfg.eps_grid = {0.16};
  cfg.n_all = 20;
  return cfg;
}

TrajectoryData generate_sample(const ScenarioConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const VectorXd x0 = InitialState(cfg, gen);
  const MatrixXd U = NormalMatrix(gen, cfg.system.m(), cfg.horizon, 1.0);
  const MatrixXd D = NormalMatrix(gen, cfg.system.n(), cfg.horizon, cfg.disturbance_std);
  return simulate_trajectory(cfg.system, x0, U, D);
}

TrajectoryData hypothetical_sample(const ScenarioConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const VectorXd x0 = InitialState(cfg, gen);
  const MatrixXd U = NormalMatrix(gen, cfg.system.m(), cfg.horizon, 1.0);
  return simulate_trajectory(cfg.system, x0, U,
                             MatrixXd::Zero(cfg.system.n(), cfg.horizon));
}

void aggregate(ExperimentReport& report) {
  const EpsGrid& grid = report.config.eps_grid;
  report.n_unstable.assign(grid.size(), 0);
  report.ratio.assign(grid.size(), 0.0);
  report.clean_failures = 0;
  report.synth_calls = 0;
  for (const SampleRecord& s : report.samples) {
    if (!s.clean_ok) ++report.clean_failures;
    report.synth_calls += s.attack.synth_calls;
    if (!s.attack.success) continue;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (grid[k] >= *s.attack.eps_star) ++report.n_unstable[k];
    }
  }
  const double n_all = static_cast<double>(report.config.n_all);
  report.eps_bar.reset();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    report.ratio[k] = report.n_unstable[k] / n_all;
    if (!report.eps_bar && report.ratio[k] >= report.config.tau) report.eps_bar = grid[k];
  }
}

ExperimentReport run_scenario(const ScenarioConfig& cfg, int jobs) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = cfg;
  report.samples.resize(cfg.n_all);
  parallel_for(static_cast<std::size_t>(cfg.n_all), jobs, [&](std::size_t j) {
    report.samples[j] = RunSample(cfg, static_cast<int>(j));
  });
  aggregate(report);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<SweepPoint> sweep_regularizer(const ScenarioConfig& base,
                                          const std::vector<double>& values,
                                          SweepParameter which, int jobs) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  std::vector<SweepPoint> out;
  out.reserve(values.size());
  for (double v : values) {
    ScenarioConfig cfg = base;
    cfg.regularizer = which == SweepParameter::kGamma
                          ? RegularizerMode::certainty_equivalence(v)
                          : RegularizerMode::robustness_inducing(v);
    out.push_back({v, run_scenario(cfg, jobs)});
  }
  return out;
}

RegularizerComparison compare_regularizers(const ScenarioConfig& cfg_ce,
                                           const ScenarioConfig& cfg_robust, int jobs) {
  if (cfg_ce.eps_grid != cfg_robust.eps_grid || cfg_ce.master_seed != cfg_robust.master_seed ||
      cfg_ce.n_all != cfg_robust.n_all || cfg_ce.horizon != cfg_robust.horizon ||
      cfg_ce.system.A != cfg_robust.system.A || cfg_ce.system.B != cfg_robust.system.B) {
    throw std::invalid_argument("compared scenarios must share system, horizon, grid and seeds");
  }
  RegularizerComparison out;
  out.grid = cfg_ce.eps_grid;
  out.ce = run_scenario(cfg_ce, jobs);
  out.robust = run_scenario(cfg_robust, jobs);
  out.mean_J_ce = MeanCleanJ(out.ce);
  out.mean_J_robust = MeanCleanJ(out.robust);
  return out;
}

TransferReport run_transferability(const ScenarioConfig& cfg, TransferMode mode, int jobs) {
  ScenarioConfig full = cfg;
  full.attack_kind = AttackKind::kDgsm;
  ScenarioConfig gray = cfg;
  gray.attack_kind = mode == TransferMode::kData ? AttackKind::kDgsmTransferData
                                                 : AttackKind::kDgsmTransferParam;
  return {run_scenario(full, jobs), run_scenario(gray, jobs)};
}

Fig1Result fig1_demo(const ScenarioConfig& cfg, std::uint64_t seed, int jobs) {
  cfg.validate();
  const double eps = cfg.eps_grid.back();
  Fig1Result out;
  out.seed = seed;
  out.clean = generate_sample(cfg, derive_seed(seed, 0, "sample"));
  const SynthesisConfig scfg = cfg.synthesis();
  const SynthesisResult clean = synthesize(out.clean, scfg);
  if (!clean.optimal()) throw std::runtime_error("clean synthesis failed: " + clean.message);
  out.clean_eigs = closed_loop_eigs(cfg.system, clean.K);

  SynthesisConfig tight = scfg;
  tight.solver_tol = std::min(scfg.solver_tol, cfg.fd.solver_tol);
  tight.central_path_mu = cfg.fd.center_mu;
  const Perturbation zero =
      Perturbation::zeros(out.clean.m(), out.clean.horizon(), out.clean.n());
  const double h = cfg.fd.step > 0.0 ? cfg.fd.step : default_fd_step(out.clean);
  const EigJacobian jac =
      eig_jacobian(out.clean, cfg.system, make_designer(tight), zero, h, jobs);

  // Without success keep the eigenvalue target that
  // pushed the spectral radius furthest.
  double best_radius = -1.0;
  for (std::size_t i = 0; i < jac.grads.size(); ++i) {
    const Perturbation delta = sign_perturbation(jac.grads[i], jac.eigs[i], eps);
    const SynthesisResult r = synthesize(apply_perturbation(out.clean, delta), scfg);
    if (!r.optimal()) continue;
    const Spectrum eigs = closed_loop_eigs(cfg.system, r.K);
    const double radius = spectral_radius(eigs);
    if (radius > best_radius) {
      best_radius = radius;
      out.delta = delta;
      out.perturbed_eigs = eigs;
    }
    if (radius > 1.0) break;
  }
  if (best_radius < 0.0) throw std::runtime_error("no perturbed design was feasible");
  out.destabilized = best_radius > 1.0;
  out.perturbed = apply_perturbation(out.clean, out.delta);
  return out;
}

Fig1Result fig1_demo(std::uint64_t seed, int jobs) {
  return fig1_demo(fig1_scenario(), seed, jobs);
}

}  // namespace ddc
