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

// Data poisoning attacks on the direct data-driven design: the directed
// gradient sign method (DGSM) and a random sign baseline.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ddc/lti.hpp"
#include "ddc/synthesis.hpp"

namespace ddc {

using Eigen::MatrixXcd;

/// Additive perturbation (dU, dX) of the recorded data.
struct Perturbation {
  MatrixXd dU;  // m x T
  MatrixXd dX;  // n x (T+1)
  double eps = 0.0;

  static Perturbation zeros(int m, int horizon, int n);
  int size() const { return static_cast<int>(dU.size() + dX.size()); }
  double max_abs() const;
  /// True when every entry lies within the declared budget.
  bool within_budget() const;
  Perturbation operator-() const;
};

/// Strictly ascending, nonempty list of positive budgets.
using EpsGrid = std::vector<double>;

/// \p count points spaced geometrically from \p lo to \p hi inclusive.
EpsGrid geometric_grid(double lo, double hi, int count);
/// Throws std::invalid_argument unless the grid is a valid EpsGrid.
void validate_grid(const EpsGrid& grid);
EpsGrid default_eps_grid();

/// Re(lambda) Re(Z) + Im(lambda) Im(Z), entry-wise.
MatrixXd pi_project(std::complex<double> lambda, const MatrixXcd& Z);

/// (U0 + dU, X + dX) with D0 carried over. Throws DimensionError.
TrajectoryData apply_perturbation(const TrajectoryData& data, const Perturbation& delta);

/// Any controller design step mapping data to a synthesis result.
using Designer = std::function<SynthesisResult(const TrajectoryData&)>;
Designer make_designer(const SynthesisConfig& cfg);

struct EigGradient {
  MatrixXcd dU;             // m x T
  MatrixXcd dX;             // n x (T+1)
  std::vector<int> flagged; // entry indices (dU first, column-major) set to 0
};

/// Gradients of every closed-loop eigenvalue, sharing one set of solves.
struct EigJacobian {
  Spectrum eigs;                   // at the base point, canonical order
  std::vector<EigGradient> grads;  // grads[i] belongs to eigs[i]
};

struct FiniteDifference {
  double step = 0.0;            // 0 selects default_fd_step
  double solver_tol = 1e-10;    // upper bound on the tolerance of the +-h solves
  double center_mu = 0.0;       // forwarded as SynthesisConfig::central_path_mu
  int jobs = 1;
};

/// 1e-5 (1 + max |[U0; X]|).
double default_fd_step(const TrajectoryData& data);

/// Matches each reference eigenvalue with a distinct candidate, repeatedly
/// taking the closest remaining pair. Returns candidates in reference order.
Spectrum pair_eigenvalues(const Spectrum& reference, const Spectrum& candidates);

/// Central differences over all perturbation entries around \p base.
/// Throws std::runtime_error if the base design is not optimal.
EigJacobian eig_jacobian(const TrajectoryData& data, const LinearSystem& sys,
                         const Designer& design, const Perturbation& base, double h,
                         int jobs = 1);

EigGradient eig_gradient(const TrajectoryData& data, const LinearSystem& sys,
                         const SynthesisConfig& cfg, const Perturbation& base, int i,
                         double h, int jobs = 1);

/// eps sign(pi_project(lambda, grad)); sign(0) = 0.
Perturbation sign_perturbation(const EigGradient& grad, std::complex<double> lambda,
                               double eps);

Perturbation dgsm_craft(const TrajectoryData& data, const LinearSystem& sys,
                        const SynthesisConfig& cfg, double eps, int i,
                        const FiniteDifference& fd = {});

struct AttackResult {
  bool success = false;
  std::optional<double> eps_star;
  std::optional<Perturbation> delta;
  int target_eig_index = -1;
  Spectrum eigs_clean;
  Spectrum eigs_perturbed;
  SynthStatus synth_status_at_attack = SynthStatus::kOptimal;
  int synth_failures = 0;
  int synth_calls = 0;
};

/// DGSM search: the smallest grid budget at which some eigenvalue target
/// destabilizes the design. The gradient is taken once at the
/// clean data and reused for every budget.
AttackResult dgsm_search(const EpsGrid& grid, const TrajectoryData& data,
                         const LinearSystem& sys, const SynthesisConfig& cfg,
                         const FiniteDifference& fd = {});

/// Gray-box variant: the perturbation is crafted on \p crafting_data with
/// \p crafting_cfg and then applied to the true data and design.
AttackResult dgsm_search_transfer(const EpsGrid& grid, const TrajectoryData& data,
                                  const TrajectoryData& crafting_data,
                                  const LinearSystem& sys, const SynthesisConfig& cfg,
                                  const SynthesisConfig& crafting_cfg,
                                  const FiniteDifference& fd = {});

/// Every entry independently +eps or -eps with probability 1/2.
Perturbation random_attack(double eps, int m, int horizon, int n, std::uint64_t seed);

/// Random sign attack over the grid with a fresh draw per budget.
AttackResult random_search(const EpsGrid& grid, const TrajectoryData& data,
                           const LinearSystem& sys, const SynthesisConfig& cfg,
                           std::uint64_t seed);

}  // namespace ddc
