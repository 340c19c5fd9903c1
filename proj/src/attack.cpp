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

#include "ddc/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "ddc/errors.hpp"
#include "ddc/kernels.hpp"
#include "ddc/parallel.hpp"
#include "ddc/seeding.hpp"

namespace ddc {
namespace {

std::string Shape(const MatrixXd& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

// Synthesis on attacked data; a rank loss counts as a failed design.
SynthesisResult Design(const Designer& design, const TrajectoryData& data) {
  try {
    return design(data);
  } catch (const RankConditionError& e) {
    SynthesisResult r;
    r.status = SynthStatus::kInfeasible;
    r.message = e.what();
    return r;
  }
}

// Returns entry e of the stacked (dU, dX) vector.
double& Entry(Perturbation& p, int e) {
  const int nu = static_cast<int>(p.dU.size());
  return e < nu ? p.dU.data()[e] : p.dX.data()[e - nu];
}

struct Probe {
  bool ok = false;
  Spectrum plus, minus;
};

SynthesisConfig Tightened(const SynthesisConfig& cfg, const FiniteDifference& fd) {
  SynthesisConfig out = cfg;
  out.solver_tol = std::min(cfg.solver_tol, fd.solver_tol);
  if (fd.center_mu > 0.0) out.central_path_mu = fd.center_mu;
  return out;
}

struct Outcome {
  SynthStatus status = SynthStatus::kOptimal;
  Spectrum eigs;
  bool unstable = false;
};

Outcome Evaluate(const TrajectoryData& data, const LinearSystem& sys,
                 const SynthesisConfig& cfg, const Perturbation& delta) {
  const SynthesisResult r = Design(make_designer(cfg), apply_perturbation(data, delta));
  Outcome out;
  out.status = r.status;
  if (r.optimal()) {
    out.eigs = closed_loop_eigs(sys, r.K);
    out.unstable = spectral_radius(out.eigs) > 1.0;
  }
  return out;
}

AttackResult Search(const EpsGrid& grid, const TrajectoryData& data,
                    const TrajectoryData& crafting_data, const LinearSystem& sys,
                    const SynthesisConfig& cfg, const SynthesisConfig& crafting_cfg,
                    const FiniteDifference& fd) {
  validate_grid(grid);
  AttackResult result;
  const SynthesisResult clean = make_designer(cfg)(data);
  ++result.synth_calls;
  if (!clean.optimal()) {
    throw std::runtime_error("clean synthesis failed: " + clean.message);
  }
  result.eigs_clean = closed_loop_eigs(sys, clean.K);

  const double h = fd.step > 0.0 ? fd.step : default_fd_step(crafting_data);
  const Perturbation zero =
      Perturbation::zeros(crafting_data.m(), crafting_data.horizon(), crafting_data.n());
  const EigJacobian jac = eig_jacobian(crafting_data, sys,
                                       make_designer(Tightened(crafting_cfg, fd)), zero,
                                       h, fd.jobs);
  result.synth_calls += 1 + 2 * zero.size();

  for (double eps : grid) {
    for (std::size_t i = 0; i < jac.grads.size(); ++i) {
      const Perturbation delta = sign_perturbation(jac.grads[i], jac.eigs[i], eps);
      const Outcome o = Evaluate(data, sys, cfg, delta);
      ++result.synth_calls;
      if (o.status != SynthStatus::kOptimal) {
        ++result.synth_failures;
        result.synth_status_at_attack = o.status;
        continue;
      }
      if (o.unstable) {
        result.success = true;
        result.eps_star = eps;
        result.delta = delta;
        result.target_eig_index = static_cast<int>(i);
        result.eigs_perturbed = o.eigs;
        result.synth_status_at_attack = o.status;
        return result;
      }
    }
  }
  return result;
}

}  // namespace

Perturbation Perturbation::zeros(int m, int horizon, int n) {
  return {MatrixXd::Zero(m, horizon), MatrixXd::Zero(n, horizon + 1), 0.0};
}

double Perturbation::max_abs() const {
  return std::max(kernels::max_abs({dU.data(), static_cast<std::size_t>(dU.size())}),
                  kernels::max_abs({dX.data(), static_cast<std::size_t>(dX.size())}));
}

bool Perturbation::within_budget() const { return max_abs() <= eps; }

Perturbation Perturbation::operator-() const { return {-dU, -dX, eps}; }

EpsGrid geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1 || (count == 1 && hi != lo)) {
    throw std::invalid_argument("geometric_grid needs 0 < lo <= hi and count >= 1");
  }
  EpsGrid g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double ratio = std::log(hi / lo) / (count - 1);
  for (int k = 0; k < count; ++k) g[k] = lo * std::exp(ratio * k);
  g.front() = lo;
  g.back() = hi;
  return g;
}

void validate_grid(const EpsGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("eps grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || !std::isfinite(grid[k])) {
      throw std::invalid_argument("eps grid entries must be positive and finite");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw std::invalid_argument("eps grid must be strictly ascending");
    }
  }
}

EpsGrid default_eps_grid() { return geometric_grid(1e-4, 1.0, 40); }

MatrixXd pi_project(std::complex<double> lambda, const MatrixXcd& Z) {
  return lambda.real() * Z.real() + lambda.imag() * Z.imag();
}

TrajectoryData apply_perturbation(const TrajectoryData& data, const Perturbation& delta) {
  if (delta.dU.rows() != data.u0().rows() || delta.dU.cols() != data.u0().cols()) {
    throw DimensionError("dU must be " + Shape(data.u0()) + ", got " + Shape(delta.dU));
  }
  if (delta.dX.rows() != data.x().rows() || delta.dX.cols() != data.x().cols()) {
    throw DimensionError("dX must be " + Shape(data.x()) + ", got " + Shape(delta.dX));
  }
  return TrajectoryData(data.u0() + delta.dU, data.x() + delta.dX, data.d0());
}

Designer make_designer(const SynthesisConfig& cfg) {
  return [cfg](const TrajectoryData& d) { return synthesize(d, cfg); };
}

double default_fd_step(const TrajectoryData& data) {
  const double scale = std::max(data.u0().cwiseAbs().maxCoeff(), data.x().cwiseAbs().maxCoeff());
  return 1e-5 * (1.0 + scale);
}

Spectrum pair_eigenvalues(const Spectrum& reference, const Spectrum& candidates) {
  const std::size_t n = reference.size();
  if (candidates.size() != n) {
    throw DimensionError("cannot pair spectra of different sizes");
  }
  Spectrum out(n);
  std::vector<bool> ref_used(n, false), cand_used(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (ref_used[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (cand_used[j]) continue;
        const double d = std::abs(reference[i] - candidates[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    ref_used[bi] = cand_used[bj] = true;
    out[bi] = candidates[bj];
  }
  return out;
}

EigJacobian eig_jacobian(const TrajectoryData& data, const LinearSystem& sys,
                         const Designer& design, const Perturbation& base, double h,
                         int jobs) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const TrajectoryData at_base = apply_perturbation(data, base);
  const SynthesisResult center = Design(design, at_base);
  if (!center.optimal()) {
    throw std::runtime_error("synthesis at the base perturbation is not optimal: " +
                             to_string(center.status));
  }
  EigJacobian jac;
  jac.eigs = closed_loop_eigs(sys, center.K);
  const int n = sys.n();
  const int entries = base.size();

  std::vector<Probe> probes(entries);
  parallel_for(entries, jobs, [&](std::size_t e) {
    Probe& p = probes[e];
    Perturbation step = Perturbation::zeros(data.m(), data.horizon(), data.n());
    Entry(step, static_cast<int>(e)) = h;
    const SynthesisResult up = Design(design, apply_perturbation(at_base, step));
    if (!up.optimal()) return;
    const SynthesisResult down = Design(design, apply_perturbation(at_base, -step));
    if (!down.optimal()) return;
    p.plus = pair_eigenvalues(jac.eigs, closed_loop_eigs(sys, up.K));
    p.minus = pair_eigenvalues(jac.eigs, closed_loop_eigs(sys, down.K));
    p.ok = true;
  });

  jac.grads.resize(n);
  for (int i = 0; i < n; ++i) {
    EigGradient& g = jac.grads[i];
    g.dU = MatrixXcd::Zero(data.m(), data.horizon());
    g.dX = MatrixXcd::Zero(data.n(), data.horizon() + 1);
    const int nu = static_cast<int>(g.dU.size());
    for (int e = 0; e < entries; ++e) {
      std::complex<double>& slot = e < nu ? g.dU.data()[e] : g.dX.data()[e - nu];
      if (!probes[e].ok) {
        g.flagged.push_back(e);
        continue;
      }
      slot = (probes[e].plus[i] - probes[e].minus[i]) / (2.0 * h);
    }
  }
  return jac;
}

EigGradient eig_gradient(const TrajectoryData& data, const LinearSystem& sys,
                         const SynthesisConfig& cfg, const Perturbation& base, int i,
                         double h, int jobs) {
  if (i < 0 || i >= sys.n()) throw std::out_of_range("eigenvalue index out of range");
  return eig_jacobian(data, sys, make_designer(cfg), base, h, jobs).grads[i];
}

Perturbation sign_perturbation(const EigGradient& grad, std::complex<double> lambda,
                               double eps) {
  Perturbation p = Perturbation::zeros(static_cast<int>(grad.dU.rows()),
                                       static_cast<int>(grad.dU.cols()),
                                       static_cast<int>(grad.dX.rows()));
  p.eps = eps;
  auto project = [&](const MatrixXcd& Z, MatrixXd& out) {
    const MatrixXd re = Z.real();
    const MatrixXd im = Z.imag();
    const auto len = static_cast<std::size_t>(Z.size());
    kernels::sign_project(lambda, {re.data(), len}, {im.data(), len}, eps,
                          {out.data(), len});
  };
  project(grad.dU, p.dU);
  project(grad.dX, p.dX);
  return p;
}

Perturbation dgsm_craft(const TrajectoryData& data, const LinearSystem& sys,
                        const SynthesisConfig& cfg, double eps, int i,
                        const FiniteDifference& fd) {
  if (i < 0 || i >= sys.n()) throw std::out_of_range("eigenvalue index out of range");
  const double h = fd.step > 0.0 ? fd.step : default_fd_step(data);
  const EigJacobian jac =
      eig_jacobian(data, sys, make_designer(Tightened(cfg, fd)),
                   Perturbation::zeros(data.m(), data.horizon(), data.n()), h, fd.jobs);
  return sign_perturbation(jac.grads[i], jac.eigs[i], eps);
}

AttackResult dgsm_search(const EpsGrid& grid, const TrajectoryData& data,
                         const LinearSystem& sys, const SynthesisConfig& cfg,
                         const FiniteDifference& fd) {
  return Search(grid, data, data, sys, cfg, cfg, fd);
}

AttackResult dgsm_search_transfer(const EpsGrid& grid, const TrajectoryData& data,
                                  const TrajectoryData& crafting_data,
                                  const LinearSystem& sys, const SynthesisConfig& cfg,
                                  const SynthesisConfig& crafting_cfg,
                                  const FiniteDifference& fd) {
  if (crafting_data.m() != data.m() || crafting_data.n() != data.n() ||
      crafting_data.horizon() != data.horizon()) {
    throw DimensionError("hypothetical data must match the true data dimensions");
  }
  return Search(grid, data, crafting_data, sys, cfg, crafting_cfg, fd);
}

Perturbation random_attack(double eps, int m, int horizon, int n, std::uint64_t seed) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  Perturbation p = Perturbation::zeros(m, horizon, n);
  p.eps = eps;
  std::mt19937_64 gen(seed);
  for (Eigen::Index k = 0; k < p.dU.size(); ++k) p.dU.data()[k] = (gen() >> 63) ? eps : -eps;
  for (Eigen::Index k = 0; k < p.dX.size(); ++k) p.dX.data()[k] = (gen() >> 63) ? eps : -eps;
  return p;
}

AttackResult random_search(const EpsGrid& grid, const TrajectoryData& data,
                           const LinearSystem& sys, const SynthesisConfig& cfg,
                           std::uint64_t seed) {
  validate_grid(grid);
  AttackResult result;
  const SynthesisResult clean = make_designer(cfg)(data);
  ++result.synth_calls;
  if (!clean.optimal()) {
    throw std::runtime_error("clean synthesis failed: " + clean.message);
  }
  result.eigs_clean = closed_loop_eigs(sys, clean.K);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Perturbation delta = random_attack(grid[k], data.m(), data.horizon(), data.n(),
                                             derive_seed(seed, k, "random"));
    const Outcome o = Evaluate(data, sys, cfg, delta);
    ++result.synth_calls;
    if (o.status != SynthStatus::kOptimal) {
      ++result.synth_failures;
      result.synth_status_at_attack = o.status;
      continue;
    }
    if (o.unstable) {
      result.success = true;
      result.eps_star = grid[k];
      result.delta = delta;
      result.eigs_perturbed = o.eigs;
      result.synth_status_at_attack = o.status;
      return result;
    }
  }
  return result;
}

}  // namespace ddc
