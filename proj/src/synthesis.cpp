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

#include "ddc/synthesis.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "ddc/errors.hpp"
#include "ddc/sdp.hpp"

namespace ddc {
namespace {

MatrixXd SymmetricSqrt(const MatrixXd& R) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(R);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

double LambdaMax(const MatrixXd& S) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (S + S.transpose()),
                                                 Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

// Index maps for the decision variables of one program instance.
struct Variables {
  int T = 0, n = 0, m = 0;
  int y0 = 0, p0 = 0, v0 = 0, reg0 = -1;

  int y(int t, int j) const { return y0 + t + j * T; }
  // Upper triangle, column by column.
  static int sym(int base, int i, int j) {
    if (i > j) std::swap(i, j);
    return base + j * (j + 1) / 2 + i;
  }
  int p(int i, int j) const { return sym(p0, i, j); }
  int v(int i, int j) const { return sym(v0, i, j); }
  int w(int i, int j) const { return sym(reg0, i, j); }
};

// Adds sum_t L(i, t) Y(t, j) at (row0 + i, col0 + j) for every i, j.
void AddLeftTimesY(sdp::LmiProgram& prog, int block, const Variables& v,
                   const MatrixXd& L, int row0, int col0) {
  for (int i = 0; i < L.rows(); ++i) {
    for (int j = 0; j < v.n; ++j) {
      for (int t = 0; t < v.T; ++t) {
        if (L(i, t) != 0.0) prog.add_term(block, row0 + i, col0 + j, v.y(t, j), L(i, t));
      }
    }
  }
}

void AddP(sdp::LmiProgram& prog, int block, const Variables& v, int offset) {
  for (int i = 0; i < v.n; ++i) {
    for (int j = i; j < v.n; ++j) {
      prog.add_term(block, offset + i, offset + j, v.p(i, j), 1.0);
    }
  }
}

}  // namespace

void RegularizerMode::validate() const {
  if (!std::isfinite(strength) || strength < 0.0) {
    throw std::invalid_argument("regularizer strength must be finite and >= 0");
  }
}

std::string to_string(RegularizerMode::Kind kind) {
  switch (kind) {
    case RegularizerMode::Kind::kNone: return "none";
    case RegularizerMode::Kind::kCertaintyEquivalence: return "certainty_equivalence";
    case RegularizerMode::Kind::kRobustnessInducing: return "robustness_inducing";
  }
  return "unknown";
}

std::string to_string(SynthStatus s) {
  switch (s) {
    case SynthStatus::kOptimal: return "optimal";
    case SynthStatus::kInfeasible: return "infeasible";
    case SynthStatus::kSolverFailure: return "solver_failure";
  }
  return "unknown";
}

void SynthesisConfig::validate(int n, int m) const {
  weights.validate(n, m);
  regularizer.validate();
  if (!(solver_tol > 0.0) || !(feasibility_margin > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
}

MatrixXd null_space_projector(const TrajectoryData& data) {
  const MatrixXd& W = data.w0();
  return MatrixXd::Identity(W.cols(), W.cols()) - right_inverse(W) * W;
}

double matrix_norm(const MatrixXd& M, MatrixNorm norm) {
  if (M.size() == 0) return 0.0;
  if (norm == MatrixNorm::kFrobenius) return M.norm();
  return Eigen::JacobiSVD<MatrixXd>(M).singularValues()(0);
}

SynthesisResult synthesize(const TrajectoryData& data, const SynthesisConfig& cfg) {
  const int n = data.n(), m = data.m(), T = data.horizon();
  cfg.validate(n, m);
  if (!check_rank_condition(data).satisfied) {
    throw RankConditionError("rank condition rank W0 = n+m = " + std::to_string(n + m) +
                             " fails (T = " + std::to_string(T) + ")");
  }
  const auto kind = cfg.regularizer.kind;
  const double strength = cfg.regularizer.strength;
  const bool use_ce = kind == RegularizerMode::Kind::kCertaintyEquivalence && strength > 0.0;
  const bool use_rob = kind == RegularizerMode::Kind::kRobustnessInducing && strength > 0.0;

  sdp::LmiProgram prog;
  Variables v;
  v.T = T;
  v.n = n;
  v.m = m;
  v.y0 = prog.add_variables(T * n);
  v.p0 = prog.add_variables(n * (n + 1) / 2);
  v.v0 = prog.add_variables(m * (m + 1) / 2);
  if (use_ce) v.reg0 = prog.add_variables(1);
  if (use_rob) v.reg0 = prog.add_variables(T * (T + 1) / 2);

  const MatrixXd& Q = cfg.weights.Q;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      prog.add_objective(v.p(i, j), i == j ? Q(i, i) : Q(i, j) + Q(j, i));
    }
  }
  for (int i = 0; i < m; ++i) prog.add_objective(v.v(i, i), 1.0);

  // X0 Y = P.
  const MatrixXd& X0 = data.x0();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<std::pair<int, double>> terms;
      for (int t = 0; t < T; ++t) {
        if (X0(i, t) != 0.0) terms.emplace_back(v.y(t, j), X0(i, t));
      }
      terms.emplace_back(v.p(i, j), -1.0);
      prog.add_equality(std::move(terms), 0.0);
    }
  }

  // [[P - I, X1 Y], [Y' X1', P]] >= 0.
  const int stab = prog.add_block(2 * n);
  AddP(prog, stab, v, 0);
  for (int i = 0; i < n; ++i) prog.add_term(stab, i, i, sdp::LmiProgram::kConstant, -1.0);
  AddLeftTimesY(prog, stab, v, data.x1(), 0, n);
  AddP(prog, stab, v, n);

  // [[V, R^1/2 U0 Y], [., P]] >= 0.
  const int cost = prog.add_block(m + n);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) prog.add_term(cost, i, j, v.v(i, j), 1.0);
  }
  AddLeftTimesY(prog, cost, v, SymmetricSqrt(cfg.weights.R) * data.u0(), 0, m);
  AddP(prog, cost, v, m);

  if (use_ce) {
    const MatrixXd Pi = null_space_projector(data);
    prog.add_objective(v.reg0, strength);
    if (cfg.norm == MatrixNorm::kTwoInduced) {
      // ||Pi Y||_2 <= s  <=>  [[s I, Pi Y], [., s I]] >= 0.
      const int blk = prog.add_block(T + n);
      for (int k = 0; k < T + n; ++k) prog.add_term(blk, k, k, v.reg0, 1.0);
      AddLeftTimesY(prog, blk, v, Pi, 0, T);
    } else {
      // ||vec(Pi Y)||_2 <= s as an arrow LMI.
      const int len = T * n;
      const int blk = prog.add_block(len + 1);
      for (int k = 0; k <= len; ++k) prog.add_term(blk, k, k, v.reg0, 1.0);
      for (int j = 0; j < n; ++j) {
        for (int t = 0; t < T; ++t) {
          for (int tau = 0; tau < T; ++tau) {
            if (Pi(t, tau) != 0.0) prog.add_term(blk, t + j * T, len, v.y(tau, j), Pi(t, tau));
          }
        }
      }
    }
  }
  if (use_rob) {
    // tr(Y P^-1 Y') <= tr(W)  via  [[W, Y], [Y', P]] >= 0.
    const int blk = prog.add_block(T + n);
    for (int i = 0; i < T; ++i) {
      prog.add_objective(v.w(i, i), strength);
      for (int j = i; j < T; ++j) prog.add_term(blk, i, j, v.w(i, j), 1.0);
    }
    AddLeftTimesY(prog, blk, v, MatrixXd::Identity(T, T), 0, T);
    AddP(prog, blk, v, T);
  }

  sdp::Options opts;
  opts.tol = cfg.solver_tol;
  opts.center_mu = cfg.central_path_mu;
  opts.verbose = std::getenv("DDC_SDP_TRACE") != nullptr;
  const auto sol = prog.solve(opts);

  SynthesisResult out;
  out.solver_iterations = sol.iterations;
  if (sol.status == sdp::Status::kInfeasible) {
    out.status = SynthStatus::kInfeasible;
    out.message = "LMI constraints are infeasible";
    return out;
  }
  if (sol.status == sdp::Status::kInaccurate) {
    out.message = "reduced accuracy: relative gap " + std::to_string(sol.relative_gap);
  } else if (sol.status != sdp::Status::kOptimal) {
    out.status = SynthStatus::kSolverFailure;
    out.message = "SDP solver: " + sdp::to_string(sol.status);
    return out;
  }

  MatrixXd Y(T, n), P(n, n);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < n; ++j) Y(t, j) = sol.x(v.y(t, j));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) P(i, j) = sol.x(v.p(i, j));
  }
  Eigen::LLT<MatrixXd> pllt(P);
  if (pllt.info() != Eigen::Success) {
    out.status = SynthStatus::kSolverFailure;
    out.message = "certificate P is not positive definite";
    return out;
  }
  const MatrixXd G = pllt.solve(Y.transpose()).transpose();
  out.G = G;
  out.K = data.u0() * G;
  out.P.P = P;
  out.J = (Q * P).trace() + (out.K.transpose() * cfg.weights.R * out.K * P).trace();
  out.objective_with_reg = sol.objective;
  out.status = SynthStatus::kOptimal;

  const FeasibilityReport rep = verify_feasibility(data, out, cfg.feasibility_margin);
  if (!rep.ok) {
    out.status = SynthStatus::kSolverFailure;
    out.message = "re-verification failed: stability " + std::to_string(rep.stability) +
                  ", certificate " + std::to_string(rep.certificate) +
                  ", parameterization " + std::to_string(rep.parameterization);
    out.K.resize(0, 0);
    out.G.resize(0, 0);
    out.P.P.resize(0, 0);
  }
  return out;
}

FeasibilityReport verify_feasibility(const TrajectoryData& data,
                                     const SynthesisResult& result, double margin) {
  FeasibilityReport rep;
  const int n = data.n(), m = data.m();
  const MatrixXd& G = result.G;
  const MatrixXd& P = result.P.P;
  if (G.rows() != data.horizon() || G.cols() != n || P.rows() != n || P.cols() != n ||
      result.K.rows() != m || result.K.cols() != n) {
    throw DimensionError("synthesis result does not match the data dimensions");
  }
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd XG = data.x1() * G;
  rep.stability = LambdaMax(XG * P * XG.transpose() - P + I);
  rep.certificate = -LambdaMax(I - P);
  MatrixXd target(m + n, n);
  target << result.K, I;
  rep.parameterization = (data.w0() * G - target).cwiseAbs().maxCoeff();
  rep.ok = rep.stability <= margin && rep.certificate >= -margin &&
           rep.parameterization <= margin;
  return rep;
}

double regularizer_value(const TrajectoryData& data, const SynthesisResult& result,
                         const RegularizerMode& mode, MatrixNorm norm) {
  switch (mode.kind) {
    case RegularizerMode::Kind::kNone:
      return 0.0;
    case RegularizerMode::Kind::kCertaintyEquivalence:
      return mode.strength * matrix_norm(null_space_projector(data) * result.G, norm);
    case RegularizerMode::Kind::kRobustnessInducing:
      return mode.strength * (result.G * result.P.P * result.G.transpose()).trace();
  }
  return 0.0;
}

}  // namespace ddc
