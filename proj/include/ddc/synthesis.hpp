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

// Direct data-driven LQR design.
//
// The program
//
//   min  tr(QP) + tr(K'RKP) + regularizer
//   s.t. X1 G P G' X1' - P + I <= 0,  P >= I,  [K; I] = W0 G
//
// is solved through the change of variables Y = G P, which turns every
// constraint into an LMI (Schur complements) plus the linear equality
// X0 Y = P. K and G are recovered as U0 Y P^-1 and Y P^-1.

#include <string>

#include "ddc/lti.hpp"

namespace ddc {

struct RegularizerMode {
  enum class Kind { kNone, kCertaintyEquivalence, kRobustnessInducing };

  Kind kind = Kind::kNone;
  double strength = 0.0;  // gamma or rho

  static RegularizerMode none() { return {}; }
  static RegularizerMode certainty_equivalence(double gamma) {
    return {Kind::kCertaintyEquivalence, gamma};
  }
  static RegularizerMode robustness_inducing(double rho) {
    return {Kind::kRobustnessInducing, rho};
  }
  /// Throws std::invalid_argument on a negative or non-finite strength.
  void validate() const;
  bool operator==(const RegularizerMode&) const = default;
};

std::string to_string(RegularizerMode::Kind kind);

enum class MatrixNorm { kTwoInduced, kFrobenius };

struct SynthesisConfig {
  LqrWeights weights;
  RegularizerMode regularizer;
  double solver_tol = 1e-8;
  double feasibility_margin = 1e-6;
  MatrixNorm norm = MatrixNorm::kTwoInduced;
  /// Positive values return the interior point on the central path at this
  /// barrier level instead of the optimum (see sdp::Options::center_mu).
  double central_path_mu = 0.0;

  void validate(int n, int m) const;
};

enum class SynthStatus { kOptimal, kInfeasible, kSolverFailure };
std::string to_string(SynthStatus s);

struct SynthesisResult {
  SynthStatus status = SynthStatus::kSolverFailure;
  // Populated only when status == kOptimal.
  MatrixXd K;
  GramianCertificate P;
  MatrixXd G;
  double J = 0.0;                   // tr(QP) + tr(K'RKP), no regularizer
  double objective_with_reg = 0.0;  // optimal value of the convex program
  int solver_iterations = 0;
  std::string message;

  bool optimal() const { return status == SynthStatus::kOptimal; }
};

/// Throws RankConditionError if W0 lacks full row rank, DimensionError or
/// std::invalid_argument on an inconsistent config. Numerical outcomes are
/// reported through the status.
SynthesisResult synthesize(const TrajectoryData& data, const SynthesisConfig& cfg);

struct FeasibilityReport {
  bool ok = false;
  double stability = 0.0;         // lambda_max(X1 G P G' X1' - P + I)
  double certificate = 0.0;       // lambda_min(P - I)
  double parameterization = 0.0;  // max |W0 G - [K; I]|
};

/// Recomputes the three constraint residuals from scratch.
FeasibilityReport verify_feasibility(const TrajectoryData& data,
                                     const SynthesisResult& result, double margin);

/// Pi = I - W0^+ W0, the projector onto the null space of W0.
MatrixXd null_space_projector(const TrajectoryData& data);

double matrix_norm(const MatrixXd& M, MatrixNorm norm);

/// gamma ||Pi G|| or rho tr(G P G') evaluated on the recovered G; 0 for None.
double regularizer_value(const TrajectoryData& data, const SynthesisResult& result,
                         const RegularizerMode& mode,
                         MatrixNorm norm = MatrixNorm::kTwoInduced);

}  // namespace ddc
