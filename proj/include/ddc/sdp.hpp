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

// Small dense semidefinite programming.
//
// StandardProblem is the block-diagonal dual form
//
//   maximize b'y  subject to  Z = C - sum_i y_i A_i  >= 0,
//
// solved by an infeasible-start primal-dual path-following method (HKM
// direction, Mehrotra predictor-corrector). LmiProgram is the modelling
// layer on top: minimize c'x subject to affine LMIs F(x) >= 0 and linear
// equalities, reduced to standard form by eliminating the equalities and
// any direction that leaves every LMI and the objective unchanged.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ddc::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// kInaccurate: the solver stalled before reaching the tolerance. The result
/// is its most accurate iterate when every residual is below 1e-6, otherwise
/// the best iterate that satisfies the LMIs.
enum class Status { kOptimal, kInaccurate, kInfeasible, kUnbounded, kFailure };
std::string to_string(Status s);

struct Options {
  double tol = 1e-8;         // relative gap and residual target
  int max_iterations = 100;
  bool verbose = false;  // per-iteration trace on stderr
  /// When positive, the solver stops at the central-path point with
  /// <X, Z> / order = center_mu instead of at the optimum. That point is a
  /// smooth function of the problem data.
  double center_mu = 0.0;
};

/// Blocks are packed column-major one after another; `a` holds one packed
/// constraint matrix per column.
struct StandardProblem {
  std::vector<int> block_sizes;
  VectorXd c;  // packed C
  MatrixXd a;  // packed A_i, len x k
  VectorXd b;

  Eigen::Index packed_length() const;
};

struct StandardSolution {
  Status status = Status::kFailure;
  VectorXd y;
  std::vector<MatrixXd> X, Z;
  double primal_objective = 0.0;  // <C, X>
  double dual_objective = 0.0;    // b'y
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

StandardSolution solve_standard(const StandardProblem& problem,
                                const Options& options = {});

/// Affine LMI program: minimize c'x  s.t.  F_b(x) = F_b0 + sum_i x_i F_bi >= 0.
class LmiProgram {
 public:
  static constexpr int kConstant = -1;

  /// Appends \p count scalar variables; returns the index of the first.
  int add_variables(int count);
  /// Appends an LMI block of the given size; returns its index.
  int add_block(int size);
  /// Adds coeff * x[var] (or coeff alone for kConstant) at (row, col) and,
  /// off the diagonal, at (col, row).
  void add_term(int block, int row, int col, int var, double coeff);
  void add_objective(int var, double coeff);
  void add_equality(std::vector<std::pair<int, double>> terms, double rhs);

  int num_variables() const { return num_vars_; }

  struct Result {
    Status status = Status::kFailure;
    VectorXd x;
    double objective = 0.0;
    int iterations = 0;
    double relative_gap = 0.0;
  };
  Result solve(const Options& options = {}) const;

 private:
  struct Term {
    int row, col, var;
    double coeff;
  };
  struct Equality {
    std::vector<std::pair<int, double>> terms;
    double rhs;
  };

  int num_vars_ = 0;
  std::vector<int> block_sizes_;
  std::vector<std::vector<Term>> terms_;
  std::vector<std::pair<int, double>> objective_;
  std::vector<Equality> equalities_;
};

}  // namespace ddc::sdp
