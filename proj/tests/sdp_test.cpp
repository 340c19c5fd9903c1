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

#include "ddc/sdp.hpp"

#include <random>

#include <gtest/gtest.h>

namespace ddc::sdp {
namespace {

MatrixXd RandomSymmetric(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> dist;
  MatrixXd M(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) M(i, j) = dist(gen);
  return 0.5 * (M + M.transpose());
}

TEST(StandardForm, MinimumEigenvalueProperty) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    const MatrixXd C = RandomSymmetric(n, gen);
    StandardProblem p;
    p.block_sizes = {n};
    p.c = Eigen::Map<const VectorXd>(C.data(), n * n);
    const MatrixXd I = MatrixXd::Identity(n, n);
    p.a = Eigen::Map<const VectorXd>(I.data(), n * n);
    p.b = VectorXd::Ones(1);
    const StandardSolution s = solve_standard(p);
    ASSERT_EQ(s.status, Status::kOptimal);
    const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(C).eigenvalues()(0);
    EXPECT_NEAR(s.y(0), lmin, 1e-7 * (1.0 + std::abs(lmin)));
    EXPECT_LE(s.relative_gap, 1e-8);
  }
}

TEST(LmiProgram, EpigraphOfSquare) {
  // min t  s.t. [[t, x], [x, 1]] >= 0, x = 2.
  LmiProgram prog;
  const int t = prog.add_variables(1);
  const int x = prog.add_variables(1);
  const int blk = prog.add_block(2);
  prog.add_term(blk, 0, 0, t, 1.0);
  prog.add_term(blk, 0, 1, x, 1.0);
  prog.add_term(blk, 1, 1, LmiProgram::kConstant, 1.0);
  prog.add_objective(t, 1.0);
  prog.add_equality({{x, 1.0}}, 2.0);
  const auto r = prog.solve();
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.x(t), 4.0, 1e-6);
  EXPECT_NEAR(r.x(x), 2.0, 1e-9);
  EXPECT_NEAR(r.objective, 4.0, 1e-6);
}

TEST(LmiProgram, SpectralNormMatchesSvd) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 10; ++trial) {
    const int rows = 2 + trial % 3, cols = 1 + trial % 4;
    MatrixXd M(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) M(i, j) = dist(gen);
    // min s  s.t. [[s I, M], [M', s I]] >= 0.
    LmiProgram prog;
    const int s = prog.add_variables(1);
    const int blk = prog.add_block(rows + cols);
    for (int i = 0; i < rows + cols; ++i) prog.add_term(blk, i, i, s, 1.0);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) prog.add_term(blk, i, rows + j, LmiProgram::kConstant, M(i, j));
    prog.add_objective(s, 1.0);
    const auto r = prog.solve();
    ASSERT_EQ(r.status, Status::kOptimal);
    const double smax = Eigen::JacobiSVD<MatrixXd>(M).singularValues()(0);
    EXPECT_NEAR(r.objective, smax, 1e-6 * (1.0 + smax));
  }
}

TEST(LmiProgram, InconsistentEqualitiesAreInfeasible) {
  LmiProgram prog;
  const int x = prog.add_variables(1);
  const int blk = prog.add_block(1);
  prog.add_term(blk, 0, 0, x, 1.0);
  prog.add_objective(x, 1.0);
  prog.add_equality({{x, 1.0}}, 1.0);
  prog.add_equality({{x, 1.0}}, 2.0);
  EXPECT_EQ(prog.solve().status, Status::kInfeasible);
}

TEST(LmiProgram, ContradictoryLmisAreNotOptimal) {
  // x >= 1 and x <= -1.
  LmiProgram prog;
  const int x = prog.add_variables(1);
  const int b1 = prog.add_block(1);
  prog.add_term(b1, 0, 0, x, 1.0);
  prog.add_term(b1, 0, 0, LmiProgram::kConstant, -1.0);
  const int b2 = prog.add_block(1);
  prog.add_term(b2, 0, 0, x, -1.0);
  prog.add_term(b2, 0, 0, LmiProgram::kConstant, -1.0);
  prog.add_objective(x, 1.0);
  const Status s = prog.solve().status;
  EXPECT_NE(s, Status::kOptimal);
  EXPECT_NE(s, Status::kInaccurate);
}

TEST(LmiProgram, CentralPathPointSitsAboveOptimum) {
  LmiProgram prog;
  const int t = prog.add_variables(1);
  const int x = prog.add_variables(1);
  const int blk = prog.add_block(2);
  prog.add_term(blk, 0, 0, t, 1.0);
  prog.add_term(blk, 0, 1, x, 1.0);
  prog.add_term(blk, 1, 1, LmiProgram::kConstant, 1.0);
  prog.add_objective(t, 1.0);
  prog.add_equality({{x, 1.0}}, 2.0);
  Options opt;
  opt.center_mu = 1e-6;
  const auto r = prog.solve(opt);
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_GT(r.objective, 4.0);
  EXPECT_LT(r.objective, 4.0 + 1e-4);
}

TEST(Status, Names) {
  EXPECT_EQ(to_string(Status::kOptimal), "optimal");
  EXPECT_EQ(to_string(Status::kInaccurate), "inaccurate");
  EXPECT_EQ(to_string(Status::kInfeasible), "infeasible");
}

}  // namespace
}  // namespace ddc::sdp
