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

#include "ddc/lti.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ddc/errors.hpp"
#include "ddc/experiments.hpp"

namespace ddc {
namespace {

MatrixXd Randn(int r, int c, std::mt19937_64& gen) {
  std::normal_distribution<double> dist;
  MatrixXd M(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) M(i, j) = dist(gen);
  return M;
}

LqrWeights PendulumWeights() {
  return {MatrixXd::Identity(3, 3), 1e-5 * MatrixXd::Identity(1, 1)};
}

TEST(Simulate, ScalarAccumulator) {
  const LinearSystem sys{MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1)};
  const TrajectoryData d =
      simulate_trajectory(sys, VectorXd::Zero(1), MatrixXd::Ones(1, 2), MatrixXd::Zero(1, 2));
  EXPECT_EQ(d.x()(0, 0), 0.0);
  EXPECT_EQ(d.x()(0, 1), 1.0);
  EXPECT_EQ(d.x()(0, 2), 2.0);
}

TEST(Simulate, NilpotentReset) {
  const LinearSystem sys{MatrixXd::Zero(2, 2), MatrixXd::Ones(2, 1)};
  VectorXd x0(2);
  x0 << 3.0, -1.0;
  const TrajectoryData d =
      simulate_trajectory(sys, x0, MatrixXd::Zero(1, 4), MatrixXd::Zero(2, 4));
  EXPECT_EQ(d.x().col(0), x0);
  EXPECT_TRUE(d.x().rightCols(4).isZero(0.0));
}

TEST(Simulate, PendulumFirstStep) {
  MatrixXd U = MatrixXd::Zero(1, 3);
  U(0, 0) = 1.0;
  const TrajectoryData d =
      simulate_trajectory(pendulum_system(), VectorXd::Zero(3), U, MatrixXd::Zero(3, 3));
  EXPECT_DOUBLE_EQ(d.x()(0, 1), 0.25);
  EXPECT_EQ(d.x()(1, 1), 0.0);
  EXPECT_EQ(d.x()(2, 1), 0.0);
}

TEST(Simulate, DerivedMatrices) {
  std::mt19937_64 gen(1);
  const TrajectoryData d = simulate_trajectory(pendulum_system(), VectorXd::Zero(3),
                                               Randn(1, 6, gen), MatrixXd::Zero(3, 6));
  EXPECT_EQ(d.x0(), d.x().leftCols(6));
  EXPECT_EQ(d.x1(), d.x().rightCols(6));
  EXPECT_EQ(d.w0().topRows(1), d.u0());
  EXPECT_EQ(d.w0().bottomRows(3), d.x0());
}

TEST(Simulate, LinearityProperty) {
  std::mt19937_64 gen(7);
  const LinearSystem sys = pendulum_system();
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd U1 = Randn(1, 10, gen), U2 = Randn(1, 10, gen);
    const double a = Randn(1, 1, gen)(0, 0), b = Randn(1, 1, gen)(0, 0);
    const MatrixXd D = MatrixXd::Zero(3, 10);
    const VectorXd z = VectorXd::Zero(3);
    const MatrixXd lhs = simulate_trajectory(sys, z, a * U1 + b * U2, D).x();
    const MatrixXd rhs =
        a * simulate_trajectory(sys, z, U1, D).x() + b * simulate_trajectory(sys, z, U2, D).x();
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Simulate, RejectsBadShapes) {
  EXPECT_THROW(simulate_trajectory(pendulum_system(), VectorXd::Zero(2), MatrixXd::Zero(1, 3),
                                   MatrixXd::Zero(3, 3)),
               DimensionError);
  EXPECT_THROW(simulate_trajectory(pendulum_system(), VectorXd::Zero(3), MatrixXd::Zero(1, 3),
                                   MatrixXd::Zero(3, 4)),
               DimensionError);
}

TEST(RankCondition, RandomInputsSatisfyIt) {
  std::mt19937_64 gen(3);
  const TrajectoryData d = simulate_trajectory(pendulum_system(), VectorXd::Zero(3),
                                               Randn(1, 10, gen), MatrixXd::Zero(3, 10));
  const RankCheck rc = check_rank_condition(d);
  EXPECT_TRUE(rc.satisfied);
  Eigen::JacobiSVD<MatrixXd> svd(d.w0());
  EXPECT_NEAR(rc.smin, svd.singularValues().minCoeff(), 1e-12 * svd.singularValues()(0));
}

TEST(RankCondition, ShortHorizonFails) {
  std::mt19937_64 gen(3);
  const TrajectoryData d = simulate_trajectory(pendulum_system(), VectorXd::Zero(3),
                                               Randn(1, 2, gen), MatrixXd::Zero(3, 2));
  EXPECT_FALSE(check_rank_condition(d).satisfied);
}

TEST(Riccati, PendulumMatchesIndependentSolution) {
  // Reference gain and trace from an independent DARE solver.
  const RiccatiSolution s = lqr_riccati(pendulum_system(), PendulumWeights());
  const double k_ref[] = {-4.163312303631434, -5.931150574145322, -4.098209442780958};
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(s.K(0, j), k_ref[j], 1e-6 * std::abs(k_ref[j]));
  EXPECT_NEAR(s.P.trace(), 112.81192089264236, 1e-7 * 112.8);
  EXPECT_LT(spectral_radius(closed_loop_eigs(pendulum_system(), s.K)), 1.0);
}

TEST(Riccati, CostEqualsTraceOfRiccatiMatrix) {
  const LinearSystem sys = laplacian_system();
  const LqrWeights w{MatrixXd::Identity(3, 3), 1e-3 * MatrixXd::Identity(3, 3)};
  const RiccatiSolution s = lqr_riccati(sys, w);
  EXPECT_NEAR(closed_loop_cost(sys, s.K, w), s.P.trace(), 1e-8);
  EXPECT_NEAR(s.P.trace(), 3.00305764546938, 1e-9);
}

TEST(Riccati, OptimalGainBeatsNearbyGains) {
  const LinearSystem sys = pendulum_system();
  const LqrWeights w = PendulumWeights();
  const RiccatiSolution s = lqr_riccati(sys, w);
  const double j_star = closed_loop_cost(sys, s.K, w);
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd K = s.K + 1e-2 * Randn(1, 3, gen);
    EXPECT_GE(closed_loop_cost(sys, K, w), j_star - 1e-9);
  }
}

TEST(Lyapunov, ResidualVanishes) {
  std::mt19937_64 gen(5);
  MatrixXd A = Randn(4, 4, gen);
  A *= 0.9 / spectral_radius(sorted_eigenvalues(A));
  const MatrixXd S = MatrixXd::Identity(4, 4);
  const MatrixXd P = solve_discrete_lyapunov(A, S);
  EXPECT_LE((A * P * A.transpose() - P + S).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ClosedLoopCost, UnstableLoopThrows) {
  EXPECT_THROW(closed_loop_cost(pendulum_system(), MatrixXd::Zero(1, 3), PendulumWeights()),
               UnstableClosedLoopError);
}

TEST(LeastSquares, NoiselessDataRecoverModel) {
  std::mt19937_64 gen(9);
  const LinearSystem sys = pendulum_system();
  const TrajectoryData d = simulate_trajectory(sys, VectorXd::Zero(3), Randn(1, 10, gen),
                                               MatrixXd::Zero(3, 10));
  const IdentifiedModel m = least_squares_id(d);
  EXPECT_LT((m.A_hat - sys.A).norm() + (m.B_hat - sys.B).norm(), 1e-8);
}

TEST(LeastSquares, ResidualBelowTrueNoise) {
  std::mt19937_64 gen(10);
  const LinearSystem sys = pendulum_system();
  const MatrixXd D = 0.05 * Randn(3, 10, gen);
  const TrajectoryData d = simulate_trajectory(sys, VectorXd::Zero(3), Randn(1, 10, gen), D);
  const IdentifiedModel m = least_squares_id(d);
  MatrixXd BA(3, 4);
  BA << m.B_hat, m.A_hat;
  EXPECT_LE((d.x1() - BA * d.w0()).norm(), D.norm() + 1e-12);
}

TEST(LeastSquares, RankDeficientThrows) {
  const TrajectoryData d = simulate_trajectory(pendulum_system(), VectorXd::Zero(3),
                                               MatrixXd::Ones(1, 2), MatrixXd::Zero(3, 2));
  EXPECT_THROW(least_squares_id(d), RankConditionError);
}

TEST(Snr, MatchesSvdOracle) {
  std::mt19937_64 gen(12);
  const MatrixXd D = 0.05 * Randn(3, 10, gen);
  const TrajectoryData d =
      simulate_trajectory(pendulum_system(), VectorXd::Zero(3), Randn(1, 10, gen), D);
  Eigen::JacobiSVD<MatrixXd> sw(d.w0()), sd(D);
  const double expected = sw.singularValues().minCoeff() / sd.singularValues()(0);
  EXPECT_GT(snr(d), 0.0);
  EXPECT_NEAR(snr(d), expected, 1e-10 * expected);
  const TrajectoryData clean(d.u0(), d.x());
  EXPECT_TRUE(std::isinf(snr(clean)));
}

TEST(Spectrum, SortedOrder) {
  MatrixXd M(3, 3);
  M << 0.5, 0, 0, 0, 0.1, -0.2, 0, 0.2, 0.1;
  const Spectrum s = sorted_eigenvalues(M);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s[0].real(), 0.1, 1e-12);
  EXPECT_LT(s[0].imag(), s[1].imag());
  EXPECT_NEAR(s[2].real(), 0.5, 1e-12);
  EXPECT_NEAR(spectral_radius(s), 0.5, 1e-12);
}

TEST(Weights, ValidationRejectsIndefiniteR) {
  LqrWeights w{MatrixXd::Identity(3, 3), -MatrixXd::Identity(1, 1)};
  EXPECT_THROW(w.validate(3, 1), std::invalid_argument);
  w.R = MatrixXd::Identity(2, 2);
  EXPECT_THROW(w.validate(3, 1), std::exception);
}

}  // namespace
}  // namespace ddc
