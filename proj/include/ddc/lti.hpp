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

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace ddc {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Spectrum = std::vector<std::complex<double>>;

/// Singular values above this fraction of sigma_max count toward the rank.
inline constexpr double kRankTolerance = 1e-10;

/// Discrete-time pair (A, B) of x(t+1) = A x(t) + B u(t) + d(t).
struct LinearSystem {
  MatrixXd A;
  MatrixXd B;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  /// Throws DimensionError unless A is square and B has A.rows() rows.
  void validate() const;
};

/// Recorded trajectory and the data matrices derived from it.
///
/// X holds T+1 states, U0 and D0 hold T samples. X0/X1 are the leading and
/// trailing T columns of X and W0 = [U0; X0].
class TrajectoryData {
 public:
  TrajectoryData() = default;
  /// An empty \p d0 is read as an all-zero disturbance.
  TrajectoryData(MatrixXd u0, MatrixXd x, MatrixXd d0 = MatrixXd());

  const MatrixXd& u0() const { return u0_; }
  const MatrixXd& x() const { return x_; }
  const MatrixXd& d0() const { return d0_; }
  const MatrixXd& x0() const { return x0_; }
  const MatrixXd& x1() const { return x1_; }
  const MatrixXd& w0() const { return w0_; }

  int n() const { return static_cast<int>(x_.rows()); }
  int m() const { return static_cast<int>(u0_.rows()); }
  int horizon() const { return static_cast<int>(u0_.cols()); }

 private:
  MatrixXd u0_, x_, d0_;
  MatrixXd x0_, x1_, w0_;
};

struct LqrWeights {
  MatrixXd Q;
  MatrixXd R;

  /// Checks shapes, symmetry (1e-12), Q >= 0 and R > 0.
  void validate(int n, int m) const;
};

/// Controllability-Gramian certificate P (P >= I).
struct GramianCertificate {
  MatrixXd P;

  double min_margin() const;  // lambda_min(P - I)
};

TrajectoryData simulate_trajectory(const LinearSystem& sys, const VectorXd& x0,
                                   const MatrixXd& U, const MatrixXd& D);

struct RankCheck {
  bool satisfied = false;
  double smin = 0.0;
};
RankCheck check_rank_condition(const TrajectoryData& data);

struct RiccatiSolution {
  MatrixXd K;  // u = K x
  MatrixXd P;
  int iterations = 0;
};

/// Stabilizing DARE solution by fixed-point iteration on P, started from Q.
/// Throws ConvergenceError when the iteration cap is hit.
RiccatiSolution lqr_riccati(const LinearSystem& sys, const LqrWeights& w,
                            double tol = 1e-12, int max_iterations = 100000);

/// Solves Acl P Acl' - P + S = 0 via the Kronecker form.
MatrixXd solve_discrete_lyapunov(const MatrixXd& Acl, const MatrixXd& S);

/// tr(QP) + tr(K'RKP) with P the closed-loop controllability Gramian.
/// Throws UnstableClosedLoopError if rho(A+BK) >= 1.
double closed_loop_cost(const LinearSystem& sys, const MatrixXd& K,
                        const LqrWeights& w);

struct IdentifiedModel {
  MatrixXd A_hat;
  MatrixXd B_hat;
};
/// Ordinary least squares [B A] = X1 W0'(W0 W0')^-1.
/// Throws RankConditionError when W0 is rank deficient.
IdentifiedModel least_squares_id(const TrajectoryData& data);

/// Eigenvalues sorted by real part, then imaginary part, then modulus.
Spectrum sorted_eigenvalues(const MatrixXd& M);
Spectrum closed_loop_eigs(const LinearSystem& sys, const MatrixXd& K);
double spectral_radius(const Spectrum& eigs);

/// sigma_min(W0) / sigma_max(D0); +inf for a zero disturbance.
double snr(const TrajectoryData& data);

/// Right inverse W' (W W')^-1 of a full-row-rank matrix.
MatrixXd right_inverse(const MatrixXd& W);

}  // namespace ddc
