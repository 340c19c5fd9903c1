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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ddc/errors.hpp"

namespace ddc {
namespace {

std::string Shape(const MatrixXd& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

bool IsSymmetric(const MatrixXd& M, double tol) {
  return M.rows() == M.cols() && (M - M.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

void LinearSystem::validate() const {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw DimensionError("A must be square and nonempty, got " + Shape(A));
  }
  if (B.rows() != A.rows() || B.cols() == 0) {
    throw DimensionError("B must have " + std::to_string(A.rows()) +
                         " rows and at least one column, got " + Shape(B));
  }
}

TrajectoryData::TrajectoryData(MatrixXd u0, MatrixXd x, MatrixXd d0)
    : u0_(std::move(u0)), x_(std::move(x)), d0_(std::move(d0)) {
  const auto T = u0_.cols();
  if (x_.cols() != T + 1) {
    throw DimensionError("X must have T+1 = " + std::to_string(T + 1) +
                         " columns, got " + Shape(x_));
  }
  if (d0_.size() == 0) d0_ = MatrixXd::Zero(x_.rows(), T);
  if (d0_.rows() != x_.rows() || d0_.cols() != T) {
    throw DimensionError("D0 must be " + std::to_string(x_.rows()) + "x" +
                         std::to_string(T) + ", got " + Shape(d0_));
  }
  x0_ = x_.leftCols(T);
  x1_ = x_.rightCols(T);
  w0_.resize(u0_.rows() + x_.rows(), T);
  w0_ << u0_, x0_;
}

void LqrWeights::validate(int n, int m) const {
  if (Q.rows() != n || Q.cols() != n) {
    throw DimensionError("Q must be " + std::to_string(n) + "x" +
                         std::to_string(n) + ", got " + Shape(Q));
  }
  if (R.rows() != m || R.cols() != m) {
    throw DimensionError("R must be " + std::to_string(m) + "x" +
                         std::to_string(m) + ", got " + Shape(R));
  }
  if (!IsSymmetric(Q, 1e-12) || !IsSymmetric(R, 1e-12)) {
    throw std::invalid_argument("Q and R must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eq(Q, Eigen::EigenvaluesOnly);
  if (eq.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, Q.norm())) {
    throw std::invalid_argument("Q must be positive semidefinite");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> er(R, Eigen::EigenvaluesOnly);
  if (er.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("R must be positive definite");
  }
}

double GramianCertificate::min_margin() const {
  const MatrixXd S = 0.5 * (P + P.transpose()) - MatrixXd::Identity(P.rows(), P.cols());
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(S, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

TrajectoryData simulate_trajectory(const LinearSystem& sys, const VectorXd& x0,
                                   const MatrixXd& U, const MatrixXd& D) {
  sys.validate();
  const int n = sys.n();
  const auto T = U.cols();
  if (x0.size() != n) {
    throw DimensionError("x0 must have " + std::to_string(n) + " entries");
  }
  if (U.rows() != sys.m()) {
    throw DimensionError("U must have m = " + std::to_string(sys.m()) +
                         " rows, got " + Shape(U));
  }
  if (D.rows() != n || D.cols() != T) {
    throw DimensionError("D must be " + std::to_string(n) + "x" +
                         std::to_string(T) + ", got " + Shape(D));
  }
  MatrixXd X(n, T + 1);
  X.col(0) = x0;
  for (Eigen::Index t = 0; t < T; ++t) {
    X.col(t + 1) = sys.A * X.col(t) + sys.B * U.col(t) + D.col(t);
  }
  return TrajectoryData(U, std::move(X), D);
}

RankCheck check_rank_condition(const TrajectoryData& data) {
  const MatrixXd& W = data.w0();
  RankCheck out;
  if (W.size() == 0) return out;
  Eigen::JacobiSVD<MatrixXd> svd(W);
  const auto& s = svd.singularValues();
  const Eigen::Index required = W.rows();
  // Singular values beyond min(rows, cols) are zero.
  out.smin = W.cols() < required ? 0.0 : s(required - 1);
  if (W.cols() < required || s(0) == 0.0) return out;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > kRankTolerance * s(0)) ++rank;
  }
  out.satisfied = rank == required;
  return out;
}

RiccatiSolution lqr_riccati(const LinearSystem& sys, const LqrWeights& w,
                            double tol, int max_iterations) {
  sys.validate();
  w.validate(sys.n(), sys.m());
  const MatrixXd& A = sys.A;
  const MatrixXd& B = sys.B;
  MatrixXd P = w.Q;
  for (int it = 1; it <= max_iterations; ++it) {
    const MatrixXd BtP = B.transpose() * P;
    const MatrixXd S = w.R + BtP * B;
    const MatrixXd gain = S.ldlt().solve(BtP * A);  // -K
    MatrixXd next = w.Q + A.transpose() * P * A - (A.transpose() * P * B) * gain;
    next = (0.5 * (next + next.transpose())).eval();
    const double step = (next - P).norm();
    P = std::move(next);
    if (!std::isfinite(step)) break;
    if (step <= tol * std::max(1.0, P.norm())) {
      RiccatiSolution out;
      const MatrixXd BtPn = B.transpose() * P;
      out.K = -(w.R + BtPn * B).ldlt().solve(BtPn * A);
      out.P = P;
      out.iterations = it;
      const MatrixXd Acl = A + B * out.K;
      const MatrixXd residual =
          w.Q + out.K.transpose() * w.R * out.K + Acl.transpose() * P * Acl - P;
      if (residual.norm() > 1e-10 * std::max(1.0, P.norm())) {
        throw ConvergenceError("DARE fixed point has residual " +
                               std::to_string(residual.norm()));
      }
      return out;
    }
  }
  throw ConvergenceError("DARE iteration did not converge in " +
                         std::to_string(max_iterations) + " iterations");
}

MatrixXd solve_discrete_lyapunov(const MatrixXd& Acl, const MatrixXd& S) {
  const auto n = Acl.rows();
  if (Acl.cols() != n || S.rows() != n || S.cols() != n) {
    throw DimensionError("Lyapunov operands must be square and equal-sized");
  }
  // vec(Acl P Acl') = (Acl kron Acl) vec(P) for column-major vec.
  MatrixXd L = MatrixXd::Identity(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      L.block(i * n, j * n, n, n) -= Acl(i, j) * Acl;
    }
  }
  const VectorXd rhs = Eigen::Map<const VectorXd>(S.data(), n * n);
  const VectorXd p = L.partialPivLu().solve(rhs);
  MatrixXd P = Eigen::Map<const MatrixXd>(p.data(), n, n);
  return 0.5 * (P + P.transpose());
}

double closed_loop_cost(const LinearSystem& sys, const MatrixXd& K,
                        const LqrWeights& w) {
  sys.validate();
  w.validate(sys.n(), sys.m());
  if (K.rows() != sys.m() || K.cols() != sys.n()) {
    throw DimensionError("K must be m x n, got " + Shape(K));
  }
  const MatrixXd Acl = sys.A + sys.B * K;
  const double radius = spectral_radius(sorted_eigenvalues(Acl));
  if (!(radius < 1.0)) {
    throw UnstableClosedLoopError("closed loop is not Schur stable (rho = " +
                                  std::to_string(radius) + "); cost undefined");
  }
  const MatrixXd P = solve_discrete_lyapunov(Acl, MatrixXd::Identity(sys.n(), sys.n()));
  return (w.Q * P).trace() + (K.transpose() * w.R * K * P).trace();
}

IdentifiedModel least_squares_id(const TrajectoryData& data) {
  if (!check_rank_condition(data).satisfied) {
    throw RankConditionError("W0 is rank deficient; least squares is not unique");
  }
  const MatrixXd BA = data.x1() * right_inverse(data.w0());
  IdentifiedModel out;
  out.B_hat = BA.leftCols(data.m());
  out.A_hat = BA.rightCols(data.n());
  return out;
}

Spectrum sorted_eigenvalues(const MatrixXd& M) {
  Eigen::EigenSolver<MatrixXd> es(M, /*computeEigenvectors=*/false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  Spectrum out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              if (a.imag() != b.imag()) return a.imag() < b.imag();
              return std::abs(a) < std::abs(b);
            });
  return out;
}

Spectrum closed_loop_eigs(const LinearSystem& sys, const MatrixXd& K) {
  if (K.rows() != sys.m() || K.cols() != sys.n()) {
    throw DimensionError("K must be m x n, got " + Shape(K));
  }
  return sorted_eigenvalues(sys.A + sys.B * K);
}

double spectral_radius(const Spectrum& eigs) {
  double r = 0.0;
  for (const auto& l : eigs) r = std::max(r, std::abs(l));
  return r;
}

double snr(const TrajectoryData& data) {
  const double dmax = data.d0().size() == 0
                          ? 0.0
                          : Eigen::JacobiSVD<MatrixXd>(data.d0()).singularValues()(0);
  if (dmax == 0.0) return std::numeric_limits<double>::infinity();
  const auto& s = Eigen::JacobiSVD<MatrixXd>(data.w0()).singularValues();
  const double wmin = data.w0().cols() < data.w0().rows() ? 0.0 : s(s.size() - 1);
  return wmin / dmax;
}

MatrixXd right_inverse(const MatrixXd& W) {
  const MatrixXd gram = W * W.transpose();
  return gram.ldlt().solve(W).transpose();
}

}  // namespace ddc
