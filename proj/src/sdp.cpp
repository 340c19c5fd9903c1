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

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <span>

#include "ddc/kernels.hpp"

namespace ddc::sdp {
namespace {

using Blocks = std::vector<MatrixXd>;

struct Layout {
  std::vector<int> sizes;
  std::vector<Eigen::Index> offsets;
  Eigen::Index length = 0;
  int order = 0;  // sum of block sizes

  explicit Layout(const std::vector<int>& s) : sizes(s) {
    for (int sz : sizes) {
      offsets.push_back(length);
      length += static_cast<Eigen::Index>(sz) * sz;
      order += sz;
    }
  }
};

Blocks Unpack(const Layout& L, const double* packed) {
  Blocks out;
  out.reserve(L.sizes.size());
  for (std::size_t b = 0; b < L.sizes.size(); ++b) {
    out.emplace_back(Eigen::Map<const MatrixXd>(packed + L.offsets[b], L.sizes[b], L.sizes[b]));
  }
  return out;
}

void PackInto(const Layout& L, const Blocks& blocks, double* packed) {
  for (std::size_t b = 0; b < L.sizes.size(); ++b) {
    Eigen::Map<MatrixXd>(packed + L.offsets[b], L.sizes[b], L.sizes[b]) = blocks[b];
  }
}

VectorXd Pack(const Layout& L, const Blocks& blocks) {
  VectorXd v(L.length);
  PackInto(L, blocks, v.data());
  return v;
}

Blocks ScaledIdentity(const Layout& L, const std::vector<double>& scale) {
  Blocks out;
  for (std::size_t b = 0; b < L.sizes.size(); ++b) {
    out.push_back(scale[b] * MatrixXd::Identity(L.sizes[b], L.sizes[b]));
  }
  return out;
}

void Symmetrize(Blocks& blocks) {
  for (auto& B : blocks) B = (0.5 * (B + B.transpose())).eval();
}

// Largest alpha with M + alpha * D >= 0 for M > 0 (infinity if unbounded).
double MaxStep(const Blocks& M, const Blocks& D) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < M.size(); ++b) {
    Eigen::LLT<MatrixXd> llt(M[b]);
    if (llt.info() != Eigen::Success) return 0.0;
    MatrixXd W = llt.matrixL().solve(D[b]);
    W = llt.matrixL().solve(W.transpose()).eval();
    W = (0.5 * (W + W.transpose())).eval();
    const double lmin =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(W, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

// A(S)_i = <A_i, S> for packed S.
VectorXd ApplyA(const StandardProblem& p, const VectorXd& packed) {
  VectorXd out(p.a.cols());
  kernels::cross_dots({p.a.data(), static_cast<std::size_t>(p.a.size())},
                      static_cast<std::size_t>(p.a.cols()),
                      {packed.data(), static_cast<std::size_t>(packed.size())}, 1,
                      static_cast<std::size_t>(p.a.rows()),
                      {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kInaccurate: return "inaccurate";
    case Status::kFailure: return "failure";
  }
  return "unknown";
}

Eigen::Index StandardProblem::packed_length() const {
  Eigen::Index len = 0;
  for (int s : block_sizes) len += static_cast<Eigen::Index>(s) * s;
  return len;
}

namespace {

StandardSolution SolveFrom(const StandardProblem& p, const Options& opt, double z_scale) {
  const Layout L(p.block_sizes);
  const Eigen::Index k = p.a.cols();
  const std::size_t nb = L.sizes.size();
  StandardSolution sol;

  const Blocks C = Unpack(L, p.c.data());
  std::vector<Blocks> A;
  A.reserve(k);
  for (Eigen::Index i = 0; i < k; ++i) A.push_back(Unpack(L, p.a.col(i).data()));

  // Starting point scaled to the data.
  std::vector<double> xi(nb), eta(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const double s = L.sizes[b];
    double ratio = 0.0, amax = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double na = A[i][b].norm();
      ratio = std::max(ratio, (1.0 + std::abs(p.b(i))) / (1.0 + na));
      amax = std::max(amax, na);
    }
    xi[b] = std::max({10.0, std::sqrt(s), s * ratio});
    eta[b] = std::max({10.0, std::sqrt(s), amax, C[b].norm()});
    eta[b] *= z_scale;
  }
  Blocks X = ScaledIdentity(L, xi);
  Blocks Z = ScaledIdentity(L, eta);
  VectorXd y = VectorXd::Zero(k);

  const double bnorm = p.b.norm();
  const double cnorm = p.c.norm();
  const double n_order = L.order;
  VectorXd packed_s(L.length);
  MatrixXd S(L.length, k);
  MatrixXd M(k, k);

  int stall = 0;
  int since_best = 0;
  bool centering = false;
  int centered_steps = 0;
  double best_score = std::numeric_limits<double>::infinity();
  bool abandoned = false;
  StandardSolution best;
  StandardSolution best_feasible;
  bool have_feasible = false;
  for (int iter = 0; iter <= opt.max_iterations; ++iter) {
    sol.iterations = iter;
    const VectorXd xpack = Pack(L, X);
    const VectorXd zpack = Pack(L, Z);
    const VectorXd rp = p.b - ApplyA(p, xpack);
    const VectorXd rd_pack = p.c - zpack - p.a * y;
    const double pobj = p.c.dot(xpack);
    const double dobj = p.b.dot(y);
    const double mu = xpack.dot(zpack) / n_order;

    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.relative_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    sol.primal_infeasibility = rp.norm() / (1.0 + bnorm);
    sol.dual_infeasibility = rd_pack.norm() / (1.0 + cnorm);
    const double complementarity = xpack.dot(zpack) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (opt.verbose) {
      std::fprintf(stderr, "%3d pobj %+.10e dobj %+.10e gap %.2e pinf %.2e dinf %.2e mu %.2e\n",
                   iter, pobj, dobj, sol.relative_gap, sol.primal_infeasibility,
                   sol.dual_infeasibility, mu);
    }
    const double score = std::max({sol.relative_gap, complementarity,
                                   sol.primal_infeasibility, sol.dual_infeasibility});
    if (opt.center_mu > 0.0) {
      if (!centering && mu <= 10.0 * opt.center_mu &&
          std::max(sol.primal_infeasibility, sol.dual_infeasibility) <= 1e-8) {
        centering = true;
      }
      if (centering && centered_steps >= 3) {
        sol.status = Status::kOptimal;
        break;
      }
    } else if (score <= opt.tol) {
      sol.status = Status::kOptimal;
      break;
    }
    if (sol.dual_infeasibility <= opt.tol &&
        (!have_feasible || dobj > best_feasible.dual_objective)) {
      have_feasible = true;
      best_feasible = sol;
      best_feasible.y = y;
      best_feasible.X = X;
      best_feasible.Z = Z;
    }
    if (centering) {
      // Progress is measured by the Newton steps below.
    } else if (score < best_score) {
      best_score = score;
      best = sol;
      best.y = y;
      best.X = X;
      best.Z = Z;
      since_best = 0;
    } else if (++since_best >= 8) {
      break;
    }
    // Certificates of infeasibility of either side.
    const double xnorm = xpack.norm();
    if (pobj < 0.0 && xnorm > 1e8 &&
        ApplyA(p, xpack).norm() / -pobj <= 1e-6) {
      sol.status = Status::kInfeasible;
      break;
    }
    if (dobj > 0.0 && y.norm() > 1e8 && (p.a * y + zpack).norm() / dobj <= 1e-6) {
      sol.status = Status::kUnbounded;
      break;
    }
    if (iter == opt.max_iterations || !std::isfinite(mu)) break;
    // A start that is still far from feasible this late will not recover.
    if (iter >= 40 &&
        std::max(sol.primal_infeasibility, sol.dual_infeasibility) > 1e-1) {
      abandoned = true;
      break;
    }

    Blocks Zinv(nb);
    bool ok = true;
    for (std::size_t b = 0; b < nb; ++b) {
      Eigen::LLT<MatrixXd> llt(Z[b]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      Zinv[b] = llt.solve(MatrixXd::Identity(L.sizes[b], L.sizes[b]));
      Zinv[b] = (0.5 * (Zinv[b] + Zinv[b].transpose())).eval();
    }
    if (!ok) break;

    // Schur complement M_ij = <A_i, X A_j Zinv>.
    for (Eigen::Index j = 0; j < k; ++j) {
      double* col = S.col(j).data();
      for (std::size_t b = 0; b < nb; ++b) {
        Eigen::Map<MatrixXd>(col + L.offsets[b], L.sizes[b], L.sizes[b]).noalias() =
            X[b] * A[j][b] * Zinv[b];
      }
    }
    kernels::cross_dots({p.a.data(), static_cast<std::size_t>(p.a.size())},
                        static_cast<std::size_t>(k),
                        {S.data(), static_cast<std::size_t>(S.size())},
                        static_cast<std::size_t>(k), static_cast<std::size_t>(L.length),
                        {M.data(), static_cast<std::size_t>(M.size())});
    M = 0.5 * (M + M.transpose()).eval();
    Eigen::LLT<MatrixXd> chol(M);
    Eigen::LDLT<MatrixXd> ldlt;
    const bool use_ldlt = chol.info() != Eigen::Success;
    if (use_ldlt) {
      MatrixXd Mr = M;
      Mr.diagonal().array() += 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
      ldlt.compute(Mr);
      if (ldlt.info() != Eigen::Success) break;
    }
    auto solveM = [&](const VectorXd& r) -> VectorXd {
      return use_ldlt ? VectorXd(ldlt.solve(r)) : VectorXd(chol.solve(r));
    };

    const Blocks Rd = Unpack(L, rd_pack.data());
    Blocks XRdZinv(nb);
    for (std::size_t b = 0; b < nb; ++b) XRdZinv[b] = X[b] * Rd[b] * Zinv[b];
    const VectorXd a_xrdz = ApplyA(p, Pack(L, XRdZinv));

    // G = Rc Zinv; returns (dX, dy, dZ).
    auto direction = [&](const Blocks& G, Blocks& dX, VectorXd& dy, Blocks& dZ) {
      const VectorXd rhs = rp - ApplyA(p, Pack(L, G)) + a_xrdz;
      dy = solveM(rhs);
      const VectorXd dz_pack = rd_pack - p.a * dy;
      dZ = Unpack(L, dz_pack.data());
      dX.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) dX[b] = G[b] - X[b] * dZ[b] * Zinv[b];
      Symmetrize(dX);
      Symmetrize(dZ);
    };

    // Predictor.
    Blocks G(nb);
    for (std::size_t b = 0; b < nb; ++b) G[b] = -X[b];
    Blocks dXa, dZa;
    VectorXd dya;
    direction(G, dXa, dya, dZa);
    const double ap_aff = std::min(1.0, MaxStep(X, dXa));
    const double ad_aff = std::min(1.0, MaxStep(Z, dZa));
    double mu_aff = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      mu_aff += ((X[b] + ap_aff * dXa[b]).cwiseProduct(Z[b] + ad_aff * dZa[b])).sum();
    }
    mu_aff /= n_order;
    const double ratio = std::max(0.0, mu_aff / mu);
    const double sigma = std::min(1.0, ratio * ratio * ratio);

    // Corrector with the second-order term, or a pure Newton step towards
    // the requested central-path point.
    for (std::size_t b = 0; b < nb; ++b) {
      const auto I = MatrixXd::Identity(L.sizes[b], L.sizes[b]);
      const MatrixXd target =
          centering ? MatrixXd(opt.center_mu * I)
                    : MatrixXd(sigma * mu * I - dXa[b] * dZa[b]);
      G[b] = target * Zinv[b] - X[b];
    }
    Blocks dX, dZ;
    VectorXd dy;
    direction(G, dX, dy, dZ);

    const double tau =
        centering ? 0.98 : 0.9 + 0.09 * std::min(ap_aff, ad_aff);
    double ap = std::min(1.0, tau * MaxStep(X, dX));
    double ad = std::min(1.0, tau * MaxStep(Z, dZ));
    if (!centering && std::min(ap, ad) < 0.3) {
      // Short step: fall back to a centering direction if it goes further.
      for (std::size_t b = 0; b < nb; ++b) {
        G[b] = mu * Zinv[b] - X[b];
      }
      Blocks cX, cZ;
      VectorXd cy;
      direction(G, cX, cy, cZ);
      const double cp = std::min(1.0, tau * MaxStep(X, cX));
      const double cd = std::min(1.0, tau * MaxStep(Z, cZ));
      if (std::min(cp, cd) > std::min(ap, ad)) {
        dX = std::move(cX);
        dZ = std::move(cZ);
        dy = std::move(cy);
        ap = cp;
        ad = cd;
      }
    }
    for (std::size_t b = 0; b < nb; ++b) {
      X[b] += ap * dX[b];
      Z[b] += ad * dZ[b];
    }
    y += ad * dy;
    if (opt.verbose) {
      std::fprintf(stderr, "    ap_aff %.3e ad_aff %.3e sigma %.3e ap %.3e ad %.3e\n", ap_aff,
                   ad_aff, sigma, ap, ad);
    }
    if (centering) {
      double dnorm = 0.0, xnorm = 0.0;
      for (std::size_t b = 0; b < nb; ++b) {
        dnorm += ap * ap * dX[b].squaredNorm();
        xnorm += X[b].squaredNorm();
      }
      const bool small = ap == 1.0 && ad == 1.0 && dnorm <= 1e-24 * xnorm;
      centered_steps = small ? centered_steps + 1 : 0;
      if (iter >= opt.max_iterations - 1 && ap == 1.0 && ad == 1.0) centered_steps = 3;
    }
    stall = (std::min(ap, ad) < 1e-10) ? stall + 1 : 0;
    if (stall >= 3) break;
  }

  if (sol.status == Status::kFailure && best_score <= std::max(1e3 * opt.tol, 1e-9)) {
    // Numerical floor reached near the target accuracy.
    best.status = Status::kOptimal;
    return best;
  }
  if (sol.status == Status::kFailure && best_score <= 1e-6) {
    best.status = Status::kInaccurate;
    return best;
  }
  if (sol.status == Status::kFailure && have_feasible && opt.center_mu == 0.0) {
    best_feasible.status = Status::kInaccurate;
    return best_feasible;
  }
  if (sol.status == Status::kFailure && !abandoned && sol.dual_infeasibility > 1e-4 &&
      sol.primal_infeasibility <= 1e-4) {
    // Never reached the LMI's feasible set while the other side converged.
    sol.status = Status::kInfeasible;
  }
  sol.y = y;
  sol.X = std::move(X);
  sol.Z = std::move(Z);
  return sol;
}

}  // namespace

StandardSolution solve_standard(const StandardProblem& p, const Options& opt) {
  StandardSolution fallback;
  bool have_fallback = false;
  for (double z_scale : {1.0, 1e2, 1e4}) {
    StandardSolution sol = SolveFrom(p, opt, z_scale);
    if (sol.status != Status::kFailure && sol.status != Status::kInaccurate) return sol;
    if (sol.status == Status::kInaccurate &&
        (!have_fallback || sol.dual_objective > fallback.dual_objective)) {
      fallback = std::move(sol);
      have_fallback = true;
    } else if (!have_fallback && z_scale == 1e4) {
      return sol;
    }
  }
  return fallback;
}

int LmiProgram::add_variables(int count) {
  const int first = num_vars_;
  num_vars_ += count;
  return first;
}

int LmiProgram::add_block(int size) {
  block_sizes_.push_back(size);
  terms_.emplace_back();
  return static_cast<int>(block_sizes_.size()) - 1;
}

void LmiProgram::add_term(int block, int row, int col, int var, double coeff) {
  terms_.at(block).push_back({row, col, var, coeff});
}

void LmiProgram::add_objective(int var, double coeff) {
  objective_.emplace_back(var, coeff);
}

void LmiProgram::add_equality(std::vector<std::pair<int, double>> terms, double rhs) {
  equalities_.push_back({std::move(terms), rhs});
}

LmiProgram::Result LmiProgram::solve(const Options& options) const {
  const Layout L(block_sizes_);
  const Eigen::Index nvar = num_vars_;

  // Dense packed coefficients: column i for x_i, f0 for the constant.
  MatrixXd F = MatrixXd::Zero(L.length, nvar);
  VectorXd f0 = VectorXd::Zero(L.length);
  for (std::size_t b = 0; b < block_sizes_.size(); ++b) {
    const Eigen::Index off = L.offsets[b];
    const int sz = block_sizes_[b];
    for (const Term& t : terms_[b]) {
      const Eigen::Index i1 = off + t.row + static_cast<Eigen::Index>(t.col) * sz;
      const Eigen::Index i2 = off + t.col + static_cast<Eigen::Index>(t.row) * sz;
      double* dst = t.var == kConstant ? f0.data() : F.col(t.var).data();
      dst[i1] += t.coeff;
      if (i1 != i2) dst[i2] += t.coeff;
    }
  }
  VectorXd c = VectorXd::Zero(nvar);
  for (const auto& [var, coeff] : objective_) c(var) += coeff;

  // x = xp + N z spans the equality-feasible affine set.
  VectorXd xp = VectorXd::Zero(nvar);
  MatrixXd N = MatrixXd::Identity(nvar, nvar);
  if (!equalities_.empty()) {
    const Eigen::Index neq = static_cast<Eigen::Index>(equalities_.size());
    MatrixXd Aeq = MatrixXd::Zero(neq, nvar);
    VectorXd beq(neq);
    for (Eigen::Index r = 0; r < neq; ++r) {
      for (const auto& [var, coeff] : equalities_[r].terms) Aeq(r, var) += coeff;
      beq(r) = equalities_[r].rhs;
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(Aeq.transpose());
    const Eigen::Index rank = qr.rank();
    const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(nvar, nvar);
    const MatrixXd Q1 = Q.leftCols(rank);
    const VectorXd w = (Aeq * Q1).colPivHouseholderQr().solve(beq);
    xp = Q1 * w;
    if ((Aeq * xp - beq).norm() > 1e-9 * (1.0 + beq.norm())) {
      Result r;
      r.status = Status::kInfeasible;
      return r;
    }
    N = Q.rightCols(nvar - rank);
  }
  MatrixXd Ft = F * N;
  VectorXd ct = N.transpose() * c;

  // Drop directions that change neither an LMI nor the objective.
  {
    MatrixXd phi(Ft.rows() + 1, Ft.cols());
    phi << Ft, ct.transpose();
    Eigen::ColPivHouseholderQR<MatrixXd> qr(phi.transpose());
    qr.setThreshold(1e-12);
    const Eigen::Index rank = qr.rank();
    if (rank < Ft.cols()) {
      const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(Ft.cols(), Ft.cols());
      N = N * Q.leftCols(rank);
      Ft = F * N;
      ct = N.transpose() * c;
    }
  }

  // Orthonormal constraint columns keep the Schur complement well scaled.
  {
    Eigen::HouseholderQR<MatrixXd> qr(Ft);
    const Eigen::Index cols = Ft.cols();
    const MatrixXd Rf = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    const MatrixXd Rinv =
        Rf.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(cols, cols));
    N = N * Rinv;
    Ft = F * N;
    ct = N.transpose() * c;
  }

  StandardProblem sp;
  sp.block_sizes = block_sizes_;
  sp.c = f0 + F * xp;
  sp.a = -Ft;
  sp.b = -ct;
  const StandardSolution ss = solve_standard(sp, options);

  Result r;
  r.status = ss.status;
  r.iterations = ss.iterations;
  r.relative_gap = ss.relative_gap;
  r.x = xp + N * ss.y;
  r.objective = c.dot(r.x);
  return r;
}

}  // namespace ddc::sdp
