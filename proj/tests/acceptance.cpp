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

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ddc/archive.hpp"
#include "ddc/cli.hpp"
#include "ddc/config.hpp"
#include "ddc/experiments.hpp"
#include "ddc/seeding.hpp"
#include "test_systems.hpp"

namespace ddc {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

const std::vector<double> kGammas = {1e-3, 1e-2, 1e-1, 1.0};
const std::vector<double> kRhos = {1e-6, 1e-5, 1e-4, 1e-3};

int Jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string EpsBar(const std::optional<double>& e) { return e ? Num(*e) : "not reached"; }

// Scenario runs are shared between criteria.
class RunCache {
 public:
  const ExperimentReport& get(const ScenarioConfig& cfg) {
    for (const auto& [c, r] : runs_) {
      if (c == cfg) return r;
    }
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport r = run_scenario(cfg, Jobs());
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "  ran %s %s %s: eps_bar %s (%.0f s)\n", to_string(cfg.attack_kind).c_str(),
                 to_string(cfg.regularizer.kind).c_str(), Num(cfg.regularizer.strength).c_str(),
                 EpsBar(r.eps_bar).c_str(), s);
    runs_.emplace_back(cfg, std::move(r));
    return runs_.back().second;
  }
  const std::vector<std::pair<ScenarioConfig, ExperimentReport>>& all() const { return runs_; }

  // The single-sample demo on seeds 0..19.
  const std::vector<Fig1Result>& fig1() {
    if (fig1_.empty()) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) fig1_.push_back(fig1_demo(seed, Jobs()));
    }
    return fig1_;
  }

 private:
  std::vector<std::pair<ScenarioConfig, ExperimentReport>> runs_;
  std::vector<Fig1Result> fig1_;
};

ScenarioConfig Pendulum(AttackKind kind, RegularizerMode reg) {
  ScenarioConfig cfg = pendulum_scenario();
  cfg.attack_kind = kind;
  cfg.regularizer = reg;
  return cfg;
}

ScenarioConfig Ce(AttackKind kind, double gamma) {
  return Pendulum(kind, RegularizerMode::certainty_equivalence(gamma));
}

ScenarioConfig Robust(AttackKind kind, double rho) {
  return Pendulum(kind, RegularizerMode::robustness_inducing(rho));
}

std::vector<double> Ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = (i + j) / 2.0 + 1.0;
    i = j + 1;
  }
  return rank;
}

// Pearson correlation of the ranks; NaN when either side is constant.
double Spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<double> rx = Ranks(x), ry = Ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double MeanCleanJ(const ExperimentReport& r) {
  double sum = 0.0;
  int count = 0;
  for (const auto& s : r.samples) {
    if (s.clean_ok && std::isfinite(s.clean_J)) {
      sum += s.clean_J;
      ++count;
    }
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

Outcome RiccatiOracle(RunCache&) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioConfig cfg = Pendulum(AttackKind::kDgsm, RegularizerMode::none());
  const TrajectoryData data = generate_sample(cfg, derive_seed(0, 0, "sample"));
  const SynthesisResult r = synthesize(data, cfg.synthesis());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!r.optimal()) return {false, "synthesis " + to_string(r.status) + ": " + r.message};
  const RiccatiSolution dare = lqr_riccati(cfg.system, cfg.weights);
  const double J_star = dare.P.trace();
  const double rel = std::abs(r.J - J_star) / J_star;
  const double radius = spectral_radius(closed_loop_eigs(cfg.system, r.K));
  return {rel <= 1e-2 && radius < 1.0 && seconds < 10.0,
          "J " + Num(r.J) + " vs Riccati " + Num(J_star) + " (rel " + Num(rel) + "), radius " +
              Num(radius) + ", " + Num(seconds) + " s"};
}

Outcome CertaintyEquivalenceLimit(RunCache&) {
  ScenarioConfig cfg = Ce(AttackKind::kDgsm, 1e4);
  cfg.disturbance_std = 0.05;
  const TrajectoryData data = generate_sample(cfg, derive_seed(0, 0, "sample"));
  const SynthesisResult r = synthesize(data, cfg.synthesis());
  if (!r.optimal()) return {false, "synthesis " + to_string(r.status) + ": " + r.message};
  const IdentifiedModel id = least_squares_id(data);
  const MatrixXd K_ce = lqr_riccati({id.A_hat, id.B_hat}, cfg.weights).K;
  const double rel = (r.K - K_ce).norm() / K_ce.norm();
  return {rel <= 1e-2, "relative gain error " + Num(rel)};
}

Outcome FeasibilityResiduals(RunCache&) {
  std::mt19937_64 gen(2024);
  int ok = 0, solved = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const LinearSystem sys = testing::RandomStabilizable(gen);
    const TrajectoryData data = testing::RandomData(sys, 3 * (sys.n() + sys.m()), 0.0, gen);
    SynthesisConfig cfg;
    cfg.weights = {MatrixXd::Identity(3, 3), MatrixXd::Identity(sys.m(), sys.m())};
    const SynthesisResult r = synthesize(data, cfg);
    if (!r.optimal()) continue;
    ++solved;
    const FeasibilityReport f = verify_feasibility(data, r, 1e-6);
    worst = std::max({worst, f.stability, -f.certificate, f.parameterization});
    if (f.stability <= 1e-6 && f.certificate >= -1e-6 && f.parameterization <= 1e-6) ++ok;
  }
  return {ok == 100, std::to_string(solved) + "/100 solved, " + std::to_string(ok) +
                         "/100 within 1e-6, worst residual " + Num(worst)};
}

Outcome GradientConsistency(RunCache&) {
  ScenarioConfig cfg = Robust(AttackKind::kDgsm, 1e-5);
  cfg.disturbance_std = 0.05;
  const TrajectoryData data = generate_sample(cfg, derive_seed(0, 0, "sample"));
  SynthesisConfig scfg = cfg.synthesis();
  scfg.solver_tol = 1e-10;
  scfg.central_path_mu = 1e-8;
  const Designer design = make_designer(scfg);
  const Perturbation zero = Perturbation::zeros(1, cfg.horizon, 3);
  const double h = 1e-3;
  std::vector<EigJacobian> jac;
  for (double step : {h, h / 2, h / 4}) {
    jac.push_back(eig_jacobian(data, cfg.system, design, zero, step, Jobs()));
  }
  int considered = 0, good = 0;
  for (std::size_t i = 0; i < jac[0].grads.size(); ++i) {
    const auto entries = [&](int k) {
      const EigGradient& g = jac[k].grads[i];
      Eigen::VectorXcd v(g.dU.size() + g.dX.size());
      v << g.dU.reshaped(), g.dX.reshaped();
      return v;
    };
    const Eigen::VectorXcd g1 = entries(0), g2 = entries(1), g4 = entries(2);
    for (Eigen::Index e = 0; e < g1.size(); ++e) {
      if (std::abs(g4(e)) <= 1e-6) continue;
      ++considered;
      const double ratio = std::abs(g1(e) - g2(e)) / std::abs(g2(e) - g4(e));
      if (ratio >= 2.5 && ratio <= 6.0) ++good;
    }
  }
  const double frac = considered ? static_cast<double>(good) / considered : 0.0;
  return {considered > 0 && frac >= 0.9, std::to_string(good) + "/" + std::to_string(considered) +
                                             " entries with Richardson ratio in [2.5, 6]"};
}

Outcome DgsmAdvantage(RunCache& cache) {
  const auto& dgsm = cache.get(Ce(AttackKind::kDgsm, 0.1));
  const auto& rnd = cache.get(Ce(AttackKind::kRandom, 0.1));
  if (!dgsm.eps_bar || !rnd.eps_bar) {
    return {false, "eps_bar dgsm " + EpsBar(dgsm.eps_bar) + ", random " + EpsBar(rnd.eps_bar)};
  }
  const double ratio = *dgsm.eps_bar / *rnd.eps_bar;
  return {ratio >= 0.03 && ratio <= 0.3, "eps_bar dgsm " + Num(*dgsm.eps_bar) + " / random " +
                                             Num(*rnd.eps_bar) + " = " + Num(ratio)};
}

Outcome RegularizationTrend(RunCache& cache) {
  const auto curve = [&](const std::vector<double>& values, bool gamma, std::string& text) {
    std::vector<double> bars;
    for (double v : values) {
      const auto& r = cache.get(gamma ? Ce(AttackKind::kDgsm, v) : Robust(AttackKind::kDgsm, v));
      bars.push_back(r.eps_bar.value_or(std::numeric_limits<double>::infinity()));
      text += " " + Num(v) + ":" + EpsBar(r.eps_bar);
    }
    return Spearman(values, bars);
  };
  std::string gtext, rtext;
  const double sg = curve(kGammas, true, gtext);
  const double sr = curve(kRhos, false, rtext);
  return {sg > 0.0 && sr > 0.0, "gamma spearman " + Num(sg) + " [" + gtext.substr(1) +
                                    "], rho spearman " + Num(sr) + " [" + rtext.substr(1) + "]"};
}

Outcome RegularizerComparisonCheck(RunCache& cache) {
  const auto& ce = cache.get(Ce(AttackKind::kDgsm, 0.1));
  const auto& rob = cache.get(Robust(AttackKind::kDgsm, 1e-5));
  int violations = 0;
  for (std::size_t k = 0; k < ce.ratio.size(); ++k) {
    if (rob.ratio[k] > ce.ratio[k]) ++violations;
  }
  const double J_ce = MeanCleanJ(ce), J_rob = MeanCleanJ(rob);
  const double gap = std::abs(J_rob - J_ce) / J_ce;
  return {violations <= 1 && gap <= 0.1,
          std::to_string(violations) + " grid points with robust ratio above CE; mean J CE " +
              Num(J_ce) + ", robust " + Num(J_rob) + " (gap " + Num(gap) + ")"};
}

Outcome Transferability(RunCache& cache) {
  bool pass = true;
  std::string text;
  for (double g : kGammas) {
    const auto& full = cache.get(Ce(AttackKind::kDgsm, g));
    const auto& data = cache.get(Ce(AttackKind::kDgsmTransferData, g));
    ScenarioConfig pcfg = Ce(AttackKind::kDgsmTransferParam, g);
    pcfg.hypothetical_strength = 0.1;
    const auto& param = cache.get(pcfg);
    text += (text.empty() ? "" : "; ") + std::string("gamma ") + Num(g) + ": full " +
            EpsBar(full.eps_bar) + ", data " + EpsBar(data.eps_bar) + ", data+param " +
            EpsBar(param.eps_bar);
    for (const ExperimentReport* gray : {&data, &param}) {
      if (!full.eps_bar || !gray->eps_bar) {
        pass = false;
        continue;
      }
      const double factor = *gray->eps_bar / *full.eps_bar;
      if (factor > 10.0 || factor < 0.1) pass = false;
    }
  }
  return {pass, text};
}

Outcome Fig1Demo(RunCache& cache) {
  int destabilized = 0;
  double worst_clean = 0.0;
  for (const Fig1Result& r : cache.fig1()) {
    if (r.destabilized) ++destabilized;
    worst_clean = std::max(worst_clean, spectral_radius(r.clean_eigs));
  }
  return {destabilized >= 10 && worst_clean < 0.5,
          std::to_string(destabilized) + "/20 seeds destabilized, largest clean radius " +
              Num(worst_clean)};
}

Outcome AlgebraicUnits(RunCache& cache) {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> nd;
  bool pi_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::complex<double> lambda(nd(gen), nd(gen));
    MatrixXcd Z(1 + gen() % 3, 1 + gen() % 12);
    for (Eigen::Index k = 0; k < Z.size(); ++k) Z(k) = {nd(gen), nd(gen)};
    const MatrixXd P = pi_project(lambda, Z);
    for (Eigen::Index k = 0; k < Z.size(); ++k) {
      if (P(k) != lambda.real() * Z(k).real() + lambda.imag() * Z(k).imag()) pi_ok = false;
    }
  }
  double sigma_err = 0.0;
  for (int T : {5, 10, 15, 50}) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const double eps = std::pow(10.0, -4.0 * std::uniform_real_distribution<double>()(gen));
      const Perturbation d = random_attack(eps, 1, T, 3, seed);
      const double smax = Eigen::JacobiSVD<MatrixXd>(d.dU).singularValues()(0);
      sigma_err = std::max(sigma_err, std::abs(smax - eps * std::sqrt(T)));
    }
  }
  int crafted = 0, bad = 0;
  for (const auto& [cfg, rep] : cache.all()) {
    for (const SampleRecord& s : rep.samples) {
      if (!s.attack.delta) continue;
      ++crafted;
      const Perturbation& d = *s.attack.delta;
      const double eps = *s.attack.eps_star;
      bool ok = d.within_budget() && d.max_abs() <= eps;
      for (const MatrixXd* M : {&d.dU, &d.dX}) {
        for (Eigen::Index k = 0; k < M->size(); ++k) {
          if ((*M)(k) != 0.0 && std::abs((*M)(k)) != eps) ok = false;
        }
      }
      if (!ok) ++bad;
    }
  }
  for (const Fig1Result& r : cache.fig1()) {
    ++crafted;
    if (!r.delta.within_budget() || r.delta.max_abs() != 0.16) ++bad;
  }
  return {pi_ok && sigma_err <= 1e-12 && bad == 0,
          std::string("pi_project ") + (pi_ok ? "exact" : "mismatch") +
              ", max |sigma_max - eps sqrt(T)| " + Num(sigma_err) + ", " +
              std::to_string(crafted - bad) + "/" + std::to_string(crafted) +
              " crafted perturbations within budget"};
}

Outcome Determinism(RunCache&) {
  const fs::path root = fs::temp_directory_path() / "ddc_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  RunConfig cfg;
  cfg.scenario = Ce(AttackKind::kDgsm, 0.1);
  std::ofstream(root / "config.json") << serialize_run_config(cfg);
  std::vector<std::string> csv;
  for (const char* jobs : {"1", "8"}) {
    const std::string out = (root / (std::string("jobs") + jobs)).string();
    const std::string config = (root / "config.json").string();
    const char* argv[] = {"ddc", "attack", "--config", config.c_str(), "--jobs", jobs, "--out",
                          out.c_str()};
    std::ostringstream sout, serr;
    const int code = run_cli(8, argv, sout, serr);
    if (code != kExitOk) return {false, "attack --jobs " + std::string(jobs) + " exited " +
                                            std::to_string(code) + ": " + serr.str()};
    csv.push_back(read_file(fs::path(out) / "aggregate.csv"));
  }
  fs::remove_all(root);
  const bool same = csv[0] == csv[1];
  return {same, std::string("aggregate.csv ") + (same ? "byte-identical" : "differs") +
                    " at --jobs 1 and --jobs 8 (" + std::to_string(csv[0].size()) + " bytes)"};
}

}  // namespace
}  // namespace ddc

int main(int argc, char** argv) {
  using namespace ddc;
  const std::vector<std::pair<const char*, std::function<Outcome(RunCache&)>>> criteria = {
      {"Riccati-oracle equivalence", RiccatiOracle},
      {"certainty-equivalence limit", CertaintyEquivalenceLimit},
      {"feasibility residuals", FeasibilityResiduals},
      {"gradient consistency", GradientConsistency},
      {"DGSM advantage", DgsmAdvantage},
      {"regularization trend", RegularizationTrend},
      {"regularizer comparison", RegularizerComparisonCheck},
      {"transferability", Transferability},
      {"Laplacian demo", Fig1Demo},
      {"algebraic units", AlgebraicUnits},
      {"determinism", Determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  RunCache cache;
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second(cache);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first,
                o.detail.c_str(), s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
