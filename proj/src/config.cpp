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

#include "ddc/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ddc/errors.hpp"
#include "json.hpp"

namespace ddc {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what);
}

void RejectUnknown(const json& obj, const std::string& prefix,
                   const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) Fail(prefix + it.key(), "unknown key");
  }
}

const json& Required(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) Fail(path, "required key is missing");
  return *it;
}

double Number(const json& v, const std::string& key) {
  if (!v.is_number()) Fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) Fail(key, "must be finite");
  return x;
}

int Integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) Fail(key, "expected an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    Fail(key, "out of range");
  }
  return static_cast<int>(x);
}

std::string String(const json& v, const std::string& key) {
  if (!v.is_string()) Fail(key, "expected a string");
  return v.get<std::string>();
}

MatrixXd Matrix(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) Fail(key, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  if (!v[0].is_array() || v[0].empty()) Fail(key, "expected a non-empty array of rows");
  const auto cols = static_cast<Eigen::Index>(v[0].size());
  MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      Fail(key, "rows must have equal length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      M(r, c) = Number(row[static_cast<std::size_t>(c)], key);
    }
  }
  return M;
}

std::vector<double> NumberList(const json& v, const std::string& key) {
  if (!v.is_array()) Fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const json& x : v) out.push_back(Number(x, key));
  return out;
}

json ToJson(const MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RegularizerMode::Kind KindFromString(const std::string& s, const std::string& key) {
  for (auto k : {RegularizerMode::Kind::kNone, RegularizerMode::Kind::kCertaintyEquivalence,
                 RegularizerMode::Kind::kRobustnessInducing}) {
    if (to_string(k) == s) return k;
  }
  Fail(key, "unknown regularizer '" + s + "'");
}

std::string NormName(MatrixNorm n) {
  return n == MatrixNorm::kTwoInduced ? "two_induced" : "frobenius";
}

void ParseSystem(const json& v, ScenarioConfig& cfg) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "pendulum") {
      cfg.system = pendulum_system();
    } else if (name == "laplacian") {
      cfg.system = laplacian_system();
    } else {
      Fail("system", "unknown preset '" + name + "'");
    }
    cfg.system_name = name;
    return;
  }
  if (!v.is_object()) Fail("system", "expected a preset name or an object with A and B");
  RejectUnknown(v, "system.", {"A", "B"});
  cfg.system_name = "custom";
  cfg.system.A = Matrix(Required(v, "A", "system.A"), "system.A");
  cfg.system.B = Matrix(Required(v, "B", "system.B"), "system.B");
}

EpsGrid ParseGrid(const json& v) {
  if (v.is_array()) return NumberList(v, "eps_grid");
  if (!v.is_object()) Fail("eps_grid", "expected an array or {lo, hi, count}");
  RejectUnknown(v, "eps_grid.", {"lo", "hi", "count"});
  const double lo = Number(Required(v, "lo", "eps_grid.lo"), "eps_grid.lo");
  const double hi = Number(Required(v, "hi", "eps_grid.hi"), "eps_grid.hi");
  const int count = Integer(Required(v, "count", "eps_grid.count"), "eps_grid.count");
  try {
    return geometric_grid(lo, hi, count);
  } catch (const std::exception& e) {
    Fail("eps_grid", e.what());
  }
}

void ParseSweep(const json& v, RunConfig& cfg) {
  if (!v.is_object()) Fail("sweep", "expected an object");
  RejectUnknown(v, "sweep.", {"parameter", "values", "attacks"});
  if (v.contains("parameter")) {
    const std::string p = String(v["parameter"], "sweep.parameter");
    if (p == "gamma") {
      cfg.sweep_parameter = SweepParameter::kGamma;
    } else if (p == "rho") {
      cfg.sweep_parameter = SweepParameter::kRho;
    } else {
      Fail("sweep.parameter", "expected gamma or rho");
    }
  }
  if (v.contains("values")) cfg.sweep_values = NumberList(v["values"], "sweep.values");
  if (v.contains("attacks")) {
    if (!v["attacks"].is_array()) Fail("sweep.attacks", "expected an array of names");
    cfg.sweep_attacks.clear();
    for (const json& a : v["attacks"]) {
      try {
        cfg.sweep_attacks.push_back(attack_kind_from_string(String(a, "sweep.attacks")));
      } catch (const std::invalid_argument& e) {
        Fail("sweep.attacks", e.what());
      }
    }
  }
}

}  // namespace

std::string to_string(SweepParameter p) {
  return p == SweepParameter::kGamma ? "gamma" : "rho";
}

std::string to_string(TransferMode mode) {
  return mode == TransferMode::kData ? "data" : "data_param";
}

void RunConfig::validate() const {
  scenario.validate();
  if (jobs < 1) Fail("jobs", "must be at least 1");
  for (double v : sweep_values) {
    if (!(std::isfinite(v) && v >= 0.0)) Fail("sweep.values", "must be finite and nonnegative");
  }
  if (sweep_attacks.empty()) Fail("sweep.attacks", "must name at least one attack");
}

bool RunConfig::operator==(const RunConfig& o) const {
  return scenario == o.scenario && sweep_parameter == o.sweep_parameter &&
         sweep_values == o.sweep_values && sweep_attacks == o.sweep_attacks &&
         transfer_mode == o.transfer_mode && jobs == o.jobs && out == o.out;
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) Fail("config", "top level must be an object");
  RejectUnknown(doc, "",
                {"system", "horizon", "disturbance_std", "x0", "random_x0", "weights",
                 "regularizer", "norm", "solver_tol", "attack", "hypothetical_strength",
                 "eps_grid", "n_all", "tau", "master_seed", "fd_step", "fd_solver_tol",
                 "fd_center_mu", "sweep", "transfer_mode", "jobs", "out"});

  RunConfig cfg;
  ScenarioConfig& s = cfg.scenario;
  ParseSystem(Required(doc, "system", "system"), s);
  s.horizon = Integer(Required(doc, "horizon", "horizon"), "horizon");

  const json& w = Required(doc, "weights", "weights");
  if (!w.is_object()) Fail("weights", "expected an object with Q and R");
  RejectUnknown(w, "weights.", {"Q", "R"});
  s.weights.Q = Matrix(Required(w, "Q", "weights.Q"), "weights.Q");
  s.weights.R = Matrix(Required(w, "R", "weights.R"), "weights.R");

  const json& reg = Required(doc, "regularizer", "regularizer");
  if (!reg.is_object()) Fail("regularizer", "expected an object with kind and strength");
  RejectUnknown(reg, "regularizer.", {"kind", "strength"});
  s.regularizer.kind = KindFromString(
      String(Required(reg, "kind", "regularizer.kind"), "regularizer.kind"), "regularizer.kind");
  if (reg.contains("strength")) {
    s.regularizer.strength = Number(reg["strength"], "regularizer.strength");
  } else if (s.regularizer.kind != RegularizerMode::Kind::kNone) {
    Fail("regularizer.strength", "required key is missing");
  }

  if (doc.contains("disturbance_std")) {
    s.disturbance_std = Number(doc["disturbance_std"], "disturbance_std");
  }
  if (doc.contains("x0") && !doc["x0"].is_null()) {
    const std::vector<double> x0 = NumberList(doc["x0"], "x0");
    s.x0 = Eigen::Map<const VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  }
  if (doc.contains("random_x0")) {
    if (!doc["random_x0"].is_boolean()) Fail("random_x0", "expected true or false");
    s.random_x0 = doc["random_x0"].get<bool>();
  }
  if (doc.contains("norm")) {
    const std::string n = String(doc["norm"], "norm");
    if (n == "two_induced") {
      s.norm = MatrixNorm::kTwoInduced;
    } else if (n == "frobenius") {
      s.norm = MatrixNorm::kFrobenius;
    } else {
      Fail("norm", "expected two_induced or frobenius");
    }
  }
  if (doc.contains("solver_tol")) s.solver_tol = Number(doc["solver_tol"], "solver_tol");
  if (doc.contains("attack")) {
    try {
      s.attack_kind = attack_kind_from_string(String(doc["attack"], "attack"));
    } catch (const std::invalid_argument& e) {
      Fail("attack", e.what());
    }
  }
  if (doc.contains("hypothetical_strength")) {
    s.hypothetical_strength = Number(doc["hypothetical_strength"], "hypothetical_strength");
  }
  if (doc.contains("eps_grid")) s.eps_grid = ParseGrid(doc["eps_grid"]);
  if (doc.contains("n_all")) s.n_all = Integer(doc["n_all"], "n_all");
  if (doc.contains("tau")) s.tau = Number(doc["tau"], "tau");
  if (doc.contains("master_seed")) {
    const json& v = doc["master_seed"];
    if (!v.is_number_unsigned()) Fail("master_seed", "expected a nonnegative integer");
    s.master_seed = v.get<std::uint64_t>();
  }
  if (doc.contains("fd_step")) s.fd.step = Number(doc["fd_step"], "fd_step");
  if (doc.contains("fd_solver_tol")) s.fd.solver_tol = Number(doc["fd_solver_tol"], "fd_solver_tol");
  if (doc.contains("fd_center_mu")) s.fd.center_mu = Number(doc["fd_center_mu"], "fd_center_mu");

  if (doc.contains("sweep")) ParseSweep(doc["sweep"], cfg);
  if (doc.contains("transfer_mode")) {
    const std::string m = String(doc["transfer_mode"], "transfer_mode");
    if (m == "data") {
      cfg.transfer_mode = TransferMode::kData;
    } else if (m == "data_param") {
      cfg.transfer_mode = TransferMode::kDataParam;
    } else {
      Fail("transfer_mode", "expected data or data_param");
    }
  }
  if (doc.contains("jobs")) cfg.jobs = Integer(doc["jobs"], "jobs");
  if (doc.contains("out")) cfg.out = String(doc["out"], "out");

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string serialize_run_config(const RunConfig& cfg) {
  const ScenarioConfig& s = cfg.scenario;
  json doc;
  if (s.system_name == "pendulum" || s.system_name == "laplacian") {
    doc["system"] = s.system_name;
  } else {
    doc["system"] = {{"A", ToJson(s.system.A)}, {"B", ToJson(s.system.B)}};
  }
  doc["horizon"] = s.horizon;
  doc["disturbance_std"] = s.disturbance_std;
  if (s.x0.size() > 0) {
    doc["x0"] = std::vector<double>(s.x0.data(), s.x0.data() + s.x0.size());
  } else {
    doc["x0"] = nullptr;
  }
  doc["random_x0"] = s.random_x0;
  doc["weights"] = {{"Q", ToJson(s.weights.Q)}, {"R", ToJson(s.weights.R)}};
  doc["regularizer"] = {{"kind", to_string(s.regularizer.kind)},
                        {"strength", s.regularizer.strength}};
  doc["norm"] = NormName(s.norm);
  doc["solver_tol"] = s.solver_tol;
  doc["attack"] = to_string(s.attack_kind);
  doc["hypothetical_strength"] = s.hypothetical_strength;
  doc["eps_grid"] = s.eps_grid;
  doc["n_all"] = s.n_all;
  doc["tau"] = s.tau;
  doc["master_seed"] = s.master_seed;
  doc["fd_step"] = s.fd.step;
  doc["fd_solver_tol"] = s.fd.solver_tol;
  doc["fd_center_mu"] = s.fd.center_mu;
  json attacks = json::array();
  for (AttackKind k : cfg.sweep_attacks) attacks.push_back(to_string(k));
  doc["sweep"] = {{"parameter", to_string(cfg.sweep_parameter)},
                  {"values", cfg.sweep_values},
                  {"attacks", attacks}};
  doc["transfer_mode"] = to_string(cfg.transfer_mode);
  doc["jobs"] = cfg.jobs;
  doc["out"] = cfg.out;
  return doc.dump(2) + "\n";
}

}  // namespace ddc
