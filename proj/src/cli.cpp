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

#include "ddc/cli.hpp"

#include <array>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "ddc/archive.hpp"
#include "ddc/config.hpp"
#include "ddc/errors.hpp"
#include "ddc/experiments.hpp"
#include "ddc/plot.hpp"
#include "ddc/seeding.hpp"
#include "json.hpp"

namespace ddc {
namespace {

using nlohmann::json;

struct CommonFlags {
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
  bool force = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
};

void AddCommon(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "JSON run configuration");
  if (config_required) c->required();
  f.seed_opt = cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
  f.jobs_opt = cmd->add_option("--jobs", f.jobs, "worker threads (overrides the config)")
                   ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "archive directory");
  cmd->add_flag("--force", f.force, "replace an existing archive");
}

std::shared_ptr<spdlog::logger> MakeLogger() {
  auto logger = spdlog::get("ddc");
  if (!logger) logger = spdlog::stderr_color_mt("ddc");
  logger->set_pattern("[%H:%M:%S] [%^%l%$] %v");
  logger->set_level(spdlog::level::info);
  if (const char* env = std::getenv("DDC_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      logger->warn("DDC_LOG='{}' is not a level name, using info", env);
    } else {
      logger->set_level(level);
    }
  }
  return logger;
}

RunConfig LoadConfig(const CommonFlags& f, const RunConfig& fallback) {
  RunConfig cfg = f.config.empty() ? fallback : load_run_config(f.config);
  if (f.seed_opt->count()) cfg.scenario.master_seed = f.seed;
  if (f.jobs_opt->count()) cfg.jobs = f.jobs;
  if (!f.out.empty()) cfg.out = f.out;
  cfg.validate();
  return cfg;
}

std::string OutDir(const RunConfig& cfg, const std::string& command) {
  return cfg.out.empty() ? "runs/" + command : cfg.out;
}

json SpectrumJson(const Spectrum& eigs) {
  json out = json::array();
  for (const auto& l : eigs) out.push_back({l.real(), l.imag()});
  return out;
}

json MatrixJson(const MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void PrintSpectrum(std::ostream& out, const Spectrum& eigs) {
  for (const auto& l : eigs) {
    out << "  " << format_double(l.real()) << (l.imag() < 0 ? " - " : " + ")
        << format_double(std::abs(l.imag())) << "i  |" << format_double(std::abs(l)) << "|\n";
  }
}

std::string EpsBarText(const std::optional<double>& e) {
  return e ? format_double(*e) : std::string("not reached");
}

// Writes the rows, the plots and the config echo, then commits.
void WriteTables(ArchiveWriter& w, const RunConfig& cfg, const std::vector<AggregateRow>& rows,
                 const std::vector<LabeledReport>& reports) {
  w.write("config.json", serialize_run_config(cfg));
  w.write("aggregate.csv", aggregate_csv(rows));
  w.write("samples.csv", samples_csv(reports));
  for (const PlotFile& p : emit_plots(rows)) w.write(p.name, p.svg);
}

double Strength(const RunConfig& cfg) { return cfg.scenario.regularizer.strength; }

std::vector<double> SweepValues(const RunConfig& cfg) {
  return cfg.sweep_values.empty() ? std::vector<double>{Strength(cfg)} : cfg.sweep_values;
}

int CmdSynth(const CommonFlags& f, std::ostream& out, spdlog::logger& log) {
  const RunConfig cfg = LoadConfig(f, {});
  ArchiveWriter writer(OutDir(cfg, "synth"), f.force);
  const ScenarioConfig& s = cfg.scenario;
  const TrajectoryData data = generate_sample(s, derive_seed(s.master_seed, 0, "sample"));
  log.info("synthesizing on {} data, T = {}", s.system_name, s.horizon);
  const SynthesisResult r = synthesize(data, s.synthesis());
  out << "status: " << to_string(r.status) << "\n";
  if (!r.optimal()) {
    out << "message: " << r.message << "\n";
    log.error("synthesis did not produce a controller: {}", r.message);
    return kExitRuntime;
  }
  const Spectrum eigs = closed_loop_eigs(s.system, r.K);
  const double radius = spectral_radius(eigs);
  std::ostringstream K;
  K << std::setprecision(17) << r.K;
  out << "J: " << format_double(r.J) << "\nK:\n" << K.str() << "\nclosed-loop spectrum:\n";
  PrintSpectrum(out, eigs);
  out << "spectral radius: " << format_double(radius) << (radius < 1.0 ? " (stable)\n" : " (unstable)\n");

  json doc = {{"status", to_string(r.status)},
              {"message", r.message},
              {"J", r.J},
              {"objective_with_reg", r.objective_with_reg},
              {"solver_iterations", r.solver_iterations},
              {"K", MatrixJson(r.K)},
              {"P", MatrixJson(r.P.P)},
              {"spectrum", SpectrumJson(eigs)},
              {"spectral_radius", radius},
              {"stable", radius < 1.0}};
  writer.write("config.json", serialize_run_config(cfg));
  writer.write("synth.json", doc.dump(2) + "\n");
  writer.commit();
  log.info("wrote {}", writer.dir().string());
  return kExitOk;
}

int CmdAttack(const CommonFlags& f, std::ostream& out, spdlog::logger& log) {
  const RunConfig cfg = LoadConfig(f, {});
  ArchiveWriter writer(OutDir(cfg, "attack"), f.force);
  log.info("{} attack, {} samples, {} budgets", to_string(cfg.scenario.attack_kind),
           cfg.scenario.n_all, cfg.scenario.eps_grid.size());
  const ExperimentReport rep = run_scenario(cfg.scenario, cfg.jobs);
  out << to_string(cfg.scenario.attack_kind) << " eps_bar: " << EpsBarText(rep.eps_bar)
      << " (clean failures " << rep.clean_failures << ")\n";
  WriteTables(writer, cfg, aggregate_rows(rep, Strength(cfg)), {{Strength(cfg), &rep}});
  writer.commit();
  log.info("wrote {}", writer.dir().string());
  return kExitOk;
}

int CmdSweep(const CommonFlags& f, std::ostream& out, spdlog::logger& log) {
  const RunConfig cfg = LoadConfig(f, {});
  ArchiveWriter writer(OutDir(cfg, "sweep"), f.force);
  const std::vector<double> values = SweepValues(cfg);
  std::vector<std::vector<SweepPoint>> runs;
  for (AttackKind kind : cfg.sweep_attacks) {
    ScenarioConfig base = cfg.scenario;
    base.attack_kind = kind;
    log.info("{} sweep over {} values of {}", to_string(kind), values.size(),
             to_string(cfg.sweep_parameter));
    runs.push_back(sweep_regularizer(base, values, cfg.sweep_parameter, cfg.jobs));
  }
  std::vector<AggregateRow> rows;
  std::vector<LabeledReport> reports;
  out << to_string(cfg.sweep_parameter);
  for (AttackKind kind : cfg.sweep_attacks) out << "," << to_string(kind);
  out << "\n";
  for (std::size_t v = 0; v < values.size(); ++v) {
    out << format_double(values[v]);
    for (const auto& run : runs) out << "," << EpsBarText(run[v].report.eps_bar);
    out << "\n";
  }
  for (const auto& run : runs) {
    for (const SweepPoint& p : run) {
      const auto r = aggregate_rows(p.report, p.value);
      rows.insert(rows.end(), r.begin(), r.end());
      reports.push_back({p.value, &p.report});
    }
  }
  WriteTables(writer, cfg, rows, reports);
  writer.commit();
  log.info("wrote {}", writer.dir().string());
  return kExitOk;
}

int CmdTransfer(const CommonFlags& f, std::ostream& out, spdlog::logger& log) {
  const RunConfig cfg = LoadConfig(f, {});
  ArchiveWriter writer(OutDir(cfg, "transfer"), f.force);
  std::vector<TransferReport> runs;
  const std::vector<double> values = SweepValues(cfg);
  for (double v : values) {
    ScenarioConfig s = cfg.scenario;
    s.regularizer.strength = v;
    log.info("transfer ({}) at strength {}", to_string(cfg.transfer_mode), v);
    runs.push_back(run_transferability(s, cfg.transfer_mode, cfg.jobs));
  }
  std::vector<AggregateRow> rows;
  std::vector<LabeledReport> reports;
  out << "strength,full_knowledge,gray_box\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << format_double(values[i]) << "," << EpsBarText(runs[i].full_knowledge.eps_bar) << ","
        << EpsBarText(runs[i].gray_box.eps_bar) << "\n";
    for (const ExperimentReport* rep : {&runs[i].full_knowledge, &runs[i].gray_box}) {
      const auto r = aggregate_rows(*rep, values[i]);
      rows.insert(rows.end(), r.begin(), r.end());
      reports.push_back({values[i], rep});
    }
  }
  WriteTables(writer, cfg, rows, reports);
  writer.commit();
  log.info("wrote {}", writer.dir().string());
  return kExitOk;
}

std::string SignalsCsv(const std::vector<std::pair<std::string, const MatrixXd*>>& blocks) {
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols = std::max(cols, b.second->cols());
  std::string csv = "signal";
  for (Eigen::Index t = 0; t < cols; ++t) csv += ",t" + std::to_string(t);
  csv += "\n";
  for (const auto& [name, M] : blocks) {
    for (Eigen::Index r = 0; r < M->rows(); ++r) {
      csv += name + "_" + std::to_string(r + 1);
      for (Eigen::Index t = 0; t < M->cols(); ++t) csv += "," + format_double((*M)(r, t));
      csv += "\n";
    }
  }
  return csv;
}

int CmdFig1(const CommonFlags& f, std::ostream& out, spdlog::logger& log) {
  RunConfig preset;
  preset.scenario = fig1_scenario();
  const RunConfig cfg = LoadConfig(f, preset);
  ArchiveWriter writer(OutDir(cfg, "fig1"), f.force);
  const ScenarioConfig& s = cfg.scenario;
  const double eps = s.eps_grid.back();
  log.info("single-sample attack at eps = {}", eps);
  const Fig1Result r = fig1_demo(s, s.master_seed, cfg.jobs);

  out << "clean closed-loop spectrum:\n";
  PrintSpectrum(out, r.clean_eigs);
  out << "perturbed closed-loop spectrum:\n";
  PrintSpectrum(out, r.perturbed_eigs);
  out << (r.destabilized ? "destabilized" : "not destabilized") << " at eps "
      << format_double(eps) << "\n";

  AggregateRow row;
  row.sweep_value = Strength(cfg);
  row.attack_kind = to_string(AttackKind::kDgsm);
  row.eps = eps;
  row.n_unstable = r.destabilized ? 1 : 0;
  row.n_all = 1;
  row.ratio = r.destabilized ? 1.0 : 0.0;
  if (r.destabilized) row.eps_bar = eps;
  row.master_seed = s.master_seed;

  const json doc = {{"seed", r.seed},
                    {"eps", eps},
                    {"destabilized", r.destabilized},
                    {"clean_spectrum", SpectrumJson(r.clean_eigs)},
                    {"perturbed_spectrum", SpectrumJson(r.perturbed_eigs)},
                    {"clean_radius", spectral_radius(r.clean_eigs)},
                    {"perturbed_radius", spectral_radius(r.perturbed_eigs)},
                    {"max_abs_delta", r.delta.max_abs()}};
  writer.write("config.json", serialize_run_config(cfg));
  writer.write("fig1.json", doc.dump(2) + "\n");
  writer.write("aggregate.csv", aggregate_csv({row}));
  writer.write("inputs.csv", SignalsCsv({{"u_clean", &r.clean.u0()},
                                         {"u_perturbed", &r.perturbed.u0()},
                                         {"delta_u", &r.delta.dU}}));
  writer.write("states.csv", SignalsCsv({{"x_clean", &r.clean.x()},
                                         {"x_perturbed", &r.perturbed.x()},
                                         {"delta_x", &r.delta.dX}}));
  writer.write("spectrum.svg",
               render_spectrum_svg({{"clean", r.clean_eigs}, {"perturbed", r.perturbed_eigs}}));
  writer.commit();
  log.info("wrote {}", writer.dir().string());
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Adversarial attacks on direct data-driven LQR design", "ddc");
  app.require_subcommand(1);
  CLI::App* synth = app.add_subcommand("synth", "design a controller from one data sample");
  CLI::App* attack = app.add_subcommand("attack", "Monte Carlo attack over a budget grid");
  CLI::App* sweep = app.add_subcommand("sweep", "attacks across regularization strengths");
  CLI::App* transfer = app.add_subcommand("transfer", "full-knowledge vs gray-box attacks");
  CLI::App* fig1 = app.add_subcommand("fig1", "single-sample demonstration");
  const std::array<CLI::App*, 5> commands = {synth, attack, sweep, transfer, fig1};
  std::array<CommonFlags, 5> flags;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    AddCommon(commands[i], flags[i], commands[i] != fig1);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto log = MakeLogger();
  try {
    if (*synth) return CmdSynth(flags[0], out, *log);
    if (*attack) return CmdAttack(flags[1], out, *log);
    if (*sweep) return CmdSweep(flags[2], out, *log);
    if (*transfer) return CmdTransfer(flags[3], out, *log);
    return CmdFig1(flags[4], out, *log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ArchiveError& e) {
    err << "archive error: " << e.what() << "\n";
    return kExitArchiveExists;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace ddc
