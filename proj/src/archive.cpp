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

#include "ddc/archive.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ddc/errors.hpp"

namespace ddc {
namespace {

namespace fs = std::filesystem;

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> SplitRow(const std::string& line) {
  std::vector<std::string> fields(1);
  for (char c : line) {
    if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

double ParseDouble(const std::string& s, int line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ArchiveError("aggregate.csv line " + std::to_string(line) + ": bad number '" + s +
                       "'");
  }
  return v;
}

template <typename Int>
Int ParseInt(const std::string& s, int line) {
  Int v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ArchiveError("aggregate.csv line " + std::to_string(line) + ": bad integer '" + s +
                       "'");
  }
  return v;
}

double SpectralRadiusOrNan(const Spectrum& eigs) {
  return eigs.empty() ? std::nan("") : spectral_radius(eigs);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<AggregateRow> aggregate_rows(const ExperimentReport& report, double sweep_value) {
  const ScenarioConfig& cfg = report.config;
  std::vector<AggregateRow> rows;
  for (std::size_t k = 0; k < cfg.eps_grid.size(); ++k) {
    AggregateRow row;
    row.sweep_value = sweep_value;
    row.attack_kind = to_string(cfg.attack_kind);
    row.eps = cfg.eps_grid[k];
    row.n_unstable = report.n_unstable.at(k);
    row.n_all = cfg.n_all;
    row.ratio = report.ratio.at(k);
    row.eps_bar = report.eps_bar;
    row.master_seed = cfg.master_seed;
    rows.push_back(row);
  }
  return rows;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out = std::string(kAggregateHeader) + "\n";
  for (const AggregateRow& r : rows) {
    out += format_double(r.sweep_value) + "," + CsvField(r.attack_kind) + "," +
           format_double(r.eps) + "," + std::to_string(r.n_unstable) + "," +
           std::to_string(r.n_all) + "," + format_double(r.ratio) + "," +
           (r.eps_bar ? format_double(*r.eps_bar) : std::string("inf")) + "," +
           std::to_string(r.master_seed) + "\n";
  }
  return out;
}

std::vector<AggregateRow> parse_aggregate_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ArchiveError("aggregate.csv: no header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kAggregateHeader) {
    throw ArchiveError("aggregate.csv: expected columns " + std::string(kAggregateHeader) +
                       ", got " + line);
  }
  std::vector<AggregateRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitRow(line);
    if (f.size() != 8) {
      throw ArchiveError("aggregate.csv line " + std::to_string(number) + ": expected 8 fields");
    }
    AggregateRow r;
    r.sweep_value = ParseDouble(f[0], number);
    r.attack_kind = f[1];
    r.eps = ParseDouble(f[2], number);
    r.n_unstable = ParseInt<int>(f[3], number);
    r.n_all = ParseInt<int>(f[4], number);
    r.ratio = ParseDouble(f[5], number);
    const double eps_bar = ParseDouble(f[6], number);
    if (std::isfinite(eps_bar)) r.eps_bar = eps_bar;
    r.master_seed = ParseInt<std::uint64_t>(f[7], number);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string samples_csv(const std::vector<LabeledReport>& reports) {
  std::string out =
      "sweep_value,attack_kind,sample,seed,clean_ok,clean_J,success,eps_star,target_eig,"
      "clean_radius,perturbed_radius,synth_calls,synth_failures,error\n";
  for (const LabeledReport& lr : reports) {
    const ExperimentReport& rep = *lr.report;
    for (const SampleRecord& s : rep.samples) {
      const AttackResult& a = s.attack;
      out += format_double(lr.sweep_value) + "," + to_string(rep.config.attack_kind) + "," +
             std::to_string(s.index) + "," + std::to_string(s.seed) + "," +
             (s.clean_ok ? "1" : "0") + "," + format_double(s.clean_J) + "," +
             (a.success ? "1" : "0") + "," +
             (a.eps_star ? format_double(*a.eps_star) : std::string("inf")) + "," +
             std::to_string(a.target_eig_index) + "," +
             format_double(SpectralRadiusOrNan(a.eigs_clean)) + "," +
             format_double(SpectralRadiusOrNan(a.eigs_perturbed)) + "," +
             std::to_string(a.synth_calls) + "," + std::to_string(a.synth_failures) + "," +
             CsvField(s.error) + "\n";
    }
  }
  return out;
}

ArchiveWriter::ArchiveWriter(fs::path dir, bool force) : force_(force) {
  dir = dir.lexically_normal();
  if (dir.filename().empty()) dir = dir.parent_path();
  if (dir.empty()) throw ArchiveError("archive: empty output path");
  dir_ = dir;
  std::error_code ec;
  if (fs::exists(dir_, ec)) {
    if (!fs::is_directory(dir_)) {
      throw ArchiveError("archive: '" + dir_.string() + "' exists and is not a directory");
    }
    if (!fs::is_empty(dir_) && !force_) {
      throw ArchiveError("archive: '" + dir_.string() +
                         "' already holds results; pass --force to overwrite");
    }
  }
  const fs::path parent = dir_.has_parent_path() ? dir_.parent_path() : fs::path(".");
  fs::create_directories(parent);
  staging_ = parent / ("." + dir_.filename().string() + ".partial");
  fs::remove_all(staging_);
  if (!fs::create_directory(staging_)) {
    throw ArchiveError("archive: cannot create '" + staging_.string() + "'");
  }
}

ArchiveWriter::~ArchiveWriter() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void ArchiveWriter::write(const std::string& name, const std::string& content) {
  if (committed_) throw ArchiveError("archive: already committed");
  const fs::path path = staging_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw ArchiveError("archive: failed to write '" + path.string() + "'");
}

void ArchiveWriter::commit() {
  if (committed_) return;
  std::error_code ec;
  if (fs::exists(dir_, ec)) {
    if (!force_ && !fs::is_empty(dir_)) {
      throw ArchiveError("archive: '" + dir_.string() + "' appeared while the run was active");
    }
    fs::remove_all(dir_);
  }
  fs::rename(staging_, dir_);
  committed_ = true;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArchiveError("cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace ddc
