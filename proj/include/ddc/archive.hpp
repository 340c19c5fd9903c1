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

// Result archives: one directory per run holding the config echo, CSV tables,
// JSON summaries and SVG plots.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ddc/experiments.hpp"

namespace ddc {

inline constexpr char kAggregateHeader[] =
    "sweep_value,attack_kind,eps,n_unstable,n_all,ratio,eps_bar,master_seed";

/// Shortest decimal that parses back to the same double (at most 17
/// significant digits). Infinities are written as inf and -inf.
std::string format_double(double v);

struct AggregateRow {
  double sweep_value = 0.0;
  std::string attack_kind;
  double eps = 0.0;
  int n_unstable = 0;
  int n_all = 0;
  double ratio = 0.0;
  std::optional<double> eps_bar;  // written as inf when tau is never reached
  std::uint64_t master_seed = 0;

  bool operator==(const AggregateRow&) const = default;
};

/// One row per grid point of \p report.
std::vector<AggregateRow> aggregate_rows(const ExperimentReport& report, double sweep_value);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
/// Throws ArchiveError on a missing or reordered header or a malformed row.
std::vector<AggregateRow> parse_aggregate_csv(const std::string& text);

struct LabeledReport {
  double sweep_value = 0.0;
  const ExperimentReport* report = nullptr;
};

/// Per-sample outcomes of every report.
std::string samples_csv(const std::vector<LabeledReport>& reports);

/// Writes into a staging directory next to the target and moves it into
/// place on commit(), so a run that stops early leaves no partial archive.
class ArchiveWriter {
 public:
  /// Throws ArchiveError if \p dir already holds files and \p force is false.
  ArchiveWriter(std::filesystem::path dir, bool force);
  ~ArchiveWriter();
  ArchiveWriter(const ArchiveWriter&) = delete;
  ArchiveWriter& operator=(const ArchiveWriter&) = delete;

  void write(const std::string& name, const std::string& content);
  void commit();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::filesystem::path staging_;
  bool force_ = false;
  bool committed_ = false;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace ddc
