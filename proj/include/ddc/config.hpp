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

// JSON run configuration.
//
// Matrices are arrays of rows. The keys "system", "horizon", "weights" and
// "regularizer" are required, every other key falls back to the
// ScenarioConfig default. Unknown keys are rejected.

#include <string>
#include <vector>

#include "ddc/experiments.hpp"

namespace ddc {

struct RunConfig {
  ScenarioConfig scenario;
  SweepParameter sweep_parameter = SweepParameter::kGamma;
  std::vector<double> sweep_values;  // empty: the scenario's own strength
  std::vector<AttackKind> sweep_attacks = {AttackKind::kDgsm, AttackKind::kRandom};
  TransferMode transfer_mode = TransferMode::kData;
  int jobs = 1;
  std::string out;  // empty: chosen by the command line

  /// ScenarioConfig::validate plus the run-level keys.
  void validate() const;
  bool operator==(const RunConfig& other) const;
};

/// Throws ConfigError naming the offending key.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
/// Every key is written, so parse_run_config(serialize_run_config(c)) == c.
std::string serialize_run_config(const RunConfig& cfg);

std::string to_string(SweepParameter p);
std::string to_string(TransferMode mode);

}  // namespace ddc
