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

// Minimal SVG line plots for the archive.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ddc/archive.hpp"
#include "ddc/lti.hpp"

namespace ddc {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// True when the positive finite entries span at least \p decades decades.
bool spans_decades(const std::vector<double>& values, double decades = 2.0);

/// Axes switch to a log scale independently when their data span two
/// decades. Non-finite points, and nonpositive ones on a log axis, are skipped.
std::string render_svg(const PlotSpec& spec);

/// Unit circle with one marker set per labeled spectrum.
std::string render_spectrum_svg(const std::vector<std::pair<std::string, Spectrum>>& spectra);

struct PlotFile {
  std::string name;
  std::string svg;
};

/// eps_bar.svg (eps_bar against the sweep value, one series per attack) and
/// ratio.svg (instability ratio against eps, one series per attack and sweep
/// value). Throws ArchiveError when there are no rows.
std::vector<PlotFile> emit_plots(const std::vector<AggregateRow>& rows);
/// Reads aggregate.csv from \p archive and writes the plots next to it.
std::vector<PlotFile> emit_plots(const std::filesystem::path& archive);

}  // namespace ddc
