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

#include "ddc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ddc/errors.hpp"

namespace ddc {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;  // in transformed units

  double Transform(double v) const { return log ? std::log10(v) : v; }
  bool Admits(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double Fraction(double v) const { return (Transform(v) - lo) / (hi - lo); }

  std::vector<double> Ticks() const {
    std::vector<double> t;
    if (log) {
      const int a = static_cast<int>(std::ceil(lo - 1e-9));
      const int b = static_cast<int>(std::floor(hi + 1e-9));
      const int stride = std::max(1, (b - a) / 8 + 1);
      for (int e = a; e <= b; e += stride) t.push_back(std::pow(10.0, e));
      return t;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
      step = f * mag;
      if (step >= raw) break;
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
      t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return t;
  }
};

Axis MakeAxis(const std::vector<double>& values) {
  Axis axis;
  axis.log = spans_decades(values);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (!axis.Admits(v)) continue;
    lo = std::min(lo, axis.Transform(v));
    hi = std::max(hi, axis.Transform(v));
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  } else if (hi - lo < 1e-12) {
    const double pad = axis.log ? 1.0 : std::max(std::abs(lo) * 0.1, 1e-3);
    lo -= pad;
    hi += pad;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  axis.lo = lo;
  axis.hi = hi;
  return axis;
}

std::string TickLabel(const Axis& axis, double v) {
  if (axis.log) return "1e" + std::to_string(static_cast<int>(std::lround(std::log10(v))));
  return Num(v);
}

void Frame(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"15\">" << Escape(title) << "</text>\n";
}

void Legend(std::ostringstream& os, const std::vector<std::string>& labels) {
  const double x = kWidth - kRight + 15.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = kTop + 15.0 + 18.0 * static_cast<double>(i);
    const char* color = kPalette[i % std::size(kPalette)];
    os << "<circle cx=\"" << x << "\" cy=\"" << y - 4 << "\" r=\"4\" fill=\"" << color
       << "\"/>\n<text x=\"" << x + 10 << "\" y=\"" << y
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << Escape(labels[i])
       << "</text>\n";
  }
}

}  // namespace

bool spans_decades(const std::vector<double>& values, double decades) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v <= 0.0) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi > 0.0 && std::log10(hi / lo) >= decades - 1e-12;
}

std::string render_svg(const PlotSpec& spec) {
  std::vector<double> xs, ys;
  for (const PlotSeries& s : spec.series) {
    if (s.x.size() != s.y.size()) throw DimensionError("plot series x and y differ in length");
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Axis ax = MakeAxis(xs);
  const Axis ay = MakeAxis(ys);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + ax.Fraction(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - ay.Fraction(v)) * ph; };

  std::ostringstream os;
  Frame(os, spec.title);
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
     << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.Ticks()) {
    const double x = px(t);
    os << "<line x1=\"" << x << "\" y1=\"" << kTop + ph << "\" x2=\"" << x << "\" y2=\""
       << kTop + ph + 5 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << x << "\" y=\"" << kTop + ph + 20
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << TickLabel(ax, t) << "</text>\n";
  }
  for (double t : ay.Ticks()) {
    const double y = py(t);
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\""
       << y << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << TickLabel(ay, t) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << Escape(spec.x_label) << "</text>\n"
     << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
     << kTop + ph / 2 << ")\">" << Escape(spec.y_label) << "</text>\n";

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const PlotSeries& s = spec.series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    labels.push_back(s.label);
    std::ostringstream points;
    int count = 0;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!ax.Admits(s.x[k]) || !ay.Admits(s.y[k])) continue;
      const double x = px(s.x[k]), y = py(s.y[k]);
      points << (count++ ? " " : "") << x << "," << y;
      os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    if (count > 1) {
      os << "<polyline points=\"" << points.str() << "\" fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\"/>\n";
    }
  }
  Legend(os, labels);
  os << "</svg>\n";
  return os.str();
}

std::string render_spectrum_svg(
    const std::vector<std::pair<std::string, Spectrum>>& spectra) {
  double extent = 1.1;
  for (const auto& [label, eigs] : spectra) {
    for (const auto& l : eigs) extent = std::max(extent, 1.1 * std::abs(l));
  }
  const double size = kHeight - kTop - kBottom;
  const double cx = kLeft + size / 2, cy = kTop + size / 2;
  const double scale = size / (2.0 * extent);

  std::ostringstream os;
  Frame(os, "closed-loop eigenvalues");
  os << "<line x1=\"" << kLeft << "\" y1=\"" << cy << "\" x2=\"" << kLeft + size << "\" y2=\""
     << cy << "\" stroke=\"#999\"/>\n"
     << "<line x1=\"" << cx << "\" y1=\"" << kTop << "\" x2=\"" << cx << "\" y2=\""
     << kTop + size << "\" stroke=\"#999\"/>\n"
     << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << scale
     << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n"
     << "<text x=\"" << cx << "\" y=\"" << kTop + size + 20
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">Re</text>\n"
     << "<text x=\"" << kLeft - 10 << "\" y=\"" << cy
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\">Im</text>\n";
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    labels.push_back(spectra[i].first);
    for (const auto& l : spectra[i].second) {
      os << "<circle cx=\"" << cx + l.real() * scale << "\" cy=\"" << cy - l.imag() * scale
         << "\" r=\"4\" fill=\"" << color << "\"/>\n";
    }
  }
  Legend(os, labels);
  os << "</svg>\n";
  return os.str();
}

std::vector<PlotFile> emit_plots(const std::vector<AggregateRow>& rows) {
  if (rows.empty()) throw ArchiveError("plots: the aggregate table has no rows");

  // Keys keep the first-seen order so series colors are stable.
  std::vector<std::string> kinds;
  std::map<std::string, std::map<double, double>> eps_bar;
  std::vector<std::pair<std::string, double>> curves;
  std::map<std::pair<std::string, double>, PlotSeries> ratio;
  for (const AggregateRow& r : rows) {
    if (std::find(kinds.begin(), kinds.end(), r.attack_kind) == kinds.end()) {
      kinds.push_back(r.attack_kind);
    }
    eps_bar[r.attack_kind][r.sweep_value] =
        r.eps_bar ? *r.eps_bar : std::numeric_limits<double>::infinity();
    const auto key = std::make_pair(r.attack_kind, r.sweep_value);
    if (!ratio.count(key)) {
      curves.push_back(key);
      ratio[key].label = r.attack_kind + " @ " + Num(r.sweep_value);
    }
    ratio[key].x.push_back(r.eps);
    ratio[key].y.push_back(r.ratio);
  }

  PlotSpec bar{"smallest destabilizing budget", "regularization strength", "eps_bar", {}};
  for (const std::string& k : kinds) {
    PlotSeries s{k, {}, {}};
    for (const auto& [value, e] : eps_bar[k]) {
      s.x.push_back(value);
      s.y.push_back(e);
    }
    bar.series.push_back(std::move(s));
  }
  PlotSpec rat{"instability ratio", "eps", "N_unstable / N_all", {}};
  for (const auto& key : curves) rat.series.push_back(ratio[key]);
  return {{"eps_bar.svg", render_svg(bar)}, {"ratio.svg", render_svg(rat)}};
}

std::vector<PlotFile> emit_plots(const std::filesystem::path& archive) {
  const std::vector<PlotFile> files =
      emit_plots(parse_aggregate_csv(read_file(archive / "aggregate.csv")));
  for (const PlotFile& f : files) {
    std::ofstream out(archive / f.name, std::ios::binary | std::ios::trunc);
    out << f.svg;
    if (!out) throw ArchiveError("plots: cannot write " + (archive / f.name).string());
  }
  return files;
}

}  // namespace ddc
