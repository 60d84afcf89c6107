#include "oactl/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "oactl/errors.hpp"

namespace oactl {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 540.0;
constexpr double kMarginL = 64.0, kMarginR = 24.0, kMarginT = 40.0, kMarginB = 52.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void take(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) {
      lo = -1;
      hi = 1;
    }
    double span = hi - lo;
    if (span <= 0) span = std::max(1.0, std::abs(lo));
    lo -= 0.06 * span;
    hi += 0.06 * span;
  }
};

}  // namespace

void write_phase_plot_svg(const PlotSpec& spec, const std::string& path) {
  if (spec.series.empty())
    throw InputError("phase plot needs at least one trajectory");
  Range rx, ry;
  for (const PlotSeries& s : spec.series) {
    if (s.points.empty())
      throw InputError("trajectory '" + s.label + "' has no points");
    for (const Eigen::VectorXd& p : s.points) {
      if (p.size() != 2)
        throw InputError("phase plots support exactly two state dimensions; '" +
                         s.label + "' has " + std::to_string(p.size()));
      rx.take(p[0]);
      ry.take(p[1]);
    }
  }
  if (spec.domain) {
    if (spec.domain->dim() != 2)
      throw InputError("phase plots support exactly two state dimensions");
    rx.take(spec.domain->lo()[0]);
    rx.take(spec.domain->hi()[0]);
    ry.take(spec.domain->lo()[1]);
    ry.take(spec.domain->hi()[1]);
  }
  for (const auto& [label, v] : spec.vlines) rx.take(v);
  rx.pad();
  ry.pad();

  const double plot_w = kWidth - kMarginL - kMarginR;
  const double plot_h = kHeight - kMarginT - kMarginB;
  auto px = [&](double x) {
    return kMarginL + (x - rx.lo) / (rx.hi - rx.lo) * plot_w;
  };
  auto py = [&](double y) {
    return kMarginT + (ry.hi - y) / (ry.hi - ry.lo) * plot_h;
  };

  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << fmt(kWidth) << "\" height=\"" << fmt(kHeight) << "\" viewBox=\"0 0 "
      << fmt(kWidth) << " " << fmt(kHeight) << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << fmt(kWidth) << "\" height=\""
      << fmt(kHeight) << "\" fill=\"white\"/>\n";
  if (!spec.title.empty())
    out << "  <text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" font-family=\"sans-serif\""
        << " font-size=\"16\" text-anchor=\"middle\">" << escape_xml(spec.title)
        << "</text>\n";

  // Axes frame and ticks.
  out << "  <rect x=\"" << fmt(kMarginL) << "\" y=\"" << fmt(kMarginT)
      << "\" width=\"" << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
    out << "  <line x1=\"" << fmt(px(fx)) << "\" y1=\"" << fmt(kMarginT + plot_h)
        << "\" x2=\"" << fmt(px(fx)) << "\" y2=\"" << fmt(kMarginT + plot_h + 5)
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "  <text x=\"" << fmt(px(fx)) << "\" y=\"" << fmt(kMarginT + plot_h + 20)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << fmt(fx) << "</text>\n";
    out << "  <line x1=\"" << fmt(kMarginL - 5) << "\" y1=\"" << fmt(py(fy))
        << "\" x2=\"" << fmt(kMarginL) << "\" y2=\"" << fmt(py(fy))
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "  <text x=\"" << fmt(kMarginL - 9) << "\" y=\"" << fmt(py(fy) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << fmt(fy) << "</text>\n";
  }
  out << "  <text x=\"" << fmt(kMarginL + plot_w / 2) << "\" y=\""
      << fmt(kHeight - 14)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">x1"
      << "</text>\n";
  out << "  <text x=\"18\" y=\"" << fmt(kMarginT + plot_h / 2)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
      << " transform=\"rotate(-90 18 " << fmt(kMarginT + plot_h / 2)
      << ")\">x2</text>\n";

  if (spec.domain) {
    const Box& X = *spec.domain;
    out << "  <rect x=\"" << fmt(px(X.lo()[0])) << "\" y=\"" << fmt(py(X.hi()[1]))
        << "\" width=\"" << fmt(px(X.hi()[0]) - px(X.lo()[0])) << "\" height=\""
        << fmt(py(X.lo()[1]) - py(X.hi()[1]))
        << "\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1.5\""
        << " stroke-dasharray=\"2,3\"/>\n";
  }

  for (std::size_t k = 0; k < spec.vlines.size(); ++k) {
    const double v = spec.vlines[k].second;
    out << "  <line x1=\"" << fmt(px(v)) << "\" y1=\"" << fmt(kMarginT)
        << "\" x2=\"" << fmt(px(v)) << "\" y2=\"" << fmt(kMarginT + plot_h)
        << "\" stroke=\"" << kPalette[k % kPaletteSize]
        << "\" stroke-width=\"1.2\" stroke-dasharray=\"6,4\"/>\n";
  }

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const PlotSeries& s = spec.series[k];
    out << "  <polyline fill=\"none\" stroke=\"" << kPalette[k % kPaletteSize]
        << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i)
      out << (i ? " " : "") << fmt(px(s.points[i][0])) << ","
          << fmt(py(s.points[i][1]));
    out << "\"/>\n";
    // Start marker.
    out << "  <circle cx=\"" << fmt(px(s.points.front()[0])) << "\" cy=\""
        << fmt(py(s.points.front()[1])) << "\" r=\"3\" fill=\""
        << kPalette[k % kPaletteSize] << "\"/>\n";
  }

  // Legend, top-right inside the frame.
  const double lx = kMarginL + plot_w - 190;
  double ly = kMarginT + 12;
  const std::size_t entries = spec.series.size() + spec.vlines.size() +
                              (spec.domain ? 1 : 0);
  out << "  <rect x=\"" << fmt(lx - 8) << "\" y=\"" << fmt(ly - 10)
      << "\" width=\"192\" height=\"" << fmt(entries * 18.0 + 8)
      << "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#999999\"/>\n";
  auto legend_entry = [&](const std::string& label, const std::string& color,
                          bool dashed) {
    out << "  <line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(lx + 26) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    out << "  <text x=\"" << fmt(lx + 32) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(label)
        << "</text>\n";
    ly += 18;
  };
  for (std::size_t k = 0; k < spec.series.size(); ++k)
    legend_entry(spec.series[k].label, kPalette[k % kPaletteSize], false);
  for (std::size_t k = 0; k < spec.vlines.size(); ++k)
    legend_entry(spec.vlines[k].first, kPalette[k % kPaletteSize], true);
  if (spec.domain) legend_entry("state box X", "#555555", true);

  out << "</svg>\n";
  if (!out) throw InputError("failed while writing '" + path + "'");
}

}  // namespace oactl
