#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oactl/box.hpp"

namespace oactl {

struct PlotSeries {
  std::string label;
  std::vector<Eigen::VectorXd> points;  // 2-D phase-plane points, in order
};

struct PlotSpec {
  std::string title;
  std::vector<PlotSeries> series;
  std::optional<Box> domain;  // drawn as a rectangle outline (state box X)
  // Vertical marker lines at x1 = value (terminal guarantees alpha).
  std::vector<std::pair<std::string, double>> vlines;
};

// Deterministic SVG 1.1 phase plot: x1 horizontal, x2 vertical, one polyline
// per series, optional domain rectangle, dashed vertical markers, legend.
// Throws InputError when a series is empty or a point is not 2-D.
void write_phase_plot_svg(const PlotSpec& spec, const std::string& path);

}  // namespace oactl
