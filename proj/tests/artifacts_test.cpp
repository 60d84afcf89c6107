#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oactl/errors.hpp"
#include "oactl/manifest.hpp"
#include "oactl/svg_plot.hpp"
#include "toys.hpp"

using namespace oactl;
using toys::vec;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size()))
    ++n;
  return n;
}

RunManifest sample_manifest() {
  RunManifest m;
  m.experiment = "exp1";
  m.config_path = "configs/exp1.cfg";
  m.soundness_seed = 20260814u;
  m.monte_carlo_seed = 424242u;
  m.started_at = "2026-08-14T00:00:00Z";
  m.finished_at = "2026-08-14T00:05:00Z";
  m.artifacts = {{"overapprox", "out/exp1.oa"},
                 {"policy_informed", "out/exp1_informed.policy"}};
  m.alpha_informed = 0.8123456789012345;
  m.alpha_uninformed = 0.6210987654321098;
  m.alpha_informed_lo = 0.71;
  m.alpha_informed_hi = 0.91;
  m.alpha_uninformed_lo = 0.52;
  m.alpha_uninformed_hi = 0.72;
  m.min_gap = 0.10;
  m.informed_rollout_ok = true;
  m.uninformed_rollout_ok = true;
  m.targets_met = true;
  return m;
}

}  // namespace

TEST_CASE("manifest round trip preserves every field") {
  const RunManifest m = sample_manifest();
  const std::string path = "manifest_test.json";
  save_manifest(m, path);

  const RunManifest r = load_manifest(path);
  CHECK(r.tool_version == m.tool_version);
  CHECK(r.experiment == m.experiment);
  CHECK(r.config_path == m.config_path);
  CHECK(r.soundness_seed == m.soundness_seed);
  CHECK(r.monte_carlo_seed == m.monte_carlo_seed);
  CHECK(r.started_at == m.started_at);
  CHECK(r.finished_at == m.finished_at);
  CHECK(r.artifacts == m.artifacts);
  CHECK(r.alpha_informed == m.alpha_informed);  // exact doubles
  CHECK(r.alpha_uninformed == m.alpha_uninformed);
  CHECK(r.alpha_informed_lo == m.alpha_informed_lo);
  CHECK(r.alpha_informed_hi == m.alpha_informed_hi);
  CHECK(r.alpha_uninformed_lo == m.alpha_uninformed_lo);
  CHECK(r.alpha_uninformed_hi == m.alpha_uninformed_hi);
  CHECK(r.min_gap == m.min_gap);
  CHECK(r.informed_rollout_ok == m.informed_rollout_ok);
  CHECK(r.uninformed_rollout_ok == m.uninformed_rollout_ok);
  CHECK(r.targets_met == m.targets_met);

  // Saving the loaded manifest reproduces the file byte for byte.
  const std::string again = "manifest_test2.json";
  save_manifest(r, again);
  CHECK(slurp(path) == slurp(again));

  std::remove(path.c_str());
  std::remove(again.c_str());
}

TEST_CASE("manifest loader rejects bad input") {
  const std::string path = "manifest_bad_test.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_manifest(path), InputError);
  {
    std::ofstream out(path);
    out << "[1, 2, 3]";  // valid JSON, wrong shape
  }
  CHECK_THROWS_AS(load_manifest(path), InputError);
  CHECK_THROWS_AS(load_manifest("no_such_manifest_test.json"), InputError);
  std::remove(path.c_str());
}

TEST_CASE("phase plot SVG") {
  PlotSpec spec;
  spec.title = "phase portrait";
  spec.domain = Box(vec({0.0, -0.5}), vec({1.0, 0.5}));
  spec.vlines = {{"alpha_informed", 0.81}};
  PlotSeries a;
  a.label = "informed";
  a.points = {vec({0.0, 0.0}), vec({0.3, 0.1}), vec({0.8, -0.2})};
  PlotSeries b;
  b.label = "uninformed";
  b.points = {vec({0.0, 0.0}), vec({0.2, -0.1})};
  spec.series = {a, b};

  const std::string path = "plot_test.svg";
  write_phase_plot_svg(spec, path);
  const std::string svg = slurp(path);

  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count_of(svg, "<polyline") == 2);
  CHECK(svg.find("informed") != std::string::npos);
  CHECK(svg.find("uninformed") != std::string::npos);
  CHECK(svg.find("phase portrait") != std::string::npos);
  CHECK(svg.find("alpha_informed") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  // Deterministic output.
  const std::string again = "plot_test2.svg";
  write_phase_plot_svg(spec, again);
  CHECK(svg == slurp(again));

  std::remove(path.c_str());
  std::remove(again.c_str());

  // Rejections: empty series, non-2-D points, unwritable path.
  PlotSpec empty = spec;
  empty.series[0].points.clear();
  CHECK_THROWS_AS(write_phase_plot_svg(empty, path), InputError);
  PlotSpec bad = spec;
  bad.series[0].points[1] = vec({1.0});
  CHECK_THROWS_AS(write_phase_plot_svg(bad, path), InputError);
  CHECK_THROWS_AS(write_phase_plot_svg(spec, "no_such_dir_test/plot.svg"),
                  InputError);
}
