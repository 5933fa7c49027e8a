// Static SVG polyline charts for run artifacts.
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dcoord/sim.hpp"

namespace dcoord {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

void write_line_chart(const std::filesystem::path& path,
                      const std::string& title, const std::string& x_label,
                      const std::string& y_label,
                      const std::vector<Series>& series);

/// Emits the run plots under dir: output-plane trajectories (when the
/// decision dimension is at least two), outputs per axis, plant states, and
/// multipliers, all against the round index.
void write_run_plots(const std::filesystem::path& dir, const TrajectoryLog& log);

}  // namespace dcoord
