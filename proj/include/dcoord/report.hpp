// Run reporting: trajectory CSV serialization, diagnostic series derived
// from a log, and the metrics summary. The report is a pure function of the
// log and the scenario, so everything in metrics.json can be recomputed
// from trajectory.csv.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dcoord/sim.hpp"

namespace dcoord {

struct RunReport {
  double final_consensus_error = 0.0;
  double final_max_tracking_error = 0.0;
  double final_mean_optimum_distance = 0.0;
  // threshold label -> first logged round (>= the last reschedule) at which
  // every output sits within the threshold of the final optimum; -1 if never.
  std::map<std::string, long> first_round_below;
  bool lyapunov_monotone = false;
  long lyapunov_pairs = 0;  // number of comparisons behind the verdict
  double wall_clock_ms = 0.0;
};

/// ||(L x I) Xi|| per logged round.
std::vector<std::pair<long, double>> consensus_series(const TrajectoryLog& log,
                                                      const LaplacianView& lap);

/// Distance of the mean output to the optimum of the references active at
/// each logged round.
std::vector<std::pair<long, double>> mean_distance_series(
    const TrajectoryLog& log, const Scenario& scenario);

/// Lyapunov values V(k) = <dXi(k), (M x I) dXi(k)> + ||lambda(k+1) - l*||^2
/// against the run's own limit (the final logged row), for every logged
/// round k whose successor round k+1 is also logged.
std::vector<std::pair<long, double>> lyapunov_series(const TrajectoryLog& log,
                                                     const Matrix& weight);

RunReport compute_report(const TrajectoryLog& log, const Scenario& scenario);

void write_trajectory_csv(const std::filesystem::path& path,
                          const TrajectoryLog& log);

/// Inverse of write_trajectory_csv; values round-trip exactly.
TrajectoryLog read_trajectory_csv(const std::filesystem::path& path);

void write_metrics_json(const std::filesystem::path& path,
                        const RunReport& report);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace dcoord
