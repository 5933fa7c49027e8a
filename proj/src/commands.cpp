#include "dcoord/commands.hpp"

#include <chrono>
#include <cstdio>
#include <exception>

#include "dcoord/plot.hpp"
#include "dcoord/report.hpp"
#include "dcoord/scenario_io.hpp"

namespace dcoord {

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 2;
constexpr int kRuntimeFailure = 3;

// Display rounding for human-facing printouts; artifacts keep full precision.
std::string fmt9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void print_report(const ValidationReport& report, std::ostream& out) {
  for (const auto& check : report.checks) {
    out << "check " << check.name << ": " << (check.passed ? "PASS" : "FAIL");
    if (!check.detail.empty()) out << " (" << check.detail << ")";
    out << '\n';
  }
}

}  // namespace

int cmd_validate(const std::filesystem::path& scenario_path,
                 std::ostream& out) {
  const Scenario scenario = load_scenario(scenario_path);
  const ValidationReport report = validate_scenario(scenario);
  print_report(report, out);
  out << (report.all_passed ? "all checks passed" : "validation failed")
      << '\n';
  return report.all_passed ? kOk : kValidationFailure;
}

int cmd_bounds(const std::filesystem::path& scenario_path, std::ostream& out) {
  const Scenario scenario = load_scenario(scenario_path);
  const LaplacianView lap = build_laplacian(scenario.topology);
  const std::vector<double> spectrum = laplacian_spectrum(lap);
  const double lipschitz = scenario.costs.lipschitz_constant();
  const double bound = max_step_size(lap, lipschitz);
  const bool admissible = scenario.beta > 0.0 && scenario.beta < bound;

  out << "lambda_max: " << fmt9(spectrum.back()) << '\n';
  out << "lipschitz: " << fmt9(lipschitz) << '\n';
  out << "step bound min(1/(2*lambda_max), 3/(2*lipschitz)): " << fmt9(bound)
      << '\n';
  out << "scenario beta: " << fmt9(scenario.beta) << " -> "
      << (admissible ? "admissible" : "inadmissible") << '\n';
  return kOk;
}

int cmd_run(const std::filesystem::path& scenario_path,
            const std::filesystem::path& output_dir,
            std::optional<std::uint64_t> seed, std::optional<long> stride,
            std::ostream& out) {
  Scenario scenario = load_scenario(scenario_path);
  if (stride) {
    if (*stride < 1) throw ScenarioFormatError("stride override must be >= 1");
    scenario.record_stride = *stride;
  }

  const ValidationReport report = validate_scenario(scenario);
  if (!report.all_passed) {
    print_report(report, out);
    out << "validation failed; not running\n";
    return kValidationFailure;
  }

  const auto start = std::chrono::steady_clock::now();
  const TrajectoryLog log = run(scenario, seed.value_or(0));
  const auto elapsed = std::chrono::duration<double, std::milli>(
      std::chrono::steady_clock::now() - start);

  RunReport metrics = compute_report(log, scenario);
  metrics.wall_clock_ms = elapsed.count();

  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) {
    out << "cannot create output directory " << output_dir.string() << ": "
        << ec.message() << '\n';
    return kRuntimeFailure;
  }
  try {
    write_trajectory_csv(output_dir / "trajectory.csv", log);
    write_metrics_json(output_dir / "metrics.json", metrics);
    write_run_plots(output_dir / "plots", log);
  } catch (const std::exception& e) {
    out << "failed to write artifacts: " << e.what() << '\n';
    return kRuntimeFailure;
  }

  out << "rounds logged: " << log.rounds.size() << '\n';
  out << "final consensus error: "
      << format_double(metrics.final_consensus_error) << '\n';
  out << "final max tracking error: "
      << format_double(metrics.final_max_tracking_error) << '\n';
  out << "final mean-output distance to optimum: "
      << format_double(metrics.final_mean_optimum_distance) << '\n';
  out << "lyapunov monotone: " << (metrics.lyapunov_monotone ? "yes" : "no")
      << " over " << metrics.lyapunov_pairs << " pairs\n";
  out << "wall clock: " << format_double(metrics.wall_clock_ms) << " ms\n";
  out << "artifacts in " << output_dir.string() << '\n';
  return kOk;
}

}  // namespace dcoord
