#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dcoord/commands.hpp"
#include "dcoord/report.hpp"
#include "dcoord/scenario_io.hpp"

using namespace dcoord;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarioDir = DCOORD_SCENARIO_DIR;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dcoord_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path write_file(const fs::path& dir, const std::string& name,
                    const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p;
}

}  // namespace

TEST_CASE("shipped scenarios parse with the documented fields") {
  const Scenario a = load_scenario(kScenarioDir / "case_a.json");
  CHECK(a.topology.size() == 4);
  CHECK(a.agents.size() == 4);
  CHECK(a.beta == 0.05);
  CHECK(a.horizon == 5000);
  CHECK(a.costs.dimension() == 2);
  CHECK(a.costs.at(0).reference() == std::vector<double>{10.0, 1.0});
  CHECK(a.costs.at(3).reference() == std::vector<double>{3.0, 5.0});
  CHECK_FALSE(a.agents[0].single_integrator);
  CHECK(a.agents[0].dynamics->A ==
        Matrix::from_rows({{0.0, 1.0}, {2.0, 1.0}}));

  const Scenario pair = load_scenario(kScenarioDir / "single_integrator_pair.json");
  CHECK(pair.agents[0].single_integrator);
  CHECK(pair.costs.dimension() == 1);

  const Scenario b = load_scenario(kScenarioDir / "case_b.json");
  CHECK(b.topology.size() == 10);
  CHECK(b.reschedules.size() == 30);
  CHECK(b.reschedules.front().round == 1500);
}

TEST_CASE("bare edges default to unit weight") {
  const Scenario a = load_scenario(kScenarioDir / "case_a.json");
  for (const auto& e : a.topology.edges()) CHECK(e.weight == 1.0);
}

TEST_CASE("unknown keys are rejected") {
  const std::string text = R"({
    "agents": ["single_integrator"],
    "topology": {"n": 1, "edges": []},
    "references": [[0]],
    "beta": 0.1,
    "horizon": 10,
    "surprise": true
  })";
  CHECK_THROWS_WITH_AS(parse_scenario(text, "t"),
                       doctest::Contains("surprise"), ScenarioFormatError);
}

TEST_CASE("parse errors carry line context") {
  const std::string text = "{\n  \"agents\": [,]\n}";
  try {
    parse_scenario(text, "broken.json");
    FAIL("expected a parse error");
  } catch (const ScenarioFormatError& e) {
    CHECK(std::string(e.what()).find("broken.json:2:") != std::string::npos);
  }
}

TEST_CASE("schema violations name the offending field") {
  CHECK_THROWS_WITH_AS(
      parse_scenario(R"({"agents": ["glider"], "topology": {"n": 1,
        "edges": []}, "references": [[0]], "beta": 0.1, "horizon": 5})",
                     "t"),
      doctest::Contains("single_integrator"), ScenarioFormatError);
  CHECK_THROWS_WITH_AS(
      parse_scenario(R"({"agents": [{"A": [[1], [2]], "B": [[1]], "C": [[1]]}],
        "topology": {"n": 1, "edges": []}, "references": [[0]],
        "beta": 0.1, "horizon": 5})",
                     "t"),
      doctest::Contains("agents[0]"), ScenarioFormatError);
}

TEST_CASE("validate passes the shipped four-agent scenario") {
  std::ostringstream out;
  const int code = cmd_validate(kScenarioDir / "case_a.json", out);
  CHECK(code == 0);
  CHECK(out.str().find("all checks passed") != std::string::npos);
  CHECK(out.str().find("FAIL") == std::string::npos);
  CHECK(out.str().find("0.125") != std::string::npos);
}

TEST_CASE("validate rejects an inadmissible step size") {
  const fs::path dir = fresh_dir("cli_beta");
  Scenario a = load_scenario(kScenarioDir / "case_a.json");
  // Rewrite with beta = 0.2, above the 0.125 bound.
  std::string text = slurp(kScenarioDir / "case_a.json");
  const auto pos = text.find("0.05");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 4, "0.20");
  const fs::path file = write_file(dir, "case_a_beta.json", text);

  std::ostringstream out;
  const int code = cmd_validate(file, out);
  CHECK(code == 2);
  CHECK(out.str().find("check step size: FAIL") != std::string::npos);
}

TEST_CASE("validate names the rank condition for an unobservable output") {
  const fs::path dir = fresh_dir("cli_rank");
  const std::string text = R"({
    "agents": [{"A": [[0, 1], [2, 1]], "B": [[1, 0], [0, 1]],
                "C": [[0, 0], [0, 0]]},
               "single_integrator"],
    "topology": {"n": 2, "edges": [[0, 1]]},
    "references": [[1, 1], [2, 2]],
    "beta": 0.1,
    "horizon": 10
  })";
  const fs::path file = write_file(dir, "rank_fail.json", text);
  std::ostringstream out;
  const int code = cmd_validate(file, out);
  CHECK(code == 2);
  CHECK(out.str().find("regulation rank[0]: FAIL") != std::string::npos);
  CHECK(out.str().find("rank([A - I, B; C, 0])") != std::string::npos);
}

TEST_CASE("bounds reports the documented values") {
  std::ostringstream a;
  CHECK(cmd_bounds(kScenarioDir / "case_a.json", a) == 0);
  CHECK(a.str().find("step bound") != std::string::npos);
  CHECK(a.str().find("0.125") != std::string::npos);
  CHECK(a.str().find("admissible") != std::string::npos);

  std::ostringstream pair;
  CHECK(cmd_bounds(kScenarioDir / "single_integrator_pair.json", pair) == 0);
  CHECK(pair.str().find("0.25") != std::string::npos);

  std::ostringstream b;
  CHECK(cmd_bounds(kScenarioDir / "case_b.json", b) == 0);
  CHECK(b.str().find("0.125") != std::string::npos);
}

TEST_CASE("run writes the artifact set and is byte-stable") {
  const fs::path out_a = fresh_dir("cli_run_a");
  const fs::path out_b = fresh_dir("cli_run_b");
  std::ostringstream sink;
  REQUIRE(cmd_run(kScenarioDir / "single_integrator_pair.json", out_a,
                  std::nullopt, std::nullopt, sink) == 0);
  REQUIRE(cmd_run(kScenarioDir / "single_integrator_pair.json", out_b,
                  std::nullopt, std::nullopt, sink) == 0);

  for (const char* name : {"trajectory.csv", "metrics.json"})
    CHECK(fs::exists(out_a / name));
  for (const char* name : {"outputs.svg", "states.svg", "lambda.svg"})
    CHECK(fs::exists(out_a / "plots" / name));
  // Scalar decisions: no output-plane plot.
  CHECK_FALSE(fs::exists(out_a / "plots" / "trajectory_xy.svg"));

  CHECK(slurp(out_a / "trajectory.csv") == slurp(out_b / "trajectory.csv"));

  // Horizon 50 at stride 1: 50 rounds, two agents per round, plus header.
  const std::string csv = slurp(out_a / "trajectory.csv");
  const long lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 1 + 50 * 2);
}

TEST_CASE("metrics are a pure function of the trajectory log") {
  for (const char* name : {"case_a.json", "heterogeneous_mix.json"}) {
    CAPTURE(name);
    const fs::path out_dir = fresh_dir(std::string("cli_metrics_") + name);
    std::ostringstream sink;
    REQUIRE(cmd_run(kScenarioDir / name, out_dir, std::nullopt, std::nullopt,
                    sink) == 0);

    const Scenario scenario = load_scenario(kScenarioDir / name);
    const TrajectoryLog log = read_trajectory_csv(out_dir / "trajectory.csv");
    const RunReport recomputed = compute_report(log, scenario);

    const auto metrics = nlohmann::json::parse(slurp(out_dir / "metrics.json"));
    CHECK(std::abs(metrics["final_consensus_error"].get<double>() -
                   recomputed.final_consensus_error) <= 1e-12);
    CHECK(std::abs(metrics["final_max_tracking_error"].get<double>() -
                   recomputed.final_max_tracking_error) <= 1e-12);
    CHECK(std::abs(metrics["final_mean_optimum_distance"].get<double>() -
                   recomputed.final_mean_optimum_distance) <= 1e-12);
    CHECK(metrics["lyapunov_monotone"].get<bool>() ==
          recomputed.lyapunov_monotone);
    CHECK(metrics["lyapunov_pairs"].get<long>() == recomputed.lyapunov_pairs);
    for (const auto& [label, round] : recomputed.first_round_below)
      CHECK(metrics["first_round_below"][label].get<long>() == round);
  }
}

TEST_CASE("heterogeneous state widths survive the CSV round trip") {
  const fs::path out_dir = fresh_dir("cli_hetero_csv");
  std::ostringstream sink;
  REQUIRE(cmd_run(kScenarioDir / "heterogeneous_mix.json", out_dir,
                  std::nullopt, 500, sink) == 0);
  const TrajectoryLog log = read_trajectory_csv(out_dir / "trajectory.csv");
  REQUIRE_FALSE(log.rounds.empty());
  const RoundRecord& rec = log.rounds.front();
  CHECK(rec.x[0].size() == 2);  // second-order plant
  CHECK(rec.x[2].size() == 2);  // single integrator carries its output
  CHECK(rec.x[3].size() == 3);  // three-state plant
  CHECK(rec.y[3].size() == 2);
}

TEST_CASE("missing scenario files are reported as format errors") {
  CHECK_THROWS_AS(load_scenario(kScenarioDir / "no_such_scenario.json"),
                  ScenarioFormatError);
}

TEST_CASE("seed is inert for scenarios without randomized initial states") {
  const fs::path with_seed = fresh_dir("cli_seed_inert_a");
  const fs::path without = fresh_dir("cli_seed_inert_b");
  std::ostringstream sink;
  REQUIRE(cmd_run(kScenarioDir / "single_integrator_pair.json", with_seed, 7,
                  std::nullopt, sink) == 0);
  REQUIRE(cmd_run(kScenarioDir / "single_integrator_pair.json", without,
                  std::nullopt, std::nullopt, sink) == 0);
  CHECK(slurp(with_seed / "trajectory.csv") == slurp(without / "trajectory.csv"));
}

TEST_CASE("consensus series vanishes once the decisions agree") {
  const Scenario scenario = load_scenario(kScenarioDir / "case_a.json");
  const LaplacianView lap = build_laplacian(scenario.topology);
  TrajectoryLog log;
  RoundRecord rec;
  rec.round = 1;
  for (int i = 0; i < 4; ++i) {
    rec.x.push_back({7.0, 4.5});
    rec.y.push_back({7.0, 4.5});
    rec.xi.push_back({7.0, 4.5});
    rec.lambda.push_back({0.0, 0.0});
    rec.u.push_back({0.0, 0.0});
    rec.e.push_back({0.0, 0.0});
  }
  log.rounds.push_back(rec);
  const auto series = consensus_series(log, lap);
  REQUIRE(series.size() == 1);
  CHECK(series[0].second == 0.0);
}

TEST_CASE("stride override changes the logged round count") {
  const fs::path out_dir = fresh_dir("cli_stride");
  std::ostringstream sink;
  REQUIRE(cmd_run(kScenarioDir / "single_integrator_pair.json", out_dir,
                  std::nullopt, 7, sink) == 0);
  const TrajectoryLog log = read_trajectory_csv(out_dir / "trajectory.csv");
  CHECK(log.rounds.size() == 8);  // ceil(50 / 7)
  CHECK(log.rounds.back().round == 50);
}

TEST_CASE("hand-stepped first rounds survive the CSV round trip") {
  const fs::path out_dir = fresh_dir("cli_hand");
  std::ostringstream sink;
  REQUIRE(cmd_run(kScenarioDir / "single_integrator_pair.json", out_dir,
                  std::nullopt, std::nullopt, sink) == 0);
  const TrajectoryLog log = read_trajectory_csv(out_dir / "trajectory.csv");
  REQUIRE(log.rounds.front().round == 1);
  const RoundRecord& r1 = log.rounds.front();
  // Same floating-point route as the update rule.
  CHECK(r1.y[0][0] == 0.0 - 0.1 * ((1.0 * 0.0 + (-1.0) * 2.0) + 0.0 + 0.0));
  CHECK(r1.y[1][0] == 2.0 - 0.1 * ((1.0 * 2.0 + (-1.0) * 0.0) + 0.0 + 0.0));
  CHECK(r1.lambda[0][0] == 0.0 + 0.1 * (1.0 * 0.0 + (-1.0) * 2.0));
  CHECK(r1.lambda[1][0] == 0.0 + 0.1 * (1.0 * 2.0 + (-1.0) * 0.0));

  // Second round continues the recursion on the stored values.
  const RoundRecord& r2 = log.rounds[1];
  CHECK(r2.round == 2);
  const double y0 = r1.y[0][0], y1 = r1.y[1][0];
  const double l0 = r1.lambda[0][0], l1 = r1.lambda[1][0];
  const double lap_y0 = 1.0 * y0 + (-1.0) * y1;
  const double lap_l0 = 1.0 * l0 + (-1.0) * l1;
  const double grad0 = 2.0 * (y0 - 0.0);
  CHECK(r2.y[0][0] == y0 - 0.1 * (lap_y0 + lap_l0 + grad0));
  const double lap_y1 = 1.0 * y1 + (-1.0) * y0;
  const double lap_l1 = 1.0 * l1 + (-1.0) * l0;
  const double grad1 = 2.0 * (y1 - 2.0);
  CHECK(r2.y[1][0] == y1 - 0.1 * (lap_y1 + lap_l1 + grad1));
}

TEST_CASE("seed drives randomized initial states deterministically") {
  const fs::path dir = fresh_dir("cli_seed");
  const std::string text = R"({
    "agents": ["single_integrator", "single_integrator"],
    "topology": {"n": 2, "edges": [[0, 1]]},
    "references": [[0], [2]],
    "beta": 0.1,
    "horizon": 30,
    "initial_states": {"random": true, "scale": 3.0}
  })";
  const fs::path file = write_file(dir, "random_init.json", text);
  std::ostringstream sink;
  REQUIRE(cmd_run(file, dir / "s1", 1, std::nullopt, sink) == 0);
  REQUIRE(cmd_run(file, dir / "s1_again", 1, std::nullopt, sink) == 0);
  REQUIRE(cmd_run(file, dir / "s2", 2, std::nullopt, sink) == 0);
  CHECK(slurp(dir / "s1" / "trajectory.csv") ==
        slurp(dir / "s1_again" / "trajectory.csv"));
  CHECK(slurp(dir / "s1" / "trajectory.csv") !=
        slurp(dir / "s2" / "trajectory.csv"));
}

TEST_CASE("validation catches integrator x/xi disagreement") {
  const fs::path dir = fresh_dir("cli_mismatch");
  const std::string text = R"({
    "agents": ["single_integrator", "single_integrator"],
    "topology": {"n": 2, "edges": [[0, 1]]},
    "references": [[0], [2]],
    "beta": 0.1,
    "horizon": 10,
    "initial_states": {"x": [[1], [2]], "xi": [[0], [2]]}
  })";
  const fs::path file = write_file(dir, "mismatch.json", text);
  std::ostringstream out;
  CHECK(cmd_validate(file, out) == 2);
  CHECK(out.str().find("initial consistency: FAIL") != std::string::npos);
}

TEST_CASE("run refuses an invalid scenario with exit code 2") {
  const fs::path dir = fresh_dir("cli_invalid");
  const std::string text = R"({
    "agents": ["single_integrator"],
    "topology": {"n": 1, "edges": []},
    "references": [[1]],
    "beta": 0.1,
    "horizon": 10
  })";
  const fs::path file = write_file(dir, "degenerate.json", text);
  std::ostringstream out;
  CHECK(cmd_run(file, dir / "out", std::nullopt, std::nullopt, out) == 2);
  CHECK(out.str().find("validation failed") != std::string::npos);
}

TEST_CASE("run reports a runtime failure for an unwritable output dir") {
  const fs::path dir = fresh_dir("cli_unwritable");
  write_file(dir, "blocker", "not a directory");
  std::ostringstream out;
  const int code =
      cmd_run(kScenarioDir / "single_integrator_pair.json",
              dir / "blocker" / "nested", std::nullopt, std::nullopt, out);
  CHECK(code == 3);
}
