// dcoord: validate, bound-check, and run distributed-coordination scenarios.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dcoord/commands.hpp"
#include "dcoord/scenario_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Distributed optimal coordination of discrete-time linear multi-agent "
      "systems: neighbor-only primal-dual consensus with output-regulation "
      "tracking"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string output_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<long> stride;

  CLI::App* validate =
      app.add_subcommand("validate", "run every assumption and bound check");
  validate->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();

  CLI::App* bounds =
      app.add_subcommand("bounds", "print the step-size bound of the scenario");
  bounds->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();

  CLI::App* run = app.add_subcommand(
      "run", "simulate the scenario and write CSV, metrics, and plots");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", output_dir, "output directory")
      ->capture_default_str();
  run->add_option("--seed", seed,
                  "seed for scenarios with randomized initial states");
  run->add_option("--stride", stride, "override the record stride");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed())
      return dcoord::cmd_validate(scenario_path, std::cout);
    if (bounds->parsed()) return dcoord::cmd_bounds(scenario_path, std::cout);
    return dcoord::cmd_run(scenario_path, output_dir, seed, stride, std::cout);
  } catch (const dcoord::ScenarioFormatError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return 2;
  } catch (const dcoord::ScenarioValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
