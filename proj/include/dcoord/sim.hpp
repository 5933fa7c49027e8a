// Synchronous closed-loop simulation. Every round the per-agent coordinators
// advance the primal-dual optimizer over the network to regenerate the
// tracking reference, then each plant applies u = -K x + Pi xi and steps its
// dynamics; single-integrator agents follow the optimizer directly.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcoord/costs.hpp"
#include "dcoord/graph.hpp"
#include "dcoord/optimizer.hpp"
#include "dcoord/regulation.hpp"

namespace dcoord {

/// Internal reference generator state of one agent.
struct CoordinatorState {
  std::vector<double> xi;
  std::vector<double> lambda;
};

struct LinearAgent {
  AgentDynamics dynamics;
  RegulatorSolution gains;
  std::vector<double> x;
};

struct RescheduleEvent {
  long round = 0;
  int agent = 0;
  std::vector<double> reference;
};

struct InitialStates {
  bool randomized = false;
  double scale = 1.0;
  std::optional<std::vector<std::vector<double>>> x;
  std::optional<std::vector<std::vector<double>>> xi;
  std::optional<std::vector<std::vector<double>>> multiplier;
};

/// One agent's scenario entry: either a single integrator or a linear plant
/// with an optional explicit feedback gain (otherwise synthesized).
struct AgentSpec {
  bool single_integrator = false;
  std::optional<AgentDynamics> dynamics;
  std::optional<Matrix> feedback;
};

struct Scenario {
  Topology topology;
  std::vector<AgentSpec> agents;
  CostSet costs;
  double beta = 0.0;
  long horizon = 0;
  long record_stride = 1;
  std::vector<RescheduleEvent> reschedules;
  InitialStates init;
  double state_weight = 1.0;
  double input_weight = 1.0;
};

/// State snapshot at one recorded round; vectors are indexed by agent and
/// may have heterogeneous state/input lengths.
struct RoundRecord {
  long round = 0;
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> xi;
  std::vector<std::vector<double>> lambda;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> e;

  bool operator==(const RoundRecord&) const = default;
};

struct TrajectoryLog {
  std::vector<RoundRecord> rounds;

  bool operator==(const TrajectoryLog&) const = default;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed = false;
  double step_bound = 0.0;
};

struct ScenarioValidationError : std::runtime_error {
  explicit ScenarioValidationError(std::string what, ValidationReport r)
      : std::runtime_error(std::move(what)), report(std::move(r)) {}
  ValidationReport report;
};

/// Runs every assumption and bound check: connectivity, step-size bound,
/// per-agent controllability, regulation rank, regulator residuals, Schur
/// certificate, and initial-state shape consistency.
ValidationReport validate_scenario(const Scenario& scenario);

/// One synchronous coordinator round; the same map as optimizer::step_all
/// applied to the stacked (xi, lambda) state.
std::vector<CoordinatorState> coordinator_round(
    const std::vector<CoordinatorState>& coordinators, const LaplacianView& lap,
    const CostSet& costs, double beta);

struct AgentRoundResult {
  std::vector<double> next_state;
  std::vector<double> input;   // u(k), from the pre-update state
  std::vector<double> output;  // y(k) = C x(k)
};

/// u = -K x + Pi xi; x' = A x + B u; the reported output belongs to the
/// pre-update state.
AgentRoundResult agent_round(const LinearAgent& agent,
                             std::span<const double> xi);

/// e = y - xi; equals C (x - Psi xi) because C Psi = I.
std::vector<double> tracking_error(const LinearAgent& agent,
                                   const CoordinatorState& coordinator);

/// Executes the scenario for its full horizon. Rounds are logged after the
/// update at multiples of record_stride plus the final round, giving
/// ceil(horizon / record_stride) rows. The seed only matters when the
/// scenario requests randomized initial states.
TrajectoryLog run(const Scenario& scenario, std::uint64_t seed = 0);

}  // namespace dcoord
