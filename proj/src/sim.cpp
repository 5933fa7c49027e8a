#include "dcoord/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dcoord {

namespace {

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

struct AgentRuntime {
  bool single_integrator = false;
  std::optional<AgentDynamics> dynamics;
  std::optional<RegulatorSolution> gains;
  std::vector<double> x;
};

Matrix feedback_for(const Scenario& scenario, const AgentSpec& spec) {
  if (spec.feedback) return *spec.feedback;
  return synthesize_feedback(*spec.dynamics, scenario.state_weight,
                             scenario.input_weight);
}

// Shared by validation and run: builds the per-agent gain bundles, throwing
// on any synthesis or residual failure.
std::vector<AgentRuntime> prepare_agents(const Scenario& scenario) {
  std::vector<AgentRuntime> agents;
  agents.reserve(scenario.agents.size());
  for (const auto& spec : scenario.agents) {
    AgentRuntime rt;
    rt.single_integrator = spec.single_integrator;
    if (!spec.single_integrator) {
      rt.dynamics = spec.dynamics;
      rt.gains = make_regulator(*spec.dynamics, feedback_for(scenario, spec));
    }
    agents.push_back(std::move(rt));
  }
  return agents;
}

void check_initial_shape(
    const std::optional<std::vector<std::vector<double>>>& field,
    const char* name, std::size_t count,
    const std::vector<std::size_t>& dims, std::vector<CheckResult>& checks) {
  if (!field) return;
  CheckResult result{std::string("initial ") + name, true, ""};
  if (field->size() != count) {
    result.passed = false;
    result.detail = "entry count does not match the agent count";
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      if ((*field)[i].size() != dims[i]) {
        result.passed = false;
        result.detail = "entry " + std::to_string(i) + " has dimension " +
                        std::to_string((*field)[i].size()) + ", expected " +
                        std::to_string(dims[i]);
        break;
      }
      for (double v : (*field)[i])
        if (!std::isfinite(v)) {
          result.passed = false;
          result.detail = "entry " + std::to_string(i) + " is not finite";
          break;
        }
    }
  }
  checks.push_back(std::move(result));
}

struct InitialAssignment {
  std::vector<CoordinatorState> coordinators;
  std::vector<std::vector<double>> plant_states;
};

InitialAssignment assign_initial_states(const Scenario& scenario,
                                        std::uint64_t seed) {
  const int n = scenario.topology.size();
  const int q = scenario.costs.dimension();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(-scenario.init.scale,
                                              scenario.init.scale);

  InitialAssignment out;
  out.coordinators.assign(n, CoordinatorState{std::vector<double>(q, 0.0),
                                              std::vector<double>(q, 0.0)});

  if (scenario.init.xi) {
    for (int i = 0; i < n; ++i) out.coordinators[i].xi = (*scenario.init.xi)[i];
  } else if (scenario.init.randomized) {
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < q; ++k) out.coordinators[i].xi[k] = draw(rng);
  }

  if (scenario.init.multiplier) {
    for (int i = 0; i < n; ++i)
      out.coordinators[i].lambda = (*scenario.init.multiplier)[i];
  } else if (scenario.init.randomized) {
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < q; ++k) out.coordinators[i].lambda[k] = draw(rng);
    // Center each multiplier column so column sums start at zero, matching
    // the conservation law of the multiplier update.
    for (int k = 0; k < q; ++k) {
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += out.coordinators[i].lambda[k];
      mean /= n;
      for (int i = 0; i < n; ++i) out.coordinators[i].lambda[k] -= mean;
    }
  }

  out.plant_states.resize(n);
  for (int i = 0; i < n; ++i) {
    const AgentSpec& spec = scenario.agents[i];
    if (spec.single_integrator) {
      // The optimizer runs on this agent's own output.
      if (scenario.init.x && !scenario.init.xi)
        out.coordinators[i].xi = (*scenario.init.x)[i];
      if (scenario.init.x && scenario.init.xi &&
          (*scenario.init.x)[i] != out.coordinators[i].xi)
        throw std::invalid_argument(
            "single-integrator agent " + std::to_string(i) +
            " has initial x different from initial xi");
      out.plant_states[i] = out.coordinators[i].xi;
      continue;
    }
    const int dim = spec.dynamics->state_dim();
    out.plant_states[i].assign(dim, 0.0);
    if (scenario.init.x) {
      out.plant_states[i] = (*scenario.init.x)[i];
    } else if (scenario.init.randomized) {
      for (int k = 0; k < dim; ++k) out.plant_states[i][k] = draw(rng);
    }
  }
  return out;
}

}  // namespace

ValidationReport validate_scenario(const Scenario& scenario) {
  ValidationReport report;
  const int n = scenario.topology.size();
  const int q = scenario.costs.dimension();

  {
    CheckResult c{"agent count", true, ""};
    if (static_cast<int>(scenario.agents.size()) != n ||
        scenario.costs.size() != n) {
      c.passed = false;
      c.detail = "agents, references and topology must agree on the count";
    }
    report.checks.push_back(c);
    if (!c.passed) {
      report.all_passed = false;
      return report;
    }
  }

  {
    CheckResult c{"connectivity", is_connected(scenario.topology), ""};
    c.detail = c.passed ? "graph is connected"
                        : "communication graph is not connected";
    report.checks.push_back(c);
  }

  {
    CheckResult c{"step size", false, ""};
    try {
      const LaplacianView lap = build_laplacian(scenario.topology);
      report.step_bound =
          max_step_size(lap, scenario.costs.lipschitz_constant());
      c.passed = scenario.beta > 0.0 && scenario.beta < report.step_bound;
      c.detail = "beta " + format_value(scenario.beta) +
                 (c.passed ? " < " : " not strictly below ") + "bound " +
                 format_value(report.step_bound);
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    report.checks.push_back(c);
  }

  {
    CheckResult c{"horizon", scenario.horizon >= 1 && scenario.record_stride >= 1,
                  "horizon and record stride must be >= 1"};
    if (c.passed) c.detail = "";
    report.checks.push_back(c);
  }

  for (int i = 0; i < n; ++i) {
    const AgentSpec& spec = scenario.agents[i];
    const std::string tag = "[" + std::to_string(i) + "]";
    if (spec.single_integrator) continue;
    if (!spec.dynamics) {
      report.checks.push_back(
          {"dynamics" + tag, false, "missing dynamics for a linear agent"});
      continue;
    }
    const AgentDynamics& dyn = *spec.dynamics;
    if (dyn.output_dim() != q) {
      report.checks.push_back({"dynamics" + tag, false,
                               "output dimension does not match the decision "
                               "dimension of the cost set"});
      continue;
    }
    report.checks.push_back({"controllability" + tag, check_controllable(dyn),
                             "rank of the controllability block"});
    report.checks.push_back(
        {"regulation rank" + tag, check_regulation_rank(dyn),
         "rank([A - I, B; C, 0]) == n + q"});
    CheckResult gain{"gain certificate" + tag, false, ""};
    try {
      const RegulatorSolution sol =
          make_regulator(dyn, feedback_for(scenario, spec));
      gain.passed = true;
      gain.detail = "residuals " + format_value(sol.residual_dynamics) + ", " +
                    format_value(sol.residual_output) + "; Schur certified";
    } catch (const std::exception& e) {
      gain.detail = e.what();
    }
    report.checks.push_back(std::move(gain));
  }

  std::vector<std::size_t> state_dims(n), q_dims(n, static_cast<std::size_t>(q));
  for (int i = 0; i < n; ++i) {
    const AgentSpec& spec = scenario.agents[i];
    state_dims[i] = (spec.single_integrator || !spec.dynamics)
                        ? static_cast<std::size_t>(q)
                        : static_cast<std::size_t>(spec.dynamics->state_dim());
  }
  check_initial_shape(scenario.init.x, "x", n, state_dims, report.checks);
  check_initial_shape(scenario.init.xi, "xi", n, q_dims, report.checks);
  check_initial_shape(scenario.init.multiplier, "lambda", n, q_dims,
                      report.checks);

  if (scenario.init.x && scenario.init.xi &&
      scenario.init.x->size() == static_cast<std::size_t>(n) &&
      scenario.init.xi->size() == static_cast<std::size_t>(n)) {
    CheckResult c{"initial consistency", true, ""};
    for (int i = 0; i < n; ++i) {
      if (!scenario.agents[i].single_integrator) continue;
      if ((*scenario.init.x)[i] != (*scenario.init.xi)[i]) {
        c.passed = false;
        c.detail = "single-integrator agent " + std::to_string(i) +
                   " has initial x different from initial xi";
        break;
      }
    }
    report.checks.push_back(c);
  }

  {
    CheckResult c{"reschedules", true, ""};
    for (const auto& ev : scenario.reschedules) {
      if (ev.agent < 0 || ev.agent >= n ||
          static_cast<int>(ev.reference.size()) != q || ev.round < 0 ||
          ev.round >= scenario.horizon) {
        c.passed = false;
        c.detail = "event at round " + std::to_string(ev.round) +
                   " has a bad agent index, dimension, or round";
        break;
      }
    }
    report.checks.push_back(c);
  }

  report.all_passed =
      std::all_of(report.checks.begin(), report.checks.end(),
                  [](const CheckResult& c) { return c.passed; });
  return report;
}

std::vector<CoordinatorState> coordinator_round(
    const std::vector<CoordinatorState>& coordinators, const LaplacianView& lap,
    const CostSet& costs, double beta) {
  const int n = static_cast<int>(coordinators.size());
  const int q = costs.dimension();
  PrimalDualState state{Matrix(n, q), Matrix(n, q), beta};
  for (int i = 0; i < n; ++i) {
    state.primal.set_row(i, coordinators[i].xi);
    state.multiplier.set_row(i, coordinators[i].lambda);
  }
  const PrimalDualState next = step_all(state, lap, costs);
  std::vector<CoordinatorState> out(coordinators.size());
  for (int i = 0; i < n; ++i) {
    out[i].xi.assign(next.primal.row(i).begin(), next.primal.row(i).end());
    out[i].lambda.assign(next.multiplier.row(i).begin(),
                         next.multiplier.row(i).end());
  }
  return out;
}

AgentRoundResult agent_round(const LinearAgent& agent,
                             std::span<const double> xi) {
  const AgentDynamics& dyn = agent.dynamics;
  if (static_cast<int>(xi.size()) != dyn.output_dim())
    throw std::invalid_argument("reference dimension mismatch in agent_round");
  if (static_cast<int>(agent.x.size()) != dyn.state_dim())
    throw std::invalid_argument("state dimension mismatch in agent_round");

  AgentRoundResult out;
  const std::vector<double> feedback = agent.gains.K * agent.x;
  const std::vector<double> feedforward = agent.gains.Pi * xi;
  out.input.resize(feedback.size());
  for (std::size_t k = 0; k < feedback.size(); ++k)
    out.input[k] = -feedback[k] + feedforward[k];

  out.output = dyn.C * agent.x;
  const std::vector<double> drift = dyn.A * agent.x;
  const std::vector<double> forced = dyn.B * out.input;
  out.next_state.resize(drift.size());
  for (std::size_t k = 0; k < drift.size(); ++k)
    out.next_state[k] = drift[k] + forced[k];
  return out;
}

std::vector<double> tracking_error(const LinearAgent& agent,
                                   const CoordinatorState& coordinator) {
  const std::vector<double> y = agent.dynamics.C * agent.x;
  return vec_sub(y, coordinator.xi);
}

TrajectoryLog run(const Scenario& scenario, std::uint64_t seed) {
  ValidationReport report = validate_scenario(scenario);
  if (!report.all_passed) {
    std::string reason = "scenario validation failed:";
    for (const auto& c : report.checks)
      if (!c.passed) reason += " [" + c.name + "] " + c.detail;
    throw ScenarioValidationError(reason, std::move(report));
  }

  const int n = scenario.topology.size();
  const LaplacianView lap = build_laplacian(scenario.topology);
  std::vector<AgentRuntime> agents = prepare_agents(scenario);

  InitialAssignment init = assign_initial_states(scenario, seed);
  std::vector<CoordinatorState> coordinators = std::move(init.coordinators);
  for (int i = 0; i < n; ++i) agents[i].x = std::move(init.plant_states[i]);

  std::vector<RescheduleEvent> events = scenario.reschedules;
  std::stable_sort(events.begin(), events.end(),
                   [](const RescheduleEvent& a, const RescheduleEvent& b) {
                     return a.round < b.round;
                   });
  std::size_t next_event = 0;
  CostSet costs = scenario.costs;

  TrajectoryLog log;
  log.rounds.reserve(
      static_cast<std::size_t>(scenario.horizon / scenario.record_stride + 1));

  const auto capture = [&](long round,
                           const std::vector<CoordinatorState>& coord_now,
                           std::vector<std::vector<double>> inputs,
                           std::vector<std::vector<double>> outputs) {
    RoundRecord rec;
    rec.round = round;
    rec.x.resize(n);
    rec.xi.resize(n);
    rec.lambda.resize(n);
    rec.e.resize(n);
    for (int i = 0; i < n; ++i) {
      rec.x[i] = agents[i].x;
      rec.xi[i] = coord_now[i].xi;
      rec.lambda[i] = coord_now[i].lambda;
      rec.e[i] = vec_sub(outputs[i], coord_now[i].xi);
    }
    rec.u = std::move(inputs);
    rec.y = std::move(outputs);
    log.rounds.push_back(std::move(rec));
  };

  // Rounds are logged after the update: the record for round r holds the
  // state reached after r rounds together with the input u(r) that the next
  // transition will apply.
  for (long round = 0; round < scenario.horizon; ++round) {
    while (next_event < events.size() && events[next_event].round == round) {
      costs = costs.reschedule(events[next_event].agent,
                               events[next_event].reference);
      ++next_event;
    }

    const std::vector<CoordinatorState> coord_next =
        coordinator_round(coordinators, lap, costs, scenario.beta);

    std::vector<std::vector<double>> inputs(n), outputs(n), next_x(n);
    for (int i = 0; i < n; ++i) {
      if (agents[i].single_integrator) {
        // y <- y + v with v the realized optimizer step for this agent.
        outputs[i] = agents[i].x;
        inputs[i] = vec_sub(coord_next[i].xi, coordinators[i].xi);
        next_x[i] = coord_next[i].xi;
      } else {
        const LinearAgent view{*agents[i].dynamics, *agents[i].gains,
                               agents[i].x};
        AgentRoundResult step = agent_round(view, coordinators[i].xi);
        outputs[i] = std::move(step.output);
        inputs[i] = std::move(step.input);
        next_x[i] = std::move(step.next_state);
      }
    }

    if (round >= 1 && round % scenario.record_stride == 0)
      capture(round, coordinators, std::move(inputs), std::move(outputs));

    for (int i = 0; i < n; ++i) agents[i].x = std::move(next_x[i]);
    coordinators = coord_next;
  }

  // Final row: state after the full horizon, with the input the next round
  // would apply (one throwaway coordinator step supplies the integrator v).
  const std::vector<CoordinatorState> peek =
      coordinator_round(coordinators, lap, costs, scenario.beta);
  std::vector<std::vector<double>> inputs(n), outputs(n);
  for (int i = 0; i < n; ++i) {
    if (agents[i].single_integrator) {
      outputs[i] = agents[i].x;
      inputs[i] = vec_sub(peek[i].xi, coordinators[i].xi);
    } else {
      const LinearAgent view{*agents[i].dynamics, *agents[i].gains,
                             agents[i].x};
      AgentRoundResult step = agent_round(view, coordinators[i].xi);
      outputs[i] = std::move(step.output);
      inputs[i] = std::move(step.input);
    }
  }
  capture(scenario.horizon, coordinators, std::move(inputs),
          std::move(outputs));

  return log;
}

}  // namespace dcoord
