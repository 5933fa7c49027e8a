#include "dcoord/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dcoord {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& name, const std::string& message) {
  throw ScenarioFormatError(name + ": " + message);
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where, const std::string& name) {
  for (const auto& item : obj.items())
    if (!allowed.contains(item.key()))
      fail(name, "unknown key \"" + item.key() + "\" in " + where);
}

double as_number(const json& v, const std::string& where,
                 const std::string& name) {
  if (!v.is_number()) fail(name, where + " must be a number");
  return v.get<double>();
}

long as_integer(const json& v, const std::string& where,
                const std::string& name) {
  if (!v.is_number_integer()) fail(name, where + " must be an integer");
  return v.get<long>();
}

std::vector<double> as_vector(const json& v, const std::string& where,
                              const std::string& name) {
  if (!v.is_array() || v.empty()) fail(name, where + " must be a non-empty array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& item : v) out.push_back(as_number(item, where, name));
  return out;
}

Matrix as_matrix(const json& v, const std::string& where,
                 const std::string& name) {
  if (!v.is_array() || v.empty())
    fail(name, where + " must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : v) rows.push_back(as_vector(row, where, name));
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows)
    if (row.size() != cols) fail(name, where + " has ragged rows");
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return m;
}

std::vector<std::vector<double>> as_vector_list(const json& v,
                                                const std::string& where,
                                                const std::string& name) {
  if (!v.is_array()) fail(name, where + " must be an array");
  std::vector<std::vector<double>> out;
  for (const auto& item : v) out.push_back(as_vector(item, where, name));
  return out;
}

Topology parse_topology(const json& v, const std::string& name) {
  if (!v.is_object()) fail(name, "topology must be an object");
  require_keys(v, {"n", "edges"}, "topology", name);
  if (!v.contains("n") || !v.contains("edges"))
    fail(name, "topology needs \"n\" and \"edges\"");
  const int n = static_cast<int>(as_integer(v["n"], "topology.n", name));
  std::vector<Edge> edges;
  for (const auto& e : v["edges"]) {
    if (!e.is_array() || (e.size() != 2 && e.size() != 3))
      fail(name, "each edge must be [i, j] or [i, j, weight]");
    Edge edge;
    edge.a = static_cast<int>(as_integer(e[0], "edge endpoint", name));
    edge.b = static_cast<int>(as_integer(e[1], "edge endpoint", name));
    edge.weight = e.size() == 3 ? as_number(e[2], "edge weight", name) : 1.0;
    edges.push_back(edge);
  }
  try {
    return Topology(n, std::move(edges));
  } catch (const std::exception& e) {
    fail(name, std::string("bad topology: ") + e.what());
  }
}

AgentSpec parse_agent(const json& v, std::size_t index,
                      const std::string& name) {
  const std::string where = "agents[" + std::to_string(index) + "]";
  AgentSpec spec;
  if (v.is_string()) {
    if (v.get<std::string>() != "single_integrator")
      fail(name, where + ": the only string form is \"single_integrator\"");
    spec.single_integrator = true;
    return spec;
  }
  if (!v.is_object()) fail(name, where + " must be an object or a string");
  require_keys(v, {"A", "B", "C", "K"}, where, name);
  if (!v.contains("A") || !v.contains("B") || !v.contains("C"))
    fail(name, where + " needs matrices A, B and C");
  try {
    spec.dynamics = AgentDynamics(as_matrix(v["A"], where + ".A", name),
                                  as_matrix(v["B"], where + ".B", name),
                                  as_matrix(v["C"], where + ".C", name));
  } catch (const ScenarioFormatError&) {
    throw;
  } catch (const std::exception& e) {
    fail(name, where + ": " + e.what());
  }
  if (v.contains("K")) {
    spec.feedback = as_matrix(v["K"], where + ".K", name);
    if (spec.feedback->rows() != spec.dynamics->input_dim() ||
        spec.feedback->cols() != spec.dynamics->state_dim())
      fail(name, where + ".K has the wrong shape");
  }
  return spec;
}

InitialStates parse_initial_states(const json& v, const std::string& name) {
  InitialStates init;
  if (!v.is_object()) fail(name, "initial_states must be an object");
  require_keys(v, {"random", "scale", "x", "xi", "lambda"}, "initial_states",
               name);
  if (v.contains("random")) {
    if (!v["random"].is_boolean())
      fail(name, "initial_states.random must be a boolean");
    init.randomized = v["random"].get<bool>();
  }
  if (v.contains("scale")) {
    init.scale = as_number(v["scale"], "initial_states.scale", name);
    if (!(init.scale > 0.0)) fail(name, "initial_states.scale must be positive");
  }
  if (v.contains("x"))
    init.x = as_vector_list(v["x"], "initial_states.x", name);
  if (v.contains("xi"))
    init.xi = as_vector_list(v["xi"], "initial_states.xi", name);
  if (v.contains("lambda"))
    init.multiplier = as_vector_list(v["lambda"], "initial_states.lambda", name);
  return init;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Map the byte offset onto line:column for a readable message.
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ScenarioFormatError(name + ":" + std::to_string(line) + ":" +
                              std::to_string(column) + ": " + e.what());
  }

  if (!doc.is_object()) fail(name, "scenario must be a JSON object");
  require_keys(doc,
               {"agents", "topology", "references", "beta", "horizon",
                "record_stride", "reschedules", "initial_states", "synthesis"},
               "scenario", name);
  for (const char* key : {"agents", "topology", "references", "beta", "horizon"})
    if (!doc.contains(key))
      fail(name, std::string("missing required key \"") + key + "\"");

  Topology topology = parse_topology(doc["topology"], name);

  if (!doc["agents"].is_array()) fail(name, "agents must be an array");
  std::vector<AgentSpec> agents;
  for (std::size_t i = 0; i < doc["agents"].size(); ++i)
    agents.push_back(parse_agent(doc["agents"][i], i, name));

  std::vector<QuadraticTrackingCost> costs;
  for (const auto& r : doc["references"])
    costs.emplace_back(as_vector(r, "references entry", name));
  if (costs.empty()) fail(name, "references must be non-empty");

  std::vector<RescheduleEvent> reschedules;
  if (doc.contains("reschedules")) {
    if (!doc["reschedules"].is_array())
      fail(name, "reschedules must be an array");
    for (const auto& ev : doc["reschedules"]) {
      if (!ev.is_object()) fail(name, "each reschedule must be an object");
      require_keys(ev, {"round", "agent", "reference"}, "reschedule", name);
      if (!ev.contains("round") || !ev.contains("agent") ||
          !ev.contains("reference"))
        fail(name, "reschedule needs round, agent and reference");
      RescheduleEvent event;
      event.round = as_integer(ev["round"], "reschedule.round", name);
      event.agent =
          static_cast<int>(as_integer(ev["agent"], "reschedule.agent", name));
      event.reference = as_vector(ev["reference"], "reschedule.reference", name);
      reschedules.push_back(std::move(event));
    }
  }

  InitialStates init;
  if (doc.contains("initial_states"))
    init = parse_initial_states(doc["initial_states"], name);

  double state_weight = 1.0, input_weight = 1.0;
  if (doc.contains("synthesis")) {
    const json& syn = doc["synthesis"];
    if (!syn.is_object()) fail(name, "synthesis must be an object");
    require_keys(syn, {"state_weight", "input_weight"}, "synthesis", name);
    if (syn.contains("state_weight"))
      state_weight = as_number(syn["state_weight"], "synthesis.state_weight", name);
    if (syn.contains("input_weight"))
      input_weight = as_number(syn["input_weight"], "synthesis.input_weight", name);
    if (!(state_weight > 0.0) || !(input_weight > 0.0))
      fail(name, "synthesis weights must be positive");
  }

  long record_stride = 1;
  if (doc.contains("record_stride"))
    record_stride = as_integer(doc["record_stride"], "record_stride", name);

  try {
    return Scenario{std::move(topology),
                    std::move(agents),
                    CostSet(std::move(costs)),
                    as_number(doc["beta"], "beta", name),
                    as_integer(doc["horizon"], "horizon", name),
                    record_stride,
                    std::move(reschedules),
                    std::move(init),
                    state_weight,
                    input_weight};
  } catch (const ScenarioFormatError&) {
    throw;
  } catch (const std::exception& e) {
    fail(name, e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ScenarioFormatError("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.filename().string());
}

}  // namespace dcoord
