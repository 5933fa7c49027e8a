#include "dcoord/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dcoord {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("bad numeric field \"" + s + "\" in CSV");
  return v;
}

Matrix stack_rows(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  const int q = n == 0 ? 0 : static_cast<int>(rows.front().size());
  Matrix m(n, q);
  for (int i = 0; i < n; ++i) m.set_row(i, rows[static_cast<std::size_t>(i)]);
  return m;
}

double max_tracking_error(const RoundRecord& rec) {
  double worst = 0.0;
  for (const auto& e : rec.e) worst = std::max(worst, norm(e));
  return worst;
}

std::vector<double> mean_output(const RoundRecord& rec) {
  const std::size_t q = rec.y.front().size();
  std::vector<double> mean(q, 0.0);
  for (const auto& y : rec.y)
    for (std::size_t k = 0; k < q; ++k) mean[k] += y[k];
  for (std::size_t k = 0; k < q; ++k) mean[k] /= static_cast<double>(rec.y.size());
  return mean;
}

/// References active at a given round, after all events up to it.
CostSet costs_at_round(const Scenario& scenario, long round) {
  std::vector<RescheduleEvent> events = scenario.reschedules;
  std::stable_sort(events.begin(), events.end(),
                   [](const RescheduleEvent& a, const RescheduleEvent& b) {
                     return a.round < b.round;
                   });
  CostSet costs = scenario.costs;
  for (const auto& ev : events)
    if (ev.round <= round) costs = costs.reschedule(ev.agent, ev.reference);
  return costs;
}

long last_event_round(const Scenario& scenario) {
  long last = 0;
  for (const auto& ev : scenario.reschedules) last = std::max(last, ev.round);
  return last;
}

}  // namespace

std::vector<std::pair<long, double>> consensus_series(const TrajectoryLog& log,
                                                      const LaplacianView& lap) {
  std::vector<std::pair<long, double>> out;
  out.reserve(log.rounds.size());
  for (const auto& rec : log.rounds) {
    const Matrix xi = stack_rows(rec.xi);
    out.emplace_back(rec.round, (lap.matrix() * xi).frobenius_norm());
  }
  return out;
}

std::vector<std::pair<long, double>> mean_distance_series(
    const TrajectoryLog& log, const Scenario& scenario) {
  std::vector<std::pair<long, double>> out;
  out.reserve(log.rounds.size());
  for (const auto& rec : log.rounds) {
    const std::vector<double> target =
        costs_at_round(scenario, rec.round).global_optimum();
    out.emplace_back(rec.round, norm(vec_sub(mean_output(rec), target)));
  }
  return out;
}

std::vector<std::pair<long, double>> lyapunov_series(const TrajectoryLog& log,
                                                     const Matrix& weight) {
  std::vector<std::pair<long, double>> out;
  if (log.rounds.size() < 2) return out;
  const RoundRecord& last = log.rounds.back();
  const Matrix saddle_xi = stack_rows(last.xi);
  const Matrix saddle_lambda = stack_rows(last.lambda);
  for (std::size_t idx = 0; idx + 1 < log.rounds.size(); ++idx) {
    const RoundRecord& now = log.rounds[idx];
    const RoundRecord& next = log.rounds[idx + 1];
    if (next.round != now.round + 1) continue;  // pairing needs adjacent rounds
    const Matrix dxi = stack_rows(now.xi) - saddle_xi;
    const Matrix dlambda = stack_rows(next.lambda) - saddle_lambda;
    out.emplace_back(now.round, lyapunov_quadratic(weight, dxi, dlambda));
  }
  return out;
}

RunReport compute_report(const TrajectoryLog& log, const Scenario& scenario) {
  if (log.rounds.empty())
    throw std::invalid_argument("cannot report on an empty log");
  RunReport report;
  const RoundRecord& final_rec = log.rounds.back();
  const LaplacianView lap = build_laplacian(scenario.topology);

  report.final_consensus_error =
      (lap.matrix() * stack_rows(final_rec.xi)).frobenius_norm();
  report.final_max_tracking_error = max_tracking_error(final_rec);

  const std::vector<double> optimum =
      costs_at_round(scenario, scenario.horizon).global_optimum();
  report.final_mean_optimum_distance =
      norm(vec_sub(mean_output(final_rec), optimum));

  const long settle_start = last_event_round(scenario);
  const std::vector<std::pair<std::string, double>> thresholds = {
      {"1e-2", 1e-2}, {"1e-3", 1e-3}, {"1e-4", 1e-4}};
  for (const auto& [label, value] : thresholds) {
    long first = -1;
    for (const auto& rec : log.rounds) {
      if (rec.round < settle_start) continue;
      double worst = 0.0;
      for (const auto& y : rec.y)
        worst = std::max(worst, norm(vec_sub(y, optimum)));
      if (worst <= value) {
        first = rec.round;
        break;
      }
    }
    report.first_round_below[label] = first;
  }

  const Matrix weight = lyapunov_weight(lap, scenario.beta);
  const auto series = lyapunov_series(log, weight);
  report.lyapunov_monotone = true;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    if (series[i].first < settle_start ||
        series[i + 1].first != series[i].first + 1)
      continue;
    ++report.lyapunov_pairs;
    if (series[i + 1].second > series[i].second + 1e-12)
      report.lyapunov_monotone = false;
  }
  return report;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const TrajectoryLog& log) {
  if (log.rounds.empty())
    throw std::invalid_argument("refusing to write an empty trajectory");
  const RoundRecord& first = log.rounds.front();
  const int n = static_cast<int>(first.x.size());
  const int q = static_cast<int>(first.y.front().size());
  std::size_t x_max = 0, u_max = 0;
  for (int i = 0; i < n; ++i) {
    x_max = std::max(x_max, first.x[i].size());
    u_max = std::max(u_max, first.u[i].size());
  }

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write trajectory CSV " + path.string());

  out << "round,agent";
  const auto emit_header = [&](const char* prefix, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) out << ',' << prefix << k;
  };
  emit_header("x", x_max);
  emit_header("y", q);
  emit_header("xi", q);
  emit_header("lambda", q);
  emit_header("u", u_max);
  emit_header("e", q);
  out << '\n';

  const auto emit_cells = [&](const std::vector<double>& v, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      out << ',';
      if (k < v.size()) out << format_double(v[k]);
    }
  };
  for (const auto& rec : log.rounds) {
    for (int i = 0; i < n; ++i) {
      out << rec.round << ',' << i;
      emit_cells(rec.x[i], x_max);
      emit_cells(rec.y[i], q);
      emit_cells(rec.xi[i], q);
      emit_cells(rec.lambda[i], q);
      emit_cells(rec.u[i], u_max);
      emit_cells(rec.e[i], q);
      out << '\n';
    }
  }
}

TrajectoryLog read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open trajectory CSV " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty trajectory CSV " + path.string());

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  // Column spans per block, inferred from the header prefixes.
  const auto count_prefix = [&](const std::string& prefix) {
    std::size_t count = 0;
    for (const auto& h : header)
      if (h.size() > prefix.size() && h.compare(0, prefix.size(), prefix) == 0 &&
          std::isdigit(static_cast<unsigned char>(h[prefix.size()])))
        ++count;
    return count;
  };
  const std::size_t x_max = count_prefix("x");
  const std::size_t q = count_prefix("y");
  const std::size_t u_max = count_prefix("u");

  TrajectoryLog log;
  RoundRecord current;
  bool open = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells.resize(header.size());  // trailing empty cells

    const long round = static_cast<long>(parse_double(cells[0]));
    if (!open || round != current.round) {
      if (open) log.rounds.push_back(std::move(current));
      current = RoundRecord{};
      current.round = round;
      open = true;
    }
    std::size_t pos = 2;
    const auto take = [&](std::size_t count) {
      std::vector<double> v;
      for (std::size_t k = 0; k < count; ++k, ++pos)
        if (!cells[pos].empty()) v.push_back(parse_double(cells[pos]));
      return v;
    };
    current.x.push_back(take(x_max));
    current.y.push_back(take(q));
    current.xi.push_back(take(q));
    current.lambda.push_back(take(q));
    current.u.push_back(take(u_max));
    current.e.push_back(take(q));
  }
  if (open) log.rounds.push_back(std::move(current));
  return log;
}

void write_metrics_json(const std::filesystem::path& path,
                        const RunReport& report) {
  nlohmann::ordered_json doc;
  doc["final_consensus_error"] = report.final_consensus_error;
  doc["final_max_tracking_error"] = report.final_max_tracking_error;
  doc["final_mean_optimum_distance"] = report.final_mean_optimum_distance;
  doc["first_round_below"] = report.first_round_below;
  doc["lyapunov_monotone"] = report.lyapunov_monotone;
  doc["lyapunov_pairs"] = report.lyapunov_pairs;
  doc["wall_clock_ms"] = report.wall_clock_ms;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace dcoord
