#include "dcoord/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>

namespace dcoord {

Topology::Topology(int n_agents, std::vector<Edge> edges)
    : n_(n_agents), edges_(std::move(edges)) {
  if (n_ < 1) throw std::invalid_argument("topology needs at least one node");
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.a == e.b)
      throw std::invalid_argument("self-loop on node " + std::to_string(e.a));
    if (e.a < 0 || e.b < 0 || e.a >= n_ || e.b >= n_)
      throw std::invalid_argument("edge endpoint out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw std::invalid_argument("edge weight must be positive and finite");
    if (e.a > e.b) std::swap(e.a, e.b);
    if (!seen.insert({e.a, e.b}).second)
      throw std::invalid_argument("duplicate edge (" + std::to_string(e.a) +
                                  "," + std::to_string(e.b) + ")");
  }
}

std::vector<int> Topology::neighbors(int node) const {
  std::vector<int> out;
  for (const auto& e : edges_) {
    if (e.a == node) out.push_back(e.b);
    if (e.b == node) out.push_back(e.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

LaplacianView::LaplacianView(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols())
    throw std::invalid_argument("laplacian must be square");
  const int n = m_.rows();
  const double tol = 1e-12 * std::max(1.0, m_.max_abs());
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      row_sum += m_(i, j);
      if (std::abs(m_(i, j) - m_(j, i)) > tol)
        throw std::invalid_argument("laplacian must be symmetric");
      if (i != j && m_(i, j) > tol)
        throw std::invalid_argument("laplacian off-diagonal must be <= 0");
    }
    if (m_(i, i) < -tol)
      throw std::invalid_argument("laplacian diagonal must be >= 0");
    if (std::abs(row_sum) > tol)
      throw std::invalid_argument("laplacian rows must sum to zero");
  }
}

LaplacianView build_laplacian(const Topology& topology) {
  const int n = topology.size();
  Matrix lap(n, n);
  for (const auto& e : topology.edges()) {
    lap(e.a, e.b) = -e.weight;
    lap(e.b, e.a) = -e.weight;
    lap(e.a, e.a) += e.weight;
    lap(e.b, e.b) += e.weight;
  }
  return LaplacianView(std::move(lap));
}

bool is_connected(const Topology& topology) {
  const int n = topology.size();
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : topology.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == n;
}

std::vector<double> laplacian_spectrum(const LaplacianView& lap) {
  return symmetric_eig(lap.matrix());
}

double max_step_size(const LaplacianView& lap, double lipschitz) {
  if (!(lipschitz > 0.0))
    throw std::invalid_argument("lipschitz constant must be positive");
  const std::vector<double> spectrum = laplacian_spectrum(lap);
  const double lambda_max = spectrum.empty() ? 0.0 : spectrum.back();
  if (lambda_max <= 1e-12)
    throw std::invalid_argument(
        "step-size bound undefined: graph has no edges (lambda_max = 0)");
  return std::min(1.0 / (2.0 * lambda_max), 3.0 / (2.0 * lipschitz));
}

}  // namespace dcoord
