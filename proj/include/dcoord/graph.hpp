// Undirected weighted communication graphs, their Laplacians, and the
// step-size bound derived from the Laplacian spectrum.
#pragma once

#include <vector>

#include "dcoord/matrix.hpp"

namespace dcoord {

struct Edge {
  int a = 0;
  int b = 0;
  double weight = 1.0;
};

/// Undirected communication graph. Edges are stored with a < b; the implied
/// adjacency is symmetric. Immutable after construction.
class Topology {
 public:
  Topology(int n_agents, std::vector<Edge> edges);

  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<int> neighbors(int node) const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

/// Dense Laplacian of a Topology. Construction validates symmetry, zero row
/// sums, and the sign pattern (off-diagonal <= 0, diagonal >= 0).
class LaplacianView {
 public:
  explicit LaplacianView(Matrix entries);

  int order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

LaplacianView build_laplacian(const Topology& topology);

/// Breadth-first reachability from node 0.
bool is_connected(const Topology& topology);

/// All eigenvalues of the Laplacian, ascending.
std::vector<double> laplacian_spectrum(const LaplacianView& lap);

/// min(1/(2*lambda_max), 3/(2*lipschitz)). A step size is admissible iff it
/// is strictly below this value. Rejects edgeless graphs (lambda_max = 0).
double max_step_size(const LaplacianView& lap, double lipschitz);

}  // namespace dcoord
