// Neighbor-only discrete-time primal-dual consensus optimizer.
//
// Each agent keeps a decision row y_i and a multiplier row lambda_i and,
// once per synchronous round, moves by
//   y_i      <- y_i - beta * ( (L y)_i + (L lambda)_i + grad f_i(y_i) )
//   lambda_i <- lambda_i + beta * (L y)_i
// where the Laplacian action (L v)_i is the agent's own diagonal term plus
// the weighted neighbor terms, so the only non-local inputs are neighbor
// messages carrying (y_j, lambda_j).
#pragma once

#include <span>
#include <vector>

#include "dcoord/costs.hpp"
#include "dcoord/graph.hpp"
#include "dcoord/matrix.hpp"

namespace dcoord {

/// One synchronous snapshot of the network: row i of primal/multiplier is
/// agent i's pair. The step size must sit strictly below max_step_size for
/// the scenario's graph and costs; sim validation enforces that.
struct PrimalDualState {
  Matrix primal;      // N x q
  Matrix multiplier;  // N x q
  double step = 0.0;
};

/// What a neighbor shares in one round. weight is the Laplacian entry l_ij
/// of the receiving agent's row (-a_ij, so <= 0).
struct NeighborMessage {
  int sender = -1;
  double weight = 0.0;
  std::vector<double> primal_value;
  std::vector<double> multiplier_value;
};

struct LocalUpdate {
  std::vector<double> primal;
  std::vector<double> multiplier;
};

/// Single-agent update from the agent's own state plus neighbor messages.
/// own_weight is the diagonal Laplacian term l_ii. Messages must come from
/// graph neighbors only; the signature admits no other state.
LocalUpdate local_update(std::span<const double> own_primal,
                         std::span<const double> own_multiplier,
                         double own_weight,
                         std::span<const NeighborMessage> messages,
                         std::span<const double> gradient, double beta);

/// Synchronous round over all agents: every agent reads the pre-step state
/// and writes the post-step state. Equals local_update applied row by row.
PrimalDualState step_all(const PrimalDualState& state, const LaplacianView& lap,
                         const CostSet& costs);

struct EquilibriumResidual {
  double consensus = 0.0;     // ||(L x I) Y||
  double stationarity = 0.0;  // ||(L x I) Y + (L x I) Lambda + grad F(Y)||
};

EquilibriumResidual equilibrium_residual(const PrimalDualState& state,
                                         const LaplacianView& lap,
                                         const CostSet& costs);

struct SaddlePoint {
  Matrix primal;
  Matrix multiplier;
};

/// N x N weight M = I - beta L + beta^2 L^2; the Lyapunov quadratic uses
/// M x I_q applied to the stacked primal error.
Matrix lyapunov_weight(const LaplacianView& lap, double beta);

/// <dY, (M x I) dY> + ||dLambda||^2 for row-stacked error matrices.
double lyapunov_quadratic(const Matrix& weight, const Matrix& dprimal,
                          const Matrix& dmultiplier);

/// Lyapunov diagnostic against a reference saddle. Rejects step sizes at or
/// above 1/(2 lambda_max), the admissible range of the convergence bound.
double lyapunov_value(const PrimalDualState& state, const SaddlePoint& saddle,
                      const LaplacianView& lap, double beta);

}  // namespace dcoord
