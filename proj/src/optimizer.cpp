#include "dcoord/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace dcoord {

LocalUpdate local_update(std::span<const double> own_primal,
                         std::span<const double> own_multiplier,
                         double own_weight,
                         std::span<const NeighborMessage> messages,
                         std::span<const double> gradient, double beta) {
  const std::size_t q = own_primal.size();
  if (own_multiplier.size() != q || gradient.size() != q)
    throw std::invalid_argument("local_update dimension mismatch");
  if (!(beta > 0.0))
    throw std::invalid_argument("step size must be strictly positive");

  // Laplacian action on the primal and multiplier at this row: own diagonal
  // term first, then neighbors in message order.
  std::vector<double> lap_primal(q), lap_multiplier(q);
  for (std::size_t k = 0; k < q; ++k) {
    lap_primal[k] = own_weight * own_primal[k];
    lap_multiplier[k] = own_weight * own_multiplier[k];
  }
  for (const auto& msg : messages) {
    if (msg.primal_value.size() != q || msg.multiplier_value.size() != q)
      throw std::invalid_argument("neighbor message dimension mismatch");
    for (std::size_t k = 0; k < q; ++k) {
      lap_primal[k] += msg.weight * msg.primal_value[k];
      lap_multiplier[k] += msg.weight * msg.multiplier_value[k];
    }
  }

  LocalUpdate out;
  out.primal.resize(q);
  out.multiplier.resize(q);
  for (std::size_t k = 0; k < q; ++k) {
    out.primal[k] =
        own_primal[k] - beta * (lap_primal[k] + lap_multiplier[k] + gradient[k]);
    out.multiplier[k] = own_multiplier[k] + beta * lap_primal[k];
  }
  return out;
}

PrimalDualState step_all(const PrimalDualState& state, const LaplacianView& lap,
                         const CostSet& costs) {
  const int n = state.primal.rows();
  const int q = state.primal.cols();
  if (state.multiplier.rows() != n || state.multiplier.cols() != q)
    throw std::invalid_argument("primal/multiplier shape mismatch");
  if (lap.order() != n || costs.size() != n || costs.dimension() != q)
    throw std::invalid_argument("state shape does not match graph or costs");

  const Matrix& L = lap.matrix();
  PrimalDualState next{Matrix(n, q), Matrix(n, q), state.step};
  std::vector<NeighborMessage> messages;
  for (int i = 0; i < n; ++i) {
    messages.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i || L(i, j) == 0.0) continue;
      NeighborMessage msg;
      msg.sender = j;
      msg.weight = L(i, j);
      msg.primal_value.assign(state.primal.row(j).begin(),
                              state.primal.row(j).end());
      msg.multiplier_value.assign(state.multiplier.row(j).begin(),
                                  state.multiplier.row(j).end());
      messages.push_back(std::move(msg));
    }
    const std::vector<double> gradient = costs.at(i).grad(state.primal.row(i));
    const LocalUpdate updated =
        local_update(state.primal.row(i), state.multiplier.row(i), L(i, i),
                     messages, gradient, state.step);
    next.primal.set_row(i, updated.primal);
    next.multiplier.set_row(i, updated.multiplier);
  }
  return next;
}

namespace {

// (L x I_q) applied to a row-stacked N x q matrix is just L * X.
Matrix laplacian_apply(const LaplacianView& lap, const Matrix& x) {
  return lap.matrix() * x;
}

}  // namespace

EquilibriumResidual equilibrium_residual(const PrimalDualState& state,
                                         const LaplacianView& lap,
                                         const CostSet& costs) {
  const Matrix lap_primal = laplacian_apply(lap, state.primal);
  Matrix stationarity = lap_primal + laplacian_apply(lap, state.multiplier);
  for (int i = 0; i < state.primal.rows(); ++i) {
    const std::vector<double> g = costs.at(i).grad(state.primal.row(i));
    for (int k = 0; k < state.primal.cols(); ++k) stationarity(i, k) += g[k];
  }
  return {lap_primal.frobenius_norm(), stationarity.frobenius_norm()};
}

Matrix lyapunov_weight(const LaplacianView& lap, double beta) {
  const Matrix& L = lap.matrix();
  return Matrix::identity(lap.order()) - beta * L + (beta * beta) * (L * L);
}

double lyapunov_quadratic(const Matrix& weight, const Matrix& dprimal,
                          const Matrix& dmultiplier) {
  const Matrix weighted = weight * dprimal;
  double value = 0.0;
  for (int i = 0; i < dprimal.rows(); ++i)
    for (int k = 0; k < dprimal.cols(); ++k)
      value += dprimal(i, k) * weighted(i, k);
  for (int i = 0; i < dmultiplier.rows(); ++i)
    for (int k = 0; k < dmultiplier.cols(); ++k)
      value += dmultiplier(i, k) * dmultiplier(i, k);
  return value;
}

double lyapunov_value(const PrimalDualState& state, const SaddlePoint& saddle,
                      const LaplacianView& lap, double beta) {
  const std::vector<double> spectrum = laplacian_spectrum(lap);
  const double lambda_max = spectrum.empty() ? 0.0 : spectrum.back();
  if (!(beta > 0.0) || !(lambda_max > 0.0) || beta >= 1.0 / (2.0 * lambda_max))
    throw std::invalid_argument(
        "step size outside the admissible range for the Lyapunov weight");
  const Matrix weight = lyapunov_weight(lap, beta);
  return lyapunov_quadratic(weight, state.primal - saddle.primal,
                            state.multiplier - saddle.multiplier);
}

}  // namespace dcoord
