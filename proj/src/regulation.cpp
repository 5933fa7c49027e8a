#include "dcoord/regulation.hpp"

#include <cmath>

namespace dcoord {

AgentDynamics::AgentDynamics(Matrix a, Matrix b, Matrix c)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)) {
  if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
  if (B.rows() != A.rows())
    throw std::invalid_argument("B row count must match the state dimension");
  if (C.cols() != A.rows())
    throw std::invalid_argument("C column count must match the state dimension");
  if (A.rows() < 1 || B.cols() < 1 || C.rows() < 1)
    throw std::invalid_argument("dynamics dimensions must be positive");
  if (!A.all_finite() || !B.all_finite() || !C.all_finite())
    throw std::invalid_argument("dynamics entries must be finite");
}

bool check_controllable(const AgentDynamics& dyn) {
  const int n = dyn.state_dim();
  const int p = dyn.input_dim();
  Matrix block = dyn.B;
  Matrix ctrb(n, n * p);
  for (int k = 0; k < n; ++k) {
    if (k > 0) block = dyn.A * block;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) ctrb(i, k * p + j) = block(i, j);
  }
  return numerical_rank(ctrb) == n;
}

namespace {

// [A - I, B; C, 0], the (n+q) x (n+p) solvability block.
Matrix regulation_block(const AgentDynamics& dyn) {
  const int n = dyn.state_dim();
  const int p = dyn.input_dim();
  const int q = dyn.output_dim();
  Matrix block(n + q, n + p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      block(i, j) = dyn.A(i, j) - (i == j ? 1.0 : 0.0);
    for (int j = 0; j < p; ++j) block(i, n + j) = dyn.B(i, j);
  }
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < n; ++j) block(n + i, j) = dyn.C(i, j);
  return block;
}

}  // namespace

bool check_regulation_rank(const AgentDynamics& dyn) {
  const Matrix block = regulation_block(dyn);
  return numerical_rank(block) == dyn.state_dim() + dyn.output_dim();
}

RegulatorGains solve_regulator(const AgentDynamics& dyn) {
  if (!check_regulation_rank(dyn))
    throw RegulationError(
        "regulator equations unsolvable: rank([A - I, B; C, 0]) != n + q");
  const int n = dyn.state_dim();
  const int p = dyn.input_dim();
  const int q = dyn.output_dim();

  const Matrix block = regulation_block(dyn);
  Matrix rhs(n + q, q);
  for (int i = 0; i < q; ++i) rhs(n + i, i) = 1.0;

  // The right-hand-side columns decouple, so solve against the block itself
  // rather than its identity-Kronecker lift.
  Matrix stacked;  // (n + p) x q, rows split into Psi and G
  if (n + p == n + q) {
    stacked = lu_solve(block, rhs);
  } else {
    // Wide block (p > q): minimum-norm solution through the normal equations
    // of the transposed system.
    const Matrix gram = block * block.transposed();
    stacked = block.transposed() * lu_solve(gram, rhs);
  }

  RegulatorGains gains{Matrix(n, q), Matrix(p, q)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < q; ++j) gains.Psi(i, j) = stacked(i, j);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j) gains.G(i, j) = stacked(n + i, j);
  return gains;
}

bool is_schur(const Matrix& M) {
  const DlyapResult cert = dlyap_solve(M);
  return cert.solvable && cert.positive_definite;
}

Matrix synthesize_feedback(const AgentDynamics& dyn, double state_weight,
                           double input_weight) {
  if (!(state_weight > 0.0) || !(input_weight > 0.0))
    throw std::invalid_argument("synthesis weights must be positive");
  if (!check_controllable(dyn))
    throw SynthesisError("feedback synthesis requires a controllable pair");

  const int n = dyn.state_dim();
  const Matrix Q = state_weight * Matrix::identity(n);
  const Matrix R = input_weight * Matrix::identity(dyn.input_dim());
  const Matrix At = dyn.A.transposed();
  const Matrix Bt = dyn.B.transposed();

  Matrix P = Q;
  bool converged = false;
  for (int iter = 0; iter < 10000; ++iter) {
    const Matrix PA = P * dyn.A;
    const Matrix PB = P * dyn.B;
    const Matrix gain = lu_solve(R + Bt * PB, Bt * PA);  // (R + Bt P B)^-1 Bt P A
    const Matrix next = Q + At * PA - (At * PB) * gain;
    const double delta = (next - P).max_abs();
    P = next;
    if (delta < 1e-12) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw SynthesisError("Riccati iteration did not converge in 10000 steps");

  const Matrix PB = P * dyn.B;
  const Matrix K = lu_solve(R + Bt * PB, Bt * (P * dyn.A));
  if (!is_schur(dyn.A - dyn.B * K))
    throw SynthesisError("synthesized closed loop failed Schur certification");
  return K;
}

RegulatorSolution make_regulator(const AgentDynamics& dyn, const Matrix& K) {
  if (K.rows() != dyn.input_dim() || K.cols() != dyn.state_dim())
    throw std::invalid_argument("feedback gain shape mismatch");
  const RegulatorGains gains = solve_regulator(dyn);

  RegulatorSolution sol;
  sol.Psi = gains.Psi;
  sol.G = gains.G;
  sol.K = K;
  sol.Pi = gains.G + K * gains.Psi;

  const int n = dyn.state_dim();
  const Matrix eye_n = Matrix::identity(n);
  sol.residual_dynamics = ((dyn.A - eye_n) * sol.Psi + dyn.B * sol.G).max_abs();
  sol.residual_output =
      (dyn.C * sol.Psi - Matrix::identity(dyn.output_dim())).max_abs();
  if (sol.residual_dynamics >= 1e-10 || sol.residual_output >= 1e-10)
    throw RegulationError("regulator equation residuals exceed 1e-10");
  if (!is_schur(dyn.A - dyn.B * K))
    throw SynthesisError("closed loop A - B K is not Schur certified");
  return sol;
}

}  // namespace dcoord
