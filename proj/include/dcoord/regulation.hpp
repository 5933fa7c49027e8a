// Output-regulation synthesis for discrete-time linear agents: solvability
// checks, the regulator equations (A - I) Psi + B G = 0, C Psi = I, feedback
// gain synthesis by a Riccati fixed point, and Schur certification.
#pragma once

#include <stdexcept>
#include <string>

#include "dcoord/matrix.hpp"

namespace dcoord {

struct RegulationError : std::runtime_error {
  explicit RegulationError(const std::string& what) : std::runtime_error(what) {}
};

struct SynthesisError : std::runtime_error {
  explicit SynthesisError(const std::string& what) : std::runtime_error(what) {}
};

/// One agent's plant x(k+1) = A x(k) + B u(k), y(k) = C x(k).
struct AgentDynamics {
  Matrix A;  // n x n
  Matrix B;  // n x p
  Matrix C;  // q x n

  AgentDynamics(Matrix a, Matrix b, Matrix c);

  int state_dim() const { return A.rows(); }
  int input_dim() const { return B.cols(); }
  int output_dim() const { return C.rows(); }
};

/// Synthesized tracking gains for one agent. Pi = G + K * Psi is the
/// feedforward gain applied to the coordinator reference.
struct RegulatorSolution {
  Matrix Psi;  // n x q
  Matrix G;    // p x q
  Matrix K;    // p x n
  Matrix Pi;   // p x q
  double residual_dynamics = 0.0;  // ||(A - I) Psi + B G||_max
  double residual_output = 0.0;    // ||C Psi - I||_max
};

/// rank([B, AB, ..., A^(n-1) B]) == n.
bool check_controllable(const AgentDynamics& dyn);

/// rank([A - I, B; C, 0]) == n + q, the solvability condition of the
/// regulator equations.
bool check_regulation_rank(const AgentDynamics& dyn);

struct RegulatorGains {
  Matrix Psi;
  Matrix G;
};

/// Solves the regulator equations column by column against the block matrix
/// [A - I, B; C, 0]; square systems use LU, wide systems (p > q) take the
/// minimum-norm solution. Throws RegulationError when the rank condition
/// fails. Residuals of accepted solutions stay below 1e-10.
RegulatorGains solve_regulator(const AgentDynamics& dyn);

/// State feedback K from the discrete Riccati fixed point with Q =
/// state_weight * I and R = input_weight * I, iterated from P = Q until the
/// update falls below 1e-12 (at most 10000 iterations). The closed loop
/// A - B K is certified Schur before the gain is returned.
Matrix synthesize_feedback(const AgentDynamics& dyn, double state_weight,
                           double input_weight);

/// Schur stability via the discrete Lyapunov certificate.
bool is_schur(const Matrix& M);

/// Full gain bundle for one agent: regulator equations plus the supplied
/// feedback gain. Validates the residual contract and the Schur certificate.
RegulatorSolution make_regulator(const AgentDynamics& dyn, const Matrix& K);

}  // namespace dcoord
