// Dense row-major matrix type and the numerical kernels the rest of the
// library is built on: LU solve with partial pivoting, Kronecker products,
// cyclic-Jacobi symmetric eigenvalues, numerical rank, and a discrete
// Lyapunov certificate for Schur stability.
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcoord {

struct SingularMatrixError : std::runtime_error {
  explicit SingularMatrixError(const std::string& what)
      : std::runtime_error(what) {}
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols);                            // zero-filled
  Matrix(int rows, int cols, std::vector<double> data);  // row-major

  static Matrix identity(int n);
  static Matrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) { return data_[index(r, c)]; }
  double operator()(int r, int c) const { return data_[index(r, c)]; }

  std::span<const double> row(int r) const;
  std::span<double> row(int r);
  void set_row(int r, std::span<const double> values);

  const std::vector<double>& data() const { return data_; }

  Matrix transposed() const;
  double max_abs() const;
  double frobenius_norm() const;
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
std::vector<double> operator*(const Matrix& a, std::span<const double> v);

/// Solves A X = B for square A by LU with partial pivoting. Throws
/// SingularMatrixError when a pivot falls below 1e-12 times the largest
/// entry of A.
Matrix lu_solve(const Matrix& A, const Matrix& B);

Matrix kron(const Matrix& A, const Matrix& B);

/// Count of singular values above tol * sigma_max, obtained from the
/// eigenvalues of AtA. Matrices here are tiny, so the squared conditioning
/// is acceptable; the effective tolerance is floored at the noise
/// resolution of the Gram route, sqrt(dim * eps).
int numerical_rank(const Matrix& A, double tol = 1e-9);

struct DlyapResult {
  Matrix P;
  bool solvable = false;
  bool positive_definite = false;
};

/// Solves Mt P M - P = -I by vectorization. positive_definite certifies
/// spectral radius(M) < 1. An unsolvable system means some eigenvalue pair
/// of M has product one, so no certificate exists.
DlyapResult dlyap_solve(const Matrix& M);

/// Eigenvalues of a symmetric matrix in ascending order, via cyclic Jacobi
/// rotations (at most 100 sweeps, off-diagonal Frobenius tolerance 1e-12
/// relative to the input scale). Rejects non-symmetric input.
std::vector<double> symmetric_eig(const Matrix& A);

// Small vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
std::vector<double> vec_sub(std::span<const double> a,
                            std::span<const double> b);

}  // namespace dcoord
