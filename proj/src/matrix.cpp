#include "dcoord/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dcoord {

Matrix::Matrix(int rows, int cols)
    : rows_(rows),
      cols_(cols),
      data_(static_cast<std::size_t>(rows) * cols, 0.0) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix size");
}

Matrix::Matrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix size");
  if (data_.size() != static_cast<std::size_t>(rows) * cols)
    throw std::invalid_argument("matrix data length does not match shape");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  Matrix m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c)
      throw std::invalid_argument("ragged row list");
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

std::span<const double> Matrix::row(int r) const {
  return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)};
}

std::span<double> Matrix::row(int r) {
  return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)};
}

void Matrix::set_row(int r, std::span<const double> values) {
  if (static_cast<int>(values.size()) != cols_)
    throw std::invalid_argument("row length mismatch");
  std::copy(values.begin(), values.end(), data_.begin() + index(r, 0));
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string("shape mismatch in ") + op);
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix add");
  Matrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix subtract");
  Matrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("inner dimension mismatch in matrix product");
  Matrix r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
  return r;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> v) {
  if (a.cols() != static_cast<int>(v.size()))
    throw std::invalid_argument("matvec dimension mismatch");
  std::vector<double> r(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Matrix lu_solve(const Matrix& A, const Matrix& B) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("lu_solve needs a square matrix");
  if (A.rows() != B.rows())
    throw std::invalid_argument("lu_solve right-hand side row mismatch");
  const int n = A.rows();
  const double scale = std::max(A.max_abs(), 1e-300);
  const double pivot_floor = 1e-12 * scale;

  Matrix lu = A;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(lu(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < pivot_floor)
      throw SingularMatrixError("matrix singular to working precision");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      std::swap(perm[k], perm[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      lu(i, k) = f;
      for (int j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
    }
  }

  Matrix X(n, B.cols());
  std::vector<double> col(n);
  for (int c = 0; c < B.cols(); ++c) {
    for (int i = 0; i < n; ++i) col[i] = B(perm[i], c);
    for (int i = 1; i < n; ++i) {
      double s = col[i];
      for (int j = 0; j < i; ++j) s -= lu(i, j) * col[j];
      col[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = col[i];
      for (int j = i + 1; j < n; ++j) s -= lu(i, j) * col[j];
      col[i] = s / lu(i, i);
    }
    for (int i = 0; i < n; ++i) X(i, c) = col[i];
  }
  return X;
}

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix r(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) {
      const double aij = A(i, j);
      if (aij == 0.0) continue;
      for (int p = 0; p < B.rows(); ++p)
        for (int q = 0; q < B.cols(); ++q)
          r(i * B.rows() + p, j * B.cols() + q) = aij * B(p, q);
    }
  return r;
}

int numerical_rank(const Matrix& A, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("rank tolerance must be positive");
  if (A.rows() == 0 || A.cols() == 0) return 0;
  const Matrix gram = A.transposed() * A;
  std::vector<double> eig = symmetric_eig(gram);
  double sigma_max = 0.0;
  for (double v : eig) sigma_max = std::max(sigma_max, std::sqrt(std::max(v, 0.0)));
  if (sigma_max == 0.0) return 0;
  // The Gram route cannot resolve singular values below sqrt(dim * eps) of
  // sigma_max: eigenvalues of AtA carry rounding noise of that square. Floor
  // the threshold there so noise eigenvalues never count.
  const double dim = std::max(A.rows(), A.cols());
  const double floor_rel = std::sqrt(dim * 2.220446049250313e-16);
  const double threshold = std::max(tol, floor_rel) * sigma_max;
  int rank = 0;
  for (double v : eig)
    if (std::sqrt(std::max(v, 0.0)) > threshold) ++rank;
  return rank;
}

namespace {

// Cholesky on the symmetrized input; success certifies positive definiteness.
bool cholesky_pd(Matrix P) {
  const int n = P.rows();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double s = 0.5 * (P(i, j) + P(j, i));
      P(i, j) = s;
      P(j, i) = s;
    }
  for (int k = 0; k < n; ++k) {
    double d = P(k, k);
    for (int j = 0; j < k; ++j) d -= P(k, j) * P(k, j);
    if (!(d > 0.0)) return false;
    const double root = std::sqrt(d);
    P(k, k) = root;
    for (int i = k + 1; i < n; ++i) {
      double s = P(i, k);
      for (int j = 0; j < k; ++j) s -= P(i, j) * P(k, j);
      P(i, k) = s / root;
    }
  }
  return true;
}

}  // namespace

DlyapResult dlyap_solve(const Matrix& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("dlyap_solve needs a square matrix");
  const int n = M.rows();
  const Matrix mt = M.transposed();
  const Matrix system = Matrix::identity(n * n) - kron(mt, mt);

  Matrix rhs(n * n, 1);
  for (int i = 0; i < n; ++i) rhs(i * n + i, 0) = 1.0;

  DlyapResult result;
  Matrix vec_p;
  try {
    vec_p = lu_solve(system, rhs);
  } catch (const SingularMatrixError&) {
    return result;  // eigenvalue pair with product one: no certificate
  }
  result.solvable = true;
  result.P = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) result.P(i, j) = vec_p(i * n + j, 0);
  result.positive_definite = cholesky_pd(result.P);
  return result;
}

std::vector<double> symmetric_eig(const Matrix& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("symmetric_eig needs a square matrix");
  const int n = A.rows();
  const double sym_tol = 1e-12 * std::max(1.0, A.max_abs());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(A(i, j) - A(j, i)) > sym_tol)
        throw std::invalid_argument("symmetric_eig given a non-symmetric matrix");

  Matrix a = A;
  const double stop = 1e-12 * std::max(1.0, a.frobenius_norm());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= stop) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> vec_sub(std::span<const double> a,
                            std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_sub size mismatch");
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

}  // namespace dcoord
