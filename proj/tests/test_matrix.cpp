#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dcoord/matrix.hpp"

using namespace dcoord;

namespace {

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale) {
  std::uniform_real_distribution<double> draw(-scale, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = draw(rng);
  return m;
}

// Brute-force spectral radius estimate: geometric mean of the per-step
// growth over 200 power iterations (after a burn-in), which averages out the
// oscillation of complex-pair dominant eigenvalues.
double power_radius(const Matrix& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> draw(-1.0, 1.0);
  std::vector<double> x(m.rows());
  for (auto& v : x) v = draw(rng);
  double log_growth = 0.0;
  int counted = 0;
  for (int it = 0; it < 200; ++it) {
    const double nx = norm(x);
    if (nx == 0.0) return 0.0;
    for (auto& v : x) v /= nx;
    x = m * std::span<const double>(x);
    if (it >= 50) {
      log_growth += std::log(norm(x));
      ++counted;
    }
  }
  return std::exp(log_growth / counted);
}

}  // namespace

TEST_CASE("lu_solve identity returns the right-hand side") {
  const Matrix b = Matrix::from_rows({{1.5, -2.0}, {0.25, 7.0}, {3.0, 0.0}});
  const Matrix x = lu_solve(Matrix::identity(3), b);
  CHECK(x == b);
}

TEST_CASE("lu_solve diagonal system") {
  const Matrix a = Matrix::from_rows({{2.0, 0.0}, {0.0, 4.0}});
  const Matrix b = Matrix::from_rows({{2.0}, {8.0}});
  const Matrix x = lu_solve(a, b);
  CHECK(x(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("lu_solve reconstructs a known solution") {
  std::mt19937_64 rng(7);
  const Matrix a = random_matrix(rng, 8, 8, 2.0) + 8.0 * Matrix::identity(8);
  const Matrix x_true = random_matrix(rng, 8, 3, 5.0);
  const Matrix x = lu_solve(a, a * x_true);
  CHECK((x - x_true).max_abs() < 1e-9);
}

TEST_CASE("lu_solve residual bound on random well-conditioned systems") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    // Diagonal dominance keeps the condition number modest.
    const Matrix a =
        random_matrix(rng, n, n, 1.0) + (n + 2.0) * Matrix::identity(n);
    const Matrix b = random_matrix(rng, n, 2, 10.0);
    const Matrix x = lu_solve(a, b);
    const double residual = (a * x - b).max_abs();
    CHECK(residual < 1e-9 * std::max(1.0, b.max_abs()));
  }
}

TEST_CASE("lu_solve rejects singular input") {
  const Matrix a = Matrix::from_rows({{1.0, 2.0}, {2.0, 4.0}});
  const Matrix b = Matrix::from_rows({{1.0}, {1.0}});
  CHECK_THROWS_AS(lu_solve(a, b), SingularMatrixError);
}

TEST_CASE("kron with a leading identity is block diagonal") {
  const Matrix m = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  const Matrix k = kron(Matrix::identity(2), m);
  REQUIRE(k.rows() == 4);
  REQUIRE(k.cols() == 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(k(i, j) == m(i, j));
      CHECK(k(2 + i, 2 + j) == m(i, j));
      CHECK(k(i, 2 + j) == 0.0);
      CHECK(k(2 + i, j) == 0.0);
    }
}

TEST_CASE("kron hand expansion of a row by a column") {
  const Matrix a = Matrix::from_rows({{1.0, 2.0}});
  const Matrix b = Matrix::from_rows({{3.0}, {4.0}});
  const Matrix k = kron(a, b);
  REQUIRE(k.rows() == 2);
  REQUIRE(k.cols() == 2);
  CHECK(k(0, 0) == 3.0);
  CHECK(k(1, 0) == 4.0);
  CHECK(k(0, 1) == 6.0);
  CHECK(k(1, 1) == 8.0);
}

TEST_CASE("kron mixed-product identity on random matrices") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_matrix(rng, 2, 2, 2.0);
    const Matrix b = random_matrix(rng, 2, 2, 2.0);
    const Matrix c = random_matrix(rng, 2, 2, 2.0);
    const Matrix d = random_matrix(rng, 2, 2, 2.0);
    const Matrix lhs = kron(a, b) * kron(c, d);
    const Matrix rhs = kron(a * c, b * d);
    CHECK((lhs - rhs).max_abs() < 1e-10);
  }
}

TEST_CASE("numerical_rank on documented cases") {
  CHECK(numerical_rank(Matrix::identity(3)) == 3);
  CHECK(numerical_rank(Matrix::from_rows({{1.0, 2.0}, {2.0, 4.0}})) == 1);
  // [A - I, B; C, 0] for A = [[0,1],[2,1]], B = C = I.
  const Matrix block = Matrix::from_rows({{-1.0, 1.0, 1.0, 0.0},
                                          {2.0, 0.0, 0.0, 1.0},
                                          {1.0, 0.0, 0.0, 0.0},
                                          {0.0, 1.0, 0.0, 0.0}});
  CHECK(numerical_rank(block) == 4);
  CHECK(numerical_rank(Matrix(3, 3)) == 0);
}

TEST_CASE("dlyap certificate for a contraction") {
  const Matrix m = 0.5 * Matrix::identity(2);
  const DlyapResult res = dlyap_solve(m);
  REQUIRE(res.solvable);
  CHECK(res.positive_definite);
  // Scalar series: P solves 0.25 P - P = -1, so P = 4/3.
  CHECK(res.P(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(res.P(1, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(res.P(0, 1)) < 1e-12);
}

TEST_CASE("dlyap on the identity is not certifiable") {
  const DlyapResult res = dlyap_solve(Matrix::identity(2));
  CHECK_FALSE(res.solvable);
  CHECK_FALSE(res.positive_definite);
}

TEST_CASE("dlyap rejects an expanding matrix") {
  // Eigenvalues 2 and -1.
  const DlyapResult res = dlyap_solve(Matrix::from_rows({{0.0, 1.0}, {2.0, 1.0}}));
  CHECK_FALSE(res.positive_definite);
}

TEST_CASE("dlyap certificate tracks the power-iteration radius") {
  std::mt19937_64 rng(17);
  int decisive = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = random_matrix(rng, 3, 3, 0.9);
    const DlyapResult res = dlyap_solve(m);
    const double radius = power_radius(m, rng);
    if (radius < 0.9) {
      CHECK(res.solvable);
      CHECK(res.positive_definite);
      // Certified contractions decay once transients die out.
      std::vector<double> x{1.0, -0.5, 0.25};
      const double n0 = norm(x);
      for (int k = 0; k < 200; ++k) x = m * std::span<const double>(x);
      CHECK(norm(x) < n0);
      if (radius < 0.8) {
        // Strong contractions already decay at forty steps.
        std::vector<double> y{-0.3, 1.0, 0.7};
        const double m0 = norm(y);
        for (int k = 0; k < 40; ++k) y = m * std::span<const double>(y);
        CHECK(norm(y) < m0);
      }
      ++decisive;
    } else if (radius > 1.1) {
      CHECK_FALSE(res.positive_definite);
      ++decisive;
    }
  }
  CHECK(decisive > 30);  // the seeded draw must actually exercise both sides
}

TEST_CASE("symmetric_eig on documented cases") {
  const std::vector<double> diag_case =
      symmetric_eig(Matrix::from_rows({{3.0, 0.0, 0.0},
                                       {0.0, 1.0, 0.0},
                                       {0.0, 0.0, 2.0}}));
  REQUIRE(diag_case.size() == 3);
  CHECK(diag_case[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(diag_case[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(diag_case[2] == doctest::Approx(3.0).epsilon(1e-12));

  // Trace 4, determinant 3: eigenvalues 1 and 3.
  const std::vector<double> pair =
      symmetric_eig(Matrix::from_rows({{2.0, -1.0}, {-1.0, 2.0}}));
  CHECK(pair[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pair[1] == doctest::Approx(3.0).epsilon(1e-10));

  // Unit 4-ring Laplacian: 2 - 2 cos(2 pi k / 4) gives {0, 2, 2, 4}.
  const Matrix c4 = Matrix::from_rows({{2.0, -1.0, 0.0, -1.0},
                                       {-1.0, 2.0, -1.0, 0.0},
                                       {0.0, -1.0, 2.0, -1.0},
                                       {-1.0, 0.0, -1.0, 2.0}});
  const std::vector<double> ring = symmetric_eig(c4);
  CHECK(std::abs(ring[0] - 0.0) < 1e-9);
  CHECK(std::abs(ring[1] - 2.0) < 1e-9);
  CHECK(std::abs(ring[2] - 2.0) < 1e-9);
  CHECK(std::abs(ring[3] - 4.0) < 1e-9);
}

TEST_CASE("symmetric_eig rejects non-symmetric input") {
  CHECK_THROWS_AS(symmetric_eig(Matrix::from_rows({{1.0, 2.0}, {0.0, 1.0}})),
                  std::invalid_argument);
}

TEST_CASE("symmetric_eig matches random orthogonal-similarity spectra") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    // Build a symmetric matrix with a known spectrum via Jacobi-style
    // rotations applied to a diagonal seed.
    std::uniform_real_distribution<double> draw(-5.0, 5.0);
    std::vector<double> spectrum(4);
    for (auto& v : spectrum) v = draw(rng);
    Matrix m(4, 4);
    for (int i = 0; i < 4; ++i) m(i, i) = spectrum[i];
    std::uniform_real_distribution<double> angle(0.0, 6.28318530717958648);
    for (int rot = 0; rot < 6; ++rot) {
      const int p = rot % 3;
      const int q = p + 1;
      const double theta = angle(rng);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      Matrix g = Matrix::identity(4);
      g(p, p) = c;
      g(q, q) = c;
      g(p, q) = -s;
      g(q, p) = s;
      m = g.transposed() * m * g;
    }
    // Enforce exact symmetry lost to rounding.
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const double v = 0.5 * (m(i, j) + m(j, i));
        m(i, j) = v;
        m(j, i) = v;
      }
    std::sort(spectrum.begin(), spectrum.end());
    const std::vector<double> eig = symmetric_eig(m);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(eig[i] - spectrum[i]) < 1e-9);
  }
}
