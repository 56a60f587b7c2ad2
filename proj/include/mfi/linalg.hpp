#pragma once

#include <cstddef>
#include <vector>

namespace mfi {

// Dense row-major matrix. All state spaces in this project have at most a few
// hundred states, so everything downstream assumes small dense storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix transpose(const Matrix& a);
std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x);

double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);
// Operator infinity norm (max absolute row sum).
double row_sum_norm(const Matrix& a);
double max_abs(const std::vector<double>& x);

// LU factorisation with partial pivoting; throws NumericalRankFailure on a
// numerically singular matrix.
class LuFactor {
 public:
  explicit LuFactor(Matrix a);
  std::vector<double> solve(const std::vector<double>& b) const;
  Matrix solve(const Matrix& b) const;
  // One Newton polish pass with the residual accumulated in long double.
  std::vector<double> solve_refined(const Matrix& a, const std::vector<double>& b) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

// One-dimensional null space of a square matrix found by full-pivot
// elimination; throws NumericalRankFailure when rank != n-1 at the working
// tolerance.
std::vector<double> nullspace_vector(const Matrix& a);

struct SymmetricEigen {
  std::vector<double> values;  // sorted descending
  Matrix vectors;              // column k is the eigenvector of values[k]
};

// Cyclic Jacobi for symmetric matrices. Sweeps until the off-diagonal
// Frobenius norm drops below 1e-14 times the matrix scale; throws
// EigensolveFailure after max_sweeps.
SymmetricEigen jacobi_eigensolve(Matrix a, int max_sweeps = 100);

// Scaling-and-squaring matrix exponential (Pade degree 13).
Matrix expm(const Matrix& a);

// Cholesky factor (lower triangular) of a symmetric positive definite matrix.
Matrix cholesky(const Matrix& a);

}  // namespace mfi
