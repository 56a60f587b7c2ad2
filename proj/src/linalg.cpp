#include "mfi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfi/errors.hpp"

namespace mfi {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw Error(ErrorCode::DimensionMismatch, "matrix data size does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorCode::DimensionMismatch, "matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "matrix sum shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "matrix difference shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x) {
  if (a.cols() != x.size())
    throw Error(ErrorCode::DimensionMismatch, "matrix-vector shape mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "matrix difference shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double row_sum_norm(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

double max_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

LuFactor::LuFactor(Matrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
  if (!lu_.square()) throw Error(ErrorCode::DimensionMismatch, "LU needs a square matrix");
  const std::size_t n = lu_.rows();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double scale = std::max(max_abs(lu_), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
    if (std::abs(lu_(piv, k)) <= 1e-14 * scale)
      throw Error(ErrorCode::NumericalRankFailure, "matrix numerically singular");
    if (piv != k) {
      std::swap(perm_[piv], perm_[k]);
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(piv, j), lu_(k, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      lu_(i, k) /= lu_(k, k);
      const double lik = lu_(i, k);
      if (lik == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= lik * lu_(k, j);
    }
  }
}

std::vector<double> LuFactor::solve(const std::vector<double>& b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw Error(ErrorCode::DimensionMismatch, "LU solve rhs size mismatch");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu_(ii, j) * x[j];
    x[ii] /= lu_(ii, ii);
  }
  return x;
}

Matrix LuFactor::solve(const Matrix& b) const {
  const std::size_t n = lu_.rows();
  if (b.rows() != n) throw Error(ErrorCode::DimensionMismatch, "LU solve rhs size mismatch");
  Matrix x(n, b.cols());
  std::vector<double> col(n);
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
    std::vector<double> xc = solve(col);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = xc[i];
  }
  return x;
}

std::vector<double> LuFactor::solve_refined(const Matrix& a, const std::vector<double>& b) const {
  std::vector<double> x = solve(b);
  const std::size_t n = x.size();
  // Residual in long double so the correction is below the target precision.
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      long double s = b[i];
      for (std::size_t j = 0; j < n; ++j)
        s -= static_cast<long double>(a(i, j)) * static_cast<long double>(x[j]);
      r[i] = static_cast<double>(s);
    }
    std::vector<double> d = solve(r);
    for (std::size_t i = 0; i < n; ++i) x[i] += d[i];
  }
  return x;
}

std::vector<double> nullspace_vector(const Matrix& a) {
  if (!a.square())
    throw Error(ErrorCode::DimensionMismatch, "null space needs a square matrix");
  const std::size_t n = a.rows();
  Matrix m = a;
  std::vector<std::size_t> col_perm(n);
  std::iota(col_perm.begin(), col_perm.end(), std::size_t{0});
  const double scale = std::max(max_abs(m), 1e-300);
  const double tol = 1e-12 * scale * static_cast<double>(n);

  std::size_t rank = 0;
  for (std::size_t k = 0; k < n; ++k) {
    // full pivot
    std::size_t pi = k, pj = k;
    double best = 0.0;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (std::abs(m(i, j)) > best) { best = std::abs(m(i, j)); pi = i; pj = j; }
    if (best <= tol) break;
    if (pi != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(m(pi, j), m(k, j));
    if (pj != k) {
      std::swap(col_perm[pj], col_perm[k]);
      for (std::size_t i = 0; i < n; ++i) std::swap(m(i, pj), m(i, k));
    }
    ++rank;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  if (rank != n - 1)
    throw Error(ErrorCode::NumericalRankFailure,
                "null space dimension is " + std::to_string(n - rank) + ", expected 1");

  // Back-substitute with the free variable set to 1.
  std::vector<double> y(n, 0.0);
  y[n - 1] = 1.0;
  for (std::size_t ii = rank; ii-- > 0;) {
    double s = 0.0;
    for (std::size_t j = ii + 1; j < n; ++j) s += m(ii, j) * y[j];
    y[ii] = -s / m(ii, ii);
  }
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[col_perm[j]] = y[j];
  return x;
}

SymmetricEigen jacobi_eigensolve(Matrix a, int max_sweeps) {
  if (!a.square())
    throw Error(ErrorCode::DimensionMismatch, "eigensolve needs a square matrix");
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);
  const double scale = std::max(frobenius_norm(a), 1e-300);
  const double threshold = 1e-14 * scale;

  auto off_norm = [&a, n]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > threshold) {
    if (++sweep > max_sweeps)
      throw Error(ErrorCode::EigensolveFailure, "Jacobi sweeps exhausted");
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= threshold / static_cast<double>(n)) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

namespace {

// Pade degree-13 approximant, Higham's scaling.
Matrix expm_pade13(const Matrix& a) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const std::size_t n = a.rows();
  const Matrix id = Matrix::identity(n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                  b[3] * a2 + b[1] * id);
  Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
             b[0] * id;
  LuFactor lu(v - u);
  return lu.solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& a) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "expm needs a square matrix");
  const double theta13 = 5.371920351148152;
  const double norm = row_sum_norm(a);
  int squarings = 0;
  Matrix scaled = a;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    scaled = std::ldexp(1.0, -squarings) * a;
  }
  Matrix e = expm_pade13(scaled);
  for (int i = 0; i < squarings; ++i) e = e * e;
  return e;
}

Matrix cholesky(const Matrix& a) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "cholesky needs a square matrix");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0)
          throw Error(ErrorCode::NumericalRankFailure, "matrix not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

}  // namespace mfi
