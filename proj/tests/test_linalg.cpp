#include <doctest.h>

#include <cmath>

#include "mfi/errors.hpp"
#include "mfi/linalg.hpp"

using namespace mfi;

TEST_CASE("jacobi recovers a known spectrum") {
  // rotate diag(3, 1) by 30 degrees
  const double c = std::cos(M_PI / 6.0), s = std::sin(M_PI / 6.0);
  Matrix a(2, 2);
  a(0, 0) = 3 * c * c + s * s;
  a(0, 1) = (3 - 1) * c * s;
  a(1, 0) = a(0, 1);
  a(1, 1) = 3 * s * s + c * c;
  const SymmetricEigen eig = jacobi_eigensolve(a);
  CHECK(eig.values[0] == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-13));
  // residual A v = lambda v
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<double> v{eig.vectors(0, k), eig.vectors(1, k)};
    const std::vector<double> av = mat_vec(a, v);
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(av[i] == doctest::Approx(eig.values[k] * v[i]).epsilon(1e-12));
  }
}

TEST_CASE("expm matches the 2x2 closed form") {
  // generator [[-a, a], [b, -b]]: exp(t M) has a known form via eigenvalues 0, -(a+b)
  const double a = 1.3, b = 0.4, t = 0.7;
  Matrix m(2, 2);
  m(0, 0) = -a;
  m(0, 1) = a;
  m(1, 0) = b;
  m(1, 1) = -b;
  const Matrix e = expm(t * m);
  const double decay = std::exp(-(a + b) * t);
  const double p = b / (a + b);
  CHECK(e(0, 0) == doctest::Approx(p + (1 - p) * decay).epsilon(1e-14));
  CHECK(e(0, 1) == doctest::Approx((1 - p) * (1 - decay)).epsilon(1e-14));
  CHECK(e(1, 0) == doctest::Approx(p * (1 - decay)).epsilon(1e-14));
}

TEST_CASE("expm handles large scaling") {
  Matrix m(2, 2);
  m(0, 0) = -300.0;
  m(0, 1) = 300.0;
  m(1, 0) = 100.0;
  m(1, 1) = -100.0;
  const Matrix e = expm(1.0 * m);
  // rows converge to the stationary distribution (0.25, 0.75)
  CHECK(e(0, 0) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(e(1, 1) == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(e(0, 0) + e(0, 1) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("nullspace_vector finds the kernel and rejects rank deficits") {
  Matrix a(3, 3);
  // rows sum to zero, kernel spanned by (1,1,1) on the transpose side; build
  // A with kernel (2, 1, 1): columns scaled
  const double rows[3][3] = {{-1, 1, 0}, {0, -1, 1}, {1, 0, -1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = rows[i][j];
  std::vector<double> v = nullspace_vector(a);
  // kernel of the cyclic generator acting on functions: constants
  CHECK(v[0] == doctest::Approx(v[1]).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(v[2]).epsilon(1e-12));

  CHECK_THROWS_AS((void)nullspace_vector(Matrix(2, 2)), Error);  // kernel dim 2
}

TEST_CASE("lu solve with refinement") {
  Matrix a(3, 3);
  const double rows[3][3] = {{4, 1, 0}, {1, 3, 1}, {0, 1, 2}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = rows[i][j];
  const std::vector<double> x_true{1.0, -2.0, 3.0};
  const std::vector<double> b = mat_vec(a, x_true);
  LuFactor lu(a);
  const std::vector<double> x = lu.solve_refined(a, b);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-15));
}

TEST_CASE("cholesky round trip") {
  Matrix a(2, 2);
  a(0, 0) = 4.0;
  a(0, 1) = 1.0;
  a(1, 0) = 1.0;
  a(1, 1) = 3.0;
  const Matrix l = cholesky(a);
  const Matrix back = l * transpose(l);
  CHECK(max_abs_diff(a, back) < 1e-14);
}
