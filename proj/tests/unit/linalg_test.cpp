#include "pospres/linalg.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace pospres;

TEST(Expm, DiagonalMatrix) {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << -2.0, 0.5, 3.0;
  const Matrix e = expm(a);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(e(i, i) / std::exp(a(i, i)), 1.0, 1e-14);
  EXPECT_EQ(max_abs(e - Matrix(e.diagonal().asDiagonal())), 0.0);
}

TEST(Expm, RotationGenerator) {
  Matrix a(2, 2);
  a << 0, -1, 1, 0;
  for (double t : {0.1, 1.0, 10.0, 40.0}) {
    const Matrix e = expm(t * a);
    EXPECT_NEAR(e(0, 0), std::cos(t), 1e-12);
    EXPECT_NEAR(e(1, 0), std::sin(t), 1e-12);
  }
}

TEST(Expm, NilpotentSeriesTerminates) {
  // Strictly upper triangular: exp is the finite sum I + N + N^2/2 + N^3/6.
  Matrix n = Matrix::Zero(4, 4);
  n(0, 1) = 2;
  n(1, 2) = -3;
  n(2, 3) = 0.5;
  n(0, 3) = 7;
  const Matrix n2 = n * n, n3 = n2 * n;
  const Matrix want = Matrix::Identity(4, 4) + n + n2 / 2 + n3 / 6;
  EXPECT_LT(max_abs(expm(n) - want), 1e-13);
}

TEST(Expm, LargeNormUsesSquaring) {
  Matrix a(2, 2);
  a << 30, 1, 0, 30;
  const Matrix e = expm(a);
  EXPECT_NEAR(e(0, 0) / std::exp(30.0), 1.0, 1e-13);
  EXPECT_NEAR(e(0, 1) / std::exp(30.0), 1.0, 1e-12);
}

TEST(MatrixPower, MatchesRepeatedProduct) {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  EXPECT_LT(max_abs(matrix_power(a, 5) - a * a * a * a * a), 1e-9);
  EXPECT_LT(max_abs(matrix_power(a, 0) - Matrix::Identity(2, 2)), 0.0 + 1e-15);
}

TEST(Eigen, MinEigenvalueAndNorms) {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  EXPECT_NEAR(min_eigenvalue_symmetric(a), 1.0, 1e-14);
  EXPECT_EQ(inf_norm(a), 3.0);
  EXPECT_EQ(max_abs(a), 2.0);
}

TEST(RealRoots, CubicWithThreeRealRoots) {
  // (x - 1)(x - 2)(x + 3) = x^3 - 7x + 6
  auto r = real_roots(std::vector<double>{6, -7, 0, 1});
  std::sort(r.begin(), r.end());
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], -3.0, 1e-12);
  EXPECT_NEAR(r[1], 1.0, 1e-12);
  EXPECT_NEAR(r[2], 2.0, 1e-12);
}

TEST(RealRoots, ComplexPairIsDropped) {
  const auto r = real_roots(std::vector<double>{1, 0, 1});
  EXPECT_TRUE(r.empty());
}

TEST(GlobalMinimum, DoubleWell) {
  // (x^2 - 1)^2 has minimum 0 at +-1
  const UnivariateMin m = global_minimum(std::vector<double>{1, 0, -2, 0, 1});
  ASSERT_TRUE(m.bounded_below);
  EXPECT_NEAR(m.value, 0.0, 1e-12);
  EXPECT_NEAR(std::abs(m.argmin), 1.0, 1e-7);
}

TEST(GlobalMinimum, ShiftedQuadratic) {
  // 3(x - 0.25)^2 - 2
  const UnivariateMin m = global_minimum(std::vector<double>{3 * 0.0625 - 2, -1.5, 3});
  ASSERT_TRUE(m.bounded_below);
  EXPECT_NEAR(m.value, -2.0, 1e-14);
  EXPECT_NEAR(m.argmin, 0.25, 1e-14);
}

TEST(GlobalMinimum, UnboundedCases) {
  EXPECT_FALSE(global_minimum(std::vector<double>{0, 0, 0, 1}).bounded_below);
  EXPECT_FALSE(global_minimum(std::vector<double>{0, 0, -1}).bounded_below);
  const UnivariateMin c = global_minimum(std::vector<double>{4});
  ASSERT_TRUE(c.bounded_below);
  EXPECT_EQ(c.value, 4.0);
}
