#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace pospres {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense matrix exponential by scaling and squaring with a degree-18 Taylor
/// kernel on a matrix scaled to 1-norm <= 1/4.
Matrix expm(const Matrix& a);

/// a^k by repeated squaring.
Matrix matrix_power(const Matrix& a, unsigned k);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue_symmetric(const Matrix& a);

/// Max row sum.
double inf_norm(const Matrix& a);
double max_abs(const Matrix& a);

/// Real roots of sum_k c[k] x^k from companion-matrix eigenvalues, each
/// polished by Newton steps. Roots whose imaginary part exceeds
/// 1e-7 * (1 + |root|) are discarded. Sorted ascending.
std::vector<double> real_roots(std::span<const double> coeffs_ascending);

/// Global minimum of a univariate polynomial on R.
struct UnivariateMin {
  bool bounded_below;
  double value;   ///< -inf if unbounded
  double argmin;  ///< meaningless if unbounded
};
UnivariateMin global_minimum(std::span<const double> coeffs_ascending);

}  // namespace pospres
