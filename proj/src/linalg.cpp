#include "pospres/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "pospres/error.hpp"

namespace pospres {

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::kDimensionMismatch, "expm needs a square matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  // Horner form of sum_{k<=18} X^k / k!.
  constexpr int kOrder = 18;
  const Matrix eye = Matrix::Identity(n, n);
  Matrix r = eye;
  for (int k = kOrder; k >= 1; --k) r = eye + (scaled * r) / static_cast<double>(k);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Matrix matrix_power(const Matrix& a, unsigned k) {
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix base = a;
  while (k) {
    if (k & 1u) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

double min_eigenvalue_symmetric(const Matrix& a) {
  if (a.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingular, "symmetric eigensolver did not converge");
  }
  return es.eigenvalues().minCoeff();
}

double inf_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

double max_abs(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

namespace {

double horner(std::span<const double> c, double x) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
  return v;
}

std::vector<double> trimmed(std::span<const double> c) {
  std::vector<double> v(c.begin(), c.end());
  while (!v.empty() && v.back() == 0.0) v.pop_back();
  return v;
}

}  // namespace

std::vector<double> real_roots(std::span<const double> coeffs_ascending) {
  const auto c = trimmed(coeffs_ascending);
  std::vector<double> roots;
  if (c.size() <= 1) return roots;
  const Eigen::Index deg = static_cast<Eigen::Index>(c.size()) - 1;
  Matrix comp = Matrix::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  Eigen::EigenSolver<Matrix> es(comp, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingular, "companion eigensolver did not converge");
  }
  std::vector<double> deriv(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) deriv[k - 1] = c[k] * static_cast<double>(k);
  for (Eigen::Index i = 0; i < deg; ++i) {
    const auto z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z))) continue;
    double x = z.real();
    for (int it = 0; it < 3; ++it) {
      const double d = horner(deriv, x);
      if (d == 0.0) break;
      const double step = horner(c, x) / d;
      if (!std::isfinite(step)) break;
      x -= step;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

UnivariateMin global_minimum(std::span<const double> coeffs_ascending) {
  const auto c = trimmed(coeffs_ascending);
  if (c.empty()) return {true, 0.0, 0.0};
  const std::size_t deg = c.size() - 1;
  if (deg == 0) return {true, c[0], 0.0};
  const double inf = std::numeric_limits<double>::infinity();
  if (deg % 2 == 1 || c.back() < 0.0) return {false, -inf, 0.0};
  std::vector<double> deriv(deg);
  for (std::size_t k = 1; k <= deg; ++k) deriv[k - 1] = c[k] * static_cast<double>(k);
  UnivariateMin best{true, inf, 0.0};
  for (double x : real_roots(deriv)) {
    const double v = horner(c, x);
    if (v < best.value) best = {true, v, x};
  }
  return best;
}

}  // namespace pospres
