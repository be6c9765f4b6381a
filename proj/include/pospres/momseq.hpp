#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pospres/diffop.hpp"
#include "pospres/linalg.hpp"
#include "pospres/polyalg.hpp"

namespace pospres {

struct Atom {
  std::vector<double> point;
  double weight;
};

/// Finitely atomic positive measure.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(std::size_t n) : n_(n) {}
  DiscreteMeasure(std::size_t n, std::vector<Atom> atoms);

  static DiscreteMeasure dirac(std::vector<double> point, double weight = 1.0);

  std::size_t nvars() const { return n_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  /// Requires weight > 0 and a point of length n.
  void add(Atom atom);
  SupportBox support_box() const;

 private:
  std::size_t n_;
  std::vector<Atom> atoms_;
};

/// Measure-level convolution: all pairwise sums, weights multiplied.
DiscreteMeasure convolve(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
/// Measure-level product: all pairwise componentwise products.
DiscreteMeasure hadamard(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Real sequence (s_alpha)_{|alpha| <= order}, stored densely in graded order.
class MomentSeq {
 public:
  MomentSeq(std::size_t n, unsigned order);
  MomentSeq(std::size_t n, unsigned order, std::vector<double> values);

  std::size_t nvars() const { return basis_.nvars(); }
  unsigned order() const { return basis_.degree(); }
  const BasisMap& basis() const { return basis_; }
  std::span<const double> values() const { return values_; }

  double operator[](const MultiIndex& alpha) const;
  double& at(const MultiIndex& alpha);

  /// Known support of a representing positive measure, when the sequence
  /// came from one.
  const std::optional<SupportBox>& support() const { return support_; }
  void set_support(std::optional<SupportBox> box) { support_ = std::move(box); }

  /// Restriction to |alpha| <= order.
  MomentSeq truncated(unsigned order) const;

  MomentSeq& operator+=(const MomentSeq& other);
  MomentSeq& operator*=(double c);
  friend MomentSeq operator+(MomentSeq a, const MomentSeq& b) { return a += b; }
  friend MomentSeq operator*(double c, MomentSeq a) { return a *= c; }

 private:
  BasisMap basis_;
  std::vector<double> values_;
  std::optional<SupportBox> support_;
};

double max_abs_diff(const MomentSeq& a, const MomentSeq& b);

/// s_alpha = sum over atoms of w x^alpha, in atom order.
MomentSeq from_measure(const DiscreteMeasure& mu, unsigned order);
/// Moments of the unit point mass at c.
MomentSeq dirac_moments(std::span<const double> c, unsigned order);

/// D(s) = sum_alpha s_alpha / alpha! d^alpha. Carries a convolution
/// certificate when s came from a measure.
DiffOp dop_from_seq(const MomentSeq& s);

/// u_alpha = sum_{beta <= alpha} binom(alpha, beta) s_beta t_{alpha - beta}.
MomentSeq convolve(const MomentSeq& s, const MomentSeq& t);
/// (s_alpha t_alpha).
MomentSeq hadamard(const MomentSeq& s, const MomentSeq& t);
/// Convolution exponential sum_k t^k/k! s^{*k}, exact at the truncation order.
MomentSeq conv_exp(const MomentSeq& s, double t);

/// Moment matrix entry(beta, gamma) = sum_kappa w_kappa s_{beta+gamma+kappa},
/// rows and columns over the graded basis of degree d.
struct MomentMatrix {
  BasisMap basis;
  Matrix entries;
};

MomentMatrix moment_matrix(const MomentSeq& s, unsigned d);
MomentMatrix moment_matrix(const MomentSeq& s, unsigned d, const Poly& w);

inline constexpr double kDefaultPsdTol = 1e-10;

struct PsdResult {
  bool psd;
  double min_eigenvalue;
};

/// PSD iff lambda_min >= -tol * max(1, ||M||_inf).
PsdResult is_psd(const Matrix& m, double tol = kDefaultPsdTol);
inline PsdResult is_psd(const MomentMatrix& m, double tol = kDefaultPsdTol) {
  return is_psd(m.entries, tol);
}

enum class CarlemanIndicator { kDivergesLikely, kConvergesLikely, kUnknown };
const char* to_string(CarlemanIndicator c);

/// Slope bands for the root-growth exponent of s_{2k}^{1/2k} against k.
inline constexpr double kCarlemanDivergeSlope = 1.05;
inline constexpr double kCarlemanConvergeSlope = 1.2;

/// Heuristic reading of the multivariate Carleman condition from the even
/// marginal moments s_{2k e_j}, k <= terms. Never a certificate.
CarlemanIndicator carleman_indicator(const MomentSeq& s, unsigned terms);

}  // namespace pospres
