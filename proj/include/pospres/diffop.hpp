#pragma once

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pospres/linalg.hpp"
#include "pospres/polyalg.hpp"

namespace pospres {

class MomentSeq;

/// Axis-aligned box containing the support of a representing measure.
/// Bounds may be infinite.
struct SupportBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Why an operator is known to be a positivity preserver, if it is.
struct Certificate {
  enum class Kind {
    kConvolution,   ///< D(s) with s the moments of a positive measure
    kSubstitution,  ///< sum p^alpha s_alpha / alpha! d^alpha with s a moment sequence
  };
  Kind kind;
  SupportBox support;  ///< support of the measure behind s
};

/// What lies beyond max_order.
enum class Tail {
  kZero,     ///< every coefficient with |alpha| > max_order vanishes
  kUnknown,  ///< truncated; higher coefficients were never computed
};

/// T = sum_alpha q_alpha d^alpha with coefficients stored up to max_order.
class DiffOp {
 public:
  using Coeffs = std::map<MultiIndex, Poly>;

  /// Stores every nonzero coefficient with |alpha| <= max_order. Does not
  /// enforce deg q_alpha <= |alpha|; see degree_preserving().
  DiffOp(std::size_t n, unsigned max_order, Coeffs coeffs, Tail tail = Tail::kZero);

  /// Same, but throws kNotInAlgebra unless deg q_alpha <= |alpha| for all alpha.
  static DiffOp in_algebra(std::size_t n, unsigned max_order, Coeffs coeffs,
                           Tail tail = Tail::kZero);

  static DiffOp identity(std::size_t n);
  static DiffOp zero(std::size_t n);
  /// c * d^alpha
  static DiffOp partial(const MultiIndex& alpha, double c = 1.0);
  /// Constant-coefficient operator from a dense coefficient table.
  static DiffOp constant(std::size_t n, unsigned max_order,
                         const std::map<MultiIndex, double>& q, Tail tail);

  std::size_t nvars() const { return n_; }
  unsigned max_order() const { return max_order_; }
  Tail tail() const { return tail_; }
  const Coeffs& coeffs() const { return coeffs_; }
  /// Throws kTruncation for |alpha| > max_order under an unknown tail.
  Poly coeff(const MultiIndex& alpha) const;
  /// Highest degree on which the operator is fully known.
  unsigned usable_degree() const;

  /// deg q_alpha <= |alpha| for every stored alpha.
  bool degree_preserving() const;
  /// q_0 != 0.
  bool invertible() const;
  bool constant_coefficients() const;
  /// Largest |alpha| with q_alpha != 0, or -1 for the zero operator.
  int effective_order() const;

  /// A_y: coefficients frozen at the point y.
  DiffOp frozen_at(std::span<const double> y) const;
  /// Drops coefficients with |alpha| > order and marks the tail unknown.
  DiffOp truncated(unsigned order) const;

  const std::optional<Certificate>& certificate() const { return certificate_; }
  void set_certificate(Certificate c) { certificate_ = std::move(c); }

  DiffOp& operator+=(const DiffOp& other);
  DiffOp& operator*=(double c);
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator*(double c, DiffOp a) { return a *= c; }

 private:
  std::size_t n_;
  unsigned max_order_;
  Coeffs coeffs_;
  Tail tail_;
  std::optional<Certificate> certificate_;
};

/// Largest coefficient difference over |alpha| <= order (both operators
/// must be known that far).
double max_coeff_diff(const DiffOp& a, const DiffOp& b, unsigned order);

/// Restriction of T to R[x]_{<=d}: column j holds the coordinates of
/// T(monomial j) in the graded basis.
struct OpMatrix {
  BasisMap basis;
  Matrix entries;
};

Poly apply(const DiffOp& t, const Poly& p);
OpMatrix matrix_rep(const DiffOp& t, unsigned d);

/// Tolerance for deg q_alpha <= |alpha| when recovering coefficients.
inline constexpr double kCanonicalDegreeTol = 1e-9;

/// Recovers q_alpha, |alpha| <= d, from the action on R[x]_{<=d}:
///   q_alpha = (T x^alpha - sum_{beta < alpha} q_beta d^beta x^alpha) / alpha!
/// Monomials of q_alpha above degree |alpha| must be below
/// kCanonicalDegreeTol * max(1, max|M|) and are then dropped.
DiffOp canonical_from_action(const OpMatrix& action);

/// Canonical coefficients of T S up to order d via the Leibniz rule.
DiffOp leibniz_product(const DiffOp& t, const DiffOp& s, unsigned d);

DiffOp compose(const DiffOp& t, const DiffOp& s, unsigned d);
DiffOp invert(const DiffOp& t, unsigned d);
DiffOp exp_op(const DiffOp& a, double t, unsigned d);
/// Max-entry distance of exp(tA_d) to (1 + tA_d/k)^k and (1 - tA_d/k)^{-k},
/// whichever is larger.
double exp_limit_check(const DiffOp& a, double t, unsigned d, unsigned k);
DiffOp log_op(const DiffOp& t, unsigned d);

/// q_alpha = p^alpha s_alpha / alpha! for |alpha| <= max_order. The result is
/// generally outside the degree-preserving algebra; check degree_preserving().
DiffOp build_substitution_preserver(std::span<const Poly> p, const MomentSeq& s,
                                    unsigned max_order);

}  // namespace pospres
