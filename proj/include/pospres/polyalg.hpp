#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pospres {

/// Exponent vector alpha in N_0^n.
///
/// Ordering is graded: total degree first, then lexicographic with x1 the
/// heaviest variable, so the monomials of R[x1,x2]_{<=2} sort as
/// 1, x1, x2, x1^2, x1 x2, x2^2.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<unsigned> exponents);

  static MultiIndex zero(std::size_t n);
  static MultiIndex unit(std::size_t n, std::size_t i, unsigned power = 1);

  std::size_t size() const { return exponents_.size(); }
  unsigned operator[](std::size_t i) const { return exponents_[i]; }
  std::span<const unsigned> exponents() const { return exponents_; }

  unsigned degree() const;
  bool is_zero() const { return degree() == 0; }

  /// Componentwise order: this <= other in every coordinate.
  bool precedes(const MultiIndex& other) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Requires other.precedes(*this).
  MultiIndex operator-(const MultiIndex& other) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend std::strong_ordering operator<=>(const MultiIndex& a,
                                          const MultiIndex& b);

 private:
  std::vector<unsigned> exponents_;
};

std::string to_string(const MultiIndex& alpha);

// Integer combinatorics. Products run in checked 64-bit arithmetic and fall
// back to long double once they leave the exact range.
double factorial(unsigned k);
double factorial(const MultiIndex& alpha);
/// k (k-1) ... (k-j+1)
double falling_factorial(unsigned k, unsigned j);
double binomial(unsigned n, unsigned k);
double binomial(const MultiIndex& alpha, const MultiIndex& beta);
/// Exact binomial coefficient; throws on 64-bit overflow.
std::uint64_t binomial_exact(std::uint64_t n, std::uint64_t k);

/// Degree of the zero polynomial.
inline constexpr int kZeroDegree = std::numeric_limits<int>::min();

/// Sparse polynomial in n variables with real coefficients. No stored
/// coefficient is exactly zero.
class Poly {
 public:
  using Terms = std::map<MultiIndex, double>;

  explicit Poly(std::size_t n = 1);
  Poly(std::size_t n, Terms terms);

  static Poly constant(std::size_t n, double c);
  static Poly monomial(const MultiIndex& alpha, double c = 1.0);
  static Poly variable(std::size_t n, std::size_t i);

  std::size_t nvars() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// kZeroDegree for the zero polynomial.
  int degree() const;
  double coeff(const MultiIndex& alpha) const;
  bool is_constant() const { return degree() <= 0; }
  /// Largest absolute coefficient.
  double max_abs_coeff() const;

  double operator()(std::span<const double> y) const;

  Poly& operator+=(const Poly& other);
  Poly& operator-=(const Poly& other);
  Poly& operator*=(double c);
  Poly operator-() const;
  Poly pow(unsigned k) const;

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, double c) { return a *= c; }
  friend Poly operator*(double c, Poly a) { return a *= c; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly&, const Poly&) = default;

  /// Adds c * x^alpha, dropping the entry if it cancels to exactly zero.
  void add_term(const MultiIndex& alpha, double c);

 private:
  void check_same(const Poly& other) const;

  std::size_t n_;
  Terms terms_;
};

/// Sum of c_alpha y^alpha, accumulated in graded basis order.
double eval(const Poly& p, std::span<const double> y);
Poly derive(const Poly& p, const MultiIndex& alpha);
/// q(x) = p(x + c).
Poly taylor_shift(const Poly& p, std::span<const double> c);
/// Largest absolute coefficient difference.
double max_coeff_diff(const Poly& a, const Poly& b);

/// Parses `2.5 * x1^2 x2 - 1`. `x` alone means x1. With n = 0 the variable
/// count is the largest index that appears (at least 1).
Poly parse_poly(std::string_view text, std::size_t n = 0);
/// Inverse of parse_poly; coefficients printed with %.17g.
std::string format_poly(const Poly& p);

/// Graded monomial basis of R[x1..xn]_{<=d}.
class BasisMap {
 public:
  BasisMap(std::size_t n, unsigned d);

  std::size_t nvars() const { return n_; }
  unsigned degree() const { return d_; }
  std::size_t dim() const { return order_.size(); }
  /// Size of the leading block spanning R[x]_{<=m}, m <= d.
  std::size_t dim_up_to(unsigned m) const;

  std::size_t index_of(const MultiIndex& alpha) const;
  const MultiIndex& multiindex_at(std::size_t i) const;
  std::span<const MultiIndex> monomials() const& { return order_; }
  std::span<const MultiIndex> monomials() const&& = delete;

  friend bool operator==(const BasisMap& a, const BasisMap& b) {
    return a.n_ == b.n_ && a.d_ == b.d_;
  }

 private:
  std::size_t n_;
  unsigned d_;
  std::vector<MultiIndex> order_;
};

/// Monomials of total degree exactly m, in basis order.
std::vector<MultiIndex> monomials_of_degree(std::size_t n, unsigned m);

}  // namespace pospres
