#include "pospres/polyalg.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "pospres/error.hpp"

namespace pospres {

MultiIndex::MultiIndex(std::vector<unsigned> exponents)
    : exponents_(std::move(exponents)) {
  if (exponents_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "multi-index needs n >= 1");
  }
}

MultiIndex MultiIndex::zero(std::size_t n) {
  return MultiIndex(std::vector<unsigned>(n, 0));
}

MultiIndex MultiIndex::unit(std::size_t n, std::size_t i, unsigned power) {
  std::vector<unsigned> e(n, 0);
  if (i >= n) throw Error(ErrorCode::kOutOfRange, "variable index out of range");
  e[i] = power;
  return MultiIndex(std::move(e));
}

unsigned MultiIndex::degree() const {
  return std::accumulate(exponents_.begin(), exponents_.end(), 0u);
}

bool MultiIndex::precedes(const MultiIndex& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (exponents_[i] > other.exponents_[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (size() != other.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "multi-index length mismatch");
  }
  std::vector<unsigned> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (!other.precedes(*this)) {
    throw Error(ErrorCode::kInvalidArgument, "multi-index difference is negative");
  }
  std::vector<unsigned> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= other.exponents_[i];
  return MultiIndex(std::move(e));
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  // Larger leading exponent first within one degree.
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return b[i] <=> a[i];
  }
  return std::strong_ordering::equal;
}

std::string to_string(const MultiIndex& alpha) {
  std::string out = "[";
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(alpha[i]);
  }
  out += ']';
  return out;
}

namespace {

// Running product that stays exact in 64 bits as long as it can.
class Product {
 public:
  void times(std::uint64_t k) {
    if (exact_) {
      std::uint64_t next;
      if (!__builtin_mul_overflow(value_, k, &next)) {
        value_ = next;
        return;
      }
      exact_ = false;
      approx_ = static_cast<long double>(value_);
    }
    approx_ *= static_cast<long double>(k);
  }
  double value() const {
    return exact_ ? static_cast<double>(value_) : static_cast<double>(approx_);
  }

 private:
  bool exact_ = true;
  std::uint64_t value_ = 1;
  long double approx_ = 1.0L;
};

}  // namespace

double factorial(unsigned k) {
  Product p;
  for (unsigned i = 2; i <= k; ++i) p.times(i);
  return p.value();
}

double factorial(const MultiIndex& alpha) {
  Product p;
  for (unsigned e : alpha.exponents()) {
    for (unsigned i = 2; i <= e; ++i) p.times(i);
  }
  return p.value();
}

double falling_factorial(unsigned k, unsigned j) {
  if (j > k) return 0.0;
  Product p;
  for (unsigned i = 0; i < j; ++i) p.times(k - i);
  return p.value();
}

std::uint64_t binomial_exact(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is always an integer; divide by gcd first.
    std::uint64_t num = n - k + i;
    std::uint64_t g = std::gcd(r, i);
    std::uint64_t r_div = r / g;
    std::uint64_t i_div = i / g;
    std::uint64_t num_div = num / i_div;
    std::uint64_t next;
    if (__builtin_mul_overflow(r_div, num_div, &next)) {
      throw Error(ErrorCode::kOutOfRange, "binomial coefficient overflows 64 bits");
    }
    r = next;
  }
  return r;
}

double binomial(unsigned n, unsigned k) {
  if (k > n) return 0.0;
  try {
    return static_cast<double>(binomial_exact(n, k));
  } catch (const Error&) {
    return static_cast<double>(std::exp(std::lgamma(n + 1.0L) - std::lgamma(k + 1.0L) -
                                        std::lgamma(n - k + 1.0L)));
  }
}

double binomial(const MultiIndex& alpha, const MultiIndex& beta) {
  if (!beta.precedes(alpha)) return 0.0;
  double r = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) r *= binomial(alpha[i], beta[i]);
  return r;
}

// ---------------------------------------------------------------------------
// Poly

Poly::Poly(std::size_t n) : n_(n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "polynomial needs n >= 1");
}

Poly::Poly(std::size_t n, Terms terms) : Poly(n) {
  for (auto& [alpha, c] : terms) add_term(alpha, c);
}

Poly Poly::constant(std::size_t n, double c) {
  Poly p(n);
  p.add_term(MultiIndex::zero(n), c);
  return p;
}

Poly Poly::monomial(const MultiIndex& alpha, double c) {
  Poly p(alpha.size());
  p.add_term(alpha, c);
  return p;
}

Poly Poly::variable(std::size_t n, std::size_t i) {
  return monomial(MultiIndex::unit(n, i));
}

int Poly::degree() const {
  // Keys are sorted by total degree, so the last one is maximal.
  if (terms_.empty()) return kZeroDegree;
  return static_cast<int>(terms_.rbegin()->first.degree());
}

double Poly::coeff(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

double Poly::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [alpha, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void Poly::add_term(const MultiIndex& alpha, double c) {
  if (alpha.size() != n_) {
    throw Error(ErrorCode::kDimensionMismatch, "monomial has wrong variable count");
  }
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void Poly::check_same(const Poly& other) const {
  if (n_ != other.n_) {
    throw Error(ErrorCode::kDimensionMismatch, "polynomials have different variable counts");
  }
}

Poly& Poly::operator+=(const Poly& other) {
  check_same(other);
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& other) {
  check_same(other);
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, -c);
  return *this;
}

Poly& Poly::operator*=(double c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    it = it->second == 0.0 ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

Poly Poly::operator-() const { return *this * -1.0; }

Poly operator*(const Poly& a, const Poly& b) {
  a.check_same(b);
  Poly r(a.n_);
  for (const auto& [alpha, ca] : a.terms_) {
    for (const auto& [beta, cb] : b.terms_) r.add_term(alpha + beta, ca * cb);
  }
  return r;
}

Poly Poly::pow(unsigned k) const {
  Poly result = constant(n_, 1.0);
  Poly base = *this;
  while (k) {
    if (k & 1u) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

double Poly::operator()(std::span<const double> y) const { return eval(*this, y); }

double eval(const Poly& p, std::span<const double> y) {
  if (y.size() != p.nvars()) {
    throw Error(ErrorCode::kDimensionMismatch, "evaluation point has wrong length");
  }
  double sum = 0.0;
  for (const auto& [alpha, c] : p.terms()) {
    double m = c;
    for (std::size_t i = 0; i < y.size(); ++i) {
      for (unsigned e = 0; e < alpha[i]; ++e) m *= y[i];
    }
    sum += m;
  }
  return sum;
}

Poly derive(const Poly& p, const MultiIndex& alpha) {
  if (alpha.size() != p.nvars()) {
    throw Error(ErrorCode::kDimensionMismatch, "derivative order has wrong length");
  }
  Poly r(p.nvars());
  for (const auto& [gamma, c] : p.terms()) {
    if (!alpha.precedes(gamma)) continue;
    double f = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) f *= falling_factorial(gamma[i], alpha[i]);
    r.add_term(gamma - alpha, c * f);
  }
  return r;
}

Poly taylor_shift(const Poly& p, std::span<const double> c) {
  const std::size_t n = p.nvars();
  if (c.size() != n) throw Error(ErrorCode::kDimensionMismatch, "shift has wrong length");
  Poly r(n);
  for (const auto& [gamma, coeff] : p.terms()) {
    // prod_i (x_i + c_i)^{gamma_i}, expanded one variable at a time.
    std::vector<std::pair<std::vector<unsigned>, double>> partial{{{}, coeff}};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<std::vector<unsigned>, double>> next;
      next.reserve(partial.size() * (gamma[i] + 1));
      for (const auto& [exps, v] : partial) {
        double cpow = 1.0;
        for (unsigned k = 0; k <= gamma[i]; ++k) {
          // x_i^{gamma_i - k} c_i^k
          auto e = exps;
          e.push_back(gamma[i] - k);
          next.emplace_back(std::move(e), v * binomial(gamma[i], k) * cpow);
          cpow *= c[i];
        }
      }
      partial = std::move(next);
    }
    for (auto& [exps, v] : partial) r.add_term(MultiIndex(std::move(exps)), v);
  }
  return r;
}

double max_coeff_diff(const Poly& a, const Poly& b) { return (a - b).max_abs_coeff(); }

// ---------------------------------------------------------------------------
// Text form

namespace {

class PolyLexer {
 public:
  explicit PolyLexer(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool at_number() {
    char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }
  double number() {
    skip_ws();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }
  unsigned integer() {
    skip_ws();
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a non-negative integer");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }
  // x, x1, x12 ...; returns the zero-based variable index.
  std::size_t variable() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != 'x') fail("expected a variable");
    ++pos_;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      unsigned idx = 0;
      auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), idx);
      if (ec != std::errc() || idx == 0) fail("variables are numbered from x1");
      pos_ = static_cast<std::size_t>(ptr - s_.data());
      return idx - 1;
    }
    return 0;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kParse, "polynomial '" + std::string(s_) + "' at offset " +
                                       std::to_string(pos_) + ": " + msg);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, std::size_t n) {
  PolyLexer lex(text);
  struct RawTerm {
    double c;
    std::vector<std::pair<std::size_t, unsigned>> factors;
  };
  std::vector<RawTerm> raw;
  std::size_t max_var = 0;
  if (lex.done()) lex.fail("empty polynomial");
  bool first = true;
  while (!lex.done()) {
    double sign = 1.0;
    if (lex.accept('+')) {
    } else if (lex.accept('-')) {
      sign = -1.0;
    } else if (!first) {
      lex.fail("expected '+' or '-'");
    }
    first = false;
    RawTerm t{sign, {}};
    bool has_coeff = false;
    if (lex.at_number()) {
      t.c *= lex.number();
      has_coeff = true;
      if (lex.accept('*')) {
        if (lex.peek() != 'x') lex.fail("expected a variable after '*'");
      }
    }
    while (lex.peek() == 'x') {
      std::size_t v = lex.variable();
      unsigned e = 1;
      if (lex.accept('^')) e = lex.integer();
      t.factors.emplace_back(v, e);
      max_var = std::max(max_var, v + 1);
      lex.accept('*');
    }
    if (!has_coeff && t.factors.empty()) lex.fail("expected a term");
    raw.push_back(std::move(t));
  }
  if (n == 0) n = std::max<std::size_t>(1, max_var);
  if (max_var > n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "polynomial uses x" + std::to_string(max_var) + " but n = " + std::to_string(n));
  }
  Poly p(n);
  for (const auto& t : raw) {
    std::vector<unsigned> e(n, 0);
    for (auto [v, k] : t.factors) e[v] += k;
    p.add_term(MultiIndex(std::move(e)), t.c);
  }
  return p;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_poly(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [alpha, c] : p.terms()) {
    double mag = c;
    if (first) {
      if (c < 0) {
        out += "-";
        mag = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      mag = std::abs(c);
    }
    first = false;
    out += format_double(mag);
    if (!alpha.is_zero()) {
      out += " *";
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] == 0) continue;
        out += " x" + std::to_string(i + 1);
        if (alpha[i] != 1) out += "^" + std::to_string(alpha[i]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// BasisMap

std::vector<MultiIndex> monomials_of_degree(std::size_t n, unsigned m) {
  std::vector<MultiIndex> out;
  std::vector<unsigned> e(n, 0);
  // Assign x1 first, from m down, which yields basis order directly.
  auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i + 1 == n) {
      e[i] = left;
      out.emplace_back(e);
      return;
    }
    for (unsigned k = left + 1; k-- > 0;) {
      e[i] = k;
      self(self, i + 1, left - k);
    }
  };
  rec(rec, 0, m);
  return out;
}

BasisMap::BasisMap(std::size_t n, unsigned d) : n_(n), d_(d) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "basis needs n >= 1");
  const auto dim = binomial_exact(n + d, d);
  order_.reserve(dim);
  for (unsigned m = 0; m <= d; ++m) {
    auto level = monomials_of_degree(n, m);
    order_.insert(order_.end(), level.begin(), level.end());
  }
}

std::size_t BasisMap::dim_up_to(unsigned m) const {
  if (m > d_) throw Error(ErrorCode::kOutOfRange, "degree above basis bound");
  return static_cast<std::size_t>(binomial_exact(n_ + m, m));
}

std::size_t BasisMap::index_of(const MultiIndex& alpha) const {
  if (alpha.size() != n_) {
    throw Error(ErrorCode::kDimensionMismatch, "multi-index has wrong length");
  }
  if (alpha.degree() > d_) {
    throw Error(ErrorCode::kOutOfRange, "multi-index " + to_string(alpha) + " above degree " +
                                            std::to_string(d_));
  }
  auto it = std::lower_bound(order_.begin(), order_.end(), alpha);
  return static_cast<std::size_t>(it - order_.begin());
}

const MultiIndex& BasisMap::multiindex_at(std::size_t i) const {
  if (i >= order_.size()) throw Error(ErrorCode::kOutOfRange, "basis index out of range");
  return order_[i];
}

}  // namespace pospres
