#include "pospres/diffop.hpp"

#include <algorithm>
#include <cmath>

#include "pospres/error.hpp"
#include "pospres/momseq.hpp"

namespace pospres {

namespace {

void require_algebra(const DiffOp& t, const char* what) {
  if (!t.degree_preserving()) {
    throw Error(ErrorCode::kNotInAlgebra,
                std::string(what) + ": operator has a coefficient with deg q_alpha > |alpha|");
  }
}

void require_usable(const DiffOp& t, unsigned d, const char* what) {
  if (t.usable_degree() < d) {
    throw Error(ErrorCode::kTruncation, std::string(what) + ": operator truncated at order " +
                                            std::to_string(t.max_order()) + " but degree " +
                                            std::to_string(d) + " is needed");
  }
}

// All kappa with kappa <= alpha componentwise.
std::vector<MultiIndex> sub_indices(const MultiIndex& alpha) {
  std::vector<MultiIndex> out;
  std::vector<unsigned> e(alpha.size(), 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == alpha.size()) {
      out.emplace_back(e);
      return;
    }
    for (unsigned k = 0; k <= alpha[i]; ++k) {
      e[i] = k;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

Poly column_poly(const OpMatrix& m, std::size_t j) {
  Poly p(m.basis.nvars());
  for (std::size_t i = 0; i < m.basis.dim(); ++i) {
    p.add_term(m.basis.multiindex_at(i), m.entries(static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(j)));
  }
  return p;
}

}  // namespace

DiffOp::DiffOp(std::size_t n, unsigned max_order, Coeffs coeffs, Tail tail)
    : n_(n), max_order_(max_order), tail_(tail) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "operator needs n >= 1");
  for (auto& [alpha, q] : coeffs) {
    if (alpha.size() != n || q.nvars() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "coefficient " + to_string(alpha) +
                                                     " has the wrong variable count");
    }
    if (alpha.degree() > max_order) {
      throw Error(ErrorCode::kOutOfRange, "coefficient " + to_string(alpha) +
                                              " above max order " + std::to_string(max_order));
    }
    if (!q.is_zero()) coeffs_.emplace(alpha, std::move(q));
  }
}

DiffOp DiffOp::in_algebra(std::size_t n, unsigned max_order, Coeffs coeffs, Tail tail) {
  DiffOp t(n, max_order, std::move(coeffs), tail);
  require_algebra(t, "construction");
  return t;
}

DiffOp DiffOp::identity(std::size_t n) {
  Coeffs c;
  c.emplace(MultiIndex::zero(n), Poly::constant(n, 1.0));
  return DiffOp(n, 0, std::move(c), Tail::kZero);
}

DiffOp DiffOp::zero(std::size_t n) { return DiffOp(n, 0, {}, Tail::kZero); }

DiffOp DiffOp::partial(const MultiIndex& alpha, double c) {
  const std::size_t n = alpha.size();
  Coeffs coeffs;
  coeffs.emplace(alpha, Poly::constant(n, c));
  return DiffOp(n, alpha.degree(), std::move(coeffs), Tail::kZero);
}

DiffOp DiffOp::constant(std::size_t n, unsigned max_order, const std::map<MultiIndex, double>& q,
                        Tail tail) {
  Coeffs coeffs;
  for (const auto& [alpha, v] : q) coeffs.emplace(alpha, Poly::constant(n, v));
  return DiffOp(n, max_order, std::move(coeffs), tail);
}

Poly DiffOp::coeff(const MultiIndex& alpha) const {
  if (alpha.size() != n_) throw Error(ErrorCode::kDimensionMismatch, "multi-index has wrong length");
  if (alpha.degree() > max_order_ && tail_ == Tail::kUnknown) {
    throw Error(ErrorCode::kTruncation, "coefficient " + to_string(alpha) +
                                            " lies beyond the truncation order " +
                                            std::to_string(max_order_));
  }
  auto it = coeffs_.find(alpha);
  return it == coeffs_.end() ? Poly(n_) : it->second;
}

unsigned DiffOp::usable_degree() const {
  return tail_ == Tail::kZero ? std::numeric_limits<unsigned>::max() : max_order_;
}

bool DiffOp::degree_preserving() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) {
    return kv.second.degree() <= static_cast<int>(kv.first.degree());
  });
}

bool DiffOp::invertible() const {
  auto it = coeffs_.find(MultiIndex::zero(n_));
  return it != coeffs_.end() && it->second.is_constant() && !it->second.is_zero();
}

bool DiffOp::constant_coefficients() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const auto& kv) { return kv.second.is_constant(); });
}

int DiffOp::effective_order() const {
  if (coeffs_.empty()) return -1;
  return static_cast<int>(coeffs_.rbegin()->first.degree());
}

DiffOp DiffOp::frozen_at(std::span<const double> y) const {
  Coeffs frozen;
  for (const auto& [alpha, q] : coeffs_) frozen.emplace(alpha, Poly::constant(n_, eval(q, y)));
  return DiffOp(n_, max_order_, std::move(frozen), tail_);
}

DiffOp DiffOp::truncated(unsigned order) const {
  Coeffs kept;
  for (const auto& [alpha, q] : coeffs_) {
    if (alpha.degree() <= order) kept.emplace(alpha, q);
  }
  const unsigned kept_order = tail_ == Tail::kZero ? order : std::min(order, max_order_);
  return DiffOp(n_, kept_order, std::move(kept), Tail::kUnknown);
}

DiffOp& DiffOp::operator+=(const DiffOp& other) {
  if (n_ != other.n_) throw Error(ErrorCode::kDimensionMismatch, "operators differ in n");
  unsigned order;
  Tail tail;
  if (tail_ == Tail::kZero && other.tail_ == Tail::kZero) {
    order = std::max(max_order_, other.max_order_);
    tail = Tail::kZero;
  } else {
    order = std::min(usable_degree(), other.usable_degree());
    tail = Tail::kUnknown;
  }
  Coeffs sum;
  for (const Coeffs* src : {static_cast<const Coeffs*>(&coeffs_), &other.coeffs_}) {
    for (const auto& [alpha, q] : *src) {
      if (alpha.degree() > order) continue;
      auto [it, inserted] = sum.try_emplace(alpha, q);
      if (!inserted) it->second += q;
    }
  }
  *this = DiffOp(n_, order, std::move(sum), tail);
  return *this;
}

DiffOp& DiffOp::operator*=(double c) {
  Coeffs scaled;
  for (const auto& [alpha, q] : coeffs_) scaled.emplace(alpha, q * c);
  auto cert = c >= 0.0 ? certificate_ : std::nullopt;
  *this = DiffOp(n_, max_order_, std::move(scaled), tail_);
  certificate_ = std::move(cert);
  return *this;
}

double max_coeff_diff(const DiffOp& a, const DiffOp& b, unsigned order) {
  if (a.nvars() != b.nvars()) throw Error(ErrorCode::kDimensionMismatch, "operators differ in n");
  double worst = 0.0;
  const BasisMap basis(a.nvars(), order);
  for (const auto& alpha : basis.monomials()) {
    worst = std::max(worst, max_coeff_diff(a.coeff(alpha), b.coeff(alpha)));
  }
  return worst;
}

// ---------------------------------------------------------------------------

Poly apply(const DiffOp& t, const Poly& p) {
  if (p.nvars() != t.nvars()) {
    throw Error(ErrorCode::kDimensionMismatch, "operator and polynomial differ in n");
  }
  if (p.is_zero()) return p;
  require_usable(t, static_cast<unsigned>(p.degree()), "apply");
  Poly out(p.nvars());
  for (const auto& [alpha, q] : t.coeffs()) {
    if (alpha.degree() > static_cast<unsigned>(p.degree())) break;
    Poly dp = derive(p, alpha);
    if (!dp.is_zero()) out += q * dp;
  }
  return out;
}

OpMatrix matrix_rep(const DiffOp& t, unsigned d) {
  require_usable(t, d, "matrix_rep");
  require_algebra(t, "matrix_rep");
  BasisMap basis(t.nvars(), d);
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Poly image = apply(t, Poly::monomial(basis.multiindex_at(static_cast<std::size_t>(j))));
    for (const auto& [beta, c] : image.terms()) {
      m(static_cast<Eigen::Index>(basis.index_of(beta)), j) = c;
    }
  }
  return {std::move(basis), std::move(m)};
}

DiffOp canonical_from_action(const OpMatrix& action) {
  const BasisMap& basis = action.basis;
  const std::size_t n = basis.nvars();
  const double scale = std::max(1.0, max_abs(action.entries));
  DiffOp::Coeffs q;
  for (std::size_t j = 0; j < basis.dim(); ++j) {
    const MultiIndex& alpha = basis.multiindex_at(j);
    Poly r = column_poly(action, j);
    // Every beta <= alpha, beta != alpha, comes earlier in graded order.
    for (const auto& [beta, qb] : q) {
      if (beta == alpha || !beta.precedes(alpha)) continue;
      double f = 1.0;
      for (std::size_t i = 0; i < n; ++i) f *= falling_factorial(alpha[i], beta[i]);
      r -= qb * Poly::monomial(alpha - beta, f);
    }
    r *= 1.0 / factorial(alpha);
    Poly kept(n);
    for (const auto& [gamma, c] : r.terms()) {
      if (gamma.degree() <= alpha.degree()) {
        kept.add_term(gamma, c);
      } else if (std::abs(c) > kCanonicalDegreeTol * scale) {
        throw Error(ErrorCode::kNotInAlgebra,
                    "recovered coefficient " + to_string(alpha) + " has a degree-" +
                        std::to_string(gamma.degree()) + " term of size " + std::to_string(c));
      }
    }
    if (!kept.is_zero()) q.emplace(alpha, std::move(kept));
  }
  return DiffOp(n, basis.degree(), std::move(q), Tail::kUnknown);
}

DiffOp leibniz_product(const DiffOp& t, const DiffOp& s, unsigned d) {
  if (t.nvars() != s.nvars()) throw Error(ErrorCode::kDimensionMismatch, "operators differ in n");
  require_usable(t, d, "leibniz_product");
  require_usable(s, d, "leibniz_product");
  require_algebra(t, "leibniz_product");
  require_algebra(s, "leibniz_product");
  const std::size_t n = t.nvars();
  DiffOp::Coeffs c;
  for (const auto& [alpha, qa] : t.coeffs()) {
    if (alpha.degree() > d) break;
    for (const auto& kappa : sub_indices(alpha)) {
      const double b = binomial(alpha, kappa);
      const MultiIndex rest = alpha - kappa;
      for (const auto& [beta, qb] : s.coeffs()) {
        if (rest.degree() + beta.degree() > d) break;
        Poly dq = derive(qb, kappa);
        if (dq.is_zero()) continue;
        Poly term = qa * dq * b;
        auto [it, inserted] = c.try_emplace(rest + beta, term);
        if (!inserted) it->second += term;
      }
    }
  }
  return DiffOp(n, d, std::move(c), Tail::kUnknown);
}

DiffOp compose(const DiffOp& t, const DiffOp& s, unsigned d) {
  require_algebra(t, "compose");
  require_algebra(s, "compose");
  const OpMatrix mt = matrix_rep(t, d);
  const OpMatrix ms = matrix_rep(s, d);
  DiffOp result = canonical_from_action({mt.basis, mt.entries * ms.entries});
  const auto& ct = t.certificate();
  const auto& cs = s.certificate();
  if (ct && cs && ct->kind == Certificate::Kind::kConvolution &&
      cs->kind == Certificate::Kind::kConvolution) {
    SupportBox box = ct->support;
    for (std::size_t i = 0; i < box.lo.size(); ++i) {
      box.lo[i] += cs->support.lo[i];
      box.hi[i] += cs->support.hi[i];
    }
    result.set_certificate({Certificate::Kind::kConvolution, std::move(box)});
  }
  return result;
}

DiffOp invert(const DiffOp& t, unsigned d) {
  require_algebra(t, "invert");
  require_usable(t, d, "invert");
  if (!t.invertible()) {
    throw Error(ErrorCode::kNotInvertible, "invert: q_0 = 0, operator is not in the group");
  }
  const std::size_t n = t.nvars();
  const double a0 = t.coeff(MultiIndex::zero(n)).coeff(MultiIndex::zero(n));
  const bool constant = t.constant_coefficients();
  const OpMatrix mt = matrix_rep(t, d);

  // Right inverse T B = 1 coefficient by coefficient. Writing
  //   c_gamma = T(b_gamma) + ctilde_gamma,
  // ctilde_gamma only involves b_beta with |beta| < |gamma|, so it is fully
  // known once the lower degrees are solved. Contributions are scattered
  // forward as soon as each b_beta is fixed.
  std::map<MultiIndex, Poly> ctilde;
  std::vector<Eigen::FullPivLU<Matrix>> block_lu(d + 1);
  DiffOp::Coeffs b;
  for (const auto& gamma : mt.basis.monomials()) {
    Poly rhs = ctilde.count(gamma) ? -ctilde.at(gamma) : Poly(n);
    if (gamma.is_zero()) rhs += Poly::constant(n, 1.0);
    Poly bg(n);
    if (constant) {
      bg = rhs * (1.0 / a0);
    } else {
      const unsigned m = gamma.degree();
      const auto dim = static_cast<Eigen::Index>(mt.basis.dim_up_to(m));
      auto& lu = block_lu[m];
      if (lu.rows() == 0) {
        lu.compute(mt.entries.topLeftCorner(dim, dim));
        if (!lu.isInvertible()) {
          throw Error(ErrorCode::kNotInvertible,
                      "invert: restriction to degree " + std::to_string(m) + " is singular");
        }
      }
      Vector r = Vector::Zero(dim);
      for (const auto& [mu, c] : rhs.terms()) r(static_cast<Eigen::Index>(mt.basis.index_of(mu))) = c;
      const Vector sol = lu.solve(r);
      for (Eigen::Index i = 0; i < dim; ++i) {
        bg.add_term(mt.basis.multiindex_at(static_cast<std::size_t>(i)), sol(i));
      }
    }
    if (bg.is_zero()) continue;
    for (const auto& [alpha, qa] : t.coeffs()) {
      if (alpha.degree() > d) break;
      for (const auto& kappa : sub_indices(alpha)) {
        if (kappa == alpha) continue;
        const MultiIndex target = (alpha - kappa) + gamma;
        if (target.degree() > d) continue;
        Poly dq = derive(bg, kappa);
        if (dq.is_zero()) continue;
        Poly term = qa * dq * binomial(alpha, kappa);
        auto [it, inserted] = ctilde.try_emplace(target, term);
        if (!inserted) it->second += term;
      }
    }
    b.emplace(gamma, std::move(bg));
  }
  return DiffOp(n, d, std::move(b), Tail::kUnknown);
}

DiffOp exp_op(const DiffOp& a, double t, unsigned d) {
  const OpMatrix m = matrix_rep(a, d);
  return canonical_from_action({m.basis, expm(t * m.entries)});
}

double exp_limit_check(const DiffOp& a, double t, unsigned d, unsigned k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "exp_limit_check needs k >= 1");
  const OpMatrix m = matrix_rep(a, d);
  const auto dim = m.entries.rows();
  const Matrix eye = Matrix::Identity(dim, dim);
  const Matrix step = (t / static_cast<double>(k)) * m.entries;
  const Matrix e = expm(t * m.entries);
  const Matrix forward = matrix_power(eye + step, k);
  Eigen::FullPivLU<Matrix> lu(eye - step);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kSingular, "exp_limit_check: 1 - tA/k is singular at k = " +
                                          std::to_string(k));
  }
  const Matrix backward = matrix_power(lu.inverse(), k);
  return std::max(max_abs(e - forward), max_abs(e - backward));
}

DiffOp log_op(const DiffOp& t, unsigned d) {
  // Operators recovered from a matrix carry rounding-level x terms; those
  // still count as constant.
  double scale = 1.0;
  for (const auto& [alpha, q] : t.coeffs()) scale = std::max(scale, q.max_abs_coeff());
  const bool constant = std::all_of(t.coeffs().begin(), t.coeffs().end(), [&](const auto& kv) {
    for (const auto& [gamma, c] : kv.second.terms()) {
      if (!gamma.is_zero() && std::abs(c) > kCanonicalDegreeTol * scale) return false;
    }
    return true;
  });
  if (!constant) {
    throw Error(ErrorCode::kUnsupported, "log_op: only constant-coefficient operators");
  }
  const std::size_t n = t.nvars();
  const double q0 = t.coeff(MultiIndex::zero(n)).coeff(MultiIndex::zero(n));
  if (!(q0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "log_op: needs q_0 > 0");
  const std::vector<double> origin(n, 0.0);
  const OpMatrix m = matrix_rep(t.frozen_at(origin), d);
  const auto dim = m.entries.rows();
  const Matrix eye = Matrix::Identity(dim, dim);
  // T_d = q0 (1 + N) with N strictly upper triangular, hence nilpotent.
  const Matrix nil = m.entries / q0 - eye;
  Matrix log = std::log(q0) * eye;
  Matrix power = eye;
  for (Eigen::Index k = 1; k < dim; ++k) {
    power = power * nil;
    if (power.isZero(0.0)) break;
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    log += (sign / static_cast<double>(k)) * power;
  }
  return canonical_from_action({m.basis, log});
}

DiffOp build_substitution_preserver(std::span<const Poly> p, const MomentSeq& s,
                                    unsigned max_order) {
  const std::size_t n = s.nvars();
  if (p.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "substitution needs one polynomial per variable");
  }
  for (const auto& pi : p) {
    if (pi.nvars() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "substitution polynomial has wrong variable count");
    }
  }
  if (s.order() < max_order) {
    throw Error(ErrorCode::kTruncation, "sequence truncated below the requested order");
  }
  DiffOp::Coeffs q;
  const BasisMap basis(n, max_order);
  for (const auto& alpha : basis.monomials()) {
    const double sa = s[alpha];
    if (sa == 0.0) continue;
    Poly term = Poly::constant(n, sa / factorial(alpha));
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i]) term = term * p[i].pow(alpha[i]);
    }
    q.emplace(alpha, std::move(term));
  }
  DiffOp t(n, max_order, std::move(q), Tail::kUnknown);
  if (s.support()) t.set_certificate({Certificate::Kind::kSubstitution, *s.support()});
  return t;
}

}  // namespace pospres
