#include "pospres/momseq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pospres/error.hpp"

namespace pospres {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double monomial_value(const MultiIndex& alpha, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (unsigned e = 0; e < alpha[i]; ++e) v *= x[i];
  }
  return v;
}

void require_same_n(const MomentSeq& s, const MomentSeq& t) {
  if (s.nvars() != t.nvars()) {
    throw Error(ErrorCode::kDimensionMismatch, "sequences differ in variable count");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(std::size_t n, std::vector<Atom> atoms) : n_(n) {
  for (auto& a : atoms) add(std::move(a));
}

DiscreteMeasure DiscreteMeasure::dirac(std::vector<double> point, double weight) {
  DiscreteMeasure mu(point.size());
  mu.add({std::move(point), weight});
  return mu;
}

void DiscreteMeasure::add(Atom atom) {
  if (atom.point.size() != n_) {
    throw Error(ErrorCode::kDimensionMismatch, "atom has wrong dimension");
  }
  if (!(atom.weight > 0.0) || !std::isfinite(atom.weight)) {
    throw Error(ErrorCode::kInvalidArgument, "atom weights must be positive and finite");
  }
  for (double x : atom.point) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "atom point is not finite");
  }
  atoms_.push_back(std::move(atom));
}

SupportBox DiscreteMeasure::support_box() const {
  SupportBox box{std::vector<double>(n_, kInf), std::vector<double>(n_, -kInf)};
  for (const auto& a : atoms_) {
    for (std::size_t i = 0; i < n_; ++i) {
      box.lo[i] = std::min(box.lo[i], a.point[i]);
      box.hi[i] = std::max(box.hi[i], a.point[i]);
    }
  }
  if (atoms_.empty()) {
    std::fill(box.lo.begin(), box.lo.end(), 0.0);
    std::fill(box.hi.begin(), box.hi.end(), 0.0);
  }
  return box;
}

DiscreteMeasure convolve(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.nvars() != nu.nvars()) throw Error(ErrorCode::kDimensionMismatch, "measures differ in n");
  DiscreteMeasure out(mu.nvars());
  for (const auto& a : mu.atoms()) {
    for (const auto& b : nu.atoms()) {
      std::vector<double> p(a.point);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += b.point[i];
      out.add({std::move(p), a.weight * b.weight});
    }
  }
  return out;
}

DiscreteMeasure hadamard(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.nvars() != nu.nvars()) throw Error(ErrorCode::kDimensionMismatch, "measures differ in n");
  DiscreteMeasure out(mu.nvars());
  for (const auto& a : mu.atoms()) {
    for (const auto& b : nu.atoms()) {
      std::vector<double> p(a.point);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] *= b.point[i];
      out.add({std::move(p), a.weight * b.weight});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// MomentSeq

MomentSeq::MomentSeq(std::size_t n, unsigned order)
    : basis_(n, order), values_(basis_.dim(), 0.0) {}

MomentSeq::MomentSeq(std::size_t n, unsigned order, std::vector<double> values)
    : basis_(n, order), values_(std::move(values)) {
  if (values_.size() != basis_.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "sequence needs " + std::to_string(basis_.dim()) +
                                                   " values, got " +
                                                   std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "sequence entry is not finite");
  }
}

double MomentSeq::operator[](const MultiIndex& alpha) const {
  return values_[basis_.index_of(alpha)];
}

double& MomentSeq::at(const MultiIndex& alpha) { return values_[basis_.index_of(alpha)]; }

MomentSeq MomentSeq::truncated(unsigned order) const {
  if (order > this->order()) throw Error(ErrorCode::kTruncation, "cannot extend a sequence");
  MomentSeq out(nvars(), order,
                std::vector<double>(values_.begin(),
                                    values_.begin() + static_cast<std::ptrdiff_t>(
                                                          basis_.dim_up_to(order))));
  out.support_ = support_;
  return out;
}

MomentSeq& MomentSeq::operator+=(const MomentSeq& other) {
  require_same_n(*this, other);
  if (other.order() != order()) throw Error(ErrorCode::kDimensionMismatch, "sequence orders differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  if (support_ && other.support_) {
    for (std::size_t i = 0; i < support_->lo.size(); ++i) {
      support_->lo[i] = std::min(support_->lo[i], other.support_->lo[i]);
      support_->hi[i] = std::max(support_->hi[i], other.support_->hi[i]);
    }
  } else {
    support_.reset();
  }
  return *this;
}

MomentSeq& MomentSeq::operator*=(double c) {
  for (double& v : values_) v *= c;
  if (c < 0.0) support_.reset();
  return *this;
}

double max_abs_diff(const MomentSeq& a, const MomentSeq& b) {
  require_same_n(a, b);
  const unsigned order = std::min(a.order(), b.order());
  double worst = 0.0;
  const BasisMap basis(a.nvars(), order);
  for (const auto& alpha : basis.monomials()) {
    worst = std::max(worst, std::abs(a[alpha] - b[alpha]));
  }
  return worst;
}

MomentSeq from_measure(const DiscreteMeasure& mu, unsigned order) {
  MomentSeq s(mu.nvars(), order);
  for (const auto& alpha : s.basis().monomials()) {
    double sum = 0.0;
    for (const auto& a : mu.atoms()) sum += a.weight * monomial_value(alpha, a.point);
    s.at(alpha) = sum;
  }
  s.set_support(mu.support_box());
  return s;
}

MomentSeq dirac_moments(std::span<const double> c, unsigned order) {
  return from_measure(DiscreteMeasure::dirac(std::vector<double>(c.begin(), c.end())), order);
}

DiffOp dop_from_seq(const MomentSeq& s) {
  std::map<MultiIndex, double> q;
  for (const auto& alpha : s.basis().monomials()) q.emplace(alpha, s[alpha] / factorial(alpha));
  DiffOp t = DiffOp::constant(s.nvars(), s.order(), q, Tail::kUnknown);
  if (s.support()) t.set_certificate({Certificate::Kind::kConvolution, *s.support()});
  return t;
}

MomentSeq convolve(const MomentSeq& s, const MomentSeq& t) {
  require_same_n(s, t);
  MomentSeq u(s.nvars(), std::min(s.order(), t.order()));
  for (const auto& alpha : u.basis().monomials()) {
    double sum = 0.0;
    for (const auto& beta : u.basis().monomials()) {
      if (beta.degree() > alpha.degree()) break;
      if (!beta.precedes(alpha)) continue;
      sum += binomial(alpha, beta) * s[beta] * t[alpha - beta];
    }
    u.at(alpha) = sum;
  }
  if (s.support() && t.support()) {
    SupportBox box = *s.support();
    for (std::size_t i = 0; i < box.lo.size(); ++i) {
      box.lo[i] += t.support()->lo[i];
      box.hi[i] += t.support()->hi[i];
    }
    u.set_support(std::move(box));
  }
  return u;
}

MomentSeq hadamard(const MomentSeq& s, const MomentSeq& t) {
  require_same_n(s, t);
  MomentSeq u(s.nvars(), std::min(s.order(), t.order()));
  for (const auto& alpha : u.basis().monomials()) u.at(alpha) = s[alpha] * t[alpha];
  if (s.support() && t.support()) {
    SupportBox box = *s.support();
    for (std::size_t i = 0; i < box.lo.size(); ++i) {
      const double a[2] = {s.support()->lo[i], s.support()->hi[i]};
      const double b[2] = {t.support()->lo[i], t.support()->hi[i]};
      double lo = kInf, hi = -kInf;
      for (double x : a) {
        for (double y : b) {
          // 0 * inf from an unbounded box means the product is unbounded.
          double p = (x == 0.0 || y == 0.0) ? 0.0 : x * y;
          lo = std::min(lo, p);
          hi = std::max(hi, p);
        }
      }
      box.lo[i] = lo;
      box.hi[i] = hi;
    }
    u.set_support(std::move(box));
  }
  return u;
}

MomentSeq conv_exp(const MomentSeq& s, double t) {
  const std::size_t n = s.nvars();
  const MultiIndex zero = MultiIndex::zero(n);
  // e^{*t s} = e^{t s_0} e^{*t s'} with s'_0 = 0; s'^{*k} vanishes below
  // order k, so the series stops at k = order.
  MomentSeq reduced = s;
  reduced.at(zero) = 0.0;
  MomentSeq result(n, s.order());
  result.at(zero) = 1.0;
  MomentSeq term = result;
  for (unsigned k = 1; k <= s.order(); ++k) {
    term = convolve(term, reduced);
    term *= t / static_cast<double>(k);
    result += term;
  }
  result *= std::exp(t * s[zero]);
  result.set_support(std::nullopt);
  if (s.support() && t >= 0.0) {
    SupportBox box = *s.support();
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = box.lo[i], hi = box.hi[i];
      box.lo[i] = lo >= 0.0 ? 0.0 : -kInf;
      box.hi[i] = hi <= 0.0 ? 0.0 : kInf;
    }
    result.set_support(std::move(box));
  }
  return result;
}

MomentMatrix moment_matrix(const MomentSeq& s, unsigned d) {
  return moment_matrix(s, d, Poly::constant(s.nvars(), 1.0));
}

MomentMatrix moment_matrix(const MomentSeq& s, unsigned d, const Poly& w) {
  if (w.nvars() != s.nvars()) {
    throw Error(ErrorCode::kDimensionMismatch, "localizing polynomial differs in n");
  }
  const unsigned wdeg = w.is_zero() ? 0u : static_cast<unsigned>(w.degree());
  if (s.order() < 2 * d + wdeg) {
    throw Error(ErrorCode::kTruncation, "moment matrix of degree " + std::to_string(d) +
                                            " needs sequence order " +
                                            std::to_string(2 * d + wdeg) + ", have " +
                                            std::to_string(s.order()));
  }
  BasisMap basis(s.nvars(), d);
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i; j < dim; ++j) {
      const MultiIndex base = basis.multiindex_at(static_cast<std::size_t>(i)) +
                              basis.multiindex_at(static_cast<std::size_t>(j));
      double v = 0.0;
      for (const auto& [kappa, c] : w.terms()) v += c * s[base + kappa];
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return {std::move(basis), std::move(m)};
}

PsdResult is_psd(const Matrix& m, double tol) {
  const double lmin = min_eigenvalue_symmetric(m);
  return {lmin >= -tol * std::max(1.0, inf_norm(m)), lmin};
}

const char* to_string(CarlemanIndicator c) {
  switch (c) {
    case CarlemanIndicator::kDivergesLikely: return "DivergesLikely";
    case CarlemanIndicator::kConvergesLikely: return "ConvergesLikely";
    case CarlemanIndicator::kUnknown: return "Unknown";
  }
  return "Unknown";
}

CarlemanIndicator carleman_indicator(const MomentSeq& s, unsigned terms) {
  if (s.order() < 2 * terms) {
    throw Error(ErrorCode::kTruncation, "Carleman indicator needs sequence order 2 * terms");
  }
  if (terms < 2) return CarlemanIndicator::kUnknown;
  const std::size_t n = s.nvars();
  bool all_diverge = true;
  bool any_converge = false;
  for (std::size_t j = 0; j < n; ++j) {
    // Least-squares slope of log(s_{2k}^{1/2k}) against log k on the upper
    // half of the available k.
    const unsigned first = std::max(1u, terms / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    unsigned count = 0;
    for (unsigned k = 1; k <= terms; ++k) {
      const double m = s[MultiIndex::unit(n, j, 2 * k)];
      if (!(m > 0.0)) return CarlemanIndicator::kUnknown;
      if (k < first) continue;
      const double x = std::log(static_cast<double>(k));
      const double y = std::log(m) / (2.0 * k);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
    const double denom = count * sxx - sx * sx;
    if (count < 2 || denom <= 0.0) return CarlemanIndicator::kUnknown;
    const double slope = (count * sxy - sx * sy) / denom;
    if (slope > kCarlemanDivergeSlope) all_diverge = false;
    if (slope >= kCarlemanConvergeSlope) any_converge = true;
  }
  if (any_converge) return CarlemanIndicator::kConvergesLikely;
  if (all_diverge) return CarlemanIndicator::kDivergesLikely;
  return CarlemanIndicator::kUnknown;
}

}  // namespace pospres
