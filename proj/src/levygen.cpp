#include "pospres/levygen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pospres/error.hpp"

namespace pospres {

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double power(std::span<const double> x, const MultiIndex& alpha) {
  double p = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) p *= std::pow(x[i], static_cast<int>(alpha[i]));
  return p;
}

// Index pair (i, j), i <= j, for a degree-2 multi-index.
std::pair<std::size_t, std::size_t> second_order_pair(const MultiIndex& alpha) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (unsigned k = 0; k < alpha[i]; ++k) idx.push_back(i);
  }
  return {idx[0], idx[1]};
}

Matrix diffusion_matrix(const DiffOp& a, std::span<const double> y) {
  const std::size_t n = a.nvars();
  Matrix s = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& alpha : monomials_of_degree(n, 2)) {
    const auto [i, j] = second_order_pair(alpha);
    const double q = eval(a.coeff(alpha), y);
    const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
    if (i == j) {
      s(ii, ii) = 2.0 * q;
    } else {
      s(ii, jj) = q;
      s(jj, ii) = q;
    }
  }
  return s;
}

Vector coords(const BasisMap& basis, const Poly& p) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (const auto& [alpha, c] : p.terms()) {
    v(static_cast<Eigen::Index>(basis.index_of(alpha))) = c;
  }
  return v;
}

Poly from_coords(const BasisMap& basis, const Vector& v) {
  Poly p(basis.nvars());
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    p.add_term(basis.multiindex_at(i), v(static_cast<Eigen::Index>(i)));
  }
  return p;
}

struct GridMin {
  double value;
  double scale;
  const std::vector<double>* at;
};

GridMin grid_min(const Poly& q, std::span<const std::vector<double>* const> pts) {
  GridMin m{std::numeric_limits<double>::infinity(), 1.0, nullptr};
  for (const auto* x : pts) {
    const double v = eval(q, *x);
    m.scale = std::max(m.scale, std::abs(v));
    if (v < m.value) {
      m.value = v;
      m.at = x;
    }
  }
  return m;
}

Eigen::FullPivLU<Matrix> shifted_lu(const OpMatrix& am, double lambda) {
  const auto dim = static_cast<Eigen::Index>(am.basis.dim());
  return Eigen::FullPivLU<Matrix>(Matrix(Matrix::Identity(dim, dim) - lambda * am.entries));
}

// Shared driver for the resolvent and (1 + lambda A) falsifiers.
PreserverVerdict lambda_falsifier(const DiffOp& a, const KDescriptor& k, unsigned d,
                                  std::span<const double> lambdas, std::span<const Poly> trials,
                                  std::span<const std::vector<double>> grid, bool resolvent) {
  if (k.nvars() != a.nvars()) throw Error(ErrorCode::kDimensionMismatch, "K and operator differ in n");
  const OpMatrix am = matrix_rep(a, d);
  const auto dim = static_cast<Eigen::Index>(am.basis.dim());
  std::vector<const std::vector<double>*> pts;
  for (const auto& x : grid) {
    if (k.contains(x)) pts.push_back(&x);
  }
  PreserverVerdict v;
  std::size_t used = 0;
  for (double lambda : lambdas) {
    const Matrix m = Matrix::Identity(dim, dim) + lambda * am.entries;
    Eigen::FullPivLU<Matrix> lu;
    if (resolvent) {
      lu = shifted_lu(am, lambda);
      if (!lu.isInvertible()) {
        v.notes.push_back("1 - lambda A_d is singular at lambda=" + std::to_string(lambda));
        continue;
      }
    }
    for (const auto& p : trials) {
      if (p.degree() > static_cast<int>(d)) continue;
      ++used;
      const Vector pv = coords(am.basis, p);
      const Poly q = from_coords(am.basis, resolvent ? Vector(lu.solve(pv)) : Vector(m * pv));
      const GridMin g = grid_min(q, pts);
      if (g.at && g.value < -1e-12 * g.scale) {
        Witness w;
        w.kind = Witness::Kind::kGrid;
        w.x = *g.at;
        w.value = g.value;
        w.lambda = lambda;
        w.trial = p;
        v.witnesses.push_back(std::move(w));
      }
    }
  }
  v.checked = std::to_string(used) + " (trial, lambda) pairs on " + std::to_string(pts.size()) +
              " grid points";
  if (v.witnesses.empty()) {
    v.status = Status::kInconclusive;
    if (!lambdas.empty()) {
      const auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
      v.notes.push_back("no witness for lambda in [" + std::to_string(*lo) + ", " +
                        std::to_string(*hi) + "]");
    }
  } else {
    v.status = Status::kFail;
  }
  return v;
}

}  // namespace

void LevyTriple::validate() const {
  const auto n = static_cast<Eigen::Index>(b.size());
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "Levy triple needs n >= 1");
  if (sigma.rows() != n || sigma.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "sigma must be n x n with n = len(b)");
  }
  if (nu.nvars() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "nu has the wrong dimension");
  const double scale = std::max(1.0, max_abs(sigma));
  if (max_abs(sigma - sigma.transpose()) > 1e-12 * scale) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be symmetric");
  }
  if (min_eigenvalue_symmetric(sigma) < -1e-12 * scale) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be positive semidefinite");
  }
}

DiffOp generator_from_levy(const LevyTriple& tr, unsigned max_order) {
  tr.validate();
  const std::size_t n = tr.nvars();
  const unsigned order = tr.nu.empty() ? std::min(max_order, 2u) : max_order;
  std::map<MultiIndex, double> q;
  q[MultiIndex::zero(n)] = tr.a0;
  const BasisMap basis(n, order);
  for (const auto& alpha : basis.monomials()) {
    const unsigned deg = alpha.degree();
    if (deg == 0) continue;
    double a = 0.0;
    if (deg == 1) {
      std::size_t i = 0;
      while (alpha[i] == 0) ++i;
      a = tr.b[i];
      for (const auto& atom : tr.nu.atoms()) {
        if (norm2(atom.point) >= 1.0) a += atom.weight * atom.point[i];
      }
    } else {
      if (deg == 2) {
        const auto [i, j] = second_order_pair(alpha);
        a = tr.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      for (const auto& atom : tr.nu.atoms()) a += atom.weight * power(atom.point, alpha);
    }
    q[alpha] = a / factorial(alpha);
  }
  return DiffOp::constant(n, order, q, tr.nu.empty() ? Tail::kZero : Tail::kUnknown);
}

DiffOp generator_from_levy_halfline(double a0, double b, const DiscreteMeasure& nu,
                                    unsigned max_order) {
  if (nu.nvars() != 1) throw Error(ErrorCode::kDimensionMismatch, "half-line generator needs n = 1");
  if (!(b >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "half-line drift b must be >= 0");
  for (const auto& atom : nu.atoms()) {
    if (!(atom.point[0] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "half-line jump atoms must lie in (0, inf)");
    }
  }
  const unsigned order = nu.empty() ? std::min(max_order, 1u) : max_order;
  std::map<MultiIndex, double> q;
  q[MultiIndex({0})] = a0;
  for (unsigned k = 1; k <= order; ++k) {
    double a = k == 1 ? b : 0.0;
    for (const auto& atom : nu.atoms()) a += atom.weight * std::pow(atom.point[0], static_cast<int>(k));
    q[MultiIndex({k})] = a / factorial(k);
  }
  return DiffOp::constant(1, order, q, nu.empty() ? Tail::kZero : Tail::kUnknown);
}

MomentSeq semigroup_moments(double a0, std::span<const double> beta, const MomentSeq& s,
                            double t) {
  if (beta.size() != s.nvars()) throw Error(ErrorCode::kDimensionMismatch, "beta has the wrong length");
  std::vector<double> shift(beta.begin(), beta.end());
  for (double& v : shift) v *= t;
  MomentSeq out = convolve(conv_exp(s, t), dirac_moments(shift, s.order()));
  out *= std::exp(a0 * t);
  return out;
}

std::vector<double> default_ts() { return {1e-3, 1e-2, 1e-1, 1.0}; }
std::vector<double> default_lambdas() { return {1e-3, 1e-2, 1e-1}; }

PreserverVerdict check_generator_k(const DiffOp& a, const KDescriptor& k, unsigned d,
                                   std::span<const std::vector<double>> ys,
                                   std::span<const double> ts, double tol) {
  if (k.nvars() != a.nvars()) throw Error(ErrorCode::kDimensionMismatch, "K and operator differ in n");
  const bool full = std::holds_alternative<FullSpace>(k.variant());
  unsigned order = 2 * d;
  if (!full) {
    for (const auto& g : k.defining_polys()) {
      order = std::max(order, 2 * d + static_cast<unsigned>(std::max(0, g.degree())));
    }
  }
  if (a.usable_degree() < order) {
    throw Error(ErrorCode::kTruncation, "check_generator: need operator order >= " + std::to_string(order));
  }
  std::vector<std::vector<double>> in_k;
  for (const auto& y : ys) {
    if (k.contains(y)) in_k.push_back(y);
  }
  PreserverVerdict v;
  for (const auto& y : in_k) {
    const DiffOp frozen = a.frozen_at(y);
    for (double t : ts) {
      const DiffOp e = exp_op(frozen, t, order);
      const PreserverVerdict r =
          full ? check_preserver_rn(e, d, std::span(&y, 1), tol) : check_preserver_k(e, k, d, in_k, tol);
      for (auto w : r.witnesses) {
        w.note = "frozen at " + [&] {
          std::string s = "(";
          for (std::size_t i = 0; i < y.size(); ++i) s += (i ? "," : "") + std::to_string(y[i]);
          return s + ")";
        }() + (w.note.empty() ? "" : "; " + w.note);
        if (full) w.y = y;
        w.t = t;
        v.witnesses.push_back(std::move(w));
      }
    }
  }
  v.checked = "exp(t A_y) for " + std::to_string(in_k.size()) + " freeze points and " +
              std::to_string(ts.size()) + " times, degree " + std::to_string(d);
  v.status = v.witnesses.empty() ? Status::kInconclusive : Status::kFail;
  return v;
}

PreserverVerdict check_generator_rn(const DiffOp& a, unsigned d,
                                    std::span<const std::vector<double>> ys,
                                    std::span<const double> ts, double tol) {
  return check_generator_k(a, FullSpace{a.nvars()}, d, ys, ts, tol);
}

PreserverVerdict check_finite_order_generator(const DiffOp& a,
                                              std::span<const std::vector<double>> ys,
                                              double tol) {
  if (!a.degree_preserving()) {
    throw Error(ErrorCode::kNotInAlgebra, "generator has a coefficient with deg q_alpha > |alpha|");
  }
  PreserverVerdict v;
  if (a.tail() == Tail::kUnknown) {
    v.notes.push_back("operator is truncated; only stored coefficients were examined");
  }
  for (const auto& [alpha, q] : a.coeffs()) {
    if (alpha.degree() >= 3) {
      Witness w;
      w.kind = Witness::Kind::kCoefficient;
      w.value = q.max_abs_coeff();
      w.note = "nonzero coefficient of order " + std::to_string(alpha.degree()) + " at " +
               to_string(alpha);
      v.witnesses.push_back(std::move(w));
    }
  }
  if (a.nvars() == 1) {
    const Poly q2 = a.coeff(MultiIndex({2}));
    std::vector<double> c(static_cast<std::size_t>(std::max(0, q2.degree()) + 1), 0.0);
    for (const auto& [alpha, val] : q2.terms()) c[alpha[0]] = val;
    const UnivariateMin m = global_minimum(c);
    if (!m.bounded_below || m.value < -tol * std::max(1.0, q2.max_abs_coeff())) {
      Witness w;
      w.kind = Witness::Kind::kDiffusion;
      w.y = {m.argmin};
      w.value = m.bounded_below ? 2.0 * m.value : -std::numeric_limits<double>::infinity();
      w.note = "second-order coefficient negative";
      v.witnesses.push_back(std::move(w));
    }
  }
  for (const auto& y : ys) {
    const PsdResult r = is_psd(diffusion_matrix(a, y), tol);
    if (!r.psd) {
      Witness w;
      w.kind = Witness::Kind::kDiffusion;
      w.y = y;
      w.value = r.min_eigenvalue;
      v.witnesses.push_back(std::move(w));
    }
  }
  v.checked = "order <= 2 and diffusion matrix PSD at " + std::to_string(ys.size()) + " points";
  v.status = v.witnesses.empty() ? Status::kInconclusive : Status::kFail;
  return v;
}

Poly resolvent_apply(const DiffOp& a, double lambda, unsigned d, const Poly& p) {
  if (p.nvars() != a.nvars()) throw Error(ErrorCode::kDimensionMismatch, "polynomial and operator differ in n");
  if (p.degree() > static_cast<int>(d)) throw Error(ErrorCode::kInvalidArgument, "deg p exceeds d");
  const OpMatrix am = matrix_rep(a, d);
  const Eigen::FullPivLU<Matrix> lu = shifted_lu(am, lambda);
  if (!lu.isInvertible()) throw Error(ErrorCode::kSingular, "1 - lambda A_d is singular");
  return from_coords(am.basis, Vector(lu.solve(coords(am.basis, p))));
}

PreserverVerdict resolvent_check(const DiffOp& a, const KDescriptor& k, unsigned d,
                                 std::span<const double> lambdas, std::span<const Poly> trials,
                                 std::span<const std::vector<double>> grid) {
  return lambda_falsifier(a, k, d, lambdas, trials, grid, true);
}

PreserverVerdict one_plus_check(const DiffOp& a, const KDescriptor& k, unsigned d,
                                std::span<const double> lambdas, std::span<const Poly> trials,
                                std::span<const std::vector<double>> grid) {
  return lambda_falsifier(a, k, d, lambdas, trials, grid, false);
}

FieldResult check_generator_field_sufficient(const LevyField& f,
                                             std::span<const std::vector<double>> ys) {
  const std::size_t n = f.b.size();
  if (n == 0 || f.sigma.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "field needs n x n sigma and n drift entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (f.sigma[i].size() != n) throw Error(ErrorCode::kDimensionMismatch, "sigma must be n x n");
    if (f.b[i].nvars() != n) throw Error(ErrorCode::kDimensionMismatch, "drift has the wrong n");
    if (f.b[i].degree() > 1) throw Error(ErrorCode::kInvalidArgument, "drift entries need degree <= 1");
    for (std::size_t j = 0; j < n; ++j) {
      const Poly& s = f.sigma[i][j];
      if (s.nvars() != n) throw Error(ErrorCode::kDimensionMismatch, "sigma has the wrong n");
      if (s.degree() > 2) throw Error(ErrorCode::kInvalidArgument, "sigma entries need degree <= 2");
      if (max_coeff_diff(s, f.sigma[j][i]) > 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "sigma must be symmetric");
      }
    }
  }
  unsigned order = 2;
  for (const auto& [alpha, p] : f.nu_moments) {
    if (alpha.size() != n || p.nvars() != n || alpha.is_zero()) {
      throw Error(ErrorCode::kInvalidArgument, "bad jump moment entry " + to_string(alpha));
    }
    if (p.degree() > static_cast<int>(alpha.degree())) {
      throw Error(ErrorCode::kNotInAlgebra, "jump moment " + to_string(alpha) + " has too high a degree");
    }
    order = std::max(order, alpha.degree());
  }

  DiffOp::Coeffs coeffs;
  coeffs[MultiIndex::zero(n)] = Poly::constant(n, f.a0);
  for (std::size_t i = 0; i < n; ++i) coeffs[MultiIndex::unit(n, i)] = f.b[i];
  for (const auto& alpha : monomials_of_degree(n, 2)) {
    const auto [i, j] = second_order_pair(alpha);
    coeffs[alpha] = i == j ? f.sigma[i][i] * 0.5 : f.sigma[i][j];
  }
  for (const auto& [alpha, p] : f.nu_moments) {
    Poly& q = coeffs.try_emplace(alpha, Poly(n)).first->second;
    q += p * (1.0 / factorial(alpha));
  }
  DiffOp gen(n, order, std::move(coeffs), f.nu_moments.empty() ? Tail::kZero : Tail::kUnknown);

  PreserverVerdict v;
  for (const auto& y : ys) {
    Matrix s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = eval(f.sigma[i][j], y);
      }
    }
    const PsdResult r = is_psd(s, 1e-12);
    if (!r.psd) {
      Witness w;
      w.kind = Witness::Kind::kDiffusion;
      w.y = y;
      w.value = r.min_eigenvalue;
      v.witnesses.push_back(std::move(w));
    }
    if (f.nu_at) {
      const DiscreteMeasure nu = f.nu_at(y);
      for (const auto& [alpha, p] : f.nu_moments) {
        double expect = 0.0;
        for (const auto& atom : nu.atoms()) {
          if (alpha.degree() == 1 && norm2(atom.point) < 1.0) continue;
          expect += atom.weight * power(atom.point, alpha);
        }
        const double got = eval(p, y);
        if (std::abs(got - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
          Witness w;
          w.kind = Witness::Kind::kMeasure;
          w.y = y;
          w.value = got - expect;
          w.note = "jump moment " + to_string(alpha) + " disagrees with nu_y";
          v.witnesses.push_back(std::move(w));
        }
      }
    }
  }
  v.checked = "Sigma(y) PSD and nu_y admissible at " + std::to_string(ys.size()) + " points";
  if (v.witnesses.empty()) {
    v.status = Status::kInconclusive;
    v.notes.push_back("sufficient by sampling");
  } else {
    v.status = Status::kFail;
  }
  return {std::move(v), std::move(gen)};
}

}  // namespace pospres
