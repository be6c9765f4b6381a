#include "pospres/eventual.hpp"

#include <cmath>
#include <cstdio>

#include "pospres/error.hpp"
#include "pospres/momseq.hpp"

namespace pospres {

ThresholdResult find_tau(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi) || !(tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "find_tau needs lo < hi and tol > 0");
  }
  ThresholdResult r{lo, hi, 0, {}};
  auto eval_at = [&](double t) {
    const double v = f(t);
    r.curve.emplace_back(t, v);
    return v;
  };
  if (!(eval_at(lo) < 0.0) || !(eval_at(hi) >= 0.0)) {
    throw Error(ErrorCode::kNoSignChange, "no sign change from negative to nonnegative in [lo, hi]");
  }
  while (r.tau_hi - r.tau_lo > tol) {
    const double mid = r.tau_lo + (r.tau_hi - r.tau_lo) / 2;
    if (mid <= r.tau_lo || mid >= r.tau_hi) break;  // no representable midpoint left
    ++r.iterations;
    if (eval_at(mid) < 0.0) {
      r.tau_lo = mid;
    } else {
      r.tau_hi = mid;
    }
  }
  return r;
}

DiffOp sigma_generator() {
  DiffOp::Coeffs c;
  c[MultiIndex({1})] = Poly::monomial(MultiIndex({1}));
  c[MultiIndex({2})] = Poly::monomial(MultiIndex({2}), 3.0);
  c[MultiIndex({3})] = Poly::monomial(MultiIndex({3}));
  return DiffOp(1, 3, std::move(c), Tail::kZero);
}

std::vector<double> sigma_lambda(double t, unsigned k_max) {
  std::vector<double> l;
  for (unsigned k = 0; k <= k_max; ++k) l.push_back(std::exp(t * k * k * k));
  return l;
}

double sigma_h2(double t) {
  // Factor e^{24t} out so the bracket cancels in expm1 form.
  const double inner = std::expm1(48 * t) - std::expm1(42 * t) - std::expm1(30 * t) +
                       2 * std::expm1(12 * t);
  return std::exp(24 * t) * inner;
}

SigmaPoint sigma_example_curve(double t) {
  const auto l = sigma_lambda(t);
  MomentSeq s(1, 4, l);
  const MomentMatrix h = moment_matrix(s, 2);
  SigmaPoint p;
  p.h2 = sigma_h2(t);
  p.h2_det = h.entries.determinant();
  p.sigma3 = min_eigenvalue_symmetric(h.entries);
  p.h2_scale = std::exp(72 * t) + std::exp(66 * t) + std::exp(54 * t) + 2 * std::exp(36 * t) +
               std::exp(24 * t);
  return p;
}

ThresholdResult find_tau_sigma(double lo, double hi, double tol) {
  return find_tau(sigma_h2, lo, hi, tol);
}

DiffOp drift_generator(double a) {
  DiffOp::Coeffs c;
  c[MultiIndex({1})] = Poly::constant(1, a);
  c[MultiIndex({2})] = Poly::monomial(MultiIndex({2}), 0.5) - Poly::constant(1, 0.5);
  return DiffOp(1, 2, std::move(c), Tail::kZero);
}

Matrix drift_matrix(double a) {
  Matrix m(3, 3);
  m << 0, a, -1, 0, 0, 2 * a, 0, 0, 1;
  return m;
}

DriftExpm drift_example_expm(double a, double t) {
  const double em1 = std::expm1(t);
  DriftExpm r;
  r.closed.resize(3, 3);
  r.closed << 1, a * t, (2 * a * a - 1) * em1 - 2 * a * a * t, 0, 1, 2 * a * em1, 0, 0, std::exp(t);
  r.generic = expm(t * drift_matrix(a));
  return r;
}

double m_min(double a, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::kInvalidArgument, "m_min needs t > 0");
  const double em1 = std::expm1(t);
  const double a2 = a * a;
  if (t < 1.0) {
    // N(t) = 5 + 8t + 4t^2 - (10 + 8t + t^2) e^t + 5 e^{2t} = O(t^4); sum its
    // Taylor series, coefficients (5 * 2^k - 10 - 8k - k(k-1)) / k! for k >= 4.
    double num = 0.0, tk = t * t * t, kfact = 6.0, two_k = 8.0;
    for (unsigned k = 4; k < 60; ++k) {
      tk *= t;
      kfact *= k;
      two_k *= 2.0;
      const double term = (5.0 * two_k - 10.0 - 8.0 * k - k * (k - 1.0)) / kfact * tk;
      num += term;
      if (std::abs(term) < 1e-18 * std::abs(num)) break;
    }
    return -em1 + a2 * num / em1;
  }
  // Dividing N by e^t - 1 gives 5(e^t - 1) - 8t - t^2 + 3t^2/(e^t - 1), so
  //   m = (5a^2 - 1)(e^t - 1) - a^2 t (8 + t - 3t/(e^t - 1)),
  // which avoids cancelling two terms of size e^t. 5a^2 - 1 is formed with the
  // rounding error of a^2 restored.
  const double err = std::fma(a, a, -a2);
  const double c = std::fma(5.0, a2, -1.0) + 5.0 * err;
  return c * em1 - a2 * t * (8.0 + t - 3.0 * t / em1);
}

double m_exact(double a, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::kInvalidArgument, "m_exact needs t > 0");
  const double em1 = std::expm1(t);
  const double a2 = a * a;
  if (t < 1.0) {
    // (e^t-1)^2 - t^2 (e^t-1) - t^2 = O(t^4), Taylor coefficients
    // (2^k - 2)/k! - 1/(k-2)! for k >= 4.
    double num = 0.0, tk = t * t * t, kfact = 6.0, km2fact = 1.0, two_k = 8.0;
    for (unsigned k = 4; k < 60; ++k) {
      tk *= t;
      kfact *= k;
      km2fact *= k - 2;
      two_k *= 2.0;
      const double term = ((two_k - 2.0) / kfact - 1.0 / km2fact) * tk;
      num += term;
      if (std::abs(term) < 1e-18 * std::abs(num)) break;
    }
    return -em1 + a2 * num / em1;
  }
  const double err = std::fma(a, a, -a2);
  const double c = (a2 - 1.0) + err;
  return c * em1 - a2 * t * t * (1.0 + 1.0 / em1);
}

namespace {

ThresholdResult bracket_and_bisect(const std::function<double(double)>& m, double tol,
                                   double t_max) {
  if (!(tol > 0.0) || !(t_max > tol)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold search needs 0 < tol < t_max");
  }
  std::vector<std::pair<double, double>> search;
  double lo = tol;
  double v = m(lo);
  search.emplace_back(lo, v);
  if (!(v < 0.0)) {
    throw Error(ErrorCode::kNoSignChange, "curve is already nonnegative at t = tol");
  }
  double hi = lo;
  while (true) {
    hi = std::min(2.0 * lo, t_max);
    v = m(hi);
    search.emplace_back(hi, v);
    if (v >= 0.0) break;
    if (hi >= t_max) {
      throw Error(ErrorCode::kNoSignChange,
                  "curve stays negative for every sampled t up to " + [&] {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%g", t_max);
                    return std::string(buf);
                  }());
    }
    lo = hi;
  }
  ThresholdResult r = find_tau(m, lo, hi, tol);
  search.insert(search.end(), r.curve.begin(), r.curve.end());
  r.curve = std::move(search);
  return r;
}

}  // namespace

ThresholdResult find_tau_drift(double a, double tol, double t_max) {
  return bracket_and_bisect([a](double t) { return m_min(a, t); }, tol, t_max);
}

ThresholdResult find_tau_drift_exact(double a, double tol, double t_max) {
  return bracket_and_bisect([a](double t) { return m_exact(a, t); }, tol, t_max);
}

ThresholdResult find_tau_polynomial(const DiffOp& a, const Poly& p,
                                    std::span<const std::vector<double>> grid, double t0,
                                    double t_max, double tol) {
  if (p.nvars() != a.nvars()) throw Error(ErrorCode::kDimensionMismatch, "p and A differ in n");
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "find_tau_polynomial needs a grid");
  const auto d = static_cast<unsigned>(std::max(0, p.degree()));
  auto curve = [&](double t) {
    const Poly q = apply(exp_op(a, t, d), p);
    double lowest = eval(q, grid.front());
    for (const auto& x : grid) lowest = std::min(lowest, eval(q, x));
    return lowest;
  };
  double lo = t0;
  if (!(curve(lo) < 0.0)) throw Error(ErrorCode::kNoSignChange, "exp(t0 A) p is already nonnegative");
  double hi = lo;
  while (true) {
    hi = std::min(2.0 * lo, t_max);
    if (curve(hi) >= 0.0) break;
    if (hi >= t_max) throw Error(ErrorCode::kNoSignChange, "no sign change up to t_max");
    lo = hi;
  }
  return find_tau(curve, lo, hi, tol);
}

namespace {

void append_row(std::string& out, std::initializer_list<double> values) {
  char buf[40];
  bool first = true;
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!first) out += ',';
    out += buf;
    first = false;
  }
  out += '\n';
}

}  // namespace

std::string sigma_curve_csv(std::span<const double> ts) {
  std::string out = "t,h2,sigma3\n";
  for (double t : ts) {
    const SigmaPoint p = sigma_example_curve(t);
    append_row(out, {t, p.h2, p.sigma3});
  }
  return out;
}

std::string drift_curve_csv(double a, std::span<const double> ts, bool exact) {
  std::string out = "t,m\n";
  for (double t : ts) append_row(out, {t, exact ? m_exact(a, t) : m_min(a, t)});
  return out;
}

}  // namespace pospres
