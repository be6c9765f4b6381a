#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pospres/diffop.hpp"
#include "pospres/linalg.hpp"
#include "pospres/preserver.hpp"

namespace pospres {

struct ThresholdResult {
  double tau_lo;
  double tau_hi;
  unsigned iterations;
  /// Every (t, value) evaluated, in evaluation order.
  std::vector<std::pair<double, double>> curve;
};

/// Bisection with midpoint lo + (hi - lo)/2. Requires f(lo) < 0 <= f(hi);
/// throws kNoSignChange otherwise.
ThresholdResult find_tau(const std::function<double(double)>& f, double lo, double hi, double tol);

// Sigma example: T_t = exp(t (x d)^3), T_t x^k = e^{t k^3} x^k.

/// (x d)^3 = x d + 3 x^2 d^2 + x^3 d^3.
DiffOp sigma_generator();
/// (e^{t k^3})_{k=0..k_max}
std::vector<double> sigma_lambda(double t, unsigned k_max = 4);
/// e^{72t} - e^{66t} - e^{54t} + 2e^{36t} - e^{24t}
double sigma_h2(double t);

struct SigmaPoint {
  double h2;        ///< closed form
  double h2_det;    ///< determinant of the 3x3 Hankel matrix of sigma_lambda
  double sigma3;    ///< smallest eigenvalue of that matrix
  double h2_scale;  ///< sum of the absolute terms of h2, for relative comparisons
};
SigmaPoint sigma_example_curve(double t);

/// Bisects the closed-form h2 on [lo, hi].
ThresholdResult find_tau_sigma(double lo = 1e-4, double hi = 0.1, double tol = 1e-7);

// Drift example: A = a d + (x^2 - 1)/2 d^2 on R[x]_{<=2}.

DiffOp drift_generator(double a);
/// Matrix of A on {1, x, x^2}: [[0, a, -1], [0, 0, 2a], [0, 0, 1]].
Matrix drift_matrix(double a);

struct DriftExpm {
  Matrix closed;   ///< [[1, at, f], [0, 1, g], [0, 0, e^t]]
  Matrix generic;  ///< expm(t * drift_matrix(a))
};
DriftExpm drift_example_expm(double a, double t);

/// m(a, t) = 1 - e^t + a^2 (5 + 8t + 4t^2 - (10 + 8t + t^2) e^t + 5 e^{2t}) / (e^t - 1),
/// the minimum over y of det of the local 2x2 moment matrix of exp(tA) at y.
/// Requires t > 0.
double m_min(double a, double t);

/// Exact minimum over y of the same determinant for exp(tA):
///   (a^2 - 1)(e^t - 1) - a^2 t^2 (1 + 1/(e^t - 1)).
/// The closed form above exceeds it by 4a^2 (e^t - 1 - t)^2 / (e^t - 1), so
/// only this one agrees with check_degree2_pointwise. Requires t > 0.
double m_exact(double a, double t);

/// Brackets the sign change of m(a, .) by doubling from t = tol up to t_max,
/// then bisects. Throws kNoSignChange when m stays negative up to t_max.
ThresholdResult find_tau_drift(double a, double tol = 1e-9, double t_max = 50.0);

/// Same search on m_exact. The operator is eventually positive iff |a| > 1.
ThresholdResult find_tau_drift_exact(double a, double tol = 1e-9, double t_max = 50.0);

/// Best-effort threshold for one polynomial: first sign change of
/// t -> min over the grid of (exp(tA) p)(x), searched by doubling from t0
/// up to t_max. No termination guarantee beyond the cap.
ThresholdResult find_tau_polynomial(const DiffOp& a, const Poly& p,
                                    std::span<const std::vector<double>> grid, double t0,
                                    double t_max, double tol);

/// CSV with header `t,h2,sigma3`, one row per t, %.17g.
std::string sigma_curve_csv(std::span<const double> ts);
/// CSV with header `t,m`, one row per t, %.17g. exact picks m_exact over m_min.
std::string drift_curve_csv(double a, std::span<const double> ts, bool exact = false);

}  // namespace pospres
