#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "pospres/diffop.hpp"
#include "pospres/momseq.hpp"
#include "pospres/preserver.hpp"

namespace pospres {

/// Constant Levy-Khinchin data (Sigma PSD, drift b, finitely atomic nu) plus
/// the killing/creation rate a0.
struct LevyTriple {
  double a0 = 0.0;
  Matrix sigma;
  std::vector<double> b;
  DiscreteMeasure nu{1};

  std::size_t nvars() const { return b.size(); }
  /// Throws unless sigma is n x n, symmetric and PSD up to 1e-12 ||sigma||.
  void validate() const;
};

/// Constant-coefficient generator with
///   a_{e_i} = b_i + sum_{|x|>=1} w x_i,
///   a_{e_i+e_j} = sigma_ij + sum w x^alpha,  a_alpha = sum w x^alpha (|alpha| >= 3),
/// and q_alpha = a_alpha / alpha!. Known exactly when nu is empty, otherwise
/// truncated at max_order.
DiffOp generator_from_levy(const LevyTriple& tr, unsigned max_order);

/// Half-line form: a_1 = b + sum w x, a_k = sum w x^k. Requires b >= 0 and
/// every atom in (0, inf).
DiffOp generator_from_levy_halfline(double a0, double b, const DiscreteMeasure& nu,
                                    unsigned max_order);

/// Moments of the measure behind exp(tA), A = D(s) + beta d + a0:
///   e^{a0 t} conv_exp(s, t) * delta_{beta t}.
MomentSeq semigroup_moments(double a0, std::span<const double> beta, const MomentSeq& s,
                            double t);

std::vector<double> default_ts();
std::vector<double> default_lambdas();

/// Freezes A at every sample y and checks exp(t A_y) as a K-preserver for
/// every t. On R^n one point per freeze suffices (translation invariance);
/// otherwise each frozen semigroup is checked at all sample points of K.
/// Fail refutes that A generates a K-preserving semigroup; otherwise the
/// result is Inconclusive.
PreserverVerdict check_generator_k(const DiffOp& a, const KDescriptor& k, unsigned d,
                                   std::span<const std::vector<double>> ys,
                                   std::span<const double> ts, double tol = kDefaultPsdTol);
PreserverVerdict check_generator_rn(const DiffOp& a, unsigned d,
                                    std::span<const std::vector<double>> ys,
                                    std::span<const double> ts, double tol = kDefaultPsdTol);

/// Finite-order generators on R^n: order at most 2 with a pointwise PSD
/// diffusion matrix (sigma_ii = 2 q_{2e_i}, sigma_ij = q_{e_i+e_j}). For n = 1
/// the sign of q_2 is decided exactly.
PreserverVerdict check_finite_order_generator(const DiffOp& a,
                                              std::span<const std::vector<double>> ys,
                                              double tol = kDefaultPsdTol);

/// q = (1 - lambda A_d)^{-1} p by a dense solve on R[x]_{<=d}, d >= deg p.
/// Throws kSingular when 1 - lambda A_d is not invertible.
Poly resolvent_apply(const DiffOp& a, double lambda, unsigned d, const Poly& p);

/// Grid falsifier for (1 - lambda A_d)^{-1} p >= 0 on K. A singular system
/// at some lambda is recorded as a note.
PreserverVerdict resolvent_check(const DiffOp& a, const KDescriptor& k, unsigned d,
                                 std::span<const double> lambdas, std::span<const Poly> trials,
                                 std::span<const std::vector<double>> grid);
/// Grid falsifier for (1 + lambda A_d) p >= 0 on K.
PreserverVerdict one_plus_check(const DiffOp& a, const KDescriptor& k, unsigned d,
                                std::span<const double> lambdas, std::span<const Poly> trials,
                                std::span<const std::vector<double>> grid);

/// Polynomial Levy data. nu_moments holds, per alpha, the jump part of a_alpha
/// as a polynomial in y (for |alpha| = 1 only atoms with |x| >= 1 count).
/// nu_at, when set, returns nu_y for admissibility and consistency checks.
struct LevyField {
  double a0 = 0.0;
  std::vector<std::vector<Poly>> sigma;
  std::vector<Poly> b;
  std::map<MultiIndex, Poly> nu_moments;
  std::function<DiscreteMeasure(std::span<const double>)> nu_at;
};

struct FieldResult {
  PreserverVerdict verdict;
  DiffOp generator;
};

/// Checks Sigma(y) PSD and nu_y admissible at every sample, then assembles A.
/// A clean run is "sufficient by sampling" and reported as Inconclusive.
FieldResult check_generator_field_sufficient(const LevyField& f,
                                             std::span<const std::vector<double>> ys);

}  // namespace pospres
