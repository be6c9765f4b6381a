#include "pospres/diffop.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pospres/error.hpp"
#include "pospres/momseq.hpp"

using namespace pospres;

namespace {

MultiIndex mi(std::vector<unsigned> e) { return MultiIndex(std::move(e)); }

Poly px(std::string_view s, std::size_t n = 1) { return parse_poly(s, n); }

// Random element of the algebra: deg q_alpha <= |alpha|.
DiffOp random_op(std::mt19937& rng, std::size_t n, unsigned order, bool constant = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DiffOp::Coeffs c;
  const BasisMap basis(n, order);
  for (const auto& alpha : basis.monomials()) {
    Poly q(n);
    const BasisMap inner(n, constant ? 0 : alpha.degree());
    for (const auto& g : inner.monomials()) q.add_term(g, u(rng) / ((1.0 + alpha.degree()) * (1.0 + alpha.degree())));
    c.emplace(alpha, q);
  }
  // Keep q_0 away from zero so the operator is invertible.
  c[MultiIndex::zero(n)] = Poly::constant(n, 1.5);
  return DiffOp(n, order, std::move(c), Tail::kZero);
}

double identity_error(const DiffOp& t, unsigned d) {
  return max_coeff_diff(t, DiffOp::identity(t.nvars()), d);
}

}  // namespace

TEST(DiffOp, ApplyBasics) {
  EXPECT_EQ(apply(DiffOp::identity(1), px("x^3 - 2")), px("x^3 - 2"));
  EXPECT_EQ(apply(DiffOp::partial(mi({2})), px("x^4")), px("12 * x^2"));
  DiffOp::Coeffs c;
  c.emplace(mi({1}), px("x"));
  const DiffOp euler(1, 1, c);
  for (unsigned m = 0; m < 7; ++m) {
    const Poly xm = Poly::monomial(mi({m}));
    EXPECT_EQ(apply(euler, xm), xm * static_cast<double>(m));
  }
}

TEST(DiffOp, ApplyRejectsShortTruncation) {
  const DiffOp t = DiffOp::partial(mi({1})).truncated(2);
  EXPECT_NO_THROW(apply(t, px("x^2")));
  try {
    apply(t, px("x^3"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTruncation);
  }
  EXPECT_THROW(t.coeff(mi({3})), Error);
}

TEST(DiffOp, ConstructionChecksAlgebraMembership) {
  DiffOp::Coeffs bad;
  bad.emplace(mi({0}), px("x"));
  EXPECT_FALSE(DiffOp(1, 0, bad).degree_preserving());
  try {
    DiffOp::in_algebra(1, 0, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotInAlgebra);
  }
  EXPECT_THROW(matrix_rep(DiffOp(1, 0, bad), 2), Error);
}

TEST(DiffOp, DegreeNeverGrows) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const DiffOp t = random_op(rng, n, 4);
    const BasisMap basis(n, 4);
    for (const auto& alpha : basis.monomials()) {
      const Poly image = apply(t, Poly::monomial(alpha));
      EXPECT_LE(image.degree(), static_cast<int>(alpha.degree()));
    }
  }
}

TEST(DiffOp, MatrixOfDriftGenerator) {
  const double a = 0.7;
  DiffOp::Coeffs c;
  c.emplace(mi({1}), Poly::constant(1, a));
  c.emplace(mi({2}), px("0.5 * x^2 - 0.5"));
  const OpMatrix m = matrix_rep(DiffOp(1, 2, c), 2);
  Matrix want(3, 3);
  want << 0, a, -1, 0, 0, 2 * a, 0, 0, 1;
  EXPECT_EQ(m.entries, want);
  const DiffOp back = canonical_from_action(m);
  EXPECT_LT(max_coeff_diff(back, DiffOp(1, 2, c), 2), 1e-15);
}

TEST(DiffOp, MatrixAgreesWithApply) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const DiffOp t = random_op(rng, 2, 5);
  const OpMatrix m = matrix_rep(t, 5);
  Vector v(static_cast<Eigen::Index>(m.basis.dim()));
  Poly p(2);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = u(rng);
    p.add_term(m.basis.multiindex_at(static_cast<std::size_t>(i)), v(i));
  }
  const Vector mv = m.entries * v;
  const Poly tp = apply(t, p);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(mv(i), tp.coeff(m.basis.multiindex_at(static_cast<std::size_t>(i))), 1e-13);
  }
}

TEST(DiffOp, ConstantCoefficientMatrixIsTriangularWithDiagonalQ0) {
  std::mt19937 rng(5);
  const DiffOp t = random_op(rng, 2, 4, true);
  const Matrix m = matrix_rep(t, 4).entries;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    EXPECT_DOUBLE_EQ(m(i, i), 1.5);
    for (Eigen::Index j = 0; j < i; ++j) EXPECT_EQ(m(i, j), 0.0);
  }
}

TEST(DiffOp, DiracOperatorIsTaylorShift) {
  const std::vector<double> c = {0.3, -1.2};
  const DiffOp shift = dop_from_seq(dirac_moments(c, 5));
  const OpMatrix m = matrix_rep(shift, 5);
  for (std::size_t j = 0; j < m.basis.dim(); ++j) {
    const Poly want = taylor_shift(Poly::monomial(m.basis.multiindex_at(j)), c);
    for (std::size_t i = 0; i < m.basis.dim(); ++i) {
      EXPECT_NEAR(m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                  want.coeff(m.basis.multiindex_at(i)), 1e-14);
    }
  }
  // And the shift matrix recovers q_alpha = c^alpha / alpha!.
  const DiffOp back = canonical_from_action(m);
  for (const auto& alpha : m.basis.monomials()) {
    const double want = std::pow(c[0], alpha[0]) * std::pow(c[1], alpha[1]) / factorial(alpha);
    EXPECT_NEAR(back.coeff(alpha).coeff(MultiIndex::zero(2)), want, 1e-13);
  }
}

TEST(DiffOp, CanonicalRoundTrip) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const DiffOp t = random_op(rng, n, 4);
    const OpMatrix m = matrix_rep(t, 4);
    const DiffOp back = canonical_from_action(m);
    EXPECT_LT(max_abs(matrix_rep(back, 4).entries - m.entries), 1e-11);
    EXPECT_LT(max_coeff_diff(back, t, 4), 1e-11);
  }
  EXPECT_LT(identity_error(canonical_from_action(matrix_rep(DiffOp::identity(3), 3)), 3), 1e-15);
}

TEST(DiffOp, CanonicalRejectsDegreeRaisingAction) {
  // Multiplication by x maps 1 to x: not degree preserving.
  const BasisMap basis(1, 2);
  Matrix m = Matrix::Zero(3, 3);
  m(1, 0) = 1.0;
  m(2, 1) = 1.0;
  try {
    canonical_from_action({basis, m});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotInAlgebra);
  }
}

TEST(DiffOp, ComposeMatchesLeibnizAndMatrices) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const DiffOp t = random_op(rng, n, 5);
    const DiffOp s = random_op(rng, n, 5);
    const DiffOp ts = compose(t, s, 5);
    EXPECT_LT(max_coeff_diff(ts, leibniz_product(t, s, 5), 5), 1e-11);
    const Matrix prod = matrix_rep(t, 5).entries * matrix_rep(s, 5).entries;
    EXPECT_LT(max_abs(matrix_rep(ts, 5).entries - prod), 1e-11);
    EXPECT_LT(max_coeff_diff(compose(t, DiffOp::identity(n), 5), t, 5), 1e-14);
  }
}

TEST(DiffOp, ComposeIsAssociative) {
  std::mt19937 rng(17);
  const DiffOp a = random_op(rng, 2, 4);
  const DiffOp b = random_op(rng, 2, 4);
  const DiffOp c = random_op(rng, 2, 4);
  EXPECT_LT(max_coeff_diff(compose(compose(a, b, 4), c, 4), compose(a, compose(b, c, 4), 4), 4),
            1e-10);
}

TEST(DiffOp, ConstantOperatorsCommuteAndConvolve) {
  const DiscreteMeasure mu(1, {{{0.5}, 1.0}, {{-1.0}, 2.0}});
  const DiscreteMeasure nu(1, {{{2.0}, 0.5}, {{0.25}, 1.0}});
  const MomentSeq s = from_measure(mu, 6);
  const MomentSeq t = from_measure(nu, 6);
  const DiffOp st = compose(dop_from_seq(s), dop_from_seq(t), 6);
  const DiffOp ts = compose(dop_from_seq(t), dop_from_seq(s), 6);
  EXPECT_LT(max_coeff_diff(st, ts, 6), 1e-12);
  EXPECT_LT(max_coeff_diff(st, dop_from_seq(convolve(s, t)), 6), 1e-11);
  ASSERT_TRUE(st.certificate().has_value());
  EXPECT_EQ(st.certificate()->kind, Certificate::Kind::kConvolution);
}

TEST(DiffOp, InverseIsTwoSided) {
  std::mt19937 rng(19);
  for (unsigned d : {3u, 6u}) {
    for (std::size_t n = 1; n <= 2; ++n) {
      const DiffOp t = random_op(rng, n, d);
      const DiffOp b = invert(t, d);
      EXPECT_LT(identity_error(compose(t, b, d), d), 1e-10);
      EXPECT_LT(identity_error(compose(b, t, d), d), 1e-10);
      // Dense inversion as an independent oracle.
      const Matrix dense = matrix_rep(t, d).entries.inverse();
      EXPECT_LT(max_abs(matrix_rep(b, d).entries - dense), 1e-10);
    }
  }
}

TEST(DiffOp, InverseOfOnePlusDerivativeIsGeometric) {
  const DiffOp t = DiffOp::identity(1) + DiffOp::partial(mi({1}));
  const DiffOp b = invert(t, 7);
  for (unsigned k = 0; k <= 7; ++k) {
    EXPECT_NEAR(b.coeff(mi({k})).coeff(mi({0})), (k % 2 ? -1.0 : 1.0), 1e-14);
  }
}

TEST(DiffOp, InverseOfResolventIsEvenSeries) {
  const double lambda = 0.3;
  const DiffOp t = DiffOp::identity(1) + DiffOp::partial(mi({2}), -lambda);
  const DiffOp b = invert(t, 8);
  for (unsigned k = 0; k <= 8; ++k) {
    const double want = k % 2 ? 0.0 : std::pow(lambda, k / 2);
    EXPECT_NEAR(b.coeff(mi({k})).coeff(mi({0})), want, 1e-14);
  }
}

TEST(DiffOp, InvertRejectsZeroConstantTerm) {
  try {
    invert(DiffOp::partial(mi({1})), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotInvertible);
  }
}

TEST(DiffOp, ExpOfDerivativeIsShiftAndEulerScales) {
  const double c = -0.8;
  const DiffOp e = exp_op(DiffOp::partial(mi({1}), c), 1.0, 6);
  const OpMatrix m = matrix_rep(e, 6);
  const std::vector<double> shift = {c};
  for (unsigned j = 0; j <= 6; ++j) {
    const Poly want = taylor_shift(Poly::monomial(mi({j})), shift);
    for (unsigned i = 0; i <= 6; ++i) EXPECT_NEAR(m.entries(i, j), want.coeff(mi({i})), 1e-12);
  }

  DiffOp::Coeffs xc;
  xc.emplace(mi({1}), px("x") * 0.6);
  const DiffOp euler(1, 1, xc);
  const double t = 0.9;
  const DiffOp g = exp_op(euler, t, 6);
  for (unsigned mdeg = 0; mdeg <= 6; ++mdeg) {
    const Poly image = apply(g, Poly::monomial(mi({mdeg})));
    const double want = std::exp(0.6 * t * mdeg);
    EXPECT_NEAR(image.coeff(mi({mdeg})), want, 1e-12 * want);
  }
  EXPECT_LT(identity_error(exp_op(euler, 0.0, 6), 6), 1e-15);
}

TEST(DiffOp, ExpSemigroupLaw) {
  std::mt19937 rng(23);
  const DiffOp a = random_op(rng, 2, 4);
  for (double s : {0.1, 0.7}) {
    for (double t : {0.1, 0.7}) {
      const DiffOp lhs = exp_op(a, s + t, 4);
      const DiffOp rhs = compose(exp_op(a, s, 4), exp_op(a, t, 4), 4);
      EXPECT_LT(max_coeff_diff(lhs, rhs, 4), 1e-10) << s << " " << t;
    }
  }
}

TEST(DiffOp, LogInvertsExp) {
  EXPECT_LT(max_coeff_diff(log_op(DiffOp::identity(1), 5), DiffOp::zero(1), 5), 1e-15);

  const DiffOp shift = dop_from_seq(dirac_moments(std::vector<double>{1.3}, 8));
  const DiffOp l = log_op(shift, 8);
  EXPECT_LT(max_coeff_diff(l, DiffOp::partial(mi({1}), 1.3), 8), 1e-10);

  const DiffOp a = DiffOp::identity(1) + DiffOp::partial(mi({2}));
  const DiffOp e = exp_op(a, 1.0, 8);
  EXPECT_NEAR(e.coeff(mi({0})).coeff(mi({0})), std::exp(1.0), 1e-13);
  EXPECT_LT(max_coeff_diff(log_op(e, 8), a, 8), 1e-10);

  std::mt19937 rng(29);
  const DiffOp r = random_op(rng, 2, 5, true);
  EXPECT_LT(max_coeff_diff(exp_op(log_op(r, 5), 1.0, 5), r, 5), 1e-10);
}

TEST(DiffOp, LogRejectsUnsupportedInput) {
  DiffOp::Coeffs xc;
  xc.emplace(mi({0}), Poly::constant(1, 1.0));
  xc.emplace(mi({1}), px("x"));
  EXPECT_THROW(log_op(DiffOp(1, 1, xc), 3), Error);
  EXPECT_THROW(log_op(-1.0 * DiffOp::identity(1), 3), Error);
}

TEST(DiffOp, ExpLimitConverges) {
  EXPECT_EQ(exp_limit_check(DiffOp::zero(1), 1.0, 4, 16), 0.0);
  const DiffOp lap = DiffOp::partial(mi({2}));
  EXPECT_LT(10.0 * exp_limit_check(lap, 1.0, 4, 1024), exp_limit_check(lap, 1.0, 4, 16));
  DiffOp::Coeffs xc;
  xc.emplace(mi({1}), px("x"));
  const DiffOp euler(1, 1, xc);
  EXPECT_LT(10.0 * exp_limit_check(euler, 1.0, 4, 1024), exp_limit_check(euler, 1.0, 4, 16));
  // 1 - A/k singular on x^k.
  EXPECT_THROW(exp_limit_check(euler, 1.0, 4, 2), Error);
}

TEST(DiffOp, EulerResolventScalesMonomials) {
  const double lambda = 0.15;
  DiffOp::Coeffs xc;
  xc.emplace(mi({1}), px("x") * -lambda);
  const DiffOp t = DiffOp::identity(1) + DiffOp(1, 1, xc);
  const DiffOp r = invert(t, 6);
  for (unsigned m = 0; m <= 6; ++m) {
    const Poly image = apply(r, Poly::monomial(mi({m})));
    EXPECT_NEAR(image.coeff(mi({m})), 1.0 / (1.0 - lambda * m), 1e-13);
    EXPECT_EQ(image.terms().size(), 1u);
  }
}

TEST(DiffOp, SubstitutionPreserver) {
  const std::vector<Poly> p = {px("x")};
  const DiffOp at_zero = build_substitution_preserver(p, dirac_moments(std::vector<double>{0.0}, 5), 5);
  EXPECT_LT(identity_error(at_zero, 5), 1e-15);

  const DiffOp at_one = build_substitution_preserver(p, dirac_moments(std::vector<double>{1.0}, 5), 5);
  for (unsigned k = 0; k <= 5; ++k) {
    EXPECT_EQ(at_one.coeff(mi({k})), Poly::monomial(mi({k}), 1.0 / factorial(k)));
  }
  EXPECT_TRUE(at_one.degree_preserving());
  ASSERT_TRUE(at_one.certificate().has_value());
  EXPECT_EQ(at_one.certificate()->kind, Certificate::Kind::kSubstitution);

  const MomentSeq s = from_measure(DiscreteMeasure(1, {{{0.5}, 1.0}, {{2.0}, 3.0}}), 5);
  const std::vector<Poly> one = {Poly::constant(1, 1.0)};
  EXPECT_LT(max_coeff_diff(build_substitution_preserver(one, s, 5), dop_from_seq(s), 5), 1e-15);

  const std::vector<Poly> square = {px("x^2")};
  EXPECT_FALSE(build_substitution_preserver(square, s, 5).degree_preserving());
  EXPECT_THROW(build_substitution_preserver(p, s, 6), Error);
}
