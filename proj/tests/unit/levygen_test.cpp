#include "pospres/levygen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pospres/error.hpp"
#include "pospres/eventual.hpp"

using namespace pospres;

namespace {

MultiIndex mi(std::vector<unsigned> e) { return MultiIndex(std::move(e)); }

Poly px(std::string_view s, std::size_t n = 1) { return parse_poly(s, n); }

double q_at(const DiffOp& t, unsigned k) { return t.coeff(mi({k})).coeff(mi({0})); }

LevyTriple triple_1d(double a0, double sigma, double b, DiscreteMeasure nu = DiscreteMeasure(1)) {
  LevyTriple tr;
  tr.a0 = a0;
  tr.sigma = Matrix::Constant(1, 1, sigma);
  tr.b = {b};
  tr.nu = std::move(nu);
  return tr;
}

DiffOp euler(double c = 1.0) {
  DiffOp::Coeffs xc;
  xc.emplace(mi({1}), px("x") * c);
  return DiffOp(1, 1, xc);
}

std::vector<std::vector<double>> line(double lo, double hi, std::size_t count) {
  std::vector<std::vector<double>> out;
  for (double x : linspace(lo, hi, count)) out.push_back({x});
  return out;
}

}  // namespace

TEST(Levy, TripleValidation) {
  EXPECT_NO_THROW(triple_1d(0, 1, 0).validate());
  EXPECT_THROW(triple_1d(0, -1, 0).validate(), Error);
  LevyTriple tr;
  tr.sigma = Matrix::Identity(2, 2);
  tr.sigma(0, 1) = 0.5;
  tr.b = {0, 0};
  tr.nu = DiscreteMeasure(2);
  EXPECT_THROW(tr.validate(), Error);
  tr.sigma(1, 0) = 0.5;
  EXPECT_NO_THROW(tr.validate());
  tr.b = {0};
  EXPECT_THROW(tr.validate(), Error);
}

TEST(Levy, GeneratorExamples) {
  const DiffOp zero = generator_from_levy(triple_1d(0, 0, 0), 6);
  EXPECT_EQ(zero.effective_order(), -1);
  EXPECT_EQ(zero.tail(), Tail::kZero);

  const DiffOp heat = generator_from_levy(triple_1d(0, 1, 0), 6);
  EXPECT_EQ(q_at(heat, 2), 0.5);
  EXPECT_EQ(heat.effective_order(), 2);

  const double c = 1.5;
  const DiffOp jump = generator_from_levy(triple_1d(0, 0, 0, DiscreteMeasure(1, {{{c}, 1.0}})), 7);
  EXPECT_EQ(jump.tail(), Tail::kUnknown);
  EXPECT_EQ(q_at(jump, 0), 0.0);
  for (unsigned k = 1; k <= 7; ++k) EXPECT_DOUBLE_EQ(q_at(jump, k), std::pow(c, k) / factorial(k));

  // Small jumps stay out of the drift.
  const DiffOp small = generator_from_levy(triple_1d(0, 0, 0.25, DiscreteMeasure(1, {{{0.5}, 2.0}})), 4);
  EXPECT_EQ(q_at(small, 1), 0.25);
  EXPECT_DOUBLE_EQ(q_at(small, 2), 2.0 * 0.25 / 2.0);
}

TEST(Levy, MultivariateGenerator) {
  LevyTriple tr;
  tr.a0 = -0.5;
  tr.sigma = Matrix(2, 2);
  tr.sigma << 2.0, 0.5, 0.5, 1.0;
  tr.b = {0.1, -0.2};
  tr.nu = DiscreteMeasure(2, {{{1.0, 1.0}, 0.5}, {{0.2, 0.1}, 1.0}});
  const DiffOp a = generator_from_levy(tr, 4);
  auto q = [&](unsigned i, unsigned j) { return a.coeff(mi({i, j})).coeff(mi({0, 0})); };
  EXPECT_EQ(q(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(q(1, 0), 0.1 + 0.5);
  EXPECT_DOUBLE_EQ(q(0, 1), -0.2 + 0.5);
  EXPECT_DOUBLE_EQ(q(2, 0), (2.0 + 0.5 + 0.04) / 2.0);
  EXPECT_DOUBLE_EQ(q(1, 1), 0.5 + 0.5 + 0.02);
  EXPECT_DOUBLE_EQ(q(2, 1), (0.5 + 0.004) / 2.0);
}

TEST(Levy, HalflineGenerator) {
  const DiffOp drift = generator_from_levy_halfline(0, 1, DiscreteMeasure(1), 5);
  EXPECT_LT(max_coeff_diff(drift, DiffOp::partial(mi({1})), 5), 1e-15);

  const DiffOp jumps = generator_from_levy_halfline(0, 0, DiscreteMeasure(1, {{{2.0}, 1.0}}), 6);
  for (unsigned k = 1; k <= 6; ++k) EXPECT_DOUBLE_EQ(q_at(jumps, k) * factorial(k), std::pow(2.0, k));

  const DiffOp kill = generator_from_levy_halfline(-3, 0, DiscreteMeasure(1), 4);
  const DiffOp e = exp_op(kill, 0.5, 5);
  EXPECT_NEAR(q_at(e, 0), std::exp(-1.5), 1e-15);
  EXPECT_TRUE(check_preserver_halfline(e, 2, std::vector<double>{0.0, 1.0, 3.0}).witnesses.empty());

  EXPECT_THROW(generator_from_levy_halfline(0, -0.1, DiscreteMeasure(1), 4), Error);
  EXPECT_THROW(generator_from_levy_halfline(0, 0, DiscreteMeasure(1, {{{-1.0}, 1.0}}), 4), Error);
}

TEST(Levy, SemigroupMomentsExamples) {
  const MomentSeq s = from_measure(DiscreteMeasure(1, {{{0.5}, 1.0}}), 6);
  const std::vector<double> beta0 = {0.0};
  EXPECT_LT(max_abs_diff(semigroup_moments(0.7, beta0, s, 0.0), dirac_moments(beta0, 6)), 1e-15);
  const std::vector<double> beta1 = {1.0};
  const double t = 0.6;
  EXPECT_LT(max_abs_diff(semigroup_moments(0, beta1, MomentSeq(1, 6), t),
                         dirac_moments(std::vector<double>{t}, 6)),
            1e-14);
}

TEST(Levy, ExpMatchesSemigroupMoments) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> x(-1.5, 1.5);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    DiscreteMeasure mu(1);
    for (int k = 0; k < 3; ++k) mu.add({{x(rng)}, w(rng)});
    const MomentSeq s = from_measure(mu, 8);
    const double a0 = x(rng);
    const std::vector<double> beta = {x(rng)};
    const DiffOp a = dop_from_seq(s) + DiffOp::partial(mi({1}), beta[0]) + a0 * DiffOp::identity(1);
    for (double t : {0.1, 1.0}) {
      const DiffOp e = exp_op(a, t, 8);
      const MomentSeq want = semigroup_moments(a0, beta, s, t);
      for (unsigned k = 0; k <= 8; ++k) {
        EXPECT_NEAR(factorial(k) * q_at(e, k), want[mi({k})], 1e-10 * std::max(1.0, std::abs(want[mi({k})])));
      }
    }
  }
}

TEST(Levy, PoissonGeneratorMatchesConvExp) {
  // A = D(delta_c) - 1: a compound Poisson generator with one jump size.
  const double c = 1.5;
  const MomentSeq s = dirac_moments(std::vector<double>{c}, 8);
  const DiffOp a = generator_from_levy(triple_1d(0, 0, 0, DiscreteMeasure(1, {{{c}, 1.0}})), 8);
  for (double t : {0.1, 1.0}) {
    const MomentSeq want = semigroup_moments(-1.0, std::vector<double>{0.0}, s, t);
    const DiffOp e = exp_op(a, t, 8);
    for (unsigned k = 0; k <= 8; ++k) {
      EXPECT_NEAR(factorial(k) * q_at(e, k), want[mi({k})], 1e-10 * std::max(1.0, want[mi({k})]));
    }
  }
}

TEST(Levy, CheckGeneratorExamples) {
  const auto ys = default_sample_points(parse_kdescriptor("full"), 9);
  const auto ts = default_ts();
  const DiffOp heat = generator_from_levy(triple_1d(0, 1, 0), 4);
  EXPECT_EQ(check_generator_rn(heat, 2, ys, ts).status, Status::kInconclusive);

  const PreserverVerdict sigma =
      check_generator_rn(sigma_generator(), 2, std::vector<std::vector<double>>{{1.0}},
                         std::vector<double>{0.005});
  ASSERT_EQ(sigma.status, Status::kFail);
  ASSERT_TRUE(sigma.witnesses[0].t.has_value());
  EXPECT_EQ(*sigma.witnesses[0].t, 0.005);

  EXPECT_EQ(check_generator_rn(drift_generator(1.0), 1, ys, std::vector<double>{0.01}).status,
            Status::kFail);
  EXPECT_THROW(check_generator_rn(DiffOp::partial(mi({2})).truncated(2), 2, ys, ts), Error);
}

TEST(Levy, FiniteOrderGenerator) {
  const auto ys = line(-3, 3, 13);
  DiffOp::Coeffs good;
  good.emplace(mi({1}), Poly::constant(1, 1.0));
  good.emplace(mi({2}), px("0.5 + 0.5 * x^2"));
  EXPECT_EQ(check_finite_order_generator(DiffOp(1, 2, good), ys).status, Status::kInconclusive);

  const PreserverVerdict third = check_finite_order_generator(DiffOp::partial(mi({3})), ys);
  ASSERT_EQ(third.status, Status::kFail);
  EXPECT_EQ(third.witnesses[0].kind, Witness::Kind::kCoefficient);

  DiffOp::Coeffs bad;
  bad.emplace(mi({2}), px("0.5 * x^2 - 0.5"));
  const PreserverVerdict neg = check_finite_order_generator(DiffOp(1, 2, bad), std::vector<std::vector<double>>{});
  ASSERT_EQ(neg.status, Status::kFail);
  EXPECT_NEAR(neg.witnesses[0].y[0], 0.0, 1e-9);
  EXPECT_NEAR(neg.witnesses[0].value, -1.0, 1e-12);

  // Two variables: the mixed coefficient must not outgrow the diagonal.
  DiffOp::Coeffs two;
  two.emplace(mi({2, 0}), Poly::constant(2, 0.5));
  two.emplace(mi({0, 2}), Poly::constant(2, 0.5));
  two.emplace(mi({1, 1}), px("x1", 2));
  const auto ys2 = tensor_grid(SupportBox{{-2, -2}, {2, 2}}, 5);
  const PreserverVerdict mixed = check_finite_order_generator(DiffOp(2, 2, two), ys2);
  EXPECT_EQ(mixed.status, Status::kFail);
  for (const auto& w : mixed.witnesses) EXPECT_GT(std::abs(w.y[0]), 1.0);

  DiffOp::Coeffs outside;
  outside.emplace(mi({1}), px("x^2"));
  EXPECT_THROW(check_finite_order_generator(DiffOp(1, 1, outside), ys), Error);
}

TEST(Levy, ResolventExamples) {
  const KDescriptor full = parse_kdescriptor("full");
  const auto grid = default_grid(full);
  const std::vector<Poly> x2 = {px("x^2")};
  const DiffOp lap = DiffOp::partial(mi({2}));

  const PreserverVerdict pos = resolvent_check(lap, full, 2, std::vector<double>{0.0, 0.1, 1.0, 10.0}, x2, grid);
  EXPECT_EQ(pos.status, Status::kInconclusive);

  const PreserverVerdict neg = resolvent_check(lap, full, 2, std::vector<double>{-0.1}, x2, grid);
  ASSERT_EQ(neg.status, Status::kFail);
  EXPECT_EQ(neg.witnesses[0].x[0], 0.0);
  EXPECT_NEAR(neg.witnesses[0].value, -0.2, 1e-15);
  EXPECT_EQ(*neg.witnesses[0].lambda, -0.1);

  // (1 - lambda x d)^{-1} x^4 = x^4 / (1 - 4 lambda): negative once lambda > 1/4.
  const std::vector<Poly> x4 = {px("x^4")};
  EXPECT_EQ(resolvent_check(euler(), full, 4, std::vector<double>{0.1, 0.2}, x4, grid).status,
            Status::kInconclusive);
  const PreserverVerdict flip = resolvent_check(euler(), full, 4, std::vector<double>{0.3, 0.25}, x4, grid);
  EXPECT_EQ(flip.status, Status::kFail);
  ASSERT_EQ(flip.witnesses.size(), 1u);
  EXPECT_EQ(*flip.witnesses[0].lambda, 0.3);
  ASSERT_FALSE(flip.notes.empty());
  EXPECT_NE(flip.notes[0].find("singular"), std::string::npos);
}

TEST(Levy, OnePlusCheck) {
  const KDescriptor full = parse_kdescriptor("full");
  const auto grid = default_grid(full);
  const auto trials = default_trials(full, 4);
  const std::vector<double> lambdas = {0.0, 0.1, 1.0, 10.0};

  const DiffOp shift = dop_from_seq(dirac_moments(std::vector<double>{0.8}, 4));
  EXPECT_EQ(one_plus_check(shift, full, 4, lambdas, trials, grid).status, Status::kInconclusive);
  const DiffOp mix = dop_from_seq(from_measure(DiscreteMeasure(1, {{{-1.0}, 0.5}, {{2.0}, 0.25}}), 4));
  EXPECT_EQ(one_plus_check(mix, full, 4, lambdas, trials, grid).status, Status::kInconclusive);
  EXPECT_EQ(one_plus_check(DiffOp::zero(1), full, 4, lambdas, trials, grid).status, Status::kInconclusive);

  const PreserverVerdict bad =
      one_plus_check(DiffOp::partial(mi({2}), -1.0), full, 2, std::vector<double>{0.1}, std::vector<Poly>{px("x^2")}, grid);
  ASSERT_EQ(bad.status, Status::kFail);
  EXPECT_EQ(bad.witnesses[0].x[0], 0.0);
}

TEST(Levy, ResolventAndExponentialAgree) {
  const DiffOp a = DiffOp::partial(mi({2}), -1.0);
  const KDescriptor full = parse_kdescriptor("full");
  const PreserverVerdict r = resolvent_check(a, full, 2, default_lambdas(), std::vector<Poly>{px("x^2")},
                                             default_grid(full));
  EXPECT_EQ(r.status, Status::kFail);
  EXPECT_EQ(r.witnesses.size(), default_lambdas().size());
  const PreserverVerdict g = check_generator_rn(a, 1, std::vector<std::vector<double>>{{0.0}},
                                                std::vector<double>{1e-3, 1e-2});
  EXPECT_EQ(g.status, Status::kFail);
  EXPECT_EQ(g.witnesses.size(), 2u);
}

TEST(Levy, HalflineContractionPair) {
  // A = -x d. Frozen at y = 1 it is a left drift, which leaves [0, inf);
  // the flow itself, f(e^{-t} x), keeps [0, inf) positive.
  const DiffOp a = euler(-1.0);
  const KDescriptor half = parse_kdescriptor("cone:1");
  const PreserverVerdict frozen =
      check_generator_k(a, half, 1, std::vector<std::vector<double>>{{0.0}, {1.0}}, default_ts());
  ASSERT_EQ(frozen.status, Status::kFail);
  for (const auto& w : frozen.witnesses) {
    EXPECT_EQ(w.kind, Witness::Kind::kLocalizing);
    EXPECT_EQ(w.y[0], 0.0);
    EXPECT_EQ(w.note.rfind("frozen at (1", 0), 0u);
  }

  const auto trials = default_trials(half, 4);
  const auto grid = default_grid(half);
  for (double t : default_ts()) {
    const PreserverVerdict flow = falsify_on_grid(exp_op(a, t, 4), half, trials, grid);
    EXPECT_TRUE(flow.witnesses.empty()) << t;
  }
}

TEST(Levy, FieldExamples) {
  const auto ys = line(-2, 2, 9);
  LevyField f;
  f.sigma = {{px("1 + x^2")}};
  f.b = {Poly(1)};
  const FieldResult ok = check_generator_field_sufficient(f, ys);
  EXPECT_EQ(ok.verdict.status, Status::kInconclusive);
  ASSERT_EQ(ok.verdict.notes.size(), 1u);
  EXPECT_EQ(ok.verdict.notes[0], "sufficient by sampling");
  EXPECT_EQ(ok.generator.coeff(mi({2})), px("0.5 + 0.5 * x^2"));

  f.sigma = {{px("x")}};
  const FieldResult bad = check_generator_field_sufficient(f, ys);
  EXPECT_EQ(bad.verdict.status, Status::kFail);
  EXPECT_EQ(bad.verdict.witnesses[0].y[0], -2.0);

  for (double a : {-2.0, 0.5, 3.0}) {
    LevyField s;
    s.sigma = {{Poly(1)}};
    s.b = {px("x") * a};
    const FieldResult r = check_generator_field_sufficient(s, ys);
    EXPECT_EQ(r.verdict.status, Status::kInconclusive);
    // The assembled generator is a x d, whose flow is f(e^{at} x).
    const Poly image = apply(exp_op(r.generator, 0.5, 3), px("x^3"));
    EXPECT_NEAR(image.coeff(mi({3})), std::exp(1.5 * a), 1e-12 * std::exp(1.5 * std::abs(a)));
  }

  f.sigma = {{px("x^3")}};
  EXPECT_THROW(check_generator_field_sufficient(f, ys), Error);
}

TEST(Levy, FieldJumpConsistency) {
  // nu_y = delta at 2 + y, so every jump moment is polynomial in y.
  LevyField f;
  f.sigma = {{Poly(1)}};
  f.b = {Poly(1)};
  f.nu_moments[mi({1})] = px("2 + x");
  f.nu_moments[mi({2})] = px("2 + x").pow(2);
  f.nu_at = [](std::span<const double> y) { return DiscreteMeasure(1, {{{2.0 + y[0]}, 1.0}}); };
  const auto ys = line(-1, 1, 5);
  const FieldResult ok = check_generator_field_sufficient(f, ys);
  EXPECT_EQ(ok.verdict.status, Status::kInconclusive);
  EXPECT_EQ(ok.generator.coeff(mi({2})), px("2 + x").pow(2) * 0.5);

  f.nu_moments[mi({2})] = px("4 + x^2");
  const FieldResult bad = check_generator_field_sufficient(f, ys);
  EXPECT_EQ(bad.verdict.status, Status::kFail);
  EXPECT_EQ(bad.verdict.witnesses[0].kind, Witness::Kind::kMeasure);

  // A jump drift quadratic in y would leave the degree-preserving algebra.
  f.nu_moments[mi({1})] = px("1 + x^2");
  EXPECT_THROW(check_generator_field_sufficient(f, ys), Error);
}

TEST(Levy, ResolventApply) {
  // Diagonal on monomials, so the dense solve is exact.
  for (unsigned m = 0; m <= 6; ++m) {
    const Poly q = resolvent_apply(euler(), 0.3, 6, Poly::monomial(mi({m})));
    EXPECT_EQ(q, Poly::monomial(mi({m}), 1.0 / (1.0 - 0.3 * m))) << m;
  }
  try {
    resolvent_apply(euler(), 0.25, 4, px("x^4"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingular);
  }
  EXPECT_THROW(resolvent_apply(euler(), 0.1, 2, px("x^3")), Error);

  // Agrees with the canonical inverse on a non-diagonal operator.
  const DiffOp a = drift_generator(0.7);
  const DiffOp r = invert(DiffOp::identity(1) + (-0.2) * a, 4);
  const Poly p = px("1 - x + 2*x^3 + x^4");
  const Poly want = apply(r, p);
  const Poly got = resolvent_apply(a, 0.2, 4, p);
  for (unsigned k = 0; k <= 4; ++k) EXPECT_NEAR(got.coeff(mi({k})), want.coeff(mi({k})), 1e-12);
  EXPECT_EQ(resolvent_apply(DiffOp::partial(mi({2})), -0.5, 2, px("x^2")), px("x^2 - 1"));
}
