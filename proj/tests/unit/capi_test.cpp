// Exercises the library strictly through the C header.
#include "pospres/pospres.h"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

namespace {

std::string data(const char* name) { return std::string(POSPRES_TEST_DATA) + "/" + name; }

std::string take(char* s) {
  std::string out = s ? s : "";
  pospres_string_free(s);
  return out;
}

}  // namespace

TEST(Capi, StatusNames) {
  EXPECT_STREQ(pospres_status_name(POSPRES_OK), "ok");
  EXPECT_STRNE(pospres_status_name(POSPRES_E_PARSE), "unknown status");
  EXPECT_STREQ(pospres_status_name(static_cast<pospres_status>(42)), "unknown status");
}

TEST(Capi, ParseErrorsReportLine) {
  pospres_op* op = nullptr;
  EXPECT_EQ(pospres_op_parse("[1] = 1\n[2] = x +\n", &op), POSPRES_E_PARSE);
  EXPECT_EQ(op, nullptr);
  EXPECT_EQ(std::string(pospres_last_error()).rfind("line 2:", 0), 0u) << pospres_last_error();
  EXPECT_EQ(pospres_op_read("/nonexistent/x.op", &op), POSPRES_E_IO);
  EXPECT_EQ(pospres_op_parse(nullptr, &op), POSPRES_E_INVALID_ARGUMENT);
  EXPECT_EQ(pospres_op_parse("[1] = 1\n", nullptr), POSPRES_E_INVALID_ARGUMENT);
}

TEST(Capi, OperatorRoundTripAndApply) {
  pospres_op* op = nullptr;
  ASSERT_EQ(pospres_op_read(data("drift_a1.op").c_str(), &op), POSPRES_OK);
  EXPECT_EQ(pospres_op_nvars(op), 1u);
  char* text = nullptr;
  ASSERT_EQ(pospres_op_format(op, &text), POSPRES_OK);
  const std::string first = take(text);
  pospres_op* again = nullptr;
  ASSERT_EQ(pospres_op_parse(first.c_str(), &again), POSPRES_OK);
  ASSERT_EQ(pospres_op_format(again, &text), POSPRES_OK);
  EXPECT_EQ(take(text), first);

  char* image = nullptr;
  ASSERT_EQ(pospres_op_apply(op, "x1^2", &image), POSPRES_OK);
  // d + (x^2 - 1)/2 d^2 on x^2 gives x^2 + 2x - 1.
  EXPECT_EQ(take(image), "-1 + 2 * x1 + 1 * x1^2");

  double* m = nullptr;
  size_t dim = 0;
  ASSERT_EQ(pospres_op_matrix(op, 2, &m, &dim), POSPRES_OK);
  ASSERT_EQ(dim, 3u);
  const std::vector<double> want = {0, 1, -1, 0, 0, 2, 0, 0, 1};
  for (size_t i = 0; i < 9; ++i) EXPECT_EQ(m[i], want[i]) << i;
  pospres_array_free(m);

  EXPECT_EQ(pospres_op_apply(op, "y^2", &image), POSPRES_E_PARSE);
  pospres_op_free(again);
  pospres_op_free(op);
}

TEST(Capi, ExpLogInvertCompose) {
  pospres_op* a = nullptr;
  ASSERT_EQ(pospres_op_parse("[2] = 0.5\n", &a), POSPRES_OK);
  pospres_op *e = nullptr, *l = nullptr, *inv = nullptr, *prod = nullptr;
  ASSERT_EQ(pospres_op_exp(a, 1.0, 6, &e), POSPRES_OK);
  ASSERT_EQ(pospres_op_log(e, 6, &l), POSPRES_OK);
  ASSERT_EQ(pospres_op_invert(e, 6, &inv), POSPRES_OK);
  ASSERT_EQ(pospres_op_compose(e, inv, 6, &prod), POSPRES_OK);

  double *ml = nullptr, *ma = nullptr, *mp = nullptr;
  size_t dim = 0;
  ASSERT_EQ(pospres_op_matrix(l, 6, &ml, &dim), POSPRES_OK);
  ASSERT_EQ(pospres_op_matrix(a, 6, &ma, &dim), POSPRES_OK);
  ASSERT_EQ(pospres_op_matrix(prod, 6, &mp, &dim), POSPRES_OK);
  for (size_t i = 0; i < dim * dim; ++i) {
    EXPECT_NEAR(ml[i], ma[i], 1e-12);
    EXPECT_NEAR(mp[i], (i % (dim + 1) == 0) ? 1.0 : 0.0, 1e-12);
  }
  pospres_array_free(ml);
  pospres_array_free(ma);
  pospres_array_free(mp);

  double disc = -1.0;
  ASSERT_EQ(pospres_op_exp_limit(a, 1.0, 4, 1000, &disc), POSPRES_OK);
  EXPECT_GT(disc, 0.0);
  EXPECT_LT(disc, 1e-2);

  pospres_op* zero = nullptr;
  ASSERT_EQ(pospres_op_parse("[1] = 1\n", &zero), POSPRES_OK);
  pospres_op* bad = nullptr;
  EXPECT_EQ(pospres_op_invert(zero, 3, &bad), POSPRES_E_NOT_INVERTIBLE);
  EXPECT_EQ(bad, nullptr);

  for (pospres_op* p : {a, e, l, inv, prod, zero}) pospres_op_free(p);
}

TEST(Capi, SequencesAndMeasures) {
  pospres_measure* mu = nullptr;
  ASSERT_EQ(pospres_measure_read(data("three_atoms.measure").c_str(), &mu), POSPRES_OK);
  pospres_seq* s = nullptr;
  ASSERT_EQ(pospres_measure_moments(mu, 4, &s), POSPRES_OK);
  double* h = nullptr;
  size_t dim = 0;
  double min_eig = 0.0;
  int psd = 0;
  ASSERT_EQ(pospres_seq_hankel(s, 2, &h, &dim, &min_eig, &psd), POSPRES_OK);
  EXPECT_EQ(dim, 3u);
  EXPECT_EQ(h[0], 1.0);
  EXPECT_DOUBLE_EQ(h[1], 0.5 * 0.5 + 0.25 * 2 - 0.25);
  EXPECT_EQ(h[1], h[3]);
  EXPECT_EQ(psd, 1);
  EXPECT_GT(min_eig, 0.0);
  pospres_array_free(h);

  pospres_seq *conv = nullptr, *had = nullptr, *ce = nullptr;
  ASSERT_EQ(pospres_seq_convolve(s, s, &conv), POSPRES_OK);
  ASSERT_EQ(pospres_seq_hadamard(s, s, &had), POSPRES_OK);
  ASSERT_EQ(pospres_seq_conv_exp(s, 0.5, &ce), POSPRES_OK);
  for (pospres_seq* q : {conv, had, ce}) {
    ASSERT_EQ(pospres_seq_hankel(q, 2, &h, &dim, &min_eig, &psd), POSPRES_OK);
    EXPECT_EQ(psd, 1);
    pospres_array_free(h);
  }

  char* text = nullptr;
  ASSERT_EQ(pospres_seq_format(s, &text), POSPRES_OK);
  const std::string st = take(text);
  pospres_seq* back = nullptr;
  ASSERT_EQ(pospres_seq_parse(st.c_str(), &back), POSPRES_OK);
  ASSERT_EQ(pospres_seq_format(back, &text), POSPRES_OK);
  EXPECT_EQ(take(text), st);

  ASSERT_EQ(pospres_measure_format(mu, &text), POSPRES_OK);
  EXPECT_EQ(take(text), "n = 1\natom (-1) 0.25\natom (0.5) 0.5\natom (2) 0.25\n");

  pospres_op* d = nullptr;
  ASSERT_EQ(pospres_seq_to_op(s, &d), POSPRES_OK);
  char* img = nullptr;
  ASSERT_EQ(pospres_op_apply(d, "1", &img), POSPRES_OK);
  EXPECT_EQ(take(img), "1");

  pospres_seq* dirac = nullptr;
  ASSERT_EQ(pospres_seq_read(data("d1.seq").c_str(), &dirac), POSPRES_OK);
  char* verdict = nullptr;
  // Needs moments up to twice the number of terms.
  EXPECT_EQ(pospres_seq_carleman(dirac, 6, &verdict), POSPRES_E_TRUNCATION);
  ASSERT_EQ(pospres_seq_carleman(dirac, 3, &verdict), POSPRES_OK);
  EXPECT_EQ(take(verdict), "DivergesLikely");

  pospres_seq* two = nullptr;
  ASSERT_EQ(pospres_seq_parse("[0,0] = 1\n", &two), POSPRES_OK);
  pospres_seq* mismatch = nullptr;
  EXPECT_EQ(pospres_seq_convolve(s, two, &mismatch), POSPRES_E_DIMENSION_MISMATCH);

  for (pospres_seq* q : {s, conv, had, ce, back, dirac, two}) pospres_seq_free(q);
  pospres_op_free(d);
  pospres_measure_free(mu);
}

TEST(Capi, KSets) {
  pospres_kset* k = nullptr;
  ASSERT_EQ(pospres_kset_parse("box:0,1;-1,1", &k), POSPRES_OK);
  EXPECT_EQ(pospres_kset_nvars(k), 2u);
  pospres_kset* sharp = nullptr;
  ASSERT_EQ(pospres_kset_sharp(k, &sharp), POSPRES_OK);
  char* text = nullptr;
  ASSERT_EQ(pospres_kset_format(sharp, &text), POSPRES_OK);
  EXPECT_EQ(take(text).rfind("ball:", 0), 0u);
  pospres_kset* bad = nullptr;
  EXPECT_EQ(pospres_kset_parse("box:1,0", &bad), POSPRES_E_INVALID_ARGUMENT);
  EXPECT_EQ(pospres_kset_parse("donut:1", &bad), POSPRES_E_PARSE);
  pospres_kset_free(sharp);
  pospres_kset_free(k);
}

TEST(Capi, SigmaVerdictsAndThreshold) {
  pospres_op* a = nullptr;
  ASSERT_EQ(pospres_op_read(data("sigma.op").c_str(), &a), POSPRES_OK);
  pospres_kset* full = nullptr;
  ASSERT_EQ(pospres_kset_parse("full:1", &full), POSPRES_OK);

  pospres_op* early = nullptr;
  ASSERT_EQ(pospres_op_exp(a, 0.005, 6, &early), POSPRES_OK);
  pospres_verdict* v = nullptr;
  ASSERT_EQ(pospres_check_preserver(early, full, 3, nullptr, 0, 0.0, &v), POSPRES_OK);
  EXPECT_EQ(pospres_verdict_status_of(v), POSPRES_FAIL);
  ASSERT_GT(pospres_verdict_witness_count(v), 0u);
  char* w = nullptr;
  ASSERT_EQ(pospres_verdict_witness(v, 0, &w), POSPRES_OK);
  EXPECT_EQ(take(w).rfind("FAIL ", 0), 0u);
  EXPECT_EQ(pospres_verdict_witness(v, 1u << 20, &w), POSPRES_E_OUT_OF_RANGE);
  char* report = nullptr;
  ASSERT_EQ(pospres_verdict_format(v, &report), POSPRES_OK);
  EXPECT_EQ(take(report).rfind("status: Fail\n", 0), 0u);
  pospres_verdict_free(v);

  // Grid falsifier on a short explicit grid.
  std::vector<double> grid;
  for (int i = -40; i <= 40; ++i) grid.push_back(i / 4.0);
  ASSERT_EQ(pospres_falsify(early, full, 6, grid.data(), grid.size(), &v), POSPRES_OK);
  EXPECT_NE(pospres_verdict_status_of(v), POSPRES_PASS);
  pospres_verdict_free(v);

  double lo = 0, hi = 0;
  unsigned it = 0;
  ASSERT_EQ(pospres_tau_sigma(0.001, 0.1, 1e-9, &lo, &hi, &it), POSPRES_OK);
  EXPECT_GT(lo, 0.0119688);
  EXPECT_LT(hi, 0.0119689);
  EXPECT_GT(it, 0u);

  double h2 = 0, h2_det = 0, s3 = 0;
  ASSERT_EQ(pospres_sigma_point(0.0119689, &h2, &h2_det, &s3), POSPRES_OK);
  EXPECT_GT(h2, 0.0);
  EXPECT_GT(s3, 0.0);

  const double ts[] = {0.01, 0.02};
  char* csv = nullptr;
  ASSERT_EQ(pospres_sigma_curve_csv(ts, 2, &csv), POSPRES_OK);
  EXPECT_EQ(take(csv).rfind("t,h2,sigma3\n0.01,", 0), 0u);

  pospres_kset_free(full);
  pospres_op_free(early);
  pospres_op_free(a);
}

TEST(Capi, DriftThresholds) {
  double lo = 0, hi = 0;
  unsigned it = 0;
  ASSERT_EQ(pospres_tau_drift(1.0, 1e-9, 50.0, 0, &lo, &hi, &it), POSPRES_OK);
  EXPECT_NEAR(lo, 1.16758724, 1e-7);
  ASSERT_EQ(pospres_tau_drift(2.0, 1e-9, 50.0, 1, &lo, &hi, &it), POSPRES_OK);
  EXPECT_NEAR(hi, 1.8846089955, 1e-8);
  EXPECT_EQ(pospres_tau_drift(1.0, 1e-9, 50.0, 1, &lo, &hi, &it), POSPRES_E_NO_SIGN_CHANGE);
  EXPECT_EQ(pospres_tau_drift(0.2, 1e-9, 50.0, 0, &lo, &hi, &it), POSPRES_E_NO_SIGN_CHANGE);

  double m = 0, mx = 0;
  ASSERT_EQ(pospres_m_min(1.0, 2.0, 0, &m), POSPRES_OK);
  ASSERT_EQ(pospres_m_min(1.0, 2.0, 1, &mx), POSPRES_OK);
  EXPECT_GT(m, 0.0);
  EXPECT_LT(mx, 0.0);
  EXPECT_EQ(pospres_m_min(1.0, 0.0, 0, &m), POSPRES_E_INVALID_ARGUMENT);

  const double ts[] = {2.0};
  char* csv = nullptr;
  ASSERT_EQ(pospres_drift_curve_csv(1.0, ts, 1, 1, &csv), POSPRES_OK);
  char buf[64];
  std::snprintf(buf, sizeof buf, "t,m\n2,%.17g\n", mx);
  EXPECT_EQ(take(csv), buf);
}

TEST(Capi, GeneratorsAndResolvents) {
  pospres_levy* l = nullptr;
  ASSERT_EQ(pospres_levy_read(data("jumps.levy").c_str(), &l), POSPRES_OK);
  pospres_op* a = nullptr;
  ASSERT_EQ(pospres_levy_generator(l, 8, 0, &a), POSPRES_OK);
  pospres_kset* full = nullptr;
  ASSERT_EQ(pospres_kset_parse("full:1", &full), POSPRES_OK);
  pospres_verdict* v = nullptr;
  EXPECT_EQ(pospres_check_generator(a, full, 5, nullptr, 0, nullptr, 0, 0.0, &v), POSPRES_E_TRUNCATION);
  ASSERT_EQ(pospres_check_generator(a, full, 4, nullptr, 0, nullptr, 0, 0.0, &v), POSPRES_OK);
  EXPECT_NE(pospres_verdict_status_of(v), POSPRES_FAIL);
  pospres_verdict_free(v);
  pospres_op* half = nullptr;
  // Negative jumps are not allowed on the half-line.
  EXPECT_EQ(pospres_levy_generator(l, 4, 1, &half), POSPRES_E_INVALID_ARGUMENT);
  pospres_levy_free(l);

  pospres_op* second = nullptr;
  ASSERT_EQ(pospres_op_read(data("second.op").c_str(), &second), POSPRES_OK);
  const double ys[] = {-1.0, 0.0, 2.0};
  ASSERT_EQ(pospres_check_finite_order_generator(second, ys, 3, 0.0, &v), POSPRES_OK);
  EXPECT_NE(pospres_verdict_status_of(v), POSPRES_FAIL);
  pospres_verdict_free(v);

  pospres_op* heat = nullptr;
  ASSERT_EQ(pospres_op_parse("[2] = 1\n", &heat), POSPRES_OK);
  const double lambdas[] = {0.5};
  ASSERT_EQ(pospres_resolvent_check(heat, full, 4, lambdas, 1, nullptr, 0, 0, &v), POSPRES_OK);
  EXPECT_NE(pospres_verdict_status_of(v), POSPRES_FAIL);
  pospres_verdict_free(v);
  pospres_op* neg = nullptr;
  ASSERT_EQ(pospres_op_parse("[2] = -1\n", &neg), POSPRES_OK);
  ASSERT_EQ(pospres_resolvent_check(neg, full, 4, lambdas, 1, nullptr, 0, 0, &v), POSPRES_OK);
  EXPECT_EQ(pospres_verdict_status_of(v), POSPRES_FAIL);
  pospres_verdict_free(v);

  pospres_seq* s = nullptr;
  ASSERT_EQ(pospres_seq_read(data("d1.seq").c_str(), &s), POSPRES_OK);
  const double beta[] = {1.0};
  pospres_seq* out = nullptr;
  ASSERT_EQ(pospres_semigroup_moments(0.0, beta, s, 1.0, &out), POSPRES_OK);
  char* text = nullptr;
  ASSERT_EQ(pospres_seq_format(out, &text), POSPRES_OK);
  // exp of the point mass at 1: total mass e, mean 2e.
  const std::string st = take(text);
  EXPECT_NE(st.find("[0] = 2.7182818284590451\n"), std::string::npos) << st;
  EXPECT_NE(st.find("[1] = 5.4365636569180902\n"), std::string::npos) << st;

  pospres_seq_free(out);
  pospres_seq_free(s);
  for (pospres_op* p : {a, second, heat, neg}) pospres_op_free(p);
  pospres_kset_free(full);
}
