#include "pospres/pospres.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "pospres/diffop.hpp"
#include "pospres/error.hpp"
#include "pospres/eventual.hpp"
#include "pospres/io.hpp"
#include "pospres/levygen.hpp"
#include "pospres/momseq.hpp"
#include "pospres/preserver.hpp"

using namespace pospres;

struct pospres_op {
  DiffOp value;
};
struct pospres_seq {
  MomentSeq value;
};
struct pospres_measure {
  DiscreteMeasure value;
};
struct pospres_kset {
  KDescriptor value;
};
struct pospres_verdict {
  PreserverVerdict value;
};
struct pospres_levy {
  LevyTriple value;
};

namespace {

thread_local std::string last_error;

template <class F>
pospres_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return POSPRES_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<pospres_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return POSPRES_E_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double* dup_matrix(const Matrix& m) {
  const auto rows = static_cast<std::size_t>(m.rows()), cols = static_cast<std::size_t>(m.cols());
  double* out = static_cast<double*>(std::malloc(sizeof(double) * std::max<std::size_t>(1, rows * cols)));
  if (!out) throw std::bad_alloc();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      out[i * cols + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

std::vector<std::vector<double>> points(const double* data, std::size_t npoints, std::size_t n) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < npoints; ++i) out.emplace_back(data + i * n, data + (i + 1) * n);
  return out;
}

template <class H, class T>
void emit(H** out, T&& value) {
  need(out, "output pointer");
  *out = new H{std::forward<T>(value)};
}

}  // namespace

extern "C" {

const char* pospres_last_error(void) { return last_error.c_str(); }

const char* pospres_status_name(pospres_status s) {
  if (s == POSPRES_OK) return "ok";
  if (s == POSPRES_E_INTERNAL) return "internal error";
  if (s >= POSPRES_E_INVALID_ARGUMENT && s <= POSPRES_E_IO) return to_string(static_cast<ErrorCode>(s));
  return "unknown status";
}

void pospres_string_free(char* s) { std::free(s); }
void pospres_array_free(double* a) { std::free(a); }

pospres_status pospres_op_parse(const char* text, pospres_op** out) {
  return guarded([&] {
    need(text, "text");
    emit(out, parse_operator(text));
  });
}

pospres_status pospres_op_read(const char* path, pospres_op** out) {
  return guarded([&] {
    need(path, "path");
    emit(out, parse_operator(read_file(path)));
  });
}

pospres_status pospres_op_format(const pospres_op* op, char** out) {
  return guarded([&] {
    need(op, "op");
    need(out, "output pointer");
    *out = dup_string(format_operator(op->value));
  });
}

void pospres_op_free(pospres_op* op) { delete op; }

size_t pospres_op_nvars(const pospres_op* op) { return op ? op->value.nvars() : 0; }

pospres_status pospres_op_exp(const pospres_op* a, double t, unsigned d, pospres_op** out) {
  return guarded([&] {
    need(a, "op");
    emit(out, exp_op(a->value, t, d));
  });
}

pospres_status pospres_op_log(const pospres_op* t, unsigned d, pospres_op** out) {
  return guarded([&] {
    need(t, "op");
    emit(out, log_op(t->value, d));
  });
}

pospres_status pospres_op_invert(const pospres_op* t, unsigned d, pospres_op** out) {
  return guarded([&] {
    need(t, "op");
    emit(out, invert(t->value, d));
  });
}

pospres_status pospres_op_compose(const pospres_op* t, const pospres_op* s, unsigned d,
                                  pospres_op** out) {
  return guarded([&] {
    need(t, "first op");
    need(s, "second op");
    emit(out, compose(t->value, s->value, d));
  });
}

pospres_status pospres_op_apply(const pospres_op* op, const char* poly, char** out) {
  return guarded([&] {
    need(op, "op");
    need(poly, "poly");
    need(out, "output pointer");
    *out = dup_string(format_poly(apply(op->value, parse_poly(poly, op->value.nvars()))));
  });
}

pospres_status pospres_op_matrix(const pospres_op* op, unsigned d, double** entries, size_t* dim) {
  return guarded([&] {
    need(op, "op");
    need(entries, "entries");
    need(dim, "dim");
    const OpMatrix m = matrix_rep(op->value, d);
    *entries = dup_matrix(m.entries);
    *dim = m.basis.dim();
  });
}

pospres_status pospres_op_exp_limit(const pospres_op* a, double t, unsigned d, unsigned k,
                                    double* discrepancy) {
  return guarded([&] {
    need(a, "op");
    need(discrepancy, "output pointer");
    *discrepancy = exp_limit_check(a->value, t, d, k);
  });
}

pospres_status pospres_seq_parse(const char* text, pospres_seq** out) {
  return guarded([&] {
    need(text, "text");
    emit(out, parse_sequence(text));
  });
}

pospres_status pospres_seq_read(const char* path, pospres_seq** out) {
  return guarded([&] {
    need(path, "path");
    emit(out, parse_sequence(read_file(path)));
  });
}

pospres_status pospres_seq_format(const pospres_seq* s, char** out) {
  return guarded([&] {
    need(s, "seq");
    need(out, "output pointer");
    *out = dup_string(format_sequence(s->value));
  });
}

void pospres_seq_free(pospres_seq* s) { delete s; }

pospres_status pospres_seq_convolve(const pospres_seq* a, const pospres_seq* b, pospres_seq** out) {
  return guarded([&] {
    need(a, "first seq");
    need(b, "second seq");
    emit(out, convolve(a->value, b->value));
  });
}

pospres_status pospres_seq_hadamard(const pospres_seq* a, const pospres_seq* b, pospres_seq** out) {
  return guarded([&] {
    need(a, "first seq");
    need(b, "second seq");
    emit(out, hadamard(a->value, b->value));
  });
}

pospres_status pospres_seq_conv_exp(const pospres_seq* s, double t, pospres_seq** out) {
  return guarded([&] {
    need(s, "seq");
    emit(out, conv_exp(s->value, t));
  });
}

pospres_status pospres_seq_hankel(const pospres_seq* s, unsigned d, double** entries, size_t* dim,
                                  double* min_eigenvalue, int* psd) {
  return guarded([&] {
    need(s, "seq");
    need(entries, "entries");
    need(dim, "dim");
    const MomentMatrix m = moment_matrix(s->value, d);
    const PsdResult r = is_psd(m);
    *entries = dup_matrix(m.entries);
    *dim = m.basis.dim();
    if (min_eigenvalue) *min_eigenvalue = r.min_eigenvalue;
    if (psd) *psd = r.psd ? 1 : 0;
  });
}

pospres_status pospres_seq_carleman(const pospres_seq* s, unsigned terms, char** out) {
  return guarded([&] {
    need(s, "seq");
    need(out, "output pointer");
    *out = dup_string(to_string(carleman_indicator(s->value, terms)));
  });
}

pospres_status pospres_seq_to_op(const pospres_seq* s, pospres_op** out) {
  return guarded([&] {
    need(s, "seq");
    emit(out, dop_from_seq(s->value));
  });
}

pospres_status pospres_measure_parse(const char* text, pospres_measure** out) {
  return guarded([&] {
    need(text, "text");
    emit(out, parse_measure(text));
  });
}

pospres_status pospres_measure_read(const char* path, pospres_measure** out) {
  return guarded([&] {
    need(path, "path");
    emit(out, parse_measure(read_file(path)));
  });
}

pospres_status pospres_measure_format(const pospres_measure* m, char** out) {
  return guarded([&] {
    need(m, "measure");
    need(out, "output pointer");
    *out = dup_string(format_measure(m->value));
  });
}

void pospres_measure_free(pospres_measure* m) { delete m; }

pospres_status pospres_measure_moments(const pospres_measure* m, unsigned order, pospres_seq** out) {
  return guarded([&] {
    need(m, "measure");
    emit(out, from_measure(m->value, order));
  });
}

pospres_status pospres_kset_parse(const char* desc, pospres_kset** out) {
  return guarded([&] {
    need(desc, "descriptor");
    emit(out, parse_kdescriptor(desc));
  });
}

pospres_status pospres_kset_format(const pospres_kset* k, char** out) {
  return guarded([&] {
    need(k, "K");
    need(out, "output pointer");
    *out = dup_string(format_kdescriptor(k->value));
  });
}

pospres_status pospres_kset_sharp(const pospres_kset* k, pospres_kset** out) {
  return guarded([&] {
    need(k, "K");
    emit(out, ksharp(k->value));
  });
}

size_t pospres_kset_nvars(const pospres_kset* k) { return k ? k->value.nvars() : 0; }

void pospres_kset_free(pospres_kset* k) { delete k; }

pospres_status pospres_check_preserver(const pospres_op* op, const pospres_kset* k, unsigned d,
                                       const double* ys, size_t npoints, double tol,
                                       pospres_verdict** out) {
  return guarded([&] {
    need(op, "op");
    need(k, "K");
    const auto pts = ys ? points(ys, npoints, k->value.nvars()) : default_sample_points(k->value);
    emit(out, check_preserver_k(op->value, k->value, d, pts, tol > 0 ? tol : kDefaultPsdTol));
  });
}

pospres_status pospres_falsify(const pospres_op* op, const pospres_kset* k, unsigned max_degree,
                               const double* grid, size_t npoints, pospres_verdict** out) {
  return guarded([&] {
    need(op, "op");
    need(k, "K");
    const auto pts = grid ? points(grid, npoints, k->value.nvars()) : default_grid(k->value);
    const auto trials = default_trials(k->value, max_degree);
    emit(out, falsify_on_grid(op->value, k->value, trials, pts));
  });
}

pospres_status pospres_check_generator(const pospres_op* a, const pospres_kset* k, unsigned d,
                                       const double* ys, size_t npoints, const double* ts,
                                       size_t nts, double tol, pospres_verdict** out) {
  return guarded([&] {
    need(a, "op");
    need(k, "K");
    const auto pts = ys ? points(ys, npoints, k->value.nvars()) : default_sample_points(k->value);
    const std::vector<double> times = ts ? std::vector<double>(ts, ts + nts) : default_ts();
    emit(out, check_generator_k(a->value, k->value, d, pts, times, tol > 0 ? tol : kDefaultPsdTol));
  });
}

pospres_status pospres_check_finite_order_generator(const pospres_op* a, const double* ys,
                                                    size_t npoints, double tol,
                                                    pospres_verdict** out) {
  return guarded([&] {
    need(a, "op");
    const std::size_t n = a->value.nvars();
    const auto pts = ys ? points(ys, npoints, n) : default_sample_points(FullSpace{n});
    emit(out, check_finite_order_generator(a->value, pts, tol > 0 ? tol : kDefaultPsdTol));
  });
}

pospres_status pospres_resolvent_check(const pospres_op* a, const pospres_kset* k, unsigned d,
                                       const double* lambdas, size_t nl, const double* grid,
                                       size_t npoints, int one_plus, pospres_verdict** out) {
  return guarded([&] {
    need(a, "op");
    need(k, "K");
    const auto pts = grid ? points(grid, npoints, k->value.nvars()) : default_grid(k->value);
    const std::vector<double> ls = lambdas ? std::vector<double>(lambdas, lambdas + nl) : default_lambdas();
    const auto trials = default_trials(k->value, d);
    emit(out, one_plus ? one_plus_check(a->value, k->value, d, ls, trials, pts)
                       : resolvent_check(a->value, k->value, d, ls, trials, pts));
  });
}

pospres_verdict_status pospres_verdict_status_of(const pospres_verdict* v) {
  if (!v) return POSPRES_INCONCLUSIVE;
  switch (v->value.status) {
    case Status::kPass: return POSPRES_PASS;
    case Status::kFail: return POSPRES_FAIL;
    case Status::kInconclusive: return POSPRES_INCONCLUSIVE;
  }
  return POSPRES_INCONCLUSIVE;
}

size_t pospres_verdict_witness_count(const pospres_verdict* v) {
  return v ? v->value.witnesses.size() : 0;
}

pospres_status pospres_verdict_witness(const pospres_verdict* v, size_t i, char** out) {
  return guarded([&] {
    need(v, "verdict");
    need(out, "output pointer");
    if (i >= v->value.witnesses.size()) throw Error(ErrorCode::kOutOfRange, "witness index out of range");
    *out = dup_string(format_witness(v->value.witnesses[i]));
  });
}

pospres_status pospres_verdict_format(const pospres_verdict* v, char** out) {
  return guarded([&] {
    need(v, "verdict");
    need(out, "output pointer");
    std::string s = std::string("status: ") + to_string(v->value.status) + "\n";
    if (!v->value.checked.empty()) s += "checked: " + v->value.checked + "\n";
    for (const auto& n : v->value.notes) s += "note: " + n + "\n";
    for (const auto& w : v->value.witnesses) s += format_witness(w) + "\n";
    *out = dup_string(s);
  });
}

void pospres_verdict_free(pospres_verdict* v) { delete v; }

pospres_status pospres_levy_parse(const char* text, pospres_levy** out) {
  return guarded([&] {
    need(text, "text");
    emit(out, parse_levy(text));
  });
}

pospres_status pospres_levy_read(const char* path, pospres_levy** out) {
  return guarded([&] {
    need(path, "path");
    emit(out, parse_levy(read_file(path)));
  });
}

void pospres_levy_free(pospres_levy* l) { delete l; }

pospres_status pospres_levy_generator(const pospres_levy* l, unsigned order, int halfline,
                                      pospres_op** out) {
  return guarded([&] {
    need(l, "Levy triple");
    const LevyTriple& tr = l->value;
    if (halfline) {
      if (tr.nvars() != 1) throw Error(ErrorCode::kDimensionMismatch, "half-line generator needs n = 1");
      if (tr.sigma(0, 0) != 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "half-line generators have no diffusion part");
      }
      emit(out, generator_from_levy_halfline(tr.a0, tr.b[0], tr.nu, order));
    } else {
      emit(out, generator_from_levy(tr, order));
    }
  });
}

pospres_status pospres_semigroup_moments(double a0, const double* beta, const pospres_seq* s, double t,
                                         pospres_seq** out) {
  return guarded([&] {
    need(beta, "beta");
    need(s, "seq");
    emit(out, semigroup_moments(a0, std::span(beta, s->value.nvars()), s->value, t));
  });
}

pospres_status pospres_tau_sigma(double lo, double hi, double tol, double* tau_lo, double* tau_hi,
                                 unsigned* iterations) {
  return guarded([&] {
    need(tau_lo, "tau_lo");
    need(tau_hi, "tau_hi");
    const ThresholdResult r = find_tau_sigma(lo, hi, tol);
    *tau_lo = r.tau_lo;
    *tau_hi = r.tau_hi;
    if (iterations) *iterations = r.iterations;
  });
}

pospres_status pospres_tau_drift(double a, double tol, double t_max, int exact, double* tau_lo,
                                 double* tau_hi, unsigned* iterations) {
  return guarded([&] {
    need(tau_lo, "tau_lo");
    need(tau_hi, "tau_hi");
    const ThresholdResult r = exact ? find_tau_drift_exact(a, tol, t_max) : find_tau_drift(a, tol, t_max);
    *tau_lo = r.tau_lo;
    *tau_hi = r.tau_hi;
    if (iterations) *iterations = r.iterations;
  });
}

pospres_status pospres_sigma_point(double t, double* h2, double* h2_det, double* sigma3) {
  return guarded([&] {
    const SigmaPoint p = sigma_example_curve(t);
    if (h2) *h2 = p.h2;
    if (h2_det) *h2_det = p.h2_det;
    if (sigma3) *sigma3 = p.sigma3;
  });
}

pospres_status pospres_m_min(double a, double t, int exact, double* out) {
  return guarded([&] {
    need(out, "output pointer");
    *out = exact ? m_exact(a, t) : m_min(a, t);
  });
}

pospres_status pospres_sigma_curve_csv(const double* ts, size_t n, char** out) {
  return guarded([&] {
    need(ts, "ts");
    need(out, "output pointer");
    *out = dup_string(sigma_curve_csv(std::span(ts, n)));
  });
}

pospres_status pospres_drift_curve_csv(double a, const double* ts, size_t n, int exact,
                                       char** out) {
  return guarded([&] {
    need(ts, "ts");
    need(out, "output pointer");
    *out = dup_string(drift_curve_csv(a, std::span(ts, n), exact != 0));
  });
}

}  // extern "C"
