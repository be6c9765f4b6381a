/* C interface to the pospres library. All objects are opaque handles owned
 * by the caller and released with the matching *_free function. Functions
 * return a pospres_status; on failure pospres_last_error() describes the
 * problem (thread-local, valid until the next call on the same thread).
 * Strings and arrays handed out by the library are released with
 * pospres_string_free / pospres_array_free. */
#ifndef POSPRES_POSPRES_H
#define POSPRES_POSPRES_H

#include <stddef.h>

#if defined(_WIN32)
#define POSPRES_API __declspec(dllexport)
#else
#define POSPRES_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pospres_status {
  POSPRES_OK = 0,
  POSPRES_E_INVALID_ARGUMENT = 1,
  POSPRES_E_DIMENSION_MISMATCH = 2,
  POSPRES_E_OUT_OF_RANGE = 3,
  POSPRES_E_TRUNCATION = 4,
  POSPRES_E_NOT_IN_ALGEBRA = 5,
  POSPRES_E_NOT_INVERTIBLE = 6,
  POSPRES_E_UNSUPPORTED = 7,
  POSPRES_E_NO_SIGN_CHANGE = 8,
  POSPRES_E_PARSE = 9,
  POSPRES_E_SINGULAR = 10,
  POSPRES_E_IO = 11,
  POSPRES_E_INTERNAL = 99
} pospres_status;

typedef enum pospres_verdict_status {
  POSPRES_PASS = 0,
  POSPRES_FAIL = 1,
  POSPRES_INCONCLUSIVE = 2
} pospres_verdict_status;

typedef struct pospres_op pospres_op;
typedef struct pospres_seq pospres_seq;
typedef struct pospres_measure pospres_measure;
typedef struct pospres_kset pospres_kset;
typedef struct pospres_verdict pospres_verdict;
typedef struct pospres_levy pospres_levy;

POSPRES_API const char* pospres_last_error(void);
POSPRES_API const char* pospres_status_name(pospres_status s);
POSPRES_API void pospres_string_free(char* s);
POSPRES_API void pospres_array_free(double* a);

/* Operators. Text uses the operator file format. */
POSPRES_API pospres_status pospres_op_parse(const char* text, pospres_op** out);
POSPRES_API pospres_status pospres_op_read(const char* path, pospres_op** out);
POSPRES_API pospres_status pospres_op_format(const pospres_op* op, char** out);
POSPRES_API void pospres_op_free(pospres_op* op);
POSPRES_API size_t pospres_op_nvars(const pospres_op* op);
POSPRES_API pospres_status pospres_op_exp(const pospres_op* a, double t, unsigned d, pospres_op** out);
POSPRES_API pospres_status pospres_op_log(const pospres_op* t, unsigned d, pospres_op** out);
POSPRES_API pospres_status pospres_op_invert(const pospres_op* t, unsigned d, pospres_op** out);
POSPRES_API pospres_status pospres_op_compose(const pospres_op* t, const pospres_op* s, unsigned d,
                                              pospres_op** out);
/* Applies op to a polynomial given in the polynomial text grammar. */
POSPRES_API pospres_status pospres_op_apply(const pospres_op* op, const char* poly, char** out);
/* Row-major dim x dim matrix of op on R[x]_{<=d}. */
POSPRES_API pospres_status pospres_op_matrix(const pospres_op* op, unsigned d, double** entries,
                                             size_t* dim);
POSPRES_API pospres_status pospres_op_exp_limit(const pospres_op* a, double t, unsigned d, unsigned k,
                                                double* discrepancy);

/* Sequences and measures. */
POSPRES_API pospres_status pospres_seq_parse(const char* text, pospres_seq** out);
POSPRES_API pospres_status pospres_seq_read(const char* path, pospres_seq** out);
POSPRES_API pospres_status pospres_seq_format(const pospres_seq* s, char** out);
POSPRES_API void pospres_seq_free(pospres_seq* s);
POSPRES_API pospres_status pospres_seq_convolve(const pospres_seq* a, const pospres_seq* b,
                                                pospres_seq** out);
POSPRES_API pospres_status pospres_seq_hadamard(const pospres_seq* a, const pospres_seq* b,
                                                pospres_seq** out);
POSPRES_API pospres_status pospres_seq_conv_exp(const pospres_seq* s, double t, pospres_seq** out);
/* Moment matrix of degree d (row-major), its smallest eigenvalue and PSD flag. */
POSPRES_API pospres_status pospres_seq_hankel(const pospres_seq* s, unsigned d, double** entries,
                                              size_t* dim, double* min_eigenvalue, int* psd);
/* Writes "DivergesLikely", "ConvergesLikely" or "Unknown". */
POSPRES_API pospres_status pospres_seq_carleman(const pospres_seq* s, unsigned terms, char** out);
/* D(s) as an operator. */
POSPRES_API pospres_status pospres_seq_to_op(const pospres_seq* s, pospres_op** out);

POSPRES_API pospres_status pospres_measure_parse(const char* text, pospres_measure** out);
POSPRES_API pospres_status pospres_measure_read(const char* path, pospres_measure** out);
POSPRES_API pospres_status pospres_measure_format(const pospres_measure* m, char** out);
POSPRES_API void pospres_measure_free(pospres_measure* m);
POSPRES_API pospres_status pospres_measure_moments(const pospres_measure* m, unsigned order,
                                                   pospres_seq** out);

/* Sets K. */
POSPRES_API pospres_status pospres_kset_parse(const char* desc, pospres_kset** out);
POSPRES_API pospres_status pospres_kset_format(const pospres_kset* k, char** out);
POSPRES_API pospres_status pospres_kset_sharp(const pospres_kset* k, pospres_kset** out);
POSPRES_API size_t pospres_kset_nvars(const pospres_kset* k);
POSPRES_API void pospres_kset_free(pospres_kset* k);

/* Checks. Point arrays are row-major npoints x n; NULL selects the defaults
 * (Chebyshev-Lobatto samples, or the dense falsifier grid). Pass tol <= 0
 * for the default PSD tolerance. */
POSPRES_API pospres_status pospres_check_preserver(const pospres_op* op, const pospres_kset* k,
                                                   unsigned d, const double* ys, size_t npoints,
                                                   double tol, pospres_verdict** out);
/* Grid falsifier with the default trial family up to max_degree. */
POSPRES_API pospres_status pospres_falsify(const pospres_op* op, const pospres_kset* k,
                                           unsigned max_degree, const double* grid,
                                           size_t npoints, pospres_verdict** out);
/* ts may be NULL for the default times. */
POSPRES_API pospres_status pospres_check_generator(const pospres_op* a, const pospres_kset* k,
                                                   unsigned d, const double* ys, size_t npoints,
                                                   const double* ts, size_t nts, double tol,
                                                   pospres_verdict** out);
POSPRES_API pospres_status pospres_check_finite_order_generator(const pospres_op* a,
                                                                const double* ys, size_t npoints,
                                                                double tol, pospres_verdict** out);
/* one_plus != 0 runs the (1 + lambda A) test instead of the resolvent.
 * lambdas may be NULL for the defaults. */
POSPRES_API pospres_status pospres_resolvent_check(const pospres_op* a, const pospres_kset* k,
                                                   unsigned d, const double* lambdas, size_t nl,
                                                   const double* grid, size_t npoints,
                                                   int one_plus, pospres_verdict** out);

POSPRES_API pospres_verdict_status pospres_verdict_status_of(const pospres_verdict* v);
POSPRES_API size_t pospres_verdict_witness_count(const pospres_verdict* v);
/* One witness line, e.g. "FAIL y=(1) d=2 minEig=-0.5". */
POSPRES_API pospres_status pospres_verdict_witness(const pospres_verdict* v, size_t i, char** out);
/* Full report: status line, checked summary, notes, witness lines. */
POSPRES_API pospres_status pospres_verdict_format(const pospres_verdict* v, char** out);
POSPRES_API void pospres_verdict_free(pospres_verdict* v);

/* Levy triples. */
POSPRES_API pospres_status pospres_levy_parse(const char* text, pospres_levy** out);
POSPRES_API pospres_status pospres_levy_read(const char* path, pospres_levy** out);
POSPRES_API void pospres_levy_free(pospres_levy* l);
/* halfline != 0 uses the half-line constructor (n = 1, b >= 0, atoms > 0). */
POSPRES_API pospres_status pospres_levy_generator(const pospres_levy* l, unsigned order,
                                                  int halfline, pospres_op** out);
/* beta has length n of s. */
POSPRES_API pospres_status pospres_semigroup_moments(double a0, const double* beta,
                                                     const pospres_seq* s, double t,
                                                     pospres_seq** out);

/* Eventual positivity. */
POSPRES_API pospres_status pospres_tau_sigma(double lo, double hi, double tol, double* tau_lo,
                                             double* tau_hi, unsigned* iterations);
/* exact != 0 searches the exact minimum instead of the closed form m. */
POSPRES_API pospres_status pospres_tau_drift(double a, double tol, double t_max, int exact,
                                             double* tau_lo, double* tau_hi,
                                             unsigned* iterations);
POSPRES_API pospres_status pospres_sigma_point(double t, double* h2, double* h2_det,
                                               double* sigma3);
POSPRES_API pospres_status pospres_m_min(double a, double t, int exact, double* out);
POSPRES_API pospres_status pospres_sigma_curve_csv(const double* ts, size_t n, char** out);
POSPRES_API pospres_status pospres_drift_curve_csv(double a, const double* ts, size_t n,
                                                   int exact, char** out);

#ifdef __cplusplus
}
#endif

#endif
