// Command-line front end. Uses only the C interface of the library.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pospres/pospres.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Library failure carrying the status for exit-code mapping.
struct ApiError : std::runtime_error {
  pospres_status status;
  ApiError(pospres_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(pospres_status s) {
  if (s != POSPRES_OK) throw ApiError(s, std::string(pospres_status_name(s)) + ": " + pospres_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Op = std::unique_ptr<pospres_op, Deleter<pospres_op, pospres_op_free>>;
using Seq = std::unique_ptr<pospres_seq, Deleter<pospres_seq, pospres_seq_free>>;
using Measure = std::unique_ptr<pospres_measure, Deleter<pospres_measure, pospres_measure_free>>;
using KSet = std::unique_ptr<pospres_kset, Deleter<pospres_kset, pospres_kset_free>>;
using Verdict = std::unique_ptr<pospres_verdict, Deleter<pospres_verdict, pospres_verdict_free>>;
using Levy = std::unique_ptr<pospres_levy, Deleter<pospres_levy, pospres_levy_free>>;

std::string take(char* s) {
  std::string out(s ? s : "");
  pospres_string_free(s);
  return out;
}

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Op read_op(const std::string& path) {
  pospres_op* p = nullptr;
  check(pospres_op_read(path.c_str(), &p));
  return Op(p);
}

Seq read_seq(const std::string& path) {
  pospres_seq* p = nullptr;
  check(pospres_seq_read(path.c_str(), &p));
  return Seq(p);
}

KSet parse_k(const std::string& desc, std::size_t n) {
  const std::string text = desc.empty() ? (n == 1 ? "full" : "full:" + std::to_string(n)) : desc;
  pospres_kset* k = nullptr;
  check(pospres_kset_parse(text.c_str(), &k));
  KSet out(k);
  if (pospres_kset_nvars(k) != n) {
    throw ApiError(POSPRES_E_DIMENSION_MISMATCH, "K has " + std::to_string(pospres_kset_nvars(k)) +
                                                     " variables but the operator has " + std::to_string(n));
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw CLI::ValidationError("bad number '" + item + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

struct Grid {
  double lo;
  double hi;
  std::size_t count;
};

Grid parse_grid(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw CLI::ValidationError("expected LO:HI:N, got '" + text + "'");
  const auto ends = parse_list(text.substr(0, c1) + "," + text.substr(c1 + 1, c2 - c1 - 1));
  std::size_t used = 0;
  long count = 0;
  try {
    count = std::stol(text.substr(c2 + 1), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() - c2 - 1 || count < 1 || ends[0] > ends[1]) {
    throw CLI::ValidationError("expected LO:HI:N with LO <= HI and N >= 1, got '" + text + "'");
  }
  return {ends[0], ends[1], static_cast<std::size_t>(count)};
}

std::vector<double> axis(const Grid& g) {
  std::vector<double> v;
  for (std::size_t k = 0; k < g.count; ++k) {
    v.push_back(g.count == 1 ? g.lo
                             : g.lo + (g.hi - g.lo) * static_cast<double>(k) / static_cast<double>(g.count - 1));
  }
  return v;
}

// Row-major tensor grid with the same axis in every coordinate.
std::vector<double> tensor(const Grid& g, std::size_t n) {
  const auto a = axis(g);
  std::vector<double> pts;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) pts.push_back(a[idx[i]]);
    std::size_t i = n;
    while (i > 0 && ++idx[i - 1] == a.size()) idx[--i] = 0;
    if (i == 0) break;
  }
  return pts;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw ApiError(POSPRES_E_IO, "cannot write '" + path + "'");
}

int report(const Verdict& v, const std::string& title) {
  char* s = nullptr;
  check(pospres_verdict_format(v.get(), &s));
  std::printf("[%s]\n%s", title.c_str(), take(s).c_str());
  return pospres_verdict_status_of(v.get()) == POSPRES_FAIL ? kExitFail : kExitOk;
}

std::string format_op(const Op& op) {
  char* s = nullptr;
  check(pospres_op_format(op.get(), &s));
  return take(s);
}

std::string format_seq(const Seq& seq) {
  char* s = nullptr;
  check(pospres_seq_format(seq.get(), &s));
  return take(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positivity preservers, moment sequences and semigroup generators on polynomial spaces"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  // Shared option storage.
  std::string op_path, k_desc, grid_text, ys_text, t_text, lambda_text, csv_path, out_path;
  std::vector<std::string> op_paths;
  unsigned d = 2;
  double tol = 0.0;
  bool falsify = false, finite_order = false, one_plus = false;

  auto* cp = app.add_subcommand("check-preserver", "Moment/localizing-matrix test of a K-positivity preserver");
  cp->add_option("--op", op_path, "Operator file")->required();
  cp->add_option("--K", k_desc, "Set K (default: full space)");
  cp->add_option("--d", d, "Half degree of the tested moment matrices")->required();
  cp->add_option("--ys", ys_text, "Sample points LO:HI:N per axis");
  cp->add_option("--grid", grid_text, "Falsifier grid LO:HI:N per axis");
  cp->add_option("--tol", tol, "PSD tolerance");
  cp->add_flag("--falsify", falsify, "Also run the grid falsifier on trial polynomials of degree 2d");
  cp->callback([&] {
    const Op op = read_op(op_path);
    const std::size_t n = pospres_op_nvars(op.get());
    const KSet k = parse_k(k_desc, n);
    const auto ys = ys_text.empty() ? std::vector<double>{} : tensor(parse_grid(ys_text), n);
    pospres_verdict* v = nullptr;
    check(pospres_check_preserver(op.get(), k.get(), d, ys.empty() ? nullptr : ys.data(), ys.size() / n, tol, &v));
    exit_code = std::max(exit_code, report(Verdict(v), "moment test"));
    if (falsify || !grid_text.empty()) {
      const auto grid = grid_text.empty() ? std::vector<double>{} : tensor(parse_grid(grid_text), n);
      check(pospres_falsify(op.get(), k.get(), 2 * d, grid.empty() ? nullptr : grid.data(), grid.size() / n, &v));
      exit_code = std::max(exit_code, report(Verdict(v), "grid falsifier"));
    }
  });

  auto* cg = app.add_subcommand("check-generator", "Sampling test of a semigroup generator");
  cg->add_option("--op", op_path, "Operator file")->required();
  cg->add_option("--K", k_desc, "Set K (default: full space)");
  cg->add_option("--d", d, "Half degree of the tested moment matrices");
  cg->add_option("--t", t_text, "Times, comma separated");
  cg->add_option("--ys", ys_text, "Freeze points LO:HI:N per axis");
  cg->add_option("--tol", tol, "PSD tolerance");
  cg->add_flag("--finite-order", finite_order, "Test the finite-order normal form instead");
  cg->callback([&] {
    const Op op = read_op(op_path);
    const std::size_t n = pospres_op_nvars(op.get());
    const auto ys = ys_text.empty() ? std::vector<double>{} : tensor(parse_grid(ys_text), n);
    pospres_verdict* v = nullptr;
    if (finite_order) {
      check(pospres_check_finite_order_generator(op.get(), ys.empty() ? nullptr : ys.data(), ys.size() / n, tol, &v));
      exit_code = report(Verdict(v), "finite-order generator");
      return;
    }
    const KSet k = parse_k(k_desc, n);
    const auto ts = t_text.empty() ? std::vector<double>{} : parse_list(t_text);
    check(pospres_check_generator(op.get(), k.get(), d, ys.empty() ? nullptr : ys.data(), ys.size() / n,
                                  ts.empty() ? nullptr : ts.data(), ts.size(), tol, &v));
    exit_code = report(Verdict(v), "generator test");
  });

  auto* rs = app.add_subcommand("resolvent", "Grid falsifier for (1 - lambda A)^-1 or (1 + lambda A)");
  rs->add_option("--op", op_path, "Operator file")->required();
  rs->add_option("--K", k_desc, "Set K (default: full space)");
  rs->add_option("--d", d, "Degree of the polynomial space")->required();
  rs->add_option("--lambda", lambda_text, "Values of lambda, comma separated");
  rs->add_option("--grid", grid_text, "Grid LO:HI:N per axis");
  rs->add_flag("--one-plus", one_plus, "Test (1 + lambda A) instead of the resolvent");
  rs->callback([&] {
    const Op op = read_op(op_path);
    const std::size_t n = pospres_op_nvars(op.get());
    const KSet k = parse_k(k_desc, n);
    const auto ls = lambda_text.empty() ? std::vector<double>{} : parse_list(lambda_text);
    const auto grid = grid_text.empty() ? std::vector<double>{} : tensor(parse_grid(grid_text), n);
    pospres_verdict* v = nullptr;
    check(pospres_resolvent_check(op.get(), k.get(), d, ls.empty() ? nullptr : ls.data(), ls.size(),
                                  grid.empty() ? nullptr : grid.data(), grid.size() / n, one_plus ? 1 : 0, &v));
    exit_code = report(Verdict(v), one_plus ? "one-plus test" : "resolvent test");
  });

  double t = 1.0;
  auto* ex = app.add_subcommand("exp", "exp(tA) up to order d");
  ex->add_option("--op", op_path, "Operator file")->required();
  ex->add_option("--t", t, "Time")->required();
  ex->add_option("--d", d, "Truncation order")->required();
  ex->add_option("--out", out_path, "Output file (default: stdout)");
  ex->callback([&] {
    pospres_op* r = nullptr;
    check(pospres_op_exp(read_op(op_path).get(), t, d, &r));
    emit(format_op(Op(r)), out_path);
  });

  auto* lg = app.add_subcommand("log", "Logarithm of a constant-coefficient operator up to order d");
  lg->add_option("--op", op_path, "Operator file")->required();
  lg->add_option("--d", d, "Truncation order")->required();
  lg->add_option("--out", out_path, "Output file (default: stdout)");
  lg->callback([&] {
    pospres_op* r = nullptr;
    check(pospres_op_log(read_op(op_path).get(), d, &r));
    emit(format_op(Op(r)), out_path);
  });

  auto* iv = app.add_subcommand("invert", "Inverse up to order d");
  iv->add_option("--op", op_path, "Operator file")->required();
  iv->add_option("--d", d, "Truncation order")->required();
  iv->add_option("--out", out_path, "Output file (default: stdout)");
  iv->callback([&] {
    pospres_op* r = nullptr;
    check(pospres_op_invert(read_op(op_path).get(), d, &r));
    emit(format_op(Op(r)), out_path);
  });

  auto* co = app.add_subcommand("compose", "Product T1 T2 ... up to order d");
  co->add_option("--op", op_paths, "Operator files, applied right to left")->required()->expected(2, 64);
  co->add_option("--d", d, "Truncation order")->required();
  co->add_option("--out", out_path, "Output file (default: stdout)");
  co->callback([&] {
    Op acc = read_op(op_paths.back());
    for (auto it = op_paths.rbegin() + 1; it != op_paths.rend(); ++it) {
      pospres_op* r = nullptr;
      check(pospres_op_compose(read_op(*it).get(), acc.get(), d, &r));
      acc = Op(r);
    }
    emit(format_op(acc), out_path);
  });

  std::string poly_text;
  auto* ap = app.add_subcommand("apply", "Apply an operator to a polynomial");
  ap->add_option("--op", op_path, "Operator file")->required();
  ap->add_option("--poly", poly_text, "Polynomial, e.g. '2 * x1^2 - 1'")->required();
  ap->callback([&] {
    char* s = nullptr;
    check(pospres_op_apply(read_op(op_path).get(), poly_text.c_str(), &s));
    std::printf("%s\n", take(s).c_str());
  });

  std::string a_path, b_path, seq_path, measure_path;
  unsigned terms = 8, order = 8;
  auto* sq = app.add_subcommand("seq", "Moment sequence operations");
  sq->require_subcommand(1);
  auto* sconv = sq->add_subcommand("conv", "Binomial convolution of two sequences");
  auto* shad = sq->add_subcommand("hadamard", "Entrywise product of two sequences");
  for (auto* sub : {sconv, shad}) {
    sub->add_option("--a", a_path, "First sequence file")->required();
    sub->add_option("--b", b_path, "Second sequence file")->required();
  }
  sconv->callback([&] {
    pospres_seq* r = nullptr;
    check(pospres_seq_convolve(read_seq(a_path).get(), read_seq(b_path).get(), &r));
    emit(format_seq(Seq(r)), "");
  });
  shad->callback([&] {
    pospres_seq* r = nullptr;
    check(pospres_seq_hadamard(read_seq(a_path).get(), read_seq(b_path).get(), &r));
    emit(format_seq(Seq(r)), "");
  });
  auto* sexp = sq->add_subcommand("conv-exp", "Convolution exponential of a sequence");
  sexp->add_option("--seq", seq_path, "Sequence file")->required();
  sexp->add_option("--t", t, "Time")->required();
  sexp->callback([&] {
    pospres_seq* r = nullptr;
    check(pospres_seq_conv_exp(read_seq(seq_path).get(), t, &r));
    emit(format_seq(Seq(r)), "");
  });
  auto* shk = sq->add_subcommand("hankel", "Moment matrix of degree d and its PSD status");
  shk->add_option("--seq", seq_path, "Sequence file")->required();
  shk->add_option("--d", d, "Degree")->required();
  shk->callback([&] {
    double* m = nullptr;
    std::size_t dim = 0;
    double lmin = 0.0;
    int psd = 0;
    check(pospres_seq_hankel(read_seq(seq_path).get(), d, &m, &dim, &lmin, &psd));
    std::string out;
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) out += (j ? " " : "") + real(m[i * dim + j]);
      out += "\n";
    }
    pospres_array_free(m);
    out += "minEig = " + real(lmin) + "\npsd = " + (psd ? "yes" : "no") + "\n";
    emit(out, "");
    if (!psd) exit_code = kExitFail;
  });
  auto* scar = sq->add_subcommand("carleman", "Heuristic Carleman reading of the even marginal moments");
  scar->add_option("--seq", seq_path, "Sequence file")->required();
  scar->add_option("--terms", terms, "Number of even moments per axis");
  scar->callback([&] {
    char* s = nullptr;
    check(pospres_seq_carleman(read_seq(seq_path).get(), terms, &s));
    std::printf("%s\n", take(s).c_str());
  });
  auto* smom = sq->add_subcommand("moments", "Moments of a discrete measure");
  smom->add_option("--measure", measure_path, "Measure file")->required();
  smom->add_option("--order", order, "Highest moment order")->required();
  smom->callback([&] {
    pospres_measure* mp = nullptr;
    check(pospres_measure_read(measure_path.c_str(), &mp));
    const Measure mu(mp);
    pospres_seq* r = nullptr;
    check(pospres_measure_moments(mu.get(), order, &r));
    emit(format_seq(Seq(r)), "");
  });

  auto print_tau = [](double lo, double hi, unsigned it) {
    std::printf("tau_lo = %s\ntau_hi = %s\niterations = %u\n", real(lo).c_str(), real(hi).c_str(), it);
  };

  double lo = 1e-4, hi = 0.1, tau_tol = 1e-7;
  auto* ts = app.add_subcommand("tau-sigma", "Threshold of the exp(t (x d)^3) example");
  ts->add_option("--lo", lo, "Left end of the bracket");
  ts->add_option("--hi", hi, "Right end of the bracket");
  ts->add_option("--tol", tau_tol, "Bracket width");
  ts->callback([&] {
    double l = 0, h = 0;
    unsigned it = 0;
    check(pospres_tau_sigma(lo, hi, tau_tol, &l, &h, &it));
    print_tau(l, h, it);
  });

  double a = 1.0, t_max = 50.0, drift_tol = 1e-9;
  bool exact = false;
  auto* td = app.add_subcommand("tau-drift", "Threshold of the a d + (x^2-1)/2 d^2 example");
  td->add_option("--a", a, "Drift parameter")->required();
  td->add_option("--tol", drift_tol, "Bracket width");
  td->add_option("--tmax", t_max, "Search cap");
  td->add_flag("--exact", exact, "Use the exact minimum instead of the closed form m");
  td->callback([&] {
    double l = 0, h = 0;
    unsigned it = 0;
    check(pospres_tau_drift(a, drift_tol, t_max, exact ? 1 : 0, &l, &h, &it));
    print_tau(l, h, it);
  });

  auto* cv = app.add_subcommand("curve", "CSV curves of the two threshold examples");
  cv->require_subcommand(1);
  auto* cs = cv->add_subcommand("sigma", "Sigma example curve with columns t,h2,sigma3");
  auto* cd = cv->add_subcommand("drift", "Drift example curve with columns t,m");
  for (auto* sub : {cs, cd}) {
    sub->add_option("--t", t_text, "Times LO:HI:N")->required();
    sub->add_option("--csv", csv_path, "Output file (default: stdout)");
  }
  cd->add_option("--a", a, "Drift parameter")->required();
  cd->add_flag("--exact", exact, "Exact minimum instead of the closed form m");
  cs->callback([&] {
    const auto times = axis(parse_grid(t_text));
    char* s = nullptr;
    check(pospres_sigma_curve_csv(times.data(), times.size(), &s));
    emit(take(s), csv_path);
  });
  cd->callback([&] {
    const auto times = axis(parse_grid(t_text));
    char* s = nullptr;
    check(pospres_drift_curve_csv(a, times.data(), times.size(), exact ? 1 : 0, &s));
    emit(take(s), csv_path);
  });

  std::string levy_path;
  bool halfline = false;
  auto* lb = app.add_subcommand("levy-build", "Generator from a Levy triple file");
  lb->add_option("--levy", levy_path, "Levy triple file")->required();
  lb->add_option("--order", order, "Truncation order");
  lb->add_flag("--halfline", halfline, "Half-line constructor (n = 1, b >= 0, atoms > 0)");
  lb->add_option("--out", out_path, "Output file (default: stdout)");
  lb->callback([&] {
    pospres_levy* lp = nullptr;
    check(pospres_levy_read(levy_path.c_str(), &lp));
    const Levy levy(lp);
    pospres_op* r = nullptr;
    check(pospres_levy_generator(levy.get(), order, halfline ? 1 : 0, &r));
    emit(format_op(Op(r)), out_path);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), app.help().c_str());
    return kExitUsage;
  } catch (const ApiError& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.status == POSPRES_E_NO_SIGN_CHANGE ? kExitFail : kExitUsage;
  }
  std::fflush(stdout);
  return exit_code;
}
