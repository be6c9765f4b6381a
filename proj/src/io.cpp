#include "pospres/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "pospres/error.hpp"

namespace pospres {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + why);
}

double to_real(std::string_view s, std::size_t line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail_at(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

unsigned to_unsigned(std::string_view s, std::size_t line) {
  s = trim(s);
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail_at(line, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<double> real_list(std::string_view s, std::size_t line) {
  std::vector<double> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = s.find(',', pos);
    out.push_back(to_real(s.substr(pos, comma - pos), line));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

// Strips the delimiters of `(..)` or `[..]`.
std::string_view inside(std::string_view s, char open, char close, std::size_t line) {
  s = trim(s);
  if (s.size() < 2 || s.front() != open || s.back() != close) {
    fail_at(line, std::string("expected ") + open + "..." + close);
  }
  return s.substr(1, s.size() - 2);
}

MultiIndex multiindex(std::string_view s, std::size_t line) {
  std::vector<unsigned> e;
  s = inside(s, '[', ']', line);
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = s.find(',', pos);
    e.push_back(to_unsigned(s.substr(pos, comma - pos), line));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return MultiIndex(std::move(e));
}

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t pos = 0, number = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    const std::string_view l = trim(text.substr(pos, end - pos));
    if (!l.empty() && l.front() != '#') out.push_back({number, l});
    pos = end + 1;
  }
  return out;
}

// Splits `key = value`; returns nullopt without '='.
std::optional<std::pair<std::string_view, std::string_view>> key_value(std::string_view l) {
  const auto eq = l.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  return std::make_pair(trim(l.substr(0, eq)), trim(l.substr(eq + 1)));
}

std::string point_text(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ',';
    s += format_real(x[i]);
  }
  return s + ")";
}

// `atom (..) w` or `nu (..) w` after the keyword.
Atom atom_line(std::string_view rest, std::size_t line) {
  const auto close = rest.find(')');
  if (close == std::string_view::npos) fail_at(line, "expected (x1,...,xn) w");
  const auto point = real_list(inside(rest.substr(0, close + 1), '(', ')', line), line);
  const double w = to_real(rest.substr(close + 1), line);
  return {point, w};
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DiffOp parse_operator(std::string_view text) {
  std::optional<std::size_t> n;
  std::optional<unsigned> order;
  Tail tail = Tail::kZero;
  std::vector<std::tuple<std::size_t, MultiIndex, std::string_view>> entries;
  for (const auto& [number, l] : content_lines(text)) {
    const auto kv = key_value(l);
    if (!kv) fail_at(number, "expected '[alpha] = poly' or 'key = value'");
    const auto [key, value] = *kv;
    if (key == "n") {
      n = to_unsigned(value, number);
    } else if (key == "order") {
      order = to_unsigned(value, number);
    } else if (key == "tail") {
      if (value == "zero") tail = Tail::kZero;
      else if (value == "unknown") tail = Tail::kUnknown;
      else fail_at(number, "tail must be 'zero' or 'unknown'");
    } else if (!key.empty() && key.front() == '[') {
      entries.emplace_back(number, multiindex(key, number), value);
    } else {
      fail_at(number, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!n) n = entries.empty() ? 1 : std::get<1>(entries.front()).size();
  if (*n == 0) throw Error(ErrorCode::kParse, "operator needs n >= 1");
  DiffOp::Coeffs coeffs;
  unsigned top = 0;
  for (const auto& [number, alpha, poly] : entries) {
    if (alpha.size() != *n) fail_at(number, "multi-index length differs from n");
    Poly q;
    try {
      q = parse_poly(poly, *n);
    } catch (const Error& e) {
      fail_at(number, e.what());
    }
    if (!coeffs.emplace(alpha, std::move(q)).second) fail_at(number, "duplicate " + to_string(alpha));
    top = std::max(top, alpha.degree());
  }
  if (order && *order < top) throw Error(ErrorCode::kParse, "a coefficient lies above the declared order");
  return DiffOp(*n, order.value_or(top), std::move(coeffs), tail);
}

std::string format_operator(const DiffOp& t) {
  std::string s = "n = " + std::to_string(t.nvars()) + "\norder = " + std::to_string(t.max_order()) +
                  "\ntail = " + (t.tail() == Tail::kZero ? "zero" : "unknown") + "\n";
  for (const auto& [alpha, q] : t.coeffs()) s += to_string(alpha) + " = " + format_poly(q) + "\n";
  return s;
}

MomentSeq parse_sequence(std::string_view text) {
  std::optional<std::size_t> n;
  std::optional<unsigned> order;
  std::vector<std::tuple<std::size_t, MultiIndex, double>> entries;
  for (const auto& [number, l] : content_lines(text)) {
    const auto kv = key_value(l);
    if (!kv) fail_at(number, "expected '[alpha] = value' or 'key = value'");
    const auto [key, value] = *kv;
    if (key == "n") {
      n = to_unsigned(value, number);
    } else if (key == "order") {
      order = to_unsigned(value, number);
    } else if (!key.empty() && key.front() == '[') {
      entries.emplace_back(number, multiindex(key, number), to_real(value, number));
    } else {
      fail_at(number, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!n) n = entries.empty() ? 1 : std::get<1>(entries.front()).size();
  unsigned top = 0;
  for (const auto& e : entries) top = std::max(top, std::get<1>(e).degree());
  if (order && *order < top) throw Error(ErrorCode::kParse, "an entry lies above the declared order");
  MomentSeq s(*n, order.value_or(top));
  std::map<MultiIndex, bool> seen;
  for (const auto& [number, alpha, value] : entries) {
    if (alpha.size() != *n) fail_at(number, "multi-index length differs from n");
    if (seen[alpha]) fail_at(number, "duplicate " + to_string(alpha));
    seen[alpha] = true;
    s.at(alpha) = value;
  }
  return s;
}

std::string format_sequence(const MomentSeq& s) {
  std::string out = "n = " + std::to_string(s.nvars()) + "\norder = " + std::to_string(s.order()) + "\n";
  for (const auto& alpha : s.basis().monomials()) {
    out += to_string(alpha) + " = " + format_real(s[alpha]) + "\n";
  }
  return out;
}

DiscreteMeasure parse_measure(std::string_view text) {
  std::optional<std::size_t> n;
  std::vector<std::pair<std::size_t, Atom>> atoms;
  for (const auto& [number, l] : content_lines(text)) {
    if (l.starts_with("atom")) {
      atoms.emplace_back(number, atom_line(l.substr(4), number));
    } else if (const auto kv = key_value(l); kv && kv->first == "n") {
      n = to_unsigned(kv->second, number);
    } else {
      fail_at(number, "expected 'atom (x1,...,xn) w'");
    }
  }
  if (!n) n = atoms.empty() ? 1 : atoms.front().second.point.size();
  DiscreteMeasure mu(*n);
  for (auto& [number, atom] : atoms) {
    try {
      mu.add(std::move(atom));
    } catch (const Error& e) {
      fail_at(number, e.what());
    }
  }
  return mu;
}

std::string format_measure(const DiscreteMeasure& mu) {
  std::string s = "n = " + std::to_string(mu.nvars()) + "\n";
  for (const auto& atom : mu.atoms()) s += "atom " + point_text(atom.point) + " " + format_real(atom.weight) + "\n";
  return s;
}

LevyTriple parse_levy(std::string_view text) {
  LevyTriple tr;
  std::optional<std::vector<std::vector<double>>> sigma;
  std::optional<std::vector<double>> b;
  std::vector<std::pair<std::size_t, Atom>> atoms;
  for (const auto& [number, l] : content_lines(text)) {
    if (l.starts_with("nu")) {
      atoms.emplace_back(number, atom_line(l.substr(2), number));
      continue;
    }
    const auto kv = key_value(l);
    if (!kv) fail_at(number, "expected 'key = value' or 'nu (x..) w'");
    const auto [key, value] = *kv;
    if (key == "a0") {
      tr.a0 = to_real(value, number);
    } else if (key == "b") {
      b = real_list(inside(value, '(', ')', number), number);
    } else if (key == "sigma") {
      std::vector<std::vector<double>> rows;
      std::string_view body = trim(inside(value, '[', ']', number));
      while (!body.empty()) {
        const auto close = body.find(']');
        if (close == std::string_view::npos) fail_at(number, "unbalanced sigma rows");
        rows.push_back(real_list(inside(body.substr(0, close + 1), '[', ']', number), number));
        body = trim(body.substr(close + 1));
        if (!body.empty()) {
          if (body.front() != ',') fail_at(number, "sigma rows must be comma separated");
          body = trim(body.substr(1));
        }
      }
      sigma = std::move(rows);
    } else {
      fail_at(number, "unknown key '" + std::string(key) + "'");
    }
  }
  std::size_t n = b ? b->size() : sigma ? sigma->size() : atoms.empty() ? 0 : atoms.front().second.point.size();
  if (n == 0) throw Error(ErrorCode::kParse, "Levy file needs b, sigma or an atom to fix n");
  tr.b = b.value_or(std::vector<double>(n, 0.0));
  tr.sigma = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (sigma) {
    if (sigma->size() != n) throw Error(ErrorCode::kParse, "sigma must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
      if ((*sigma)[i].size() != n) throw Error(ErrorCode::kParse, "sigma must be n x n");
      for (std::size_t j = 0; j < n; ++j) {
        tr.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*sigma)[i][j];
      }
    }
  }
  tr.nu = DiscreteMeasure(n);
  for (auto& [number, atom] : atoms) {
    try {
      tr.nu.add(std::move(atom));
    } catch (const Error& e) {
      fail_at(number, e.what());
    }
  }
  tr.validate();
  return tr;
}

std::string format_levy(const LevyTriple& tr) {
  std::string s = "a0 = " + format_real(tr.a0) + "\nsigma = [";
  for (Eigen::Index i = 0; i < tr.sigma.rows(); ++i) {
    if (i) s += ',';
    s += '[';
    for (Eigen::Index j = 0; j < tr.sigma.cols(); ++j) {
      if (j) s += ',';
      s += format_real(tr.sigma(i, j));
    }
    s += ']';
  }
  s += "]\nb = " + point_text(tr.b) + "\n";
  for (const auto& atom : tr.nu.atoms()) s += "nu " + point_text(atom.point) + " " + format_real(atom.weight) + "\n";
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
}

std::vector<double> parse_real_list(std::string_view text) {
  auto v = real_list(text, 1);
  if (v.empty()) throw Error(ErrorCode::kParse, "empty list");
  return v;
}

GridSpec parse_grid_spec(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw Error(ErrorCode::kParse, "expected LO:HI:N");
  GridSpec g{to_real(text.substr(0, c1), 1), to_real(text.substr(c1 + 1, c2 - c1 - 1), 1),
             to_unsigned(text.substr(c2 + 1), 1)};
  if (g.count == 0 || !(g.lo <= g.hi)) throw Error(ErrorCode::kParse, "grid needs LO <= HI and N >= 1");
  return g;
}

}  // namespace pospres
