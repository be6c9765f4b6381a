#include "pospres/preserver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "pospres/error.hpp"

namespace pospres {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_bounds(const std::vector<double>& lo, const std::vector<double>& hi, const char* what) {
  if (lo.size() != hi.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": bound lists differ in length");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i]) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + ": bounds must be finite and ordered");
    }
  }
}

// Inverse of the ray matrix (rays as columns) for a simplicial cone.
Matrix dual_forms(const PolyhedralCone& c) {
  const std::size_t n = c.rays.front().size();
  if (c.rays.size() != n) {
    throw Error(ErrorCode::kUnsupported, "cone checks need n linearly independent rays");
  }
  Matrix r(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c.rays[j][i];
    }
  }
  Eigen::FullPivLU<Matrix> lu(r);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kUnsupported, "cone rays are linearly dependent");
  }
  return lu.inverse();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_point(std::span<const double> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ',';
    s += fmt(p[i]);
  }
  return s + ")";
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i]);
  }
  return s;
}

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::kParse, "bad number '" + std::string(item) + "' in K descriptor");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

std::vector<std::vector<double>> parse_groups(std::string_view text) {
  std::vector<std::vector<double>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t semi = text.find(';', pos);
    if (semi == std::string_view::npos) semi = text.size();
    out.push_back(parse_numbers(text.substr(pos, semi - pos)));
    pos = semi + 1;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// KDescriptor

KDescriptor::KDescriptor(Variant v) : v_(std::move(v)) {
  std::visit(
      Overloaded{
          [](const FullSpace& k) {
            if (k.n == 0) throw Error(ErrorCode::kInvalidArgument, "K needs n >= 1");
          },
          [](const CompactBox& k) {
            if (k.lo.empty()) throw Error(ErrorCode::kInvalidArgument, "box needs n >= 1");
            check_bounds(k.lo, k.hi, "box");
          },
          [](const CompactBall& k) {
            if (k.center.empty()) throw Error(ErrorCode::kInvalidArgument, "ball needs n >= 1");
            if (!(k.radius >= 0.0) || !std::isfinite(k.radius)) {
              throw Error(ErrorCode::kInvalidArgument, "ball radius must be finite and >= 0");
            }
          },
          [](const PolyhedralCone& k) {
            if (k.rays.empty()) throw Error(ErrorCode::kInvalidArgument, "cone needs a ray");
            for (const auto& r : k.rays) {
              if (r.size() != k.rays.front().size() || r.empty()) {
                throw Error(ErrorCode::kInvalidArgument, "cone rays differ in length");
              }
              if (std::all_of(r.begin(), r.end(), [](double x) { return x == 0.0; })) {
                throw Error(ErrorCode::kInvalidArgument, "cone rays must be nonzero");
              }
            }
          },
          [](const CompactTimesHalfline& k) { check_bounds(k.lo, k.hi, "striphalf"); },
          [](const LatticeBalls& k) {
            if (k.n == 0) throw Error(ErrorCode::kInvalidArgument, "K needs n >= 1");
            if (!(k.radius >= 0.0 && k.radius <= 0.5)) {
              throw Error(ErrorCode::kInvalidArgument, "lattice ball radius must lie in [0, 1/2]");
            }
          },
          [](const Lattice& k) {
            if (k.n == 0) throw Error(ErrorCode::kInvalidArgument, "K needs n >= 1");
          },
      },
      v_);
}

std::size_t KDescriptor::nvars() const {
  return std::visit(Overloaded{
                        [](const FullSpace& k) { return k.n; },
                        [](const CompactBox& k) { return k.lo.size(); },
                        [](const CompactBall& k) { return k.center.size(); },
                        [](const PolyhedralCone& k) { return k.rays.front().size(); },
                        [](const CompactTimesHalfline& k) { return k.lo.size() + 1; },
                        [](const LatticeBalls& k) { return k.n; },
                        [](const Lattice& k) { return k.n; },
                    },
                    v_);
}

bool KDescriptor::compact() const {
  return std::holds_alternative<CompactBox>(v_) || std::holds_alternative<CompactBall>(v_);
}

bool KDescriptor::contains(std::span<const double> x, double tol) const {
  if (x.size() != nvars()) throw Error(ErrorCode::kDimensionMismatch, "point has wrong length");
  return std::visit(
      Overloaded{
          [](const FullSpace&) { return true; },
          [&](const CompactBox& k) {
            for (std::size_t i = 0; i < x.size(); ++i) {
              if (x[i] < k.lo[i] - tol || x[i] > k.hi[i] + tol) return false;
            }
            return true;
          },
          [&](const CompactBall& k) {
            double r2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - k.center[i]) * (x[i] - k.center[i]);
            return r2 <= k.radius * k.radius + tol;
          },
          [&](const PolyhedralCone& k) {
            const Matrix inv = dual_forms(k);
            Vector v = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
            return ((inv * v).array() >= -tol).all();
          },
          [&](const CompactTimesHalfline& k) {
            for (std::size_t i = 0; i < k.lo.size(); ++i) {
              if (x[i] < k.lo[i] - tol || x[i] > k.hi[i] + tol) return false;
            }
            return x.back() >= -tol;
          },
          [&](const LatticeBalls& k) {
            double r2 = 0.0;
            for (double xi : x) r2 += (xi - std::round(xi)) * (xi - std::round(xi));
            return r2 <= k.radius * k.radius + tol;
          },
          [&](const Lattice&) {
            return std::all_of(x.begin(), x.end(),
                               [&](double xi) { return std::abs(xi - std::round(xi)) <= tol; });
          },
      },
      v_);
}

std::vector<Poly> KDescriptor::defining_polys() const {
  const std::size_t n = nvars();
  auto var = [n](std::size_t i) { return Poly::variable(n, i); };
  auto cst = [n](double c) { return Poly::constant(n, c); };
  return std::visit(
      Overloaded{
          [](const FullSpace&) { return std::vector<Poly>{}; },
          [&](const CompactBox& k) {
            std::vector<Poly> g;
            for (std::size_t i = 0; i < n; ++i) {
              g.push_back((var(i) - cst(k.lo[i])) * (cst(k.hi[i]) - var(i)));
            }
            return g;
          },
          [&](const CompactBall& k) {
            Poly g = cst(k.radius * k.radius);
            for (std::size_t i = 0; i < n; ++i) g -= (var(i) - cst(k.center[i])).pow(2);
            return std::vector<Poly>{g};
          },
          [&](const PolyhedralCone& k) {
            const Matrix inv = dual_forms(k);
            std::vector<Poly> g;
            for (Eigen::Index r = 0; r < inv.rows(); ++r) {
              Poly form(n);
              for (std::size_t i = 0; i < n; ++i) {
                form.add_term(MultiIndex::unit(n, i), inv(r, static_cast<Eigen::Index>(i)));
              }
              g.push_back(std::move(form));
            }
            return g;
          },
          [&](const CompactTimesHalfline& k) {
            std::vector<Poly> g;
            for (std::size_t i = 0; i < k.lo.size(); ++i) {
              g.push_back((var(i) - cst(k.lo[i])) * (cst(k.hi[i]) - var(i)));
            }
            g.push_back(var(n - 1));
            return g;
          },
          [](const LatticeBalls&) -> std::vector<Poly> {
            throw Error(ErrorCode::kUnsupported, "lattice balls are catalogue-only");
          },
          [](const Lattice&) -> std::vector<Poly> {
            throw Error(ErrorCode::kUnsupported, "the lattice Z^n is catalogue-only");
          },
      },
      v_);
}

SupportBox KDescriptor::sampling_box(double extent) const {
  const std::size_t n = nvars();
  SupportBox box{std::vector<double>(n, -extent), std::vector<double>(n, extent)};
  std::visit(Overloaded{
                 [](const FullSpace&) {},
                 [&](const CompactBox& k) { box = {k.lo, k.hi}; },
                 [&](const CompactBall& k) {
                   for (std::size_t i = 0; i < n; ++i) {
                     box.lo[i] = k.center[i] - k.radius;
                     box.hi[i] = k.center[i] + k.radius;
                   }
                 },
                 [&](const PolyhedralCone& k) {
                   for (std::size_t i = 0; i < n; ++i) {
                     bool pos = true, neg = true;
                     for (const auto& r : k.rays) {
                       pos = pos && r[i] >= 0.0;
                       neg = neg && r[i] <= 0.0;
                     }
                     if (pos) box.lo[i] = 0.0;
                     if (neg) box.hi[i] = 0.0;
                   }
                 },
                 [&](const CompactTimesHalfline& k) {
                   for (std::size_t i = 0; i < k.lo.size(); ++i) {
                     box.lo[i] = k.lo[i];
                     box.hi[i] = k.hi[i];
                   }
                   box.lo[n - 1] = 0.0;
                 },
                 [](const LatticeBalls&) {},
                 [](const Lattice&) {},
             },
             v_);
  return box;
}

KDescriptor parse_kdescriptor(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto fail = [&](const std::string& why) -> KDescriptor {
    throw Error(ErrorCode::kParse, "K descriptor '" + std::string(text) + "': " + why);
  };
  if (kind == "full") {
    if (args.empty()) return FullSpace{1};
    const auto v = parse_numbers(args);
    if (v.size() != 1 || v[0] < 1 || v[0] != std::floor(v[0])) return fail("expected full:n");
    return FullSpace{static_cast<std::size_t>(v[0])};
  }
  if (kind == "box" || kind == "striphalf") {
    std::vector<double> lo, hi;
    if (!args.empty()) {
      for (const auto& g : parse_groups(args)) {
        if (g.size() != 2) return fail("expected lo,hi pairs separated by ';'");
        lo.push_back(g[0]);
        hi.push_back(g[1]);
      }
    }
    if (kind == "box") {
      if (lo.empty()) return fail("box needs bounds");
      return CompactBox{lo, hi};
    }
    return CompactTimesHalfline{lo, hi};
  }
  if (kind == "ball") {
    auto v = parse_numbers(args);
    if (v.size() < 2) return fail("expected center coordinates then radius");
    const double r = v.back();
    v.pop_back();
    return CompactBall{v, r};
  }
  if (kind == "cone") {
    return PolyhedralCone{parse_groups(args)};
  }
  if (kind == "lattice") {
    const auto g = parse_groups(args);
    if (g.empty() || g[0].size() != 1) return fail("expected lattice:r or lattice:r;n");
    std::size_t n = 1;
    if (g.size() == 2 && g[1].size() == 1 && g[1][0] >= 1) n = static_cast<std::size_t>(g[1][0]);
    else if (g.size() != 1) return fail("expected lattice:r or lattice:r;n");
    return LatticeBalls{n, g[0][0]};
  }
  if (kind == "zlattice") {
    const auto v = parse_numbers(args);
    if (v.size() != 1 || v[0] < 1) return fail("expected zlattice:n");
    return Lattice{static_cast<std::size_t>(v[0])};
  }
  return fail("unknown kind");
}

std::string format_kdescriptor(const KDescriptor& k) {
  return std::visit(
      Overloaded{
          [](const FullSpace& v) { return v.n == 1 ? std::string("full") : "full:" + std::to_string(v.n); },
          [](const CompactBox& v) {
            std::string s = "box:";
            for (std::size_t i = 0; i < v.lo.size(); ++i) {
              if (i) s += ';';
              s += fmt(v.lo[i]) + "," + fmt(v.hi[i]);
            }
            return s;
          },
          [](const CompactBall& v) { return "ball:" + join(v.center) + "," + fmt(v.radius); },
          [](const PolyhedralCone& v) {
            std::string s = "cone:";
            for (std::size_t i = 0; i < v.rays.size(); ++i) {
              if (i) s += ';';
              s += join(v.rays[i]);
            }
            return s;
          },
          [](const CompactTimesHalfline& v) {
            std::string s = "striphalf:";
            for (std::size_t i = 0; i < v.lo.size(); ++i) {
              if (i) s += ';';
              s += fmt(v.lo[i]) + "," + fmt(v.hi[i]);
            }
            return s;
          },
          [](const LatticeBalls& v) {
            return "lattice:" + fmt(v.radius) + (v.n == 1 ? "" : ";" + std::to_string(v.n));
          },
          [](const Lattice& v) { return "zlattice:" + std::to_string(v.n); },
      },
      k.variant());
}

KDescriptor ksharp(const KDescriptor& k) {
  const std::size_t n = k.nvars();
  return std::visit(
      Overloaded{
          [&](const FullSpace& v) -> KDescriptor { return v; },
          [&](const CompactBox&) -> KDescriptor { return CompactBall{std::vector<double>(n, 0.0), 0.0}; },
          [&](const CompactBall&) -> KDescriptor { return CompactBall{std::vector<double>(n, 0.0), 0.0}; },
          [&](const PolyhedralCone& v) -> KDescriptor { return v; },
          [&](const CompactTimesHalfline& v) -> KDescriptor {
            return CompactTimesHalfline{std::vector<double>(v.lo.size(), 0.0),
                                        std::vector<double>(v.lo.size(), 0.0)};
          },
          [&](const LatticeBalls&) -> KDescriptor { return Lattice{n}; },
          [&](const Lattice& v) -> KDescriptor { return v; },
      },
      k.variant());
}

// ---------------------------------------------------------------------------

MomentSeq local_sequence(const DiffOp& t, std::span<const double> y, unsigned order) {
  if (t.usable_degree() < order) {
    throw Error(ErrorCode::kTruncation, "operator truncated at order " +
                                            std::to_string(t.max_order()) + ", need " +
                                            std::to_string(order));
  }
  MomentSeq s(t.nvars(), order);
  for (const auto& alpha : s.basis().monomials()) {
    s.at(alpha) = factorial(alpha) * eval(t.coeff(alpha), y);
  }
  return s;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::kPass: return "Pass";
    case Status::kFail: return "Fail";
    case Status::kInconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string format_witness(const Witness& w) {
  std::string s = "FAIL";
  if (!w.y.empty()) s += " y=" + fmt_point(w.y);
  if (w.t) s += " t=" + fmt(*w.t);
  if (w.lambda) s += " lambda=" + fmt(*w.lambda);
  switch (w.kind) {
    case Witness::Kind::kMoment:
      s += " d=" + std::to_string(w.d) + " minEig=" + fmt(w.value);
      break;
    case Witness::Kind::kLocalizing:
      s += " d=" + std::to_string(w.d) + " minEig=" + fmt(w.value);
      if (!w.x.empty()) s += " at=" + fmt_point(w.x);
      break;
    case Witness::Kind::kDiffusion:
      s += " minEig=" + fmt(w.value);
      break;
    case Witness::Kind::kGrid:
      s += " x=" + fmt_point(w.x) + " value=" + fmt(w.value);
      break;
    case Witness::Kind::kCoefficient:
    case Witness::Kind::kMeasure:
      s += " value=" + fmt(w.value);
      break;
  }
  if (w.trial) s += " p=" + format_poly(*w.trial);
  if (!w.note.empty()) s += " (" + w.note + ")";
  return s;
}

std::vector<double> chebyshev_points(double lo, double hi, std::size_t count) {
  std::vector<double> pts;
  if (count == 0) return pts;
  if (count == 1) return {0.5 * (lo + hi)};
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (std::size_t k = 0; k < count; ++k) {
    const double c = std::cos(std::numbers::pi * static_cast<double>(count - 1 - k) /
                              static_cast<double>(count - 1));
    // Exact centre for odd counts.
    pts.push_back(2 * k + 1 == count ? mid : mid + half * c);
  }
  return pts;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> pts;
  if (count == 1) return {lo};
  for (std::size_t k = 0; k < count; ++k) {
    pts.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return pts;
}

std::vector<std::vector<double>> tensor_grid(const SupportBox& box, std::size_t per_axis,
                                             bool chebyshev) {
  const std::size_t n = box.lo.size();
  std::vector<std::vector<double>> axes;
  for (std::size_t i = 0; i < n; ++i) {
    axes.push_back(chebyshev ? chebyshev_points(box.lo[i], box.hi[i], per_axis)
                             : linspace(box.lo[i], box.hi[i], per_axis));
  }
  std::vector<std::vector<double>> pts{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    next.reserve(pts.size() * axis.size());
    for (const auto& p : pts) {
      for (double v : axis) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    }
    pts = std::move(next);
  }
  return pts;
}

std::vector<std::vector<double>> restrict_to(const KDescriptor& k,
                                             std::vector<std::vector<double>> points) {
  std::erase_if(points, [&](const auto& p) { return !k.contains(p); });
  return points;
}

std::vector<std::vector<double>> default_sample_points(const KDescriptor& k, std::size_t per_axis) {
  return restrict_to(k, tensor_grid(k.sampling_box(), per_axis, true));
}

std::vector<std::vector<double>> default_grid(const KDescriptor& k) {
  const std::size_t n = k.nvars();
  const std::size_t per_axis = n == 1 ? 2001 : n == 2 ? 201 : 21;
  return restrict_to(k, tensor_grid(k.sampling_box(), per_axis, false));
}

std::vector<Poly> default_trials(const KDescriptor& k, unsigned max_degree) {
  const std::size_t n = k.nvars();
  auto var = [n](std::size_t i) { return Poly::variable(n, i); };
  auto cst = [n](double c) { return Poly::constant(n, c); };
  std::vector<Poly> squares{cst(1.0)};
  if (max_degree >= 2) {
    const std::size_t count = n == 1 ? 401 : 41;
    for (std::size_t i = 0; i < n; ++i) {
      for (double c : linspace(-10, 10, count)) squares.push_back((var(i) - cst(c)).pow(2));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (double c : linspace(-10, 10, 21)) {
          squares.push_back((var(i) + var(j) - cst(c)).pow(2));
          squares.push_back((var(i) - var(j) - cst(c)).pow(2));
        }
      }
    }
  }
  if (max_degree >= 4) {
    const auto centres = n == 1 ? linspace(-5, 5, 41) : linspace(-5, 5, 11);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        for (std::size_t a = 0; a < centres.size(); ++a) {
          for (std::size_t b = (i == j ? a : 0); b < centres.size(); ++b) {
            squares.push_back(((var(i) - cst(centres[a])) * (var(j) - cst(centres[b]))).pow(2));
          }
        }
      }
    }
  }
  std::vector<Poly> trials = squares;
  for (const auto& g : k.defining_polys()) {
    const auto gdeg = static_cast<unsigned>(std::max(0, g.degree()));
    if (gdeg > max_degree) continue;
    trials.push_back(g);
    if (gdeg + 2 > max_degree) continue;
    for (std::size_t i = 0; i < n; ++i) {
      for (double c : linspace(-10, 10, 81)) trials.push_back(g * (var(i) - cst(c)).pow(2));
    }
  }
  return trials;
}

namespace {

bool box_inside_ksharp(const SupportBox& box, const KDescriptor& k) {
  const KDescriptor sharp = ksharp(k);
  return std::visit(
      Overloaded{
          [](const FullSpace&) { return true; },
          [&](const CompactBall& v) {
            // Only the point {0} arises here.
            for (std::size_t i = 0; i < box.lo.size(); ++i) {
              if (box.lo[i] != v.center[i] || box.hi[i] != v.center[i]) return false;
            }
            return v.radius == 0.0;
          },
          [&](const CompactTimesHalfline& v) {
            for (std::size_t i = 0; i < v.lo.size(); ++i) {
              if (box.lo[i] != 0.0 || box.hi[i] != 0.0) return false;
            }
            return box.lo.back() >= 0.0;
          },
          [&](const PolyhedralCone&) {
            const std::size_t n = box.lo.size();
            for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
              std::vector<double> corner(n);
              for (std::size_t i = 0; i < n; ++i) corner[i] = (mask >> i) & 1u ? box.hi[i] : box.lo[i];
              if (std::any_of(corner.begin(), corner.end(), [](double c) { return !std::isfinite(c); })) {
                return false;
              }
              if (!sharp.contains(corner)) return false;
            }
            return true;
          },
          [](const auto&) { return false; },
      },
      sharp.variant());
}

PreserverVerdict finish(PreserverVerdict v, bool certified) {
  if (!v.witnesses.empty()) {
    v.status = Status::kFail;
  } else {
    v.status = certified ? Status::kPass : Status::kInconclusive;
  }
  return v;
}

}  // namespace

PreserverVerdict check_preserver_rn(const DiffOp& t, unsigned d,
                                    std::span<const std::vector<double>> ys, double tol) {
  if (t.usable_degree() < 2 * d) {
    throw Error(ErrorCode::kTruncation, "check_preserver_rn: need operator order >= 2d = " +
                                            std::to_string(2 * d));
  }
  PreserverVerdict v;
  for (const auto& y : ys) {
    const MomentSeq s = local_sequence(t, y, 2 * d);
    const PsdResult r = is_psd(moment_matrix(s, d), tol);
    if (!r.psd) {
      Witness w;
      w.kind = Witness::Kind::kMoment;
      w.y = y;
      w.d = d;
      w.value = r.min_eigenvalue;
      v.witnesses.push_back(std::move(w));
    }
  }
  v.checked = "moment matrices of degree " + std::to_string(d) + " at " +
              std::to_string(ys.size()) + " points";
  return finish(std::move(v), t.certificate().has_value());
}

PreserverVerdict check_preserver_k(const DiffOp& t, const KDescriptor& k, unsigned d,
                                   std::span<const std::vector<double>> ys, double tol) {
  if (k.nvars() != t.nvars()) {
    throw Error(ErrorCode::kDimensionMismatch, "K and operator differ in n");
  }
  if (std::holds_alternative<FullSpace>(k.variant())) return check_preserver_rn(t, d, ys, tol);
  const auto gs = k.defining_polys();
  unsigned order = 2 * d;
  for (const auto& g : gs) order = std::max(order, 2 * d + static_cast<unsigned>(std::max(0, g.degree())));
  if (t.usable_degree() < order) {
    throw Error(ErrorCode::kTruncation, "check_preserver_k: need operator order >= " +
                                            std::to_string(order));
  }
  PreserverVerdict v;
  std::size_t used = 0;
  for (const auto& y : ys) {
    if (!k.contains(y)) continue;
    ++used;
    const MomentSeq s = local_sequence(t, y, order);
    const PsdResult r = is_psd(moment_matrix(s, d), tol);
    if (!r.psd) {
      Witness w;
      w.kind = Witness::Kind::kMoment;
      w.y = y;
      w.d = d;
      w.value = r.min_eigenvalue;
      v.witnesses.push_back(std::move(w));
      continue;
    }
    for (const auto& g : gs) {
      const PsdResult rl = is_psd(moment_matrix(s, d, taylor_shift(g, y)), tol);
      if (!rl.psd) {
        Witness w;
        w.kind = Witness::Kind::kLocalizing;
        w.y = y;
        w.d = d;
        w.value = rl.min_eigenvalue;
        w.note = "localizing " + format_poly(g);
        v.witnesses.push_back(std::move(w));
        break;
      }
    }
  }
  v.checked = "moment and " + std::to_string(gs.size()) + " localizing matrices of degree " +
              std::to_string(d) + " at " + std::to_string(used) + " points of " +
              format_kdescriptor(k);
  const bool certified = t.certificate() &&
                         t.certificate()->kind == Certificate::Kind::kConvolution &&
                         box_inside_ksharp(t.certificate()->support, k);
  return finish(std::move(v), certified);
}

PreserverVerdict check_preserver_halfline(const DiffOp& t, unsigned d, std::span<const double> ys,
                                          double tol) {
  if (t.nvars() != 1) throw Error(ErrorCode::kDimensionMismatch, "half-line check needs n = 1");
  std::vector<std::vector<double>> pts;
  for (double y : ys) {
    if (y < 0.0) throw Error(ErrorCode::kInvalidArgument, "half-line samples must be >= 0");
    pts.push_back({y});
  }
  return check_preserver_k(t, PolyhedralCone{{{1.0}}}, d, pts, tol);
}

Degree2Result check_degree2_pointwise(const DiffOp& t, double tol) {
  if (t.nvars() != 1) throw Error(ErrorCode::kDimensionMismatch, "degree-2 test needs n = 1");
  if (t.effective_order() > 2) {
    throw Error(ErrorCode::kInvalidArgument, "degree-2 test needs an operator of order <= 2");
  }
  auto dense = [](const Poly& p) {
    std::vector<double> c(static_cast<std::size_t>(std::max(0, p.degree()) + 1), 0.0);
    for (const auto& [alpha, v] : p.terms()) c[alpha[0]] = v;
    return c;
  };
  const Poly b0 = t.coeff(MultiIndex({0}));
  const Poly b1 = t.coeff(MultiIndex({1}));
  const Poly b2 = t.coeff(MultiIndex({2})) * 2.0;
  const Poly h = b0 * b2 - b1 * b1;
  const auto m0 = global_minimum(dense(b0));
  const auto m2 = global_minimum(dense(b2));
  const auto mh = global_minimum(dense(h));
  auto ok = [&](const UnivariateMin& m, const Poly& p) {
    return m.bounded_below && m.value >= -tol * std::max(1.0, p.max_abs_coeff());
  };
  return {ok(m0, b0) && ok(m2, b2) && ok(mh, h), mh.value, mh.argmin, m0.value, m2.value};
}

PreserverVerdict falsify_on_grid(const DiffOp& t, const KDescriptor& k,
                                 std::span<const Poly> trials,
                                 std::span<const std::vector<double>> grid,
                                 std::size_t max_witnesses) {
  if (k.nvars() != t.nvars()) throw Error(ErrorCode::kDimensionMismatch, "K and operator differ in n");
  std::vector<const std::vector<double>*> pts;
  for (const auto& x : grid) {
    if (k.contains(x)) pts.push_back(&x);
  }
  PreserverVerdict v;
  std::size_t failing = 0, skipped = 0;
  for (const auto& p : trials) {
    if (p.degree() > 0 && static_cast<unsigned>(p.degree()) > t.usable_degree()) {
      ++skipped;
      continue;
    }
    const Poly image = apply(t, p);
    double scale = 1.0, worst = kInf;
    const std::vector<double>* at = nullptr;
    for (const auto* x : pts) {
      const double val = eval(image, *x);
      scale = std::max(scale, std::abs(val));
      if (val < worst) {
        worst = val;
        at = x;
      }
    }
    if (at && worst < -1e-12 * scale) {
      ++failing;
      if (v.witnesses.size() < max_witnesses) {
        Witness w;
        w.kind = Witness::Kind::kGrid;
        w.x = *at;
        w.value = worst;
        w.trial = p;
        v.witnesses.push_back(std::move(w));
      }
    }
  }
  v.checked = std::to_string(trials.size() - skipped) + " trial polynomials on " +
              std::to_string(pts.size()) + " grid points, " + std::to_string(failing) + " failing";
  if (skipped) v.notes.push_back(std::to_string(skipped) + " trials above the operator's degree skipped");
  return finish(std::move(v), false);
}

bool compact_rigidity_check(const DiffOp& t, double tol) {
  if (!t.constant_coefficients()) {
    throw Error(ErrorCode::kUnsupported, "compact rigidity applies to constant coefficients");
  }
  const MultiIndex zero = MultiIndex::zero(t.nvars());
  for (const auto& [alpha, q] : t.coeffs()) {
    const double c = q.coeff(zero);
    if (alpha == zero) {
      if (c < -tol) return false;
    } else if (std::abs(c) > tol) {
      return false;
    }
  }
  return true;
}

}  // namespace pospres
