#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "pospres/diffop.hpp"
#include "pospres/momseq.hpp"

namespace pospres {

struct FullSpace {
  std::size_t n = 1;
};
struct CompactBox {
  std::vector<double> lo, hi;
};
struct CompactBall {
  std::vector<double> center;
  double radius = 0.0;
};
/// Closed convex cone with apex 0 spanned by the rays.
struct PolyhedralCone {
  std::vector<std::vector<double>> rays;
};
/// C x [0, inf) with C the box [lo, hi] in the first n-1 coordinates.
struct CompactTimesHalfline {
  std::vector<double> lo, hi;
};
/// Union of closed balls of the given radius around the points of Z^n.
struct LatticeBalls {
  std::size_t n = 1;
  double radius = 0.0;
};
/// Z^n itself; only produced by ksharp.
struct Lattice {
  std::size_t n = 1;
};

/// Closed set K from the supported catalogue.
class KDescriptor {
 public:
  using Variant = std::variant<FullSpace, CompactBox, CompactBall, PolyhedralCone,
                               CompactTimesHalfline, LatticeBalls, Lattice>;

  KDescriptor(Variant v);  // NOLINT: implicit by intent
  template <class T>
    requires std::is_constructible_v<Variant, T>
  KDescriptor(T alt) : KDescriptor(Variant(std::move(alt))) {}  // NOLINT

  const Variant& variant() const { return v_; }
  std::size_t nvars() const;
  bool compact() const;
  bool contains(std::span<const double> x, double tol = 1e-12) const;

  /// Polynomials g_j with K = {g_j >= 0}. Throws kUnsupported for lattices
  /// and non-simplicial cones.
  std::vector<Poly> defining_polys() const;
  /// Box used for default sampling; unbounded directions are cut at
  /// [-extent, extent] (or [0, extent] along a half-line).
  SupportBox sampling_box(double extent = 10.0) const;

 private:
  Variant v_;
};

/// Parses `full`, `full:2`, `box:-1,1;0,2`, `ball:0,0,1` (center then radius),
/// `cone:1,0;0,1`, `striphalf:-1,1`, `lattice:0.25` or `lattice:0.25;2`,
/// `zlattice:2`.
KDescriptor parse_kdescriptor(std::string_view text);
std::string format_kdescriptor(const KDescriptor& k);

/// K^sharp = {x : x + K subset K}.
KDescriptor ksharp(const KDescriptor& k);

/// s(y)_alpha = alpha! q_alpha(y), |alpha| <= order.
MomentSeq local_sequence(const DiffOp& t, std::span<const double> y, unsigned order);

enum class Status { kPass, kFail, kInconclusive };
const char* to_string(Status s);

struct Witness {
  enum class Kind { kMoment, kLocalizing, kDiffusion, kGrid, kCoefficient, kMeasure };
  Kind kind = Kind::kMoment;
  std::vector<double> y;       ///< sample or freeze point
  std::vector<double> x;       ///< second point (grid point, or K point for generators)
  unsigned d = 0;              ///< moment-matrix degree
  double value = 0.0;          ///< min eigenvalue, or the negative grid value
  std::optional<double> t;
  std::optional<double> lambda;
  std::optional<Poly> trial;
  std::string note;
};

/// One line, e.g. `FAIL y=(1) d=2 minEig=-3.3e-08`.
std::string format_witness(const Witness& w);

struct PreserverVerdict {
  Status status = Status::kInconclusive;
  std::vector<Witness> witnesses;
  std::string checked;
  std::vector<std::string> notes;
};

/// Chebyshev-Lobatto points (cosine extrema, endpoints included) on [lo, hi],
/// ascending.
std::vector<double> chebyshev_points(double lo, double hi, std::size_t count);
std::vector<double> linspace(double lo, double hi, std::size_t count);
/// Tensor grid over the box with per_axis points along every axis.
std::vector<std::vector<double>> tensor_grid(const SupportBox& box, std::size_t per_axis,
                                             bool chebyshev = false);
/// Keeps the points lying in K.
std::vector<std::vector<double>> restrict_to(const KDescriptor& k,
                                             std::vector<std::vector<double>> points);
/// Default moment-test samples: 33 Chebyshev-Lobatto points per axis over the
/// sampling box, filtered to K.
std::vector<std::vector<double>> default_sample_points(const KDescriptor& k,
                                                       std::size_t per_axis = 33);
/// Default evaluation grid: 2001 points per axis for n = 1, 201 for n = 2,
/// 21 beyond, over K's sampling box.
std::vector<std::vector<double>> default_grid(const KDescriptor& k);
/// Polynomials nonnegative on K of degree <= max_degree: squares of shifted
/// linear factors (and of products of two), times K's defining polynomials.
std::vector<Poly> default_trials(const KDescriptor& k, unsigned max_degree);

/// Moment-matrix refutation on R^n at the sample points.
PreserverVerdict check_preserver_rn(const DiffOp& t, unsigned d,
                                    std::span<const std::vector<double>> ys,
                                    double tol = kDefaultPsdTol);
/// Moment and localizing matrices for s(y) as a (K - y)-moment sequence at
/// the sample points lying in K.
PreserverVerdict check_preserver_k(const DiffOp& t, const KDescriptor& k, unsigned d,
                                   std::span<const std::vector<double>> ys,
                                   double tol = kDefaultPsdTol);
/// K = [0, inf), n = 1: localizing weight x + y.
PreserverVerdict check_preserver_halfline(const DiffOp& t, unsigned d, std::span<const double> ys,
                                          double tol = kDefaultPsdTol);

struct Degree2Result {
  bool nonnegative;  ///< [[b0, b1], [b1, b2]] PSD at every x
  double min_value;  ///< global minimum of h = b0 b2 - b1^2
  double argmin;
  double b0_min;
  double b2_min;
};

/// T = b0 + b1 d + (b2/2) d^2 on R: decides pointwise PSD of
/// [[b0, b1], [b1, b2]] by exact univariate minimisation.
Degree2Result check_degree2_pointwise(const DiffOp& t, double tol = 1e-12);

/// Applies T to every trial and evaluates on the grid points of K. Any value
/// below -1e-12 * max(1, max |T p|) is a witness. Never returns kPass.
PreserverVerdict falsify_on_grid(const DiffOp& t, const KDescriptor& k,
                                 std::span<const Poly> trials,
                                 std::span<const std::vector<double>> grid,
                                 std::size_t max_witnesses = 16);

/// True iff T = c * 1 with c >= 0. Requires constant coefficients.
bool compact_rigidity_check(const DiffOp& t, double tol = 0.0);

}  // namespace pospres
