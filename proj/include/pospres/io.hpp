#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pospres/diffop.hpp"
#include "pospres/levygen.hpp"
#include "pospres/momseq.hpp"

namespace pospres {

// Text formats. Lines whose first non-blank character is '#' are comments.
// Every formatter prints numbers with %.17g, so format -> parse is exact.

/// `[a1,...,an] = <poly>` per coefficient; optional `n = N`, `order = M`
/// and `tail = zero|unknown` lines. Unlisted alpha are zero.
DiffOp parse_operator(std::string_view text);
std::string format_operator(const DiffOp& t);

/// `[a1,...,an] = value` per entry; optional `n = N` and `order = M` lines.
MomentSeq parse_sequence(std::string_view text);
std::string format_sequence(const MomentSeq& s);

/// `atom (x1,...,xn) w` per atom, w > 0; optional `n = N` line.
DiscreteMeasure parse_measure(std::string_view text);
std::string format_measure(const DiscreteMeasure& mu);

/// `a0 = v`, `sigma = [[..],[..]]`, `b = (..)` and `nu (x..) w` lines.
LevyTriple parse_levy(std::string_view text);
std::string format_levy(const LevyTriple& tr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// Comma-separated reals, e.g. `0.001,0.01,0.1`.
std::vector<double> parse_real_list(std::string_view text);

/// `LO:HI:N` with N >= 1.
struct GridSpec {
  double lo;
  double hi;
  std::size_t count;
};
GridSpec parse_grid_spec(std::string_view text);

std::string format_real(double v);

}  // namespace pospres
