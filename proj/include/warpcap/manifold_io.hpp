#pragma once

#include <string>

#include "warpcap/geometry.hpp"

namespace warpcap {

// Shortest decimal representation that parses back to the same double
// (locale-independent; infinities render as "inf"/"-inf", NaN as "nan").
std::string format_double(double value);

// Parse of a line-oriented model-manifold description:
//
//   dim <m>                                     (required, once)
//   base <r0>                                   (optional, default 1)
//   segment power <c> <e> <t_lo> <t_hi|inf>     h(t) = c t^e
//   segment exponential <c> <rate> <t_lo> <t_hi|inf>
//   segment linear <slope> <t_lo> <t_hi|inf>
//   segment constant <c> <t_lo> <t_hi|inf>
//   segment tabulated <t:v[:slope]> ... [inf]   monotone cubic through nodes
//   tail power <exponent> [valid_from]          (optional declared tail)
//   tail exponential <rate> [valid_from]
//   tail oscillating <lo_c> <lo_e> <hi_c> <hi_e> <valid_from>
//
// '#' starts a comment; blank lines are ignored.  Segments must be listed in
// increasing order and tile (0, inf) without gaps or overlaps.  Tabulated
// nodes carry either all slopes or none.  Every violation raises ParseError
// with the offending line number (and segment index where that is the
// clearer coordinate).
ModelManifold parse_manifold(const std::string& text);

// The warping profile alone, from the same format (dim/base validated and
// discarded).
WarpingProfile parse_spec(const std::string& text);

// Inverse of parse_manifold: text that parses back to a manifold whose
// profile evaluates bit-identically everywhere.
std::string render_manifold(const ModelManifold& m);

// parse_manifold over a file's contents; unreadable paths raise ParseError
// naming the path.
ModelManifold load_manifold(const std::string& path);

}  // namespace warpcap
