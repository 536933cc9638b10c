#pragma once

#include <string>

#include "forestslp/fslp.hpp"

namespace forestslp {

// TSLPs are FSLPs restricted to the shapes a, a(B C), a(x B), a(B x) and B<C>, with binary
// tree values over labels + bottom. In FSLP terms these are written
//   a        leaf a               (or node a E with E -> eps)
//   a(B C)   node a H, H -> h B C
//   a(x B)   node2 a E B
//   a(B x)   node2 a B E
//   B<C>     v B C
// where E -> eps and H are auxiliary rules that belong to the shape.

// Empty string for a TSLP, otherwise a description naming the first offending variable.
std::string check_tslp(const Fslp& t);

// TSLP for fcns(value of f).
Fslp fslp_to_fcns_tslp(const Fslp& f);

// Inverse direction: t derives fcns(g) for some forest g; returns an FSLP for g. Checked on the
// normal form without decompression. Throws NotAnFcnsImage naming the variable.
Fslp fcns_tslp_to_fslp(const Fslp& t);

}  // namespace forestslp
