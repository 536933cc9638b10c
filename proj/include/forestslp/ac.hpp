#pragma once

#include <compare>
#include <string_view>

#include "forestslp/fslp.hpp"
#include "forestslp/sslp.hpp"

namespace forestslp {

// Associative and commutative labels. A label may be in both sets.
struct AcTheory {
  LabelSubset assoc;
  LabelSubset comm;
};

// Lines "assoc: a e" and "comm: d"; '#' starts a comment. Labels are interned.
AcTheory parse_theory(std::string_view text, LabelSet& labels);
std::string print_theory(const AcTheory& theory, const LabelSet& labels);

// FSLP for the associative normal form of the value of f.
Fslp nf_assoc(const Fslp& f, const LabelSubset& assoc);

// FSLP for the commutative normal form: children of commutative nodes sorted by llex on term
// strings. Brings f into strong normal form first.
Fslp canonize_comm(const Fslp& f, const LabelSubset& comm);

// SSLP over term-string symbols (see term_string). For a normal-form FSLP, variable v of the
// result derives the term string of v for every rank-0 v; the start is f's start.
Sslp forest_string_sslp(const Fslp& f);

// llex order of the term strings of two rank-0 variables. Labels must come from one LabelSet.
std::strong_ordering compare_forests(const Fslp& f1, VarId a1, const Fslp& f2, VarId a2);

bool ac_equal(const Fslp& f1, const Fslp& f2, const AcTheory& theory);

}  // namespace forestslp
