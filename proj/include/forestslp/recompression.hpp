#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "forestslp/sslp.hpp"

namespace forestslp {

// Deterministic equality engine for compressed strings.
//
// Runs block and pair compression phases on the values of all roots simultaneously until each
// root derives a single letter. Both phases are functions of the derived string alone (fresh
// letters are keyed by block (letter, length) and pair (left, right)), so two roots end on the
// same letter exactly when their values are equal.
//
// Returns one id per root; ids are equal iff the values are. The empty string maps to -1.
std::vector<std::int64_t> canonical_ids(const Sslp& g, std::span<const VarId> roots);

bool equal_values(const Sslp& g, VarId a, VarId b);

struct RecompressionStats {
  std::size_t phases = 0;
  std::size_t peak_items = 0;
};
std::vector<std::int64_t> canonical_ids(const Sslp& g, std::span<const VarId> roots, RecompressionStats* stats);

}  // namespace forestslp
