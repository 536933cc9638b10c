#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forestslp/bigint.hpp"
#include "forestslp/forest.hpp"
#include "forestslp/sslp.hpp"

namespace forestslp {

// Right-hand side of a forest straight-line program.
//   kEmpty   eps
//   kParam   x
//   kLeaf    a            (a applied to eps, kept as one constant)
//   kHConcat B C
//   kVConcat B<C>
//   kNode    a(B)
//   kNode2   a(B x C)
struct Rhs {
  enum class Op : std::uint8_t { kEmpty, kParam, kLeaf, kHConcat, kVConcat, kNode, kNode2 };

  Op op = Op::kEmpty;
  Label label{};
  VarId left = 0;
  VarId right = 0;

  static Rhs empty() { return {}; }
  static Rhs param() { return {Op::kParam, {}, 0, 0}; }
  static Rhs leaf(Label a) { return {Op::kLeaf, a, 0, 0}; }
  static Rhs h(VarId b, VarId c) { return {Op::kHConcat, {}, b, c}; }
  static Rhs v(VarId b, VarId c) { return {Op::kVConcat, {}, b, c}; }
  static Rhs node(Label a, VarId b) { return {Op::kNode, a, b, 0}; }
  static Rhs node2(Label a, VarId b, VarId c) { return {Op::kNode2, a, b, c}; }

  int arity() const;
  friend bool operator==(const Rhs&, const Rhs&) = default;
};

enum class NormalFormTag : std::uint8_t { kGeneral, kNormal, kStrongNormal };

class Fslp {
 public:
  VarId add(Rhs rhs, std::string name = {});
  void set_rhs(VarId var, Rhs rhs) { rules_.at(var) = rhs; }

  const Rhs& rhs(VarId var) const { return rules_.at(var); }
  std::size_t num_vars() const { return rules_.size(); }

  VarId start() const;
  bool has_start() const { return start_.has_value(); }
  void set_start(VarId var) { start_ = var; }

  const std::string& name(VarId var) const { return names_.at(var); }
  void set_name(VarId var, std::string name) { names_.at(var) = std::move(name); }

  NormalFormTag tag() const { return tag_; }
  void set_tag(NormalFormTag tag) { tag_ = tag; }

  friend bool operator==(const Fslp& a, const Fslp& b) {
    return a.rules_ == b.rules_ && a.start_ == b.start_;
  }

 private:
  std::vector<Rhs> rules_;
  std::vector<std::string> names_;
  std::optional<VarId> start_;
  NormalFormTag tag_ = NormalFormTag::kGeneral;
};

// Children-before-parents order of the variables reachable from roots (all variables when
// roots is empty). Throws CycleError.
std::vector<VarId> topological_order(const Fslp& f, std::span<const VarId> roots = {});

// Ranks of all variables. Throws CycleError or UndefinedOperation naming the variable, and
// InvalidForest when the start variable has rank 1.
std::vector<int> validate(const Fslp& f);

// Sort classes of a normal-form FSLP.
enum class VarClass : std::uint8_t { kV0Top, kV0Bot, kV1Top, kV1Bot };

// Empty string when f is in normal form, otherwise a description of the first violation.
std::string check_normal_form(const Fslp& f);
// Additionally checks the strong normal form size condition with exact sizes.
std::string check_strong_normal_form(const Fslp& f);
// Throws NotNormalForm.
std::vector<VarClass> classify(const Fslp& f);

// Node counts |value(A)| for every variable, the parameter counting as a node.
std::vector<BigInt> value_sizes(const Fslp& f);

// Operation occurrences: eps, x, a, B C, B<C> and a(B) count one each, a(B x C) counts four.
std::size_t size(const Fslp& f);

Forest eval(const Fslp& f, VarId var, std::size_t cap = kDefaultExpansionCap);
Forest eval(const Fslp& f);

// Keeps the variables reachable from the start, in their original relative order.
Fslp prune(const Fslp& f);

Fslp normal_form(const Fslp& f);
Fslp strong_normal_form(const Fslp& f);

// Spine and horizontal SSLPs of a normal-form FSLP. Variables keep their FSLP ids; a symbol
// is the id of the FSLP variable it stands for. In the spine SSLP, V1-top variables have rhs
// [B, C] (as variables or symbols), V1-bottom variables derive themselves as one symbol, and
// other variables have an empty rhs. The horizontal SSLP is the same for V0.
Sslp spine_sslp(const Fslp& f);
Sslp hor_sslp(const Fslp& f);

// Minimal dag of the subtrees plus run-length sharing of equal adjacent siblings.
Fslp build_baseline(const Forest& forest);

// Text format: "start S" and "NAME -> eps | x | leaf a | h B C | v B C | node a B | node2 a B C".
Fslp parse_fslp(std::string_view text, LabelSet& labels);
std::string print_fslp(const Fslp& f, const LabelSet& labels);

}  // namespace forestslp
