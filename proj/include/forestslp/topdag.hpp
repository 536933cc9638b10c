#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forestslp/fslp.hpp"

namespace forestslp {

// A cluster is a tree of size >= 2; a rank-1 cluster also has a bottom boundary leaf.
struct Cluster {
  Forest tree;
  std::optional<std::size_t> bottom;

  int rank() const { return bottom ? 1 : 0; }
  friend bool operator==(const Cluster&, const Cluster&) = default;
};

// Horizontal and vertical merge. Throw RankViolation, RootLabelMismatch, BottomLabelMismatch.
Cluster hmerge(const Cluster& s, const Cluster& t);
Cluster vmerge(const Cluster& s, const Cluster& t);

// Root removal, with the bottom boundary b turned into b(x) first.
Forest phi(const Cluster& c);
// Rank-1 cluster from a context t != x: the parameter is relabelled a and becomes the bottom.
Cluster psi(Label a, const Forest& t);

// Underlined bottom boundary is printed with a leading '_', as in a(b _c).
std::string print_cluster(const Cluster& c, const LabelSet& labels);

struct TopDagRhs {
  enum class Op : std::uint8_t { kAtom, kAtomBottom, kHMerge, kVMerge };

  Op op = Op::kAtom;
  Label top{};
  Label child{};
  VarId left = 0;
  VarId right = 0;

  static TopDagRhs atom(Label a, Label b) { return {Op::kAtom, a, b, 0, 0}; }
  static TopDagRhs atom_bottom(Label a, Label b) { return {Op::kAtomBottom, a, b, 0, 0}; }
  static TopDagRhs hm(VarId b, VarId c) { return {Op::kHMerge, {}, {}, b, c}; }
  static TopDagRhs vm(VarId b, VarId c) { return {Op::kVMerge, {}, {}, b, c}; }

  friend bool operator==(const TopDagRhs&, const TopDagRhs&) = default;
};

class TopDag {
 public:
  VarId add(TopDagRhs rhs, std::string name = {});

  const TopDagRhs& rhs(VarId var) const { return rules_.at(var); }
  std::size_t num_vars() const { return rules_.size(); }

  VarId start() const;
  bool has_start() const { return start_.has_value(); }
  void set_start(VarId var) { start_ = var; }

  const std::string& name(VarId var) const { return names_.at(var); }
  void set_name(VarId var, std::string name) { names_.at(var) = std::move(name); }

  friend bool operator==(const TopDag& a, const TopDag& b) {
    return a.rules_ == b.rules_ && a.start_ == b.start_;
  }

 private:
  std::vector<TopDagRhs> rules_;
  std::vector<std::string> names_;
  std::optional<VarId> start_;
};

struct ClusterInfo {
  int rank = 0;
  Label root{};
  std::optional<Label> bottom;
};

// Attributes of every variable. Throws CycleError, RankViolation, RootLabelMismatch or
// BottomLabelMismatch naming the variable; RankViolation also when the start has rank 1.
std::vector<ClusterInfo> validate(const TopDag& d);

// Every right-hand side holds one operation.
std::size_t size(const TopDag& d);

Cluster eval(const TopDag& d, VarId var, std::size_t cap = kDefaultExpansionCap);
Forest eval(const TopDag& d);

// S' -> node alpha S on top of the rule-by-rule translation.
Fslp topdag_to_fslp(const TopDag& d);
// Requires a single tree with at least two nodes. Throws NotATree, TreeTooSmall.
TopDag fslp_to_topdag(const Fslp& f);

// Grammar text with rhs "atom a b", "atomb a b", "hm B C", "vm B C".
TopDag parse_topdag(std::string_view text, LabelSet& labels);
std::string print_topdag(const TopDag& d, const LabelSet& labels);

}  // namespace forestslp
