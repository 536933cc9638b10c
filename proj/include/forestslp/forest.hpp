#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace forestslp {

struct Label {
  std::uint32_t id = 0;

  friend constexpr auto operator<=>(Label, Label) = default;
};

// The first-child/next-sibling codomain symbol. Present in every LabelSet.
inline constexpr Label kBottom{0};
inline constexpr std::string_view kBottomName = "_bot";
inline constexpr std::string_view kParamToken = "x";

// Dense label ids with unique printable names. Id order is the label order used by llex.
class LabelSet {
 public:
  LabelSet();

  Label intern(std::string_view name);
  std::optional<Label> find(std::string_view name) const;
  const std::string& name(Label label) const { return names_.at(label.id); }
  std::size_t size() const { return names_.size(); }
  bool contains(Label label) const { return label.id < names_.size(); }

  // Nonempty [A-Za-z0-9_]+, excluding the parameter token.
  static bool valid_name(std::string_view name);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// A subset of labels, indexed by id.
class LabelSubset {
 public:
  LabelSubset() = default;
  LabelSubset(std::initializer_list<Label> labels) {
    for (Label l : labels) insert(l);
  }

  void insert(Label label) {
    if (label.id >= bits_.size()) bits_.resize(label.id + 1, false);
    bits_[label.id] = true;
  }
  void erase(Label label) {
    if (label.id < bits_.size()) bits_[label.id] = false;
  }
  bool contains(Label label) const { return label.id < bits_.size() && bits_[label.id]; }
  bool empty() const;
  std::vector<Label> members() const;

 private:
  std::vector<bool> bits_;
};

// An ordered forest stored in preorder. Each cell records its label and the number of nodes in
// the subtree rooted there. At most one cell is the parameter x, and it is always a leaf.
class Forest {
 public:
  static constexpr std::uint32_t kParamCell = 0xFFFFFFFFu;

  struct Cell {
    std::uint32_t label;
    std::uint32_t extent;

    friend bool operator==(const Cell&, const Cell&) = default;
  };

  Forest() = default;

  static Forest param();
  static Forest leaf(Label label);
  static Forest tree(Label label, const Forest& children);
  static Forest from_cells(std::vector<Cell> cells);

  // Horizontal concatenation. Throws if both operands have rank 1.
  Forest& append(const Forest& other);
  // Vertical concatenation: replaces the parameter of *this by arg.
  Forest substitute(const Forest& arg) const;

  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  int rank() const { return param_position().has_value() ? 1 : 0; }
  std::optional<std::size_t> param_position() const;

  std::span<const Cell> cells() const { return cells_; }
  bool is_param(std::size_t pos) const { return cells_[pos].label == kParamCell; }
  Label label_at(std::size_t pos) const { return Label{cells_[pos].label}; }
  std::size_t extent(std::size_t pos) const { return cells_[pos].extent; }

  // Positions of the roots / of the children of the node at pos.
  std::vector<std::size_t> roots() const;
  std::vector<std::size_t> children(std::size_t pos) const;
  std::size_t tree_count() const { return roots().size(); }
  bool is_tree() const { return !cells_.empty() && cells_[0].extent == cells_.size(); }

  Forest subtree(std::size_t pos) const;
  Forest children_forest(std::size_t pos) const;

  friend bool operator==(const Forest&, const Forest&) = default;

 private:
  std::vector<Cell> cells_;
};

// Term syntax: forest := tree*; tree := name | name '(' forest ')' | 'x'.
Forest parse_forest(std::string_view text, const LabelSet& labels);
Forest parse_forest_interning(std::string_view text, LabelSet& labels);
std::string print_forest(const Forest& forest, const LabelSet& labels);

// First-child/next-sibling encoding into binary trees over labels + bottom.
Forest fcns(const Forest& forest);
Forest fcns_inverse(const Forest& binary);

// Term strings over Gamma = {'(', ')'} + labels. Every node a is written a ( ... ), leaves
// included, so the string length is exactly three times the node count.
using GammaSymbol = std::uint32_t;
inline constexpr GammaSymbol kOpenParen = 0;
inline constexpr GammaSymbol kCloseParen = 1;
inline constexpr GammaSymbol gamma_of(Label label) { return label.id + 2; }

std::vector<GammaSymbol> term_string(const Forest& forest);
std::strong_ordering llex_compare(std::span<const GammaSymbol> lhs, std::span<const GammaSymbol> rhs);

// Reference normal forms on explicit forests. These are the oracles for the compressed
// algorithms and are deliberately direct.
Forest ref_nf_assoc(const Forest& forest, const LabelSubset& assoc);
Forest ref_nf_comm(const Forest& forest, const LabelSubset& comm);
bool ref_ac_equal(const Forest& lhs, const Forest& rhs, const LabelSubset& assoc,
                  const LabelSubset& comm);

}  // namespace forestslp
