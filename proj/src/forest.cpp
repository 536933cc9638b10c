#include "forestslp/forest.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "forestslp/error.hpp"

namespace forestslp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSyntax: return "SyntaxError";
    case ErrorKind::kUnknownLabel: return "UnknownLabel";
    case ErrorKind::kInvalidForest: return "InvalidForest";
    case ErrorKind::kCycle: return "CycleError";
    case ErrorKind::kUndefinedOperation: return "UndefinedOperation";
    case ErrorKind::kUndefinedVariable: return "UndefinedVariable";
    case ErrorKind::kNotNormalForm: return "NotNormalForm";
    case ErrorKind::kExplosionGuard: return "ExplosionGuard";
    case ErrorKind::kNotATree: return "NotATree";
    case ErrorKind::kTreeTooSmall: return "TreeTooSmall";
    case ErrorKind::kNotAnFcnsImage: return "NotAnFcnsImage";
    case ErrorKind::kRankViolation: return "RankViolation";
    case ErrorKind::kRootLabelMismatch: return "RootLabelMismatch";
    case ErrorKind::kBottomLabelMismatch: return "BottomLabelMismatch";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

// ---------------------------------------------------------------------------------------------
// LabelSet / LabelSubset

LabelSet::LabelSet() { intern(kBottomName); }

bool LabelSet::valid_name(std::string_view name) {
  if (name.empty() || name == kParamToken) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

Label LabelSet::intern(std::string_view name) {
  if (auto found = find(name)) return *found;
  if (!valid_name(name)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid label name '" + std::string(name) + "'");
  }
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(std::string(name), id);
  return Label{id};
}

std::optional<Label> LabelSet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return Label{it->second};
}

bool LabelSubset::empty() const {
  return std::none_of(bits_.begin(), bits_.end(), [](bool b) { return b; });
}

std::vector<Label> LabelSubset::members() const {
  std::vector<Label> out;
  for (std::uint32_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out.push_back(Label{i});
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Forest

Forest Forest::param() {
  Forest f;
  f.cells_.push_back({kParamCell, 1});
  return f;
}

Forest Forest::leaf(Label label) {
  Forest f;
  f.cells_.push_back({label.id, 1});
  return f;
}

Forest Forest::tree(Label label, const Forest& children) {
  Forest f;
  f.cells_.reserve(children.size() + 1);
  f.cells_.push_back({label.id, static_cast<std::uint32_t>(children.size() + 1)});
  f.cells_.insert(f.cells_.end(), children.cells_.begin(), children.cells_.end());
  return f;
}

Forest Forest::from_cells(std::vector<Cell> cells) {
  Forest f;
  f.cells_ = std::move(cells);
  return f;
}

std::optional<std::size_t> Forest::param_position() const {
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].label == kParamCell) return i;
  }
  return std::nullopt;
}

Forest& Forest::append(const Forest& other) {
  if (rank() == 1 && other.rank() == 1) {
    throw Error(ErrorKind::kUndefinedOperation, "horizontal concatenation of two rank-1 forests");
  }
  cells_.insert(cells_.end(), other.cells_.begin(), other.cells_.end());
  return *this;
}

Forest Forest::substitute(const Forest& arg) const {
  auto p = param_position();
  if (!p) throw Error(ErrorKind::kUndefinedOperation, "vertical concatenation below a rank-0 forest");
  Forest out;
  out.cells_.reserve(cells_.size() + arg.size());
  out.cells_.insert(out.cells_.end(), cells_.begin(), cells_.begin() + static_cast<std::ptrdiff_t>(*p));
  out.cells_.insert(out.cells_.end(), arg.cells_.begin(), arg.cells_.end());
  out.cells_.insert(out.cells_.end(), cells_.begin() + static_cast<std::ptrdiff_t>(*p) + 1, cells_.end());
  // Ancestors of the parameter grow by |arg| - 1.
  auto delta = static_cast<std::int64_t>(arg.size()) - 1;
  for (std::size_t i = 0; i < *p; ++i) {
    if (i + cells_[i].extent > *p) {
      out.cells_[i].extent = static_cast<std::uint32_t>(out.cells_[i].extent + delta);
    }
  }
  return out;
}

std::vector<std::size_t> Forest::roots() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cells_.size(); i += cells_[i].extent) out.push_back(i);
  return out;
}

std::vector<std::size_t> Forest::children(std::size_t pos) const {
  std::vector<std::size_t> out;
  std::size_t end = pos + cells_[pos].extent;
  for (std::size_t i = pos + 1; i < end; i += cells_[i].extent) out.push_back(i);
  return out;
}

Forest Forest::subtree(std::size_t pos) const {
  Forest f;
  auto first = cells_.begin() + static_cast<std::ptrdiff_t>(pos);
  f.cells_.assign(first, first + cells_[pos].extent);
  return f;
}

Forest Forest::children_forest(std::size_t pos) const {
  Forest f;
  auto first = cells_.begin() + static_cast<std::ptrdiff_t>(pos) + 1;
  f.cells_.assign(first, first + cells_[pos].extent - 1);
  return f;
}

// ---------------------------------------------------------------------------------------------
// Text syntax

namespace {

bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class ForestParser {
 public:
  ForestParser(std::string_view text, const LabelSet* labels, LabelSet* interning)
      : text_(text), labels_(labels), interning_(interning) {}

  Forest run() {
    Forest f = parse_forest(0);
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Forest parse_forest(int depth) {
    std::vector<Forest::Cell> cells;
    for (;;) {
      skip_ws();
      if (pos_ == text_.size() || text_[pos_] == ')') break;
      parse_tree(cells, depth);
    }
    return Forest::from_cells(std::move(cells));
  }

  void parse_tree(std::vector<Forest::Cell>& cells, int depth) {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    if (start == pos_) throw SyntaxError(pos_, "expected a label name");
    std::string_view name = text_.substr(start, pos_ - start);
    bool has_children = pos_ < text_.size() && text_[pos_] == '(';
    if (name == kParamToken) {
      if (has_children) throw Error(ErrorKind::kInvalidForest, "parameter x with children at " + std::to_string(start));
      if (seen_param_) throw Error(ErrorKind::kInvalidForest, "multiple occurrences of x at " + std::to_string(start));
      seen_param_ = true;
      cells.push_back({Forest::kParamCell, 1});
      return;
    }
    Label label = resolve(name, start);
    std::size_t self = cells.size();
    cells.push_back({label.id, 1});
    if (has_children) {
      ++pos_;
      Forest inner = parse_forest(depth + 1);
      if (pos_ == text_.size() || text_[pos_] != ')') throw SyntaxError(pos_, "expected ')'");
      ++pos_;
      cells.insert(cells.end(), inner.cells().begin(), inner.cells().end());
      cells[self].extent = static_cast<std::uint32_t>(inner.size() + 1);
    }
    if (pos_ < text_.size() && is_name_char(text_[pos_])) {
      throw SyntaxError(pos_, "siblings must be separated by whitespace");
    }
  }

  Label resolve(std::string_view name, std::size_t at) {
    if (interning_ != nullptr) return interning_->intern(name);
    if (auto l = labels_->find(name)) return *l;
    throw Error(ErrorKind::kUnknownLabel, "unknown label '" + std::string(name) + "' at " + std::to_string(at));
  }

  std::string_view text_;
  const LabelSet* labels_;
  LabelSet* interning_;
  std::size_t pos_ = 0;
  bool seen_param_ = false;
};

}  // namespace

Forest parse_forest(std::string_view text, const LabelSet& labels) {
  return ForestParser(text, &labels, nullptr).run();
}

Forest parse_forest_interning(std::string_view text, LabelSet& labels) {
  return ForestParser(text, &labels, &labels).run();
}

std::string print_forest(const Forest& forest, const LabelSet& labels) {
  std::string out;
  auto cells = forest.cells();
  // Close parentheses when leaving a subtree; open_ends holds the end position of each open node.
  std::vector<std::size_t> open_ends;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    while (!open_ends.empty() && open_ends.back() == i) {
      out.push_back(')');
      open_ends.pop_back();
    }
    if (!out.empty() && out.back() != '(') out.push_back(' ');
    if (cells[i].label == Forest::kParamCell) {
      out.append(kParamToken);
    } else {
      out.append(labels.name(Label{cells[i].label}));
    }
    if (cells[i].extent > 1) {
      out.push_back('(');
      open_ends.push_back(i + cells[i].extent);
    }
  }
  while (!open_ends.empty()) {
    out.push_back(')');
    open_ends.pop_back();
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// fcns

Forest fcns(const Forest& forest) {
  if (forest.rank() != 0) throw Error(ErrorKind::kInvalidArgument, "fcns of a rank-1 forest");
  auto in = forest.cells();
  std::vector<Forest::Cell> out;
  out.reserve(2 * in.size() + 1);
  // Each work item is a sibling range [begin, end) of the input.
  std::vector<std::pair<std::size_t, std::size_t>> work{{0, in.size()}};
  while (!work.empty()) {
    auto [begin, end] = work.back();
    work.pop_back();
    if (begin == end) {
      out.push_back({kBottom.id, 1});
      continue;
    }
    if (in[begin].label == kBottom.id) {
      throw Error(ErrorKind::kInvalidArgument, "fcns input must not contain the bottom label");
    }
    auto range_size = static_cast<std::uint32_t>(end - begin);
    out.push_back({in[begin].label, 2 * range_size + 1});
    std::size_t next = begin + in[begin].extent;
    work.emplace_back(next, end);
    work.emplace_back(begin + 1, next);
  }
  return Forest::from_cells(std::move(out));
}

Forest fcns_inverse(const Forest& binary) {
  auto in = binary.cells();
  if (!binary.is_tree()) throw Error(ErrorKind::kNotAnFcnsImage, "fcns image must be a single tree");
  std::vector<Forest::Cell> out;
  out.reserve(in.size() / 2);
  std::vector<std::size_t> work{0};
  while (!work.empty()) {
    std::size_t p = work.back();
    work.pop_back();
    const auto& cell = in[p];
    if (cell.label == Forest::kParamCell) throw Error(ErrorKind::kNotAnFcnsImage, "parameter in fcns image");
    if (cell.label == kBottom.id) {
      if (cell.extent != 1) throw Error(ErrorKind::kNotAnFcnsImage, "bottom node with children at " + std::to_string(p));
      continue;
    }
    if (cell.extent == 1) throw Error(ErrorKind::kNotAnFcnsImage, "labelled leaf at " + std::to_string(p));
    std::size_t left = p + 1;
    std::size_t right = left + in[left].extent;
    if (right >= p + cell.extent || right + in[right].extent != p + cell.extent) {
      throw Error(ErrorKind::kNotAnFcnsImage, "node without exactly two children at " + std::to_string(p));
    }
    out.push_back({cell.label, 1 + (in[left].extent - 1) / 2});
    work.push_back(right);
    work.push_back(left);
  }
  return Forest::from_cells(std::move(out));
}

// ---------------------------------------------------------------------------------------------
// Term strings and llex

std::vector<GammaSymbol> term_string(const Forest& forest) {
  auto cells = forest.cells();
  std::vector<GammaSymbol> out;
  out.reserve(3 * cells.size());
  std::vector<std::size_t> open_ends;
  for (std::size_t i = 0; i <= cells.size(); ++i) {
    while (!open_ends.empty() && open_ends.back() == i) {
      out.push_back(kCloseParen);
      open_ends.pop_back();
    }
    if (i == cells.size()) break;
    if (cells[i].label == Forest::kParamCell) {
      throw Error(ErrorKind::kInvalidArgument, "term string of a rank-1 forest");
    }
    out.push_back(gamma_of(Label{cells[i].label}));
    out.push_back(kOpenParen);
    open_ends.push_back(i + cells[i].extent);
  }
  return out;
}

std::strong_ordering llex_compare(std::span<const GammaSymbol> lhs, std::span<const GammaSymbol> rhs) {
  if (lhs.size() != rhs.size()) return lhs.size() <=> rhs.size();
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i] != rhs[i]) return lhs[i] <=> rhs[i];
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------------------------
// Reference normal forms

namespace {

// phi_a on the sibling range [begin, end); above is the label of the enclosing node, or
// nullopt for the bullet symbol.
void phi(std::span<const Forest::Cell> in, std::size_t begin, std::size_t end, std::optional<Label> above,
         const LabelSubset& assoc, std::vector<Forest::Cell>& out) {
  for (std::size_t p = begin; p < end; p += in[p].extent) {
    Label b{in[p].label};
    if (above && *above == b && assoc.contains(b)) {
      phi(in, p + 1, p + in[p].extent, above, assoc, out);
    } else {
      std::size_t self = out.size();
      out.push_back({b.id, 1});
      phi(in, p + 1, p + in[p].extent, b, assoc, out);
      out[self].extent = static_cast<std::uint32_t>(out.size() - self);
    }
  }
}

Forest nf_comm_range(const Forest& f, std::size_t begin, std::size_t end, const LabelSubset& comm);

Forest nf_comm_tree(const Forest& f, std::size_t p, const LabelSubset& comm) {
  Label a = f.label_at(p);
  std::size_t end = p + f.extent(p);
  if (!comm.contains(a)) return Forest::tree(a, nf_comm_range(f, p + 1, end, comm));
  std::vector<std::pair<std::vector<GammaSymbol>, Forest>> kids;
  for (std::size_t c = p + 1; c < end; c += f.extent(c)) {
    Forest t = nf_comm_tree(f, c, comm);
    auto s = term_string(t);
    kids.emplace_back(std::move(s), std::move(t));
  }
  std::stable_sort(kids.begin(), kids.end(), [](const auto& l, const auto& r) {
    return llex_compare(l.first, r.first) < 0;
  });
  Forest children;
  for (auto& k : kids) children.append(k.second);
  return Forest::tree(a, children);
}

Forest nf_comm_range(const Forest& f, std::size_t begin, std::size_t end, const LabelSubset& comm) {
  Forest out;
  for (std::size_t p = begin; p < end; p += f.extent(p)) out.append(nf_comm_tree(f, p, comm));
  return out;
}

}  // namespace

Forest ref_nf_assoc(const Forest& forest, const LabelSubset& assoc) {
  if (forest.rank() != 0) throw Error(ErrorKind::kInvalidArgument, "ref_nf_assoc of a rank-1 forest");
  std::vector<Forest::Cell> out;
  out.reserve(forest.size());
  phi(forest.cells(), 0, forest.size(), std::nullopt, assoc, out);
  return Forest::from_cells(std::move(out));
}

Forest ref_nf_comm(const Forest& forest, const LabelSubset& comm) {
  if (forest.rank() != 0) throw Error(ErrorKind::kInvalidArgument, "ref_nf_comm of a rank-1 forest");
  return nf_comm_range(forest, 0, forest.size(), comm);
}

bool ref_ac_equal(const Forest& lhs, const Forest& rhs, const LabelSubset& assoc, const LabelSubset& comm) {
  return ref_nf_comm(ref_nf_assoc(lhs, assoc), comm) == ref_nf_comm(ref_nf_assoc(rhs, assoc), comm);
}

}  // namespace forestslp
