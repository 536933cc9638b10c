#include "forestslp/fslp.hpp"

#include <algorithm>
#include <map>

#include "forestslp/error.hpp"
#include "forestslp/grammar_text.hpp"

namespace forestslp {

using Op = Rhs::Op;

int Rhs::arity() const {
  switch (op) {
    case Op::kEmpty:
    case Op::kParam:
    case Op::kLeaf: return 0;
    case Op::kNode: return 1;
    case Op::kHConcat:
    case Op::kVConcat:
    case Op::kNode2: return 2;
  }
  return 0;
}

VarId Fslp::add(Rhs rhs, std::string name) {
  rules_.push_back(rhs);
  names_.push_back(std::move(name));
  return static_cast<VarId>(rules_.size() - 1);
}

VarId Fslp::start() const {
  if (!start_) throw Error(ErrorKind::kInvalidArgument, "FSLP has no start variable");
  return *start_;
}

// ---------------------------------------------------------------------------------------------
// Traversal, validation, sizes

std::vector<VarId> topological_order(const Fslp& f, std::span<const VarId> roots) {
  enum : std::uint8_t { kWhite, kGrey, kBlack };
  const std::size_t n = f.num_vars();
  std::vector<std::uint8_t> color(n, kWhite);
  std::vector<VarId> out;
  std::vector<VarId> all;
  if (roots.empty()) {
    all.resize(n);
    for (VarId v = 0; v < n; ++v) all[v] = v;
    roots = all;
  }
  std::vector<std::pair<VarId, int>> stack;
  for (VarId root : roots) {
    if (root >= n) throw Error(ErrorKind::kUndefinedVariable, "variable id out of range");
    if (color[root] != kWhite) continue;
    color[root] = kGrey;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      const Rhs& r = f.rhs(v);
      if (i == r.arity()) {
        color[v] = kBlack;
        out.push_back(v);
        stack.pop_back();
        continue;
      }
      VarId c = i++ == 0 ? r.left : r.right;
      if (c >= n) throw Error(ErrorKind::kUndefinedVariable, "variable id out of range in rule " + std::to_string(v));
      if (color[c] == kGrey) {
        throw Error(ErrorKind::kCycle, "cyclic reference through variable " + std::to_string(c));
      }
      if (color[c] == kWhite) {
        color[c] = kGrey;
        stack.emplace_back(c, 0);
      }
    }
  }
  return out;
}

namespace {

std::string var_label(const Fslp& f, VarId v) {
  return f.name(v).empty() ? "variable " + std::to_string(v) : "variable '" + f.name(v) + "'";
}

}  // namespace

std::vector<int> validate(const Fslp& f) {
  std::vector<int> rank(f.num_vars(), 0);
  for (VarId v : topological_order(f)) {
    const Rhs& r = f.rhs(v);
    auto fail = [&](const std::string& why) {
      throw Error(ErrorKind::kUndefinedOperation, var_label(f, v) + ": " + why);
    };
    switch (r.op) {
      case Op::kEmpty:
      case Op::kLeaf: rank[v] = 0; break;
      case Op::kParam: rank[v] = 1; break;
      case Op::kHConcat:
        if (rank[r.left] + rank[r.right] > 1) fail("horizontal concatenation of two rank-1 forests");
        rank[v] = rank[r.left] + rank[r.right];
        break;
      case Op::kVConcat:
        if (rank[r.left] != 1) fail("vertical concatenation below a rank-0 forest");
        rank[v] = rank[r.right];
        break;
      case Op::kNode: rank[v] = rank[r.left]; break;
      case Op::kNode2:
        if (rank[r.left] + rank[r.right] != 0) fail("a(B x C) needs rank-0 B and C");
        rank[v] = 1;
        break;
    }
  }
  if (f.has_start() && rank[f.start()] != 0) {
    throw Error(ErrorKind::kInvalidForest, "start " + var_label(f, f.start()) + " has rank 1");
  }
  return rank;
}

std::vector<BigInt> value_sizes(const Fslp& f) {
  std::vector<BigInt> s(f.num_vars());
  for (VarId v : topological_order(f)) {
    const Rhs& r = f.rhs(v);
    switch (r.op) {
      case Op::kEmpty: s[v] = 0; break;
      case Op::kParam:
      case Op::kLeaf: s[v] = 1; break;
      case Op::kHConcat: s[v] = s[r.left] + s[r.right]; break;
      case Op::kVConcat: s[v] = s[r.left] - 1 + s[r.right]; break;
      case Op::kNode: s[v] = s[r.left] + 1; break;
      case Op::kNode2: s[v] = s[r.left] + s[r.right] + 2; break;
    }
  }
  return s;
}

std::size_t size(const Fslp& f) {
  std::size_t total = 0;
  for (VarId v = 0; v < f.num_vars(); ++v) total += f.rhs(v).op == Op::kNode2 ? 4 : 1;
  return total;
}

// ---------------------------------------------------------------------------------------------
// Evaluation

namespace {

struct Hole {
  VarId var;
  const Hole* outer;
};

class Emitter {
 public:
  explicit Emitter(const Fslp& f) : f_(f) {}

  void emit(VarId v, const Hole* hole) {
    const Rhs& r = f_.rhs(v);
    switch (r.op) {
      case Op::kEmpty: return;
      case Op::kParam:
        if (hole) {
          emit(hole->var, hole->outer);
        } else {
          cells_.push_back({Forest::kParamCell, 1});
        }
        return;
      case Op::kLeaf: cells_.push_back({r.label.id, 1}); return;
      case Op::kHConcat:
        emit(r.left, hole);
        emit(r.right, hole);
        return;
      case Op::kVConcat: {
        Hole inner{r.right, hole};
        emit(r.left, &inner);
        return;
      }
      case Op::kNode: {
        std::size_t at = cells_.size();
        cells_.push_back({r.label.id, 0});
        emit(r.left, hole);
        cells_[at].extent = static_cast<std::uint32_t>(cells_.size() - at);
        return;
      }
      case Op::kNode2: {
        std::size_t at = cells_.size();
        cells_.push_back({r.label.id, 0});
        emit(r.left, nullptr);
        if (hole) {
          emit(hole->var, hole->outer);
        } else {
          cells_.push_back({Forest::kParamCell, 1});
        }
        emit(r.right, nullptr);
        cells_[at].extent = static_cast<std::uint32_t>(cells_.size() - at);
        return;
      }
    }
  }

  std::vector<Forest::Cell> take() { return std::move(cells_); }

 private:
  const Fslp& f_;
  std::vector<Forest::Cell> cells_;
};

}  // namespace

Forest eval(const Fslp& f, VarId var, std::size_t cap) {
  validate(f);
  auto sizes = value_sizes(f);
  if (sizes[var] > cap) {
    throw Error(ErrorKind::kExplosionGuard, "value with " + sizes[var].str() + " nodes exceeds the expansion cap");
  }
  Emitter e(f);
  e.emit(var, nullptr);
  return Forest::from_cells(e.take());
}

Forest eval(const Fslp& f) { return eval(f, f.start()); }

Fslp prune(const Fslp& f) {
  VarId roots[] = {f.start()};
  auto order = topological_order(f, roots);
  std::sort(order.begin(), order.end());
  std::vector<VarId> remap(f.num_vars(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<VarId>(i);
  Fslp out;
  for (VarId v : order) {
    Rhs r = f.rhs(v);
    if (r.arity() >= 1) r.left = remap[r.left];
    if (r.arity() == 2) r.right = remap[r.right];
    out.add(r, f.name(v));
  }
  out.set_start(remap[f.start()]);
  out.set_tag(f.tag());
  return out;
}

// ---------------------------------------------------------------------------------------------
// Baseline compression

Fslp build_baseline(const Forest& forest) {
  if (forest.rank() != 0) throw Error(ErrorKind::kInvalidArgument, "build_baseline needs a rank-0 forest");
  Fslp out;
  std::optional<VarId> eps;
  auto get_eps = [&] {
    if (!eps) eps = out.add(Rhs::empty());
    return *eps;
  };
  // powers[c][j] derives c^(2^j) as siblings.
  std::map<VarId, std::vector<VarId>> powers;
  auto power = [&](VarId c, std::size_t j) {
    auto& p = powers[c];
    if (p.empty()) p.push_back(c);
    while (p.size() <= j) p.push_back(out.add(Rhs::h(p.back(), p.back())));
    return p[j];
  };
  auto sequence = [&](const std::vector<VarId>& items) {
    std::optional<VarId> acc;
    auto append = [&](VarId v) { acc = acc ? out.add(Rhs::h(*acc, v)) : v; };
    for (std::size_t i = 0; i < items.size();) {
      std::size_t j = i;
      while (j < items.size() && items[j] == items[i]) ++j;
      std::size_t run = j - i;
      for (std::size_t bit = 64; bit-- > 0;) {
        if ((run >> bit) & 1) append(power(items[i], bit));
      }
      i = j;
    }
    return acc ? *acc : get_eps();
  };

  std::map<std::pair<std::uint32_t, std::vector<VarId>>, VarId> dag;
  const auto cells = forest.cells();
  std::vector<VarId> id(cells.size());
  for (std::size_t p = cells.size(); p-- > 0;) {
    std::vector<VarId> kids;
    for (std::size_t c : forest.children(p)) kids.push_back(id[c]);
    auto key = std::make_pair(cells[p].label, kids);
    auto it = dag.find(key);
    if (it != dag.end()) {
      id[p] = it->second;
      continue;
    }
    Label a{cells[p].label};
    VarId v = kids.empty() ? out.add(Rhs::leaf(a)) : out.add(Rhs::node(a, sequence(kids)));
    dag.emplace(std::move(key), v);
    id[p] = v;
  }
  std::vector<VarId> roots;
  for (std::size_t r : forest.roots()) roots.push_back(id[r]);
  out.set_start(sequence(roots));
  return out;
}

// ---------------------------------------------------------------------------------------------
// Text format

Fslp parse_fslp(std::string_view text, LabelSet& labels) {
  const GrammarDocument doc = read_grammar_document(text);
  const NameIndex index(doc);
  Fslp f;
  for (const auto& rule : doc.rules) {
    const auto& t = rule.rhs;
    auto word = [&](std::size_t i) -> const std::string& {
      if (i >= t.size() || t[i].quoted) throw SyntaxError(rule.line, "malformed right-hand side");
      return t[i].text;
    };
    auto var = [&](std::size_t i) { return index.at(word(i), rule.line); };
    auto label = [&](std::size_t i) {
      const std::string& name = word(i);
      if (!LabelSet::valid_name(name)) throw SyntaxError(rule.line, "invalid label '" + name + "'");
      return labels.intern(name);
    };
    auto expect = [&](std::size_t n) {
      if (t.size() != n) throw SyntaxError(rule.line, "wrong number of operands");
    };
    if (t.empty()) throw SyntaxError(rule.line, "empty right-hand side (use eps)");
    const std::string& op = word(0);
    Rhs r;
    if (op == "eps") {
      expect(1);
      r = Rhs::empty();
    } else if (op == "x") {
      expect(1);
      r = Rhs::param();
    } else if (op == "leaf") {
      expect(2);
      r = Rhs::leaf(label(1));
    } else if (op == "h") {
      expect(3);
      r = Rhs::h(var(1), var(2));
    } else if (op == "v") {
      expect(3);
      r = Rhs::v(var(1), var(2));
    } else if (op == "node") {
      expect(3);
      r = Rhs::node(label(1), var(2));
    } else if (op == "node2") {
      expect(4);
      r = Rhs::node2(label(1), var(2), var(3));
    } else {
      throw SyntaxError(rule.line, "unknown operation '" + op + "'");
    }
    f.add(r, rule.lhs);
  }
  if (doc.rules.empty()) throw SyntaxError(0, "empty grammar");
  f.set_start(index.start(doc));
  validate(f);
  return f;
}

std::string print_fslp(const Fslp& f, const LabelSet& labels) {
  std::vector<std::string> raw(f.num_vars());
  for (VarId v = 0; v < f.num_vars(); ++v) raw[v] = f.name(v);
  const auto names = printable_names(raw);
  std::string out;
  if (f.has_start()) out += "start " + names[f.start()] + "\n";
  for (VarId v = 0; v < f.num_vars(); ++v) {
    const Rhs& r = f.rhs(v);
    out += names[v] + " -> ";
    switch (r.op) {
      case Op::kEmpty: out += "eps"; break;
      case Op::kParam: out += "x"; break;
      case Op::kLeaf: out += "leaf " + labels.name(r.label); break;
      case Op::kHConcat: out += "h " + names[r.left] + " " + names[r.right]; break;
      case Op::kVConcat: out += "v " + names[r.left] + " " + names[r.right]; break;
      case Op::kNode: out += "node " + labels.name(r.label) + " " + names[r.left]; break;
      case Op::kNode2:
        out += "node2 " + labels.name(r.label) + " " + names[r.left] + " " + names[r.right];
        break;
    }
    out += '\n';
  }
  return out;
}

}  // namespace forestslp
