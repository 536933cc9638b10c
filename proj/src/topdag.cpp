#include "forestslp/topdag.hpp"

#include <map>
#include <tuple>

#include "forestslp/error.hpp"
#include "forestslp/grammar_text.hpp"
#include "post_order.hpp"

namespace forestslp {

using Op = Rhs::Op;
using TOp = TopDagRhs::Op;

// ---------------------------------------------------------------------------------------------
// Cluster algebra

namespace {

void check_cluster(const Cluster& c) {
  if (!c.tree.is_tree() || c.tree.size() < 2 || c.tree.rank() != 0) {
    throw Error(ErrorKind::kInvalidArgument, "a cluster is a tree of size at least two");
  }
}

// The cluster tree with its bottom boundary replaced by the parameter.
Forest open_bottom(const Cluster& c) {
  std::vector<Forest::Cell> cells(c.tree.cells().begin(), c.tree.cells().end());
  cells[*c.bottom].label = Forest::kParamCell;
  return Forest::from_cells(std::move(cells));
}

}  // namespace

Cluster hmerge(const Cluster& s, const Cluster& t) {
  check_cluster(s);
  check_cluster(t);
  if (s.rank() + t.rank() > 1) throw Error(ErrorKind::kRankViolation, "merge of two rank-1 clusters");
  if (s.tree.label_at(0) != t.tree.label_at(0)) {
    throw Error(ErrorKind::kRootLabelMismatch, "horizontal merge with different root labels");
  }
  Forest children = s.tree.children_forest(0);
  children.append(t.tree.children_forest(0));
  Cluster out{Forest::tree(s.tree.label_at(0), children), s.bottom};
  if (t.bottom) out.bottom = *t.bottom + s.tree.size() - 1;
  return out;
}

Cluster vmerge(const Cluster& s, const Cluster& t) {
  check_cluster(s);
  check_cluster(t);
  if (!s.bottom) throw Error(ErrorKind::kRankViolation, "vertical merge below a rank-0 cluster");
  if (s.tree.label_at(*s.bottom) != t.tree.label_at(0)) {
    throw Error(ErrorKind::kBottomLabelMismatch, "vertical merge with mismatched bottom label");
  }
  Cluster out{open_bottom(s).substitute(t.tree), std::nullopt};
  if (t.bottom) out.bottom = *s.bottom + *t.bottom;
  return out;
}

Forest phi(const Cluster& c) {
  check_cluster(c);
  if (!c.bottom) return c.tree.children_forest(0);
  Forest b = Forest::tree(c.tree.label_at(*c.bottom), Forest::param());
  return open_bottom(c).substitute(b).children_forest(0);
}

Cluster psi(Label a, const Forest& t) {
  auto p = t.param_position();
  if (!t.is_tree() || !p || t.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "psi needs a tree context other than x");
  }
  std::vector<Forest::Cell> cells(t.cells().begin(), t.cells().end());
  cells[*p].label = a.id;
  return {Forest::from_cells(std::move(cells)), *p};
}

std::string print_cluster(const Cluster& c, const LabelSet& labels) {
  if (!c.bottom) return print_forest(c.tree, labels);
  // Print with a placeholder label, then splice in the underlined name.
  std::string marker = "_" + labels.name(c.tree.label_at(*c.bottom));
  std::string text = print_forest(open_bottom(c), labels);
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    bool word_start = i == 0 || text[i - 1] == ' ' || text[i - 1] == '(';
    bool word_end = i + 1 == text.size() || text[i + 1] == ' ' || text[i + 1] == ')';
    if (ch == 'x' && word_start && word_end) return text.substr(0, i) + marker + text.substr(i + 1);
  }
  return text;
}

// ---------------------------------------------------------------------------------------------
// Top dags

VarId TopDag::add(TopDagRhs rhs, std::string name) {
  rules_.push_back(rhs);
  names_.push_back(std::move(name));
  return static_cast<VarId>(rules_.size() - 1);
}

VarId TopDag::start() const {
  if (!start_) throw Error(ErrorKind::kInvalidArgument, "top dag has no start variable");
  return *start_;
}

namespace {

std::string var_label(const TopDag& d, VarId v) {
  return d.name(v).empty() ? "variable " + std::to_string(v) : "variable '" + d.name(v) + "'";
}

std::vector<VarId> topdag_order(const TopDag& d, std::vector<VarId> roots) {
  if (roots.empty()) {
    for (VarId v = 0; v < d.num_vars(); ++v) roots.push_back(v);
  }
  std::vector<std::uint64_t> keys(roots.begin(), roots.end());
  for (auto k : keys) {
    if (k >= d.num_vars()) throw Error(ErrorKind::kUndefinedVariable, "variable id out of range");
  }
  auto order = detail::post_order(keys, [&](std::uint64_t v, std::vector<std::uint64_t>& out) {
    const TopDagRhs& r = d.rhs(static_cast<VarId>(v));
    if (r.op == TOp::kHMerge || r.op == TOp::kVMerge) {
      for (VarId c : {r.left, r.right}) {
        if (c >= d.num_vars()) {
          throw Error(ErrorKind::kUndefinedVariable, "undefined operand in " + var_label(d, static_cast<VarId>(v)));
        }
        out.push_back(c);
      }
    }
  });
  return {order.begin(), order.end()};
}

}  // namespace

std::vector<ClusterInfo> validate(const TopDag& d) {
  std::vector<ClusterInfo> info(d.num_vars());
  for (VarId v : topdag_order(d, {})) {
    const TopDagRhs& r = d.rhs(v);
    auto fail = [&](ErrorKind kind, const std::string& why) {
      throw Error(kind, var_label(d, v) + ": " + why);
    };
    ClusterInfo& out = info[v];
    switch (r.op) {
      case TOp::kAtom: out = {0, r.top, std::nullopt}; break;
      case TOp::kAtomBottom: out = {1, r.top, r.child}; break;
      case TOp::kHMerge: {
        const ClusterInfo &b = info[r.left], &c = info[r.right];
        if (b.rank + c.rank > 1) fail(ErrorKind::kRankViolation, "horizontal merge of two rank-1 clusters");
        if (b.root != c.root) fail(ErrorKind::kRootLabelMismatch, "root labels differ");
        out = {b.rank + c.rank, b.root, b.bottom ? b.bottom : c.bottom};
        break;
      }
      case TOp::kVMerge: {
        const ClusterInfo &b = info[r.left], &c = info[r.right];
        if (b.rank != 1) fail(ErrorKind::kRankViolation, "vertical merge below a rank-0 cluster");
        if (*b.bottom != c.root) fail(ErrorKind::kBottomLabelMismatch, "bottom label differs from root label");
        out = {c.rank, b.root, c.bottom};
        break;
      }
    }
  }
  if (d.has_start() && info.at(d.start()).rank != 0) {
    throw Error(ErrorKind::kRankViolation, "start " + var_label(d, d.start()) + " has rank 1");
  }
  return info;
}

std::size_t size(const TopDag& d) { return d.num_vars(); }

Cluster eval(const TopDag& d, VarId var, std::size_t cap) {
  validate(d);
  const auto order = topdag_order(d, {var});
  std::vector<BigInt> sizes(d.num_vars());
  for (VarId v : order) {
    const TopDagRhs& r = d.rhs(v);
    sizes[v] = (r.op == TOp::kAtom || r.op == TOp::kAtomBottom) ? BigInt(2)
                                                                 : sizes[r.left] + sizes[r.right] - 1;
  }
  if (sizes[var] > cap) {
    throw Error(ErrorKind::kExplosionGuard, "cluster has " + sizes[var].str() + " nodes, above the cap");
  }
  std::map<VarId, Cluster> memo;
  for (VarId v : order) {
    const TopDagRhs& r = d.rhs(v);
    switch (r.op) {
      case TOp::kAtom: memo[v] = {Forest::tree(r.top, Forest::leaf(r.child)), std::nullopt}; break;
      case TOp::kAtomBottom: memo[v] = {Forest::tree(r.top, Forest::leaf(r.child)), 1}; break;
      case TOp::kHMerge: memo[v] = hmerge(memo.at(r.left), memo.at(r.right)); break;
      case TOp::kVMerge: memo[v] = vmerge(memo.at(r.left), memo.at(r.right)); break;
    }
  }
  return memo.at(var);
}

Forest eval(const TopDag& d) { return eval(d, d.start()).tree; }

// ---------------------------------------------------------------------------------------------
// Top dag -> FSLP

Fslp topdag_to_fslp(const TopDag& d) {
  const auto info = validate(d);
  Fslp f;
  for (VarId v = 0; v < d.num_vars(); ++v) f.add(Rhs::empty(), d.name(v));
  std::optional<VarId> x;
  for (VarId v = 0; v < d.num_vars(); ++v) {
    const TopDagRhs& r = d.rhs(v);
    switch (r.op) {
      case TOp::kAtom: f.set_rhs(v, Rhs::leaf(r.child)); break;
      case TOp::kAtomBottom:
        if (!x) x = f.add(Rhs::param());
        f.set_rhs(v, Rhs::node(r.child, *x));
        break;
      case TOp::kHMerge: f.set_rhs(v, Rhs::h(r.left, r.right)); break;
      case TOp::kVMerge: f.set_rhs(v, Rhs::v(r.left, r.right)); break;
    }
  }
  f.set_start(f.add(Rhs::node(info[d.start()].root, d.start())));
  return f;
}

// ---------------------------------------------------------------------------------------------
// FSLP -> top dag
//
// Works on the normal form. Null V0 variables (empty value) are skipped and chains through
// horizontal concatenations with one null side are followed, which plays the role of the
// eps and chain elimination. Variables of the top dag are generated on demand:
//   kUp(A, a)      a(val A)            A in V0, non-null
//   kBar(A)        val A               A in V0-bottom with at least two nodes
//   kPsi(A, a)     psi_a(val A)        A in V1
//   kClosed(A, c)  val A<c>            A in V1, c a leaf label; rank 0
// The last family covers B<C> with C a single leaf, where psi_c would leave c underlined.

namespace {

enum Kind : std::uint64_t { kUp = 0, kBar = 1, kPsi = 2, kClosed = 3 };

std::uint64_t pack(Kind kind, VarId var, Label label = {}) {
  return (static_cast<std::uint64_t>(kind) << 62) | (static_cast<std::uint64_t>(var) << 31) | label.id;
}
Kind kind_of(std::uint64_t key) { return static_cast<Kind>(key >> 62); }
VarId var_of(std::uint64_t key) { return static_cast<VarId>((key >> 31) & 0x7FFFFFFFu); }
Label label_of(std::uint64_t key) { return Label{static_cast<std::uint32_t>(key & 0x7FFFFFFFu)}; }

struct Operand {
  bool is_key = true;
  std::uint64_t key = 0;
  TopDagRhs atom;
};

struct Recipe {
  enum { kAlias, kHChain, kVMerge } shape = kAlias;
  std::vector<Operand> ops;
};

class TopDagBuilder {
 public:
  explicit TopDagBuilder(const Fslp& nf) : f_(nf), sizes_(value_sizes(nf)) {
    alpha_.resize(f_.num_vars());
    for (VarId v : topological_order(f_)) {
      const Rhs& r = f_.rhs(v);
      if (r.op == Op::kNode || r.op == Op::kNode2) alpha_[v] = r.label;
      if (r.op == Op::kVConcat) alpha_[v] = alpha_[r.left];
    }
  }

  TopDag run() {
    std::optional<VarId> s = resolve(f_.start());
    const Rhs& r = f_.rhs(*s);
    if (r.op == Op::kNode && !resolve(r.left)) throw Error(ErrorKind::kTreeTooSmall, "tree has one node");
    const std::uint64_t root = pack(kBar, *s);
    auto order = detail::post_order({root}, [&](std::uint64_t key, std::vector<std::uint64_t>& out) {
      for (const Operand& o : recipe(key).ops) {
        if (o.is_key) out.push_back(o.key);
      }
    });
    for (std::uint64_t key : order) build(key);
    out_.set_start(ids_.at(root));
    out_.set_name(out_.start(), f_.name(f_.start()));
    return std::move(out_);
  }

 private:
  bool null(VarId v) const { return sizes_[v] == 0; }

  // Follows h-chains with a null side; nullopt for a null variable.
  std::optional<VarId> resolve(VarId v) const {
    while (true) {
      if (null(v)) return std::nullopt;
      const Rhs& r = f_.rhs(v);
      if (r.op != Op::kHConcat) return v;
      if (null(r.left)) v = r.right;
      else if (null(r.right)) v = r.left;
      else return v;
    }
  }

  // Single-leaf V0-bottom variable: a(E) with E null.
  std::optional<Label> leaf_label(VarId v) const {
    const Rhs& r = f_.rhs(v);
    if (r.op == Op::kNode && null(r.left)) return r.label;
    return std::nullopt;
  }

  static Operand key_op(std::uint64_t key) { return {true, key, {}}; }
  static Operand atom_op(TopDagRhs atom) { return {false, 0, atom}; }

  // B^b (x) C^b around the middle atom, skipping null sides.
  Recipe fan(Label b, VarId left, VarId right, TopDagRhs middle) const {
    Recipe out{Recipe::kHChain, {}};
    if (auto l = resolve(left)) out.ops.push_back(key_op(pack(kUp, *l, b)));
    out.ops.push_back(atom_op(middle));
    if (auto r = resolve(right)) out.ops.push_back(key_op(pack(kUp, *r, b)));
    if (out.ops.size() == 1) out.shape = Recipe::kAlias;
    return out;
  }

  Recipe recipe(std::uint64_t key) const {
    const VarId v = var_of(key);
    const Label a = label_of(key);
    const Rhs& r = f_.rhs(v);
    switch (kind_of(key)) {
      case kUp:
        if (r.op == Op::kHConcat) {
          return {Recipe::kHChain, {key_op(pack(kUp, *resolve(r.left), a)), key_op(pack(kUp, *resolve(r.right), a))}};
        }
        if (auto b = leaf_label(v)) return {Recipe::kAlias, {atom_op(TopDagRhs::atom(a, *b))}};
        return {Recipe::kVMerge, {atom_op(TopDagRhs::atom_bottom(a, alpha_[v])), key_op(pack(kBar, v))}};
      case kBar:
        if (r.op == Op::kNode) return {Recipe::kAlias, {key_op(pack(kUp, *resolve(r.left), r.label))}};
        if (auto c = leaf_label(r.right)) return {Recipe::kAlias, {key_op(pack(kClosed, r.left, *c))}};
        return {Recipe::kVMerge, {key_op(pack(kPsi, r.left, alpha_[r.right])), key_op(pack(kBar, r.right))}};
      case kPsi:
        if (r.op == Op::kVConcat) {
          return {Recipe::kVMerge, {key_op(pack(kPsi, r.left, alpha_[r.right])), key_op(pack(kPsi, r.right, a))}};
        }
        return fan(r.label, r.left, r.right, TopDagRhs::atom_bottom(r.label, a));
      case kClosed:
        if (r.op == Op::kVConcat) {
          return {Recipe::kVMerge, {key_op(pack(kPsi, r.left, alpha_[r.right])), key_op(pack(kClosed, r.right, a))}};
        }
        return fan(r.label, r.left, r.right, TopDagRhs::atom(r.label, a));
    }
    return {};
  }

  VarId operand_id(const Operand& o) {
    if (o.is_key) return ids_.at(o.key);
    auto k = std::make_tuple(o.atom.op == TOp::kAtomBottom, o.atom.top.id, o.atom.child.id);
    auto it = atoms_.find(k);
    if (it != atoms_.end()) return it->second;
    VarId id = out_.add(o.atom);
    atoms_.emplace(k, id);
    return id;
  }

  void build(std::uint64_t key) {
    Recipe rec = recipe(key);
    VarId id = operand_id(rec.ops[0]);
    if (rec.shape == Recipe::kVMerge) {
      id = out_.add(TopDagRhs::vm(id, operand_id(rec.ops[1])));
    } else if (rec.shape == Recipe::kHChain) {
      for (std::size_t i = 1; i < rec.ops.size(); ++i) id = out_.add(TopDagRhs::hm(id, operand_id(rec.ops[i])));
    }
    ids_.emplace(key, id);
  }

  const Fslp& f_;
  std::vector<BigInt> sizes_;
  std::vector<Label> alpha_;
  TopDag out_;
  std::map<std::uint64_t, VarId> ids_;
  std::map<std::tuple<bool, std::uint32_t, std::uint32_t>, VarId> atoms_;
};

// Number of trees at the top level, counting a top-level parameter as a tree.
struct TopShape {
  BigInt trees;
  bool param_on_top = false;
};

std::vector<TopShape> top_shapes(const Fslp& f) {
  std::vector<TopShape> s(f.num_vars());
  for (VarId v : topological_order(f)) {
    const Rhs& r = f.rhs(v);
    switch (r.op) {
      case Op::kEmpty: s[v] = {0, false}; break;
      case Op::kParam: s[v] = {1, true}; break;
      case Op::kLeaf:
      case Op::kNode:
      case Op::kNode2: s[v] = {1, false}; break;
      case Op::kHConcat:
        s[v] = {s[r.left].trees + s[r.right].trees, s[r.left].param_on_top || s[r.right].param_on_top};
        break;
      case Op::kVConcat:
        if (s[r.left].param_on_top) {
          s[v] = {s[r.left].trees - 1 + s[r.right].trees, s[r.right].param_on_top};
        } else {
          s[v] = {s[r.left].trees, false};
        }
        break;
    }
  }
  return s;
}

}  // namespace

TopDag fslp_to_topdag(const Fslp& f) {
  validate(f);
  const VarId s = f.start();
  if (top_shapes(f)[s].trees != 1) throw Error(ErrorKind::kNotATree, "the FSLP value is not a single tree");
  if (value_sizes(f)[s] < 2) throw Error(ErrorKind::kTreeTooSmall, "tree has one node");
  return TopDagBuilder(normal_form(f)).run();
}

// ---------------------------------------------------------------------------------------------
// Text format

TopDag parse_topdag(std::string_view text, LabelSet& labels) {
  const GrammarDocument doc = read_grammar_document(text);
  const NameIndex index(doc);
  TopDag d;
  for (const auto& rule : doc.rules) {
    const auto& t = rule.rhs;
    auto word = [&](std::size_t i) -> const std::string& {
      if (i >= t.size() || t[i].quoted) throw SyntaxError(rule.line, "malformed right-hand side");
      return t[i].text;
    };
    auto label = [&](std::size_t i) {
      const std::string& name = word(i);
      if (!LabelSet::valid_name(name)) throw SyntaxError(rule.line, "invalid label '" + name + "'");
      return labels.intern(name);
    };
    if (t.size() != 3) throw SyntaxError(rule.line, "expected an operation and two operands");
    const std::string& op = word(0);
    TopDagRhs r;
    if (op == "atom") {
      r = TopDagRhs::atom(label(1), label(2));
    } else if (op == "atomb") {
      r = TopDagRhs::atom_bottom(label(1), label(2));
    } else if (op == "hm") {
      r = TopDagRhs::hm(index.at(word(1), rule.line), index.at(word(2), rule.line));
    } else if (op == "vm") {
      r = TopDagRhs::vm(index.at(word(1), rule.line), index.at(word(2), rule.line));
    } else {
      throw SyntaxError(rule.line, "unknown operation '" + op + "'");
    }
    d.add(r, rule.lhs);
  }
  if (doc.rules.empty()) throw SyntaxError(0, "empty grammar");
  d.set_start(index.start(doc));
  validate(d);
  return d;
}

std::string print_topdag(const TopDag& d, const LabelSet& labels) {
  std::vector<std::string> raw(d.num_vars());
  for (VarId v = 0; v < d.num_vars(); ++v) raw[v] = d.name(v);
  const auto names = printable_names(raw);
  std::string out;
  if (d.has_start()) out += "start " + names[d.start()] + "\n";
  for (VarId v = 0; v < d.num_vars(); ++v) {
    const TopDagRhs& r = d.rhs(v);
    out += names[v] + " -> ";
    switch (r.op) {
      case TOp::kAtom: out += "atom " + labels.name(r.top) + " " + labels.name(r.child); break;
      case TOp::kAtomBottom: out += "atomb " + labels.name(r.top) + " " + labels.name(r.child); break;
      case TOp::kHMerge: out += "hm " + names[r.left] + " " + names[r.right]; break;
      case TOp::kVMerge: out += "vm " + names[r.left] + " " + names[r.right]; break;
    }
    out += '\n';
  }
  return out;
}

}  // namespace forestslp
