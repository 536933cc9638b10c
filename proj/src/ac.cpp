#include "forestslp/ac.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "forestslp/error.hpp"
#include "post_order.hpp"

namespace forestslp {

using Op = Rhs::Op;

// ---------------------------------------------------------------------------------------------
// Theories

AcTheory parse_theory(std::string_view text, LabelSet& labels) {
  AcTheory theory;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw SyntaxError(line_no, "expected 'assoc:' or 'comm:'");
    std::string key = line.substr(0, colon);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    LabelSubset* target = nullptr;
    if (key == "assoc") target = &theory.assoc;
    if (key == "comm") target = &theory.comm;
    if (!target) throw SyntaxError(line_no, "unknown key '" + key + "'");
    std::istringstream words(line.substr(colon + 1));
    std::string word;
    while (words >> word) {
      if (!LabelSet::valid_name(word)) throw SyntaxError(line_no, "invalid label '" + word + "'");
      target->insert(labels.intern(word));
    }
  }
  return theory;
}

std::string print_theory(const AcTheory& theory, const LabelSet& labels) {
  std::string out;
  auto line = [&](const char* key, const LabelSubset& set) {
    out += key;
    out += ":";
    for (Label l : set.members()) out += " " + labels.name(l);
    out += "\n";
  };
  line("assoc", theory.assoc);
  line("comm", theory.comm);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Associative normal form
//
// Copy (A, a) derives phi_a(value A) for rank-0 A; for rank-1 A it derives a context with
// (A, a)<phi_w(f)> = phi_a(A<f>), w the label above x in A. The index kBullet is the outer
// context that never merges.

namespace {

constexpr std::uint32_t kBullet = 0xFFFFFFFFu;

class AssocBuilder {
 public:
  AssocBuilder(const Fslp& nf, const LabelSubset& assoc) : f_(nf), assoc_(assoc) {
    omega_.resize(f_.num_vars());
    for (VarId v : topological_order(f_)) {
      const Rhs& r = f_.rhs(v);
      if (r.op == Op::kNode2) omega_[v] = r.label.id;
      if (r.op == Op::kVConcat) omega_[v] = omega_[r.right];
    }
  }

  Fslp run() {
    const std::uint64_t root = detail::key(f_.start(), kBullet);
    auto order = detail::post_order({root}, [&](std::uint64_t k, std::vector<std::uint64_t>& out) {
      for (std::uint64_t c : children(k)) out.push_back(c);
    });
    for (std::uint64_t k : order) build(k);
    out_.set_start(ids_.at(root));
    out_.set_name(out_.start(), f_.name(f_.start()));
    return prune(out_);
  }

 private:
  bool merges(Label b, std::uint32_t a) const { return b.id == a && assoc_.contains(b); }

  std::vector<std::uint64_t> children(std::uint64_t k) const {
    const VarId v = detail::key_kind(k);
    const std::uint32_t a = detail::key_id(k);
    const Rhs& r = f_.rhs(v);
    switch (r.op) {
      case Op::kHConcat: return {detail::key(r.left, a), detail::key(r.right, a)};
      case Op::kVConcat: return {detail::key(r.left, a), detail::key(r.right, omega_[r.left])};
      case Op::kNode: return {detail::key(r.left, merges(r.label, a) ? a : r.label.id)};
      case Op::kNode2: {
        std::uint32_t b = merges(r.label, a) ? a : r.label.id;
        return {detail::key(r.left, b), detail::key(r.right, b)};
      }
      default: return {};
    }
  }

  void build(std::uint64_t k) {
    const VarId v = detail::key_kind(k);
    const std::uint32_t a = detail::key_id(k);
    const Rhs& r = f_.rhs(v);
    auto kid = [&](std::size_t i) { return ids_.at(children(k)[i]); };
    VarId id = 0;
    switch (r.op) {
      case Op::kEmpty:
        if (!eps_) eps_ = out_.add(Rhs::empty());
        id = *eps_;
        break;
      case Op::kParam:
      case Op::kLeaf: throw Error(ErrorKind::kNotNormalForm, "unexpected rule in a normal form");
      case Op::kHConcat: id = out_.add(Rhs::h(kid(0), kid(1))); break;
      case Op::kVConcat: id = out_.add(Rhs::v(kid(0), kid(1))); break;
      case Op::kNode: id = merges(r.label, a) ? kid(0) : out_.add(Rhs::node(r.label, kid(0))); break;
      case Op::kNode2:
        if (merges(r.label, a)) {
          if (!param_) param_ = out_.add(Rhs::param());
          id = out_.add(Rhs::h(kid(0), out_.add(Rhs::h(*param_, kid(1)))));
        } else {
          id = out_.add(Rhs::node2(r.label, kid(0), kid(1)));
        }
        break;
    }
    ids_.emplace(k, id);
  }

  const Fslp& f_;
  const LabelSubset& assoc_;
  std::vector<std::uint32_t> omega_;
  Fslp out_;
  std::map<std::uint64_t, VarId> ids_;
  std::optional<VarId> eps_, param_;
};

}  // namespace

Fslp nf_assoc(const Fslp& f, const LabelSubset& assoc) {
  validate(f);
  return AssocBuilder(normal_form(f), assoc).run();
}

// ---------------------------------------------------------------------------------------------
// Term-string SSLPs
//
// A rank-0 variable A gets one rule deriving its term string. A rank-1 variable gets two rules,
// the part before the parameter (under A's own id) and the part after it.

namespace {

class StringGrammar {
 public:
  // SSLP variable of the part before the parameter (the whole string for rank 0).
  VarId slot(VarId v) {
    if (v >= first_.size()) {
      first_.resize(v + 1, kUnset);
      after_.resize(v + 1, kUnset);
      rank_.resize(v + 1, 0);
    }
    if (first_[v] == kUnset) first_[v] = add({});
    return first_[v];
  }

  // Emits the rules of v from its current rhs in f; children must have been emitted.
  void emit(const Fslp& f, VarId v) {
    const VarId self = slot(v);
    const Rhs& r = f.rhs(v);
    auto item = [&](VarId w) { return Item::var(first_.at(w)); };
    auto tail = [&](VarId w) { return Item::var(after_.at(w)); };
    const Item open = Item::sym(Symbol{kOpenParen}), close = Item::sym(Symbol{kCloseParen});
    rank_[v] = 0;
    switch (r.op) {
      case Op::kEmpty: set(self, {}); break;
      case Op::kHConcat:
        if (rank_[r.left] + rank_[r.right] != 0) throw Error(ErrorKind::kNotNormalForm, "h of a rank-1 forest");
        set(self, {item(r.left), item(r.right)});
        break;
      case Op::kNode:
        if (rank_[r.left] != 0) throw Error(ErrorKind::kNotNormalForm, "node over a rank-1 forest");
        set(self, {Item::sym(Symbol{gamma_of(r.label)}), open, item(r.left), close});
        break;
      case Op::kNode2:
        set(self, {Item::sym(Symbol{gamma_of(r.label)}), open, item(r.left)});
        after_[v] = add({item(r.right), close});
        rank_[v] = 1;
        break;
      case Op::kVConcat:
        if (rank_[r.right] == 0) {
          set(self, {item(r.left), item(r.right), tail(r.left)});
        } else {
          set(self, {item(r.left), item(r.right)});
          after_[v] = add({tail(r.right), tail(r.left)});
          rank_[v] = 1;
        }
        break;
      default: throw Error(ErrorKind::kNotNormalForm, "unexpected rule in a normal form");
    }
  }

  const Sslp& grammar() const { return g_; }
  Sslp take() { return std::move(g_); }
  const std::vector<BigInt>& lengths() const { return lens_; }

 private:
  static constexpr VarId kUnset = 0xFFFFFFFFu;

  VarId add(std::vector<Item> rhs) {
    lens_.push_back(length_of(rhs));
    return g_.add_rule(std::move(rhs));
  }
  void set(VarId id, std::vector<Item> rhs) {
    lens_[id] = length_of(rhs);
    g_.set_rule(id, std::move(rhs));
  }
  BigInt length_of(const std::vector<Item>& rhs) const {
    BigInt n = 0;
    for (const auto& it : rhs) n += it.is_var() ? lens_[it.id] : BigInt(1);
    return n;
  }

  Sslp g_;
  std::vector<BigInt> lens_;
  std::vector<VarId> first_, after_;
  std::vector<int> rank_;
};

}  // namespace

Sslp forest_string_sslp(const Fslp& f) {
  if (auto why = check_normal_form(f); !why.empty()) throw Error(ErrorKind::kNotNormalForm, why);
  StringGrammar sg;
  for (VarId v = 0; v < f.num_vars(); ++v) sg.slot(v);
  for (VarId v : topological_order(f)) sg.emit(f, v);
  Sslp g = sg.take();
  for (VarId v = 0; v < f.num_vars(); ++v) {
    if (!f.name(v).empty()) g.set_name(v, f.name(v));
  }
  if (f.has_start()) g.set_start(f.start());
  return g;
}

std::strong_ordering compare_forests(const Fslp& f1, VarId a1, const Fslp& f2, VarId a2) {
  auto strings = [](const Fslp& f, VarId a) {
    Fslp copy = f;
    copy.set_start(a);
    return forest_string_sslp(normal_form(copy));
  };
  Sslp g1 = strings(f1, a1), g2 = strings(f2, a2);
  return compare_llex(g1, *g1.start(), g2, *g2.start());
}

// ---------------------------------------------------------------------------------------------
// Commutative canonization

namespace {

class CommBuilder {
 public:
  CommBuilder(const Fslp& strong, const LabelSubset& comm)
      : g_(strong), comm_(comm), cls_(classify(strong)), hor_(hor_sslp(strong)), out_(strong) {}

  Fslp run() {
    for (VarId v : topological_order(g_)) {
      const Rhs& r = g_.rhs(v);
      if (r.op == Op::kNode && comm_.contains(r.label)) {
        out_.set_rhs(v, Rhs::node(r.label, sorted({Item::var(r.left)})));
      } else if (r.op == Op::kNode2 && comm_.contains(r.label)) {
        out_.set_rhs(v, Rhs::node2(r.label, sorted({Item::var(r.left), Item::var(r.right)}), eps()));
      } else if (r.op == Op::kVConcat && cls_[v] == VarClass::kV0Bot) {
        const Rhs& b = g_.rhs(r.left);
        if (b.op == Op::kNode2 && comm_.contains(b.label)) {
          out_.set_rhs(v, Rhs::node(b.label, sorted({Item::var(b.left), Item::sym(Symbol{r.right}), Item::var(b.right)})));
        }
      }
      strings_.emit(out_, v);
    }
    out_.set_tag(NormalFormTag::kNormal);
    return prune(out_);
  }

 private:
  VarId eps() {
    if (!eps_) {
      eps_ = out_.add(Rhs::empty());
      strings_.emit(out_, *eps_);
    }
    return *eps_;
  }

  VarId add(Rhs r) {
    VarId v = out_.add(r);
    strings_.emit(out_, v);
    return v;
  }

  // A V0 variable deriving the horizontal word rhs with its entries sorted by llex.
  VarId sorted(std::vector<Item> rhs) {
    const VarId w = hor_.add_rule(std::move(rhs));
    const VarId roots[] = {w};
    std::vector<Symbol> symbols;
    for (VarId u : reachable_order(hor_, roots)) {
      for (const auto& it : hor_.rhs(u)) {
        if (!it.is_var()) symbols.push_back(it.symbol());
      }
    }
    std::sort(symbols.begin(), symbols.end());
    symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
    std::sort(symbols.begin(), symbols.end(), [&](Symbol x, Symbol y) {
      auto c = compare_llex_in(strings_.grammar(), strings_.lengths(), strings_.slot(x.value),
                               strings_.slot(y.value));
      return c != 0 ? c < 0 : x < y;
    });
    SortedSslp s = sort(hor_, w, symbols);
    if (!s.start) return eps();
    const VarId sroots[] = {*s.start};
    std::vector<VarId> map(s.grammar.num_vars(), 0);
    for (VarId u : reachable_order(s.grammar, sroots)) {
      std::optional<VarId> acc;
      for (const auto& it : s.grammar.rhs(u)) {
        VarId next = it.is_var() ? map[it.id] : it.id;
        acc = acc ? add(Rhs::h(*acc, next)) : next;
      }
      map[u] = acc ? *acc : eps();
    }
    return map[*s.start];
  }

  const Fslp& g_;
  const LabelSubset& comm_;
  std::vector<VarClass> cls_;
  Sslp hor_;
  Fslp out_;
  StringGrammar strings_;
  std::optional<VarId> eps_;
};

}  // namespace

Fslp canonize_comm(const Fslp& f, const LabelSubset& comm) {
  validate(f);
  return CommBuilder(strong_normal_form(f), comm).run();
}

bool ac_equal(const Fslp& f1, const Fslp& f2, const AcTheory& theory) {
  Fslp c1 = canonize_comm(nf_assoc(f1, theory.assoc), theory.comm);
  Fslp c2 = canonize_comm(nf_assoc(f2, theory.assoc), theory.comm);
  return compare_forests(c1, c1.start(), c2, c2.start()) == 0;
}

}  // namespace forestslp
