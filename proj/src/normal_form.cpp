#include <algorithm>
#include <map>

#include "forestslp/error.hpp"
#include "forestslp/fslp.hpp"
#include "post_order.hpp"

namespace forestslp {

using Op = Rhs::Op;

// ---------------------------------------------------------------------------------------------
// Normal form checks

namespace {

std::string check_nf(const Fslp& f, std::vector<VarClass>* classes) {
  std::vector<int> rank;
  try {
    rank = validate(f);
  } catch (const Error& e) {
    return e.what();
  }
  std::vector<VarClass> cls(f.num_vars());
  for (VarId v : topological_order(f)) {
    const Rhs& r = f.rhs(v);
    auto bad = [&](const char* why) { return "variable " + std::to_string(v) + ": " + why; };
    switch (r.op) {
      case Op::kEmpty: cls[v] = VarClass::kV0Top; break;
      case Op::kParam: return bad("bare parameter");
      case Op::kLeaf: return bad("leaf constant (normal form uses a(E) with E -> eps)");
      case Op::kHConcat:
        if (rank[r.left] != 0 || rank[r.right] != 0) return bad("horizontal concatenation with a rank-1 operand");
        cls[v] = VarClass::kV0Top;
        break;
      case Op::kVConcat:
        if (rank[r.right] == 0) {
          if (cls[r.right] != VarClass::kV0Bot) return bad("vertical concatenation with a forest argument");
          cls[v] = VarClass::kV0Bot;
        } else {
          cls[v] = VarClass::kV1Top;
        }
        break;
      case Op::kNode:
        if (rank[r.left] != 0) return bad("node above a rank-1 forest");
        cls[v] = VarClass::kV0Bot;
        break;
      case Op::kNode2: cls[v] = VarClass::kV1Bot; break;
    }
  }
  if (classes) *classes = std::move(cls);
  return {};
}

// Largest |value(D)| over the symbols D of spine(A), for every V1 variable A.
std::vector<BigInt> max_spine_sizes(const Fslp& f, const std::vector<VarClass>& cls, const std::vector<BigInt>& sizes) {
  std::vector<BigInt> m(f.num_vars());
  for (VarId v : topological_order(f)) {
    if (cls[v] == VarClass::kV1Bot) m[v] = sizes[v];
    if (cls[v] == VarClass::kV1Top) m[v] = std::max(m[f.rhs(v).left], m[f.rhs(v).right]);
  }
  return m;
}

}  // namespace

std::string check_normal_form(const Fslp& f) { return check_nf(f, nullptr); }

std::vector<VarClass> classify(const Fslp& f) {
  std::vector<VarClass> cls;
  std::string err = check_nf(f, &cls);
  if (!err.empty()) throw Error(ErrorKind::kNotNormalForm, err);
  return cls;
}

std::string check_strong_normal_form(const Fslp& f) {
  std::vector<VarClass> cls;
  std::string err = check_nf(f, &cls);
  if (!err.empty()) return err;
  auto sizes = value_sizes(f);
  auto maxd = max_spine_sizes(f, cls, sizes);
  for (VarId v = 0; v < f.num_vars(); ++v) {
    const Rhs& r = f.rhs(v);
    if (cls[v] != VarClass::kV0Bot || r.op != Op::kVConcat || cls[r.left] == VarClass::kV1Bot) continue;
    if (sizes[r.right] < maxd[r.left] - 1) {
      return "variable " + std::to_string(v) + ": argument smaller than a spine symbol";
    }
  }
  return {};
}

Sslp spine_sslp(const Fslp& f) {
  auto cls = classify(f);
  Sslp g;
  for (VarId v = 0; v < f.num_vars(); ++v) {
    std::vector<Item> rhs;
    if (cls[v] == VarClass::kV1Top) rhs = {Item::var(f.rhs(v).left), Item::var(f.rhs(v).right)};
    if (cls[v] == VarClass::kV1Bot) rhs = {Item::sym(Symbol{v})};
    g.add_rule(std::move(rhs), f.name(v));
  }
  return g;
}

Sslp hor_sslp(const Fslp& f) {
  auto cls = classify(f);
  Sslp g;
  for (VarId v = 0; v < f.num_vars(); ++v) {
    std::vector<Item> rhs;
    if (cls[v] == VarClass::kV0Top && f.rhs(v).op == Op::kHConcat) {
      rhs = {Item::var(f.rhs(v).left), Item::var(f.rhs(v).right)};
    }
    if (cls[v] == VarClass::kV0Bot) rhs = {Item::sym(Symbol{v})};
    g.add_rule(std::move(rhs), f.name(v));
  }
  if (f.has_start()) g.set_start(f.start());
  return g;
}

// ---------------------------------------------------------------------------------------------
// Normal form

namespace {

// Weak normal form: eps, B<C> with B rank 1, a(x), B x C with B, C rank 0.
struct WeakRule {
  enum class Kind : std::uint8_t { kEps, kVCat, kNodeX, kSib };
  Kind kind;
  Label label{};
  VarId left = 0;
  VarId right = 0;
  int rank = 0;
};

class WeakBuilder {
 public:
  VarId eps() {
    if (!eps_) eps_ = add({WeakRule::Kind::kEps, {}, 0, 0, 0});
    return *eps_;
  }
  VarId node_x(Label a) {
    auto it = node_x_.find(a.id);
    if (it != node_x_.end()) return it->second;
    VarId v = add({WeakRule::Kind::kNodeX, a, 0, 0, 1});
    node_x_.emplace(a.id, v);
    return v;
  }
  VarId sib(VarId b, VarId c) { return add({WeakRule::Kind::kSib, {}, b, c, 1}); }
  VarId vcat(VarId b, VarId c) { return add({WeakRule::Kind::kVCat, {}, b, c, rules[c].rank}); }

  std::vector<WeakRule> rules;

 private:
  VarId add(WeakRule r) {
    rules.push_back(r);
    return static_cast<VarId>(rules.size() - 1);
  }

  std::optional<VarId> eps_;
  std::map<std::uint32_t, VarId> node_x_;
};

enum TaskKind : std::uint32_t { kTaskW0 = 0, kTaskLower = 1, kTaskUpper = 2 };

class NormalFormBuilder {
 public:
  explicit NormalFormBuilder(const Fslp& f) : f_(f) {}

  Fslp run() {
    auto rank = validate(f_);
    // Weak normal form.
    std::vector<VarId> to_weak(f_.num_vars());
    VarId roots[] = {f_.start()};
    for (VarId v : topological_order(f_, roots)) {
      const Rhs& r = f_.rhs(v);
      switch (r.op) {
        case Op::kEmpty: to_weak[v] = w_.eps(); break;
        case Op::kParam: to_weak[v] = w_.sib(w_.eps(), w_.eps()); break;
        case Op::kLeaf: to_weak[v] = w_.vcat(w_.node_x(r.label), w_.eps()); break;
        case Op::kNode: to_weak[v] = w_.vcat(w_.node_x(r.label), to_weak[r.left]); break;
        case Op::kNode2:
          to_weak[v] = w_.vcat(w_.node_x(r.label), w_.sib(to_weak[r.left], to_weak[r.right]));
          break;
        case Op::kHConcat:
          if (rank[r.left] == 0) {
            to_weak[v] = w_.vcat(w_.sib(to_weak[r.left], w_.eps()), to_weak[r.right]);
          } else {
            to_weak[v] = w_.vcat(w_.sib(w_.eps(), to_weak[r.right]), to_weak[r.left]);
          }
          break;
        case Op::kVConcat: to_weak[v] = w_.vcat(to_weak[r.left], to_weak[r.right]); break;
      }
    }
    const auto& w = w_.rules;

    // Spine SSLP of the weak form and its a(x)-factorization.
    Sslp spine;
    std::vector<Symbol> sigma1;
    for (VarId v = 0; v < w.size(); ++v) {
      std::vector<Item> rhs;
      if (w[v].kind == WeakRule::Kind::kVCat && w[v].rank == 1) {
        rhs = {spine_item(w[v].left), spine_item(w[v].right)};
      }
      if (w[v].kind == WeakRule::Kind::kNodeX) sigma1.push_back(Symbol{v});
      spine.add_rule(std::move(rhs));
    }
    fact_ = factorize(spine, sigma1);

    // Build the normal-form rules on demand, children first.
    lower_.assign(fact_.grammar.num_vars(), {kUnset, kUnset});
    upper_.assign(fact_.grammar.num_vars(), kUnset);
    w0_.assign(w.size(), kUnset);
    std::vector<std::uint64_t> task_roots{detail::key(kTaskW0, to_weak[f_.start()])};
    auto order = detail::post_order(task_roots, [&](std::uint64_t k, std::vector<std::uint64_t>& out) { deps(k, out); });
    for (std::uint64_t k : order) build(k);

    out_.set_start(w0_[to_weak[f_.start()]]);
    // Carry names over to variables created for exactly one original variable.
    for (VarId v = 0; v < f_.num_vars(); ++v) {
      if (f_.name(v).empty() || rank[v] != 0) continue;
      VarId wv = to_weak[v];
      if (wv < w0_.size() && w0_[wv] != kUnset && out_.name(w0_[wv]).empty() && !named_.count(w0_[wv])) {
        out_.set_name(w0_[wv], f_.name(v));
        named_.insert({w0_[wv], true});
      }
    }
    Fslp result = prune(out_);
    result.set_tag(NormalFormTag::kNormal);
    return result;
  }

 private:
  static constexpr VarId kUnset = 0xFFFFFFFFu;

  Item spine_item(VarId v) const {
    const auto& r = w_.rules[v];
    bool top = r.kind == WeakRule::Kind::kVCat && r.rank == 1;
    return top ? Item::var(v) : Item::sym(Symbol{v});
  }

  bool is_lower(VarId g) const { return fact_.part[g] == Factorization::Part::kLower; }

  void deps(std::uint64_t k, std::vector<std::uint64_t>& out) const {
    const auto& w = w_.rules;
    VarId id = detail::key_id(k);
    switch (detail::key_kind(k)) {
      case kTaskW0: {
        const auto& r = w[id];
        if (r.kind != WeakRule::Kind::kVCat) return;
        out.push_back(detail::key(kTaskW0, r.right));
        const auto& b = w[r.left];
        if (b.kind == WeakRule::Kind::kSib) {
          out.push_back(detail::key(kTaskW0, b.left));
          out.push_back(detail::key(kTaskW0, b.right));
        } else if (b.kind == WeakRule::Kind::kVCat) {
          for (const auto& item : fact_.grammar.rhs(r.left)) {
            if (!item.is_var()) continue;
            out.push_back(detail::key(is_lower(item.id) ? kTaskLower : kTaskUpper, item.id));
          }
        }
        return;
      }
      case kTaskLower: {
        const auto& rhs = fact_.grammar.rhs(id);
        for (const auto& item : rhs) {
          if (item.is_var()) {
            out.push_back(detail::key(kTaskLower, item.id));
          } else {
            const auto& h = w[item.id];
            out.push_back(detail::key(kTaskW0, h.left));
            out.push_back(detail::key(kTaskW0, h.right));
          }
        }
        return;
      }
      case kTaskUpper: {
        for (const auto& item : fact_.grammar.rhs(id)) {
          if (item.is_var()) out.push_back(detail::key(is_lower(item.id) ? kTaskLower : kTaskUpper, item.id));
        }
        return;
      }
    }
  }

  VarId eps() {
    if (!eps_) eps_ = out_.add(Rhs::empty());
    return *eps_;
  }

  bool is_eps(VarId v) const { return eps_ && v == *eps_; }

  VarId h(VarId x, VarId y) {
    if (is_eps(x)) return y;
    if (is_eps(y)) return x;
    return out_.add(Rhs::h(x, y));
  }

  // C_l A0 C_r for a lower variable C.
  VarId wrap(VarId lower, VarId inner) { return h(h(lower_[lower].first, inner), lower_[lower].second); }

  void build(std::uint64_t k) {
    const auto& w = w_.rules;
    VarId id = detail::key_id(k);
    switch (detail::key_kind(k)) {
      case kTaskW0: {
        const auto& r = w[id];
        if (r.kind == WeakRule::Kind::kEps) {
          w0_[id] = eps();
          return;
        }
        VarId a0 = w0_[r.right];
        const auto& b = w[r.left];
        switch (b.kind) {
          case WeakRule::Kind::kNodeX: w0_[id] = out_.add(Rhs::node(b.label, a0)); return;
          case WeakRule::Kind::kSib: w0_[id] = h(h(w0_[b.left], a0), w0_[b.right]); return;
          case WeakRule::Kind::kVCat: {
            const auto& d = fact_.decomposition[r.left];
            if (!d.last) {
              w0_[id] = wrap(d.left, a0);
              return;
            }
            Label a = w[d.last->value].label;
            VarId inner = out_.add(Rhs::node(a, wrap(d.right, a0)));
            if (d.middle) inner = out_.add(Rhs::v(upper_[*d.middle], inner));
            w0_[id] = wrap(d.left, inner);
            return;
          }
          case WeakRule::Kind::kEps: break;
        }
        throw Error(ErrorKind::kInvalidArgument, "internal: malformed weak normal form");
      }
      case kTaskLower: {
        const auto& rhs = fact_.grammar.rhs(id);
        if (rhs.empty()) {
          lower_[id] = {eps(), eps()};
        } else if (rhs.size() == 1) {
          const auto& hs = w[rhs[0].id];
          lower_[id] = {w0_[hs.left], w0_[hs.right]};
        } else {
          const auto& b = lower_[rhs[0].id];
          const auto& c = lower_[rhs[1].id];
          VarId l = h(b.first, c.first);
          lower_[id] = {l, h(c.second, b.second)};
        }
        return;
      }
      case kTaskUpper: {
        const auto& rhs = fact_.grammar.rhs(id);
        if (!rhs[0].is_var()) {
          const auto& c = lower_[rhs[1].id];
          upper_[id] = out_.add(Rhs::node2(w[rhs[0].id].label, c.first, c.second));
        } else {
          upper_[id] = out_.add(Rhs::v(upper_[rhs[0].id], upper_[rhs[1].id]));
        }
        return;
      }
    }
  }

  const Fslp& f_;
  WeakBuilder w_;
  Factorization fact_;
  Fslp out_;
  std::optional<VarId> eps_;
  std::vector<std::pair<VarId, VarId>> lower_;
  std::vector<VarId> upper_;
  std::vector<VarId> w0_;
  std::map<VarId, bool> named_;
};

}  // namespace

Fslp normal_form(const Fslp& f) {
  Fslp pruned = prune(f);
  if (check_normal_form(pruned).empty()) {
    if (pruned.tag() == NormalFormTag::kGeneral) pruned.set_tag(NormalFormTag::kNormal);
    return pruned;
  }
  return NormalFormBuilder(pruned).run();
}

// ---------------------------------------------------------------------------------------------
// Strong normal form

Fslp strong_normal_form(const Fslp& input) {
  Fslp f = normal_form(input);
  auto cls = classify(f);
  auto sizes = value_sizes(f);
  auto maxd = max_spine_sizes(f, cls, sizes);
  Sslp spine = spine_sslp(f);
  auto slens = lengths(spine);
  const std::size_t n0 = f.num_vars();

  // last[v]: for every spine symbol D of v, the position of its last occurrence.
  std::map<VarId, std::map<VarId, BigInt>> last;
  auto last_positions = [&](VarId root) -> const std::map<VarId, BigInt>& {
    VarId roots[] = {root};
    for (VarId v : reachable_order(spine, roots)) {
      if (last.count(v)) continue;
      std::map<VarId, BigInt> m;
      if (cls[v] == VarClass::kV1Bot) {
        m.emplace(v, 0);
      } else {
        const Rhs& r = f.rhs(v);
        m = last.at(r.left);
        for (const auto& [d, p] : last.at(r.right)) m[d] = slens[r.left] + p;
      }
      last.emplace(v, std::move(m));
    }
    return last.at(root);
  };

  // FSLP variable for a spine SSLP variable created by factor extraction.
  std::map<VarId, VarId> extracted;
  auto to_fslp = [&](const Item& item) -> VarId {
    if (!item.is_var()) return item.id;
    if (item.id < n0) return item.id;
    return extracted.at(item.id);
  };
  auto materialize = [&](VarId first_new) {
    for (VarId s = first_new; s < spine.num_vars(); ++s) {
      const auto& rhs = spine.rhs(s);
      VarId acc = to_fslp(rhs[0]);
      for (std::size_t i = 1; i < rhs.size(); ++i) acc = f.add(Rhs::v(acc, to_fslp(rhs[i])));
      extracted.emplace(s, acc);
    }
  };

  for (VarId a = 0; a < n0; ++a) {
    const Rhs r = f.rhs(a);
    if (cls[a] != VarClass::kV0Bot || r.op != Op::kVConcat || cls[r.left] != VarClass::kV1Top) continue;
    if (sizes[r.right] >= maxd[r.left] - 1) continue;
    const VarId b = r.left;
    std::vector<std::pair<BigInt, VarId>> occ;
    for (const auto& [d, p] : last_positions(b)) occ.emplace_back(p, d);
    std::sort(occ.begin(), occ.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    const std::size_t m = occ.size();
    // factors[i] spans the positions strictly between the last occurrences of D_{i+1} and D_i.
    std::vector<std::optional<VarId>> factors(m);
    VarId first_new = static_cast<VarId>(spine.num_vars());
    for (std::size_t i = 0; i < m; ++i) {
      BigInt from = i + 1 < m ? occ[i + 1].first + 1 : BigInt(0);
      factors[i] = extract_factor(spine, slens, b, from, occ[i].first);
    }
    materialize(first_new);
    VarId prev = r.right;
    for (std::size_t i = 0; i < m; ++i) {
      Rhs c = Rhs::v(occ[i].second, prev);
      bool is_last = i + 1 == m;
      if (factors[i]) {
        VarId ci = f.add(c);
        Rhs ai = Rhs::v(to_fslp(Item::var(*factors[i])), ci);
        if (is_last) {
          f.set_rhs(a, ai);
        } else {
          prev = f.add(ai);
        }
      } else if (is_last) {
        f.set_rhs(a, c);
      } else {
        prev = f.add(c);
      }
    }
  }
  f.set_tag(NormalFormTag::kStrongNormal);
  return f;
}

}  // namespace forestslp
