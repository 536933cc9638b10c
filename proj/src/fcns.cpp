#include "forestslp/fcns.hpp"

#include <optional>

#include "forestslp/error.hpp"

namespace forestslp {

using Op = Rhs::Op;

namespace {

std::string var_label(const Fslp& f, VarId v) {
  return f.name(v).empty() ? "variable " + std::to_string(v) : "variable '" + f.name(v) + "'";
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Shape checker

std::string check_tslp(const Fslp& t) {
  if (!t.has_start()) return "no start variable";
  try {
    validate(t);
  } catch (const Error& e) {
    return e.what();
  }
  auto is_eps = [&](VarId v) { return t.rhs(v).op == Op::kEmpty; };
  const auto rank = validate(t);
  std::vector<VarId> stack{t.start()};
  std::vector<bool> seen(t.num_vars(), false);
  seen[t.start()] = true;
  auto visit = [&](VarId v) {
    if (!seen[v]) {
      seen[v] = true;
      stack.push_back(v);
    }
  };
  while (!stack.empty()) {
    VarId v = stack.back();
    stack.pop_back();
    const Rhs& r = t.rhs(v);
    auto bad = [&](const std::string& why) { return var_label(t, v) + ": " + why; };
    switch (r.op) {
      case Op::kLeaf: break;
      case Op::kNode: {
        if (is_eps(r.left)) break;
        const Rhs& h = t.rhs(r.left);
        if (h.op != Op::kHConcat) return bad("a(B) is not a TSLP shape");
        for (VarId c : {h.left, h.right}) {
          if (rank[c] != 0) return bad("a(B C) needs rank-0 children");
          visit(c);
        }
        break;
      }
      case Op::kNode2:
        if (is_eps(r.left) == is_eps(r.right)) return bad("a(B x C) needs exactly one empty side");
        visit(is_eps(r.left) ? r.right : r.left);
        break;
      case Op::kVConcat:
        visit(r.left);
        visit(r.right);
        break;
      default: return bad("not a TSLP shape");
    }
  }
  return {};
}

// ---------------------------------------------------------------------------------------------
// FSLP -> fcns TSLP
//
// On the normal form, for A in V0-bottom or V1 chop(A) derives fcns of the forest below the
// root of A (with the parameter standing for fcns(t sibl(A)) when A has rank 1), and cont(A)
// for A in V0 is the context fcns(A x). cont of an empty forest is the identity context and is
// represented by nullopt so that no rule x is needed; the same holds for chop(a(x C)) = x.

namespace {

class TslpBuilder {
 public:
  explicit TslpBuilder(const Fslp& nf) : f_(nf), cls_(classify(nf)) {}

  Fslp run() {
    const std::size_t n = f_.num_vars();
    chop_.assign(n, std::nullopt);
    cont_.assign(n, std::nullopt);
    sibl_.assign(n, 0);
    alpha_.assign(n, Label{});
    for (VarId v : topological_order(f_)) {
      const Rhs& r = f_.rhs(v);
      switch (cls_[v]) {
        case VarClass::kV0Top:
          if (r.op == Op::kHConcat) cont_[v] = compose(cont_[r.left], cont_[r.right]);
          break;
        case VarClass::kV0Bot:
          if (r.op == Op::kNode) {
            alpha_[v] = r.label;
            chop_[v] = apply(cont_[r.left], bot());
          } else {
            alpha_[v] = alpha_[r.left];
            chop_[v] = chop_of_vconcat(r);
          }
          cont_[v] = out_.add(Rhs::node2(alpha_[v], *chop_[v], eps()));
          break;
        case VarClass::kV1Top:
          alpha_[v] = alpha_[r.left];
          sibl_[v] = sibl_[r.right];
          chop_[v] = chop_of_vconcat(r);
          break;
        case VarClass::kV1Bot:
          alpha_[v] = r.label;
          sibl_[v] = r.right;
          chop_[v] = cont_[r.left];
          break;
      }
    }
    out_.set_start(apply(cont_[f_.start()], bot()));
    out_.set_name(out_.start(), f_.name(f_.start()));
    return prune(out_);
  }

 private:
  // chop(B<C>) = chop(B)<alpha_C(chop(C) R)> with R = cont(sibl(B))<bottom>.
  std::optional<VarId> chop_of_vconcat(const Rhs& r) {
    const VarId b = r.left, c = r.right;
    const VarId rest = apply(cont_[sibl_[b]], bot());
    VarId below;
    if (cls_[c] == VarClass::kV0Bot) {
      below = out_.add(Rhs::node(alpha_[c], out_.add(Rhs::h(*chop_[c], rest))));
      return apply(chop_[b], below);
    }
    below = out_.add(Rhs::node2(alpha_[c], eps(), rest));
    return compose(chop_[b], compose(below, chop_[c]));
  }

  VarId apply(std::optional<VarId> ctx, VarId arg) { return ctx ? out_.add(Rhs::v(*ctx, arg)) : arg; }

  std::optional<VarId> compose(std::optional<VarId> outer, std::optional<VarId> inner) {
    if (!outer) return inner;
    if (!inner) return outer;
    return out_.add(Rhs::v(*outer, *inner));
  }

  VarId bot() {
    if (!bot_) bot_ = out_.add(Rhs::leaf(kBottom));
    return *bot_;
  }
  VarId eps() {
    if (!eps_) eps_ = out_.add(Rhs::empty());
    return *eps_;
  }

  const Fslp& f_;
  std::vector<VarClass> cls_;
  std::vector<std::optional<VarId>> chop_;
  std::vector<std::optional<VarId>> cont_;
  std::vector<VarId> sibl_;
  std::vector<Label> alpha_;
  std::optional<VarId> bot_, eps_;
  Fslp out_;
};

}  // namespace

Fslp fslp_to_fcns_tslp(const Fslp& f) {
  validate(f);
  for (VarId v : topological_order(f, std::vector<VarId>{f.start()})) {
    const Rhs& r = f.rhs(v);
    bool labelled = r.op == Op::kLeaf || r.op == Op::kNode || r.op == Op::kNode2;
    if (labelled && r.label == kBottom) {
      throw Error(ErrorKind::kInvalidArgument, var_label(f, v) + ": the input must not use the bottom label");
    }
  }
  return TslpBuilder(normal_form(f)).run();
}

// ---------------------------------------------------------------------------------------------
// fcns TSLP -> FSLP

Fslp fcns_tslp_to_fslp(const Fslp& t) {
  validate(t);
  const Fslp nf = normal_form(t);
  const auto cls = classify(nf);
  const std::size_t n = nf.num_vars();
  auto fail = [&](VarId v, const std::string& why) {
    throw Error(ErrorKind::kNotAnFcnsImage, var_label(nf, v) + ": " + why);
  };

  // hor(A) for every V0 variable; an fcns image never needs more than two entries.
  std::vector<std::vector<VarId>> hor(n);
  for (VarId v : topological_order(nf)) {
    const Rhs& r = nf.rhs(v);
    if (cls[v] == VarClass::kV0Bot) hor[v] = {v};
    if (cls[v] != VarClass::kV0Top || r.op != Op::kHConcat) continue;
    if (hor[r.left].size() + hor[r.right].size() > 2) fail(v, "more than two siblings in a binary tree");
    hor[v] = hor[r.left];
    hor[v].insert(hor[v].end(), hor[r.right].begin(), hor[r.right].end());
  }

  Fslp out;
  for (VarId v = 0; v < n; ++v) out.add(Rhs::empty(), nf.name(v));
  std::optional<VarId> x;
  auto param = [&] {
    if (!x) x = out.add(Rhs::param());
    return *x;
  };
  for (VarId v = 0; v < n; ++v) {
    const Rhs& r = nf.rhs(v);
    if (cls[v] == VarClass::kV0Top) continue;
    if (r.op == Op::kVConcat) {
      out.set_rhs(v, Rhs::v(r.left, r.right));
    } else if (r.op == Op::kNode) {
      const auto& kids = hor[r.left];
      if (r.label == kBottom) {
        if (!kids.empty()) fail(v, "bottom label on an inner node");
      } else {
        if (kids.size() != 2) fail(v, "a node needs exactly two children");
        out.set_rhs(v, Rhs::h(out.add(Rhs::node(r.label, kids[0])), kids[1]));
      }
    } else if (r.op == Op::kNode2) {
      if (r.label == kBottom) fail(v, "bottom label on an inner node");
      if (hor[r.left].size() + hor[r.right].size() != 1) fail(v, "a node needs exactly two children");
      if (hor[r.left].size() == 1) {
        out.set_rhs(v, Rhs::h(out.add(Rhs::node(r.label, hor[r.left][0])), param()));
      } else {
        out.set_rhs(v, Rhs::h(out.add(Rhs::node(r.label, param())), hor[r.right][0]));
      }
    }
  }
  const auto& top = hor[nf.start()];
  if (top.size() != 1) fail(nf.start(), "the value is not a single binary tree");
  out.set_start(top[0]);
  return prune(out);
}

}  // namespace forestslp
