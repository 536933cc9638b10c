#include "forestslp/sslp.hpp"

#include <algorithm>
#include <unordered_map>

#include "forestslp/error.hpp"
#include "forestslp/grammar_text.hpp"
#include "forestslp/recompression.hpp"

namespace forestslp {

// ---------------------------------------------------------------------------------------------
// Sslp

VarId Sslp::add_rule(std::vector<Item> rhs, std::string name) {
  rules_.push_back(std::move(rhs));
  names_.push_back(std::move(name));
  return static_cast<VarId>(rules_.size() - 1);
}

const std::string& Sslp::name(VarId var) const { return names_.at(var); }

void Sslp::set_name(VarId var, std::string name) { names_.at(var) = std::move(name); }

VarId Sslp::absorb(const Sslp& other) {
  auto offset = static_cast<VarId>(rules_.size());
  for (std::size_t v = 0; v < other.rules_.size(); ++v) {
    std::vector<Item> rhs = other.rules_[v];
    for (auto& item : rhs) {
      if (item.is_var()) item.id += offset;
    }
    rules_.push_back(std::move(rhs));
    names_.push_back({});
  }
  return offset;
}

// ---------------------------------------------------------------------------------------------
// Traversals

namespace {

// Iterative post-order DFS from the given roots. Throws on cycles.
std::vector<VarId> post_order(const Sslp& g, std::span<const VarId> roots) {
  enum : std::uint8_t { kWhite, kGrey, kBlack };
  std::vector<std::uint8_t> color(g.num_vars(), kWhite);
  std::vector<VarId> out;
  std::vector<std::pair<VarId, std::size_t>> stack;
  for (VarId root : roots) {
    if (root >= g.num_vars()) throw Error(ErrorKind::kUndefinedVariable, "variable id out of range");
    if (color[root] != kWhite) continue;
    color[root] = kGrey;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      const auto& rhs = g.rhs(v);
      if (i == rhs.size()) {
        color[v] = kBlack;
        out.push_back(v);
        stack.pop_back();
        continue;
      }
      const Item item = rhs[i++];
      if (!item.is_var()) continue;
      if (item.id >= g.num_vars()) throw Error(ErrorKind::kUndefinedVariable, "variable id out of range");
      if (color[item.id] == kGrey) {
        throw Error(ErrorKind::kCycle, "cyclic reference through variable " + std::to_string(item.id));
      }
      if (color[item.id] == kWhite) {
        color[item.id] = kGrey;
        stack.emplace_back(item.id, 0);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<VarId> topological_order(const Sslp& g) {
  std::vector<VarId> all(g.num_vars());
  for (VarId v = 0; v < all.size(); ++v) all[v] = v;
  return post_order(g, all);
}

std::vector<VarId> reachable_order(const Sslp& g, std::span<const VarId> roots) { return post_order(g, roots); }

std::size_t size(const Sslp& g) {
  std::size_t total = 0;
  for (VarId v = 0; v < g.num_vars(); ++v) {
    const auto& rhs = g.rhs(v);
    if (rhs.empty()) {
      total += 1;
      continue;
    }
    total += rhs.size() - 1;
    for (const auto& item : rhs) total += item.is_var() ? 0 : 1;
  }
  return total;
}

std::vector<BigInt> lengths(const Sslp& g) {
  std::vector<BigInt> len(g.num_vars());
  for (VarId v : topological_order(g)) {
    BigInt sum = 0;
    for (const auto& item : g.rhs(v)) sum += item.is_var() ? len[item.id] : BigInt(1);
    len[v] = std::move(sum);
  }
  return len;
}

BigInt length(const Sslp& g, VarId var) {
  VarId roots[] = {var};
  std::vector<BigInt> len(g.num_vars());
  for (VarId v : reachable_order(g, roots)) {
    BigInt sum = 0;
    for (const auto& item : g.rhs(v)) sum += item.is_var() ? len[item.id] : BigInt(1);
    len[v] = std::move(sum);
  }
  return len[var];
}

std::vector<Symbol> eval(const Sslp& g, VarId var, std::size_t cap) {
  BigInt len = length(g, var);
  if (len > cap) {
    throw Error(ErrorKind::kExplosionGuard, "value of length " + len.str() + " exceeds the expansion cap");
  }
  std::vector<Symbol> out;
  out.reserve(static_cast<std::size_t>(len));
  std::vector<std::pair<VarId, std::size_t>> stack{{var, 0}};
  while (!stack.empty()) {
    auto& [v, i] = stack.back();
    const auto& rhs = g.rhs(v);
    if (i == rhs.size()) {
      stack.pop_back();
      continue;
    }
    const Item item = rhs[i++];
    if (item.is_var()) {
      stack.emplace_back(item.id, 0);
    } else {
      out.push_back(item.symbol());
    }
  }
  return out;
}

Symbol symbol_at(const Sslp& g, std::span<const BigInt> lens, VarId var, BigInt pos) {
  if (pos < 0 || pos >= lens[var]) throw Error(ErrorKind::kInvalidArgument, "position out of range");
  for (;;) {
    bool descended = false;
    for (const auto& item : g.rhs(var)) {
      if (!item.is_var()) {
        if (pos == 0) return item.symbol();
        pos -= 1;
        continue;
      }
      if (pos < lens[item.id]) {
        var = item.id;
        descended = true;
        break;
      }
      pos -= lens[item.id];
    }
    if (!descended) throw Error(ErrorKind::kInvalidArgument, "inconsistent lengths");
  }
}

// ---------------------------------------------------------------------------------------------
// Factor extraction

namespace {

BigInt item_length(const Item& item, const std::vector<BigInt>& lens) {
  return item.is_var() ? lens[item.id] : BigInt(1);
}

VarId add_with_length(Sslp& g, std::vector<BigInt>& lens, std::vector<Item> rhs) {
  BigInt sum = 0;
  for (const auto& item : rhs) sum += item_length(item, lens);
  VarId v = g.add_rule(std::move(rhs));
  lens.push_back(std::move(sum));
  return v;
}

// Rules for the first k symbols (prefix) or last k symbols (suffix) of var, 0 < k < |var|.
// Walks one root-to-leaf path; each level contributes one rule.
std::optional<Item> cut(Sslp& g, std::vector<BigInt>& lens, VarId var, BigInt k, bool prefix) {
  std::vector<std::vector<Item>> levels;
  for (;;) {
    if (k == 0) break;
    if (k == lens[var]) {
      levels.push_back({Item::var(var)});
      break;
    }
    const std::vector<Item> rhs = g.rhs(var);
    std::vector<Item> level;
    std::optional<VarId> next;
    auto visit = [&](const Item& item) {
      if (next || k == 0) return false;
      BigInt len = item_length(item, lens);
      if (len <= k) {
        level.push_back(item);
        k -= len;
        return true;
      }
      next = item.id;  // partial item is always a variable
      return false;
    };
    if (prefix) {
      for (const auto& item : rhs) {
        if (!visit(item)) break;
      }
    } else {
      for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) {
        if (!visit(*it)) break;
      }
      std::reverse(level.begin(), level.end());
    }
    levels.push_back(std::move(level));
    if (!next) break;
    var = *next;
  }
  // Assemble bottom-up; a level's tail (prefix) or head (suffix) is the next level's rule.
  std::optional<Item> below;
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    std::vector<Item> rhs = std::move(*it);
    if (below) {
      if (prefix) {
        rhs.push_back(*below);
      } else {
        rhs.insert(rhs.begin(), *below);
      }
    }
    if (rhs.empty()) {
      below.reset();
    } else if (rhs.size() == 1) {
      below = rhs[0];
    } else {
      below = Item::var(add_with_length(g, lens, std::move(rhs)));
    }
  }
  return below;
}

}  // namespace

std::optional<VarId> extract_factor(Sslp& g, std::vector<BigInt>& lens, VarId var, const BigInt& from_in,
                                    const BigInt& to_in) {
  BigInt from = from_in;
  BigInt to = to_in;
  if (from < 0 || to > lens[var] || from > to) throw Error(ErrorKind::kInvalidArgument, "factor out of range");
  if (from == to) return std::nullopt;
  // Descend while the factor lies inside a single item.
  for (;;) {
    if (from == 0 && to == lens[var]) return var;
    const std::vector<Item> rhs = g.rhs(var);
    BigInt offset = 0;
    std::size_t first = 0;
    while (offset + item_length(rhs[first], lens) <= from) offset += item_length(rhs[first++], lens);
    BigInt first_offset = offset;
    std::size_t last = first;
    while (offset + item_length(rhs[last], lens) < to) offset += item_length(rhs[last++], lens);
    BigInt last_offset = offset;
    if (first == last) {
      if (!rhs[first].is_var()) return add_with_length(g, lens, {rhs[first]});
      var = rhs[first].id;
      from -= first_offset;
      to -= first_offset;
      continue;
    }
    std::vector<Item> out;
    const Item& head = rhs[first];
    BigInt skip = from - first_offset;
    if (skip == 0) {
      out.push_back(head);
    } else if (auto s = cut(g, lens, head.id, lens[head.id] - skip, false)) {
      out.push_back(*s);
    }
    for (std::size_t i = first + 1; i < last; ++i) out.push_back(rhs[i]);
    const Item& tail = rhs[last];
    BigInt keep = to - last_offset;
    if (keep == item_length(tail, lens)) {
      out.push_back(tail);
    } else if (auto p = cut(g, lens, tail.id, keep, true)) {
      out.push_back(*p);
    }
    if (out.size() == 1 && out[0].is_var()) return out[0].id;
    return add_with_length(g, lens, std::move(out));
  }
}

// ---------------------------------------------------------------------------------------------
// Factorization

namespace {

constexpr VarId kNone = 0xFFFFFFFFu;

struct FactorAttrs {
  VarId l = kNone;  // lower, kNone for empty
  VarId m = kNone;  // upper, kNone for empty
  std::optional<Symbol> s;
  VarId r = kNone;  // lower, kNone for empty
};

class Factorizer {
 public:
  Factorizer(const Sslp& g, std::span<const Symbol> sigma1) : g_(g) {
    for (Symbol s : sigma1) sigma1_.emplace(s.value, true);
  }

  Factorization run() {
    const std::size_t n = g_.num_vars();
    for (VarId v = 0; v < n; ++v) {
      out_.grammar.add_rule({}, g_.name(v));
      out_.part.push_back(Factorization::Part::kOriginal);
    }
    if (g_.start()) out_.grammar.set_start(*g_.start());
    std::vector<FactorAttrs> attrs(n);
    for (VarId v : topological_order(g_)) {
      FactorAttrs acc;  // attributes of the empty string
      for (const auto& item : g_.rhs(v)) {
        acc = combine(acc, item.is_var() ? attrs[item.id] : leaf(item.symbol()));
      }
      attrs[v] = acc;
    }
    out_.decomposition.resize(n);
    for (VarId v = 0; v < n; ++v) {
      const FactorAttrs& a = attrs[v];
      Factorization::Decomposition d{lower_or_eps(a.l), std::nullopt, std::nullopt, lower_or_eps(a.r)};
      std::vector<Item> rhs{Item::var(d.left)};
      if (a.s) {
        if (a.m != kNone) {
          d.middle = a.m;
          rhs.push_back(Item::var(a.m));
        }
        d.last = a.s;
        rhs.push_back(Item::sym(*a.s));
        rhs.push_back(Item::var(d.right));
      }
      out_.grammar.set_rule(v, std::move(rhs));
      out_.decomposition[v] = d;
    }
    return std::move(out_);
  }

 private:
  bool in_sigma1(Symbol s) const { return sigma1_.count(s.value) != 0; }

  VarId add(std::vector<Item> rhs, Factorization::Part part) {
    out_.part.push_back(part);
    return out_.grammar.add_rule(std::move(rhs));
  }

  VarId lower_or_eps(VarId l) {
    if (l != kNone) return l;
    if (eps_ == kNone) eps_ = add({}, Factorization::Part::kLower);
    return eps_;
  }

  VarId concat(VarId x, VarId y, Factorization::Part part) {
    if (x == kNone) return y;
    if (y == kNone) return x;
    return add({Item::var(x), Item::var(y)}, part);
  }

  FactorAttrs leaf(Symbol s) {
    FactorAttrs a;
    if (in_sigma1(s)) {
      a.s = s;
      return a;
    }
    auto [it, inserted] = lower_leaf_.emplace(s.value, kNone);
    if (inserted) it->second = add({Item::sym(s)}, Factorization::Part::kLower);
    a.l = it->second;
    return a;
  }

  FactorAttrs combine(const FactorAttrs& b, const FactorAttrs& c) {
    using P = Factorization::Part;
    FactorAttrs a;
    if (!b.s) {
      a.l = concat(b.l, c.l, P::kLower);
      a.m = c.m;
      a.s = c.s;
      a.r = c.r;
    } else if (!c.s) {
      a.l = b.l;
      a.m = b.m;
      a.s = b.s;
      a.r = concat(b.r, c.l, P::kLower);
    } else {
      VarId lower = lower_or_eps(concat(b.r, c.l, P::kLower));
      VarId upper = add({Item::sym(*b.s), Item::var(lower)}, P::kUpper);
      a.l = b.l;
      a.m = concat(concat(b.m, upper, P::kUpper), c.m, P::kUpper);
      a.s = c.s;
      a.r = c.r;
    }
    return a;
  }

  const Sslp& g_;
  std::unordered_map<std::uint32_t, bool> sigma1_;
  std::unordered_map<std::uint32_t, VarId> lower_leaf_;
  VarId eps_ = kNone;
  Factorization out_;
};

}  // namespace

Factorization factorize(const Sslp& g, std::span<const Symbol> sigma1) { return Factorizer(g, sigma1).run(); }

std::string check_factorization(const Factorization& f, std::span<const Symbol> sigma1) {
  using P = Factorization::Part;
  auto in1 = [&](const Item& item) {
    return !item.is_var() && std::find(sigma1.begin(), sigma1.end(), item.symbol()) != sigma1.end();
  };
  auto in2 = [&](const Item& item) { return !item.is_var() && !in1(item); };
  auto is = [&](const Item& item, P part) { return item.is_var() && f.part.at(item.id) == part; };
  for (VarId v = 0; v < f.grammar.num_vars(); ++v) {
    const auto& rhs = f.grammar.rhs(v);
    bool ok = false;
    switch (f.part[v]) {
      case P::kOriginal:
        ok = (rhs.size() == 1 && is(rhs[0], P::kLower)) ||
             (rhs.size() == 3 && is(rhs[0], P::kLower) && in1(rhs[1]) && is(rhs[2], P::kLower)) ||
             (rhs.size() == 4 && is(rhs[0], P::kLower) && is(rhs[1], P::kUpper) && in1(rhs[2]) &&
              is(rhs[3], P::kLower));
        break;
      case P::kUpper:
        ok = rhs.size() == 2 &&
             ((in1(rhs[0]) && is(rhs[1], P::kLower)) || (is(rhs[0], P::kUpper) && is(rhs[1], P::kUpper)));
        break;
      case P::kLower:
        ok = rhs.empty() || (rhs.size() == 1 && in2(rhs[0])) ||
             (rhs.size() == 2 && is(rhs[0], P::kLower) && is(rhs[1], P::kLower));
        break;
    }
    if (!ok) return "variable " + std::to_string(v) + " violates its factorization shape";
  }
  return {};
}

// ---------------------------------------------------------------------------------------------
// Sorting

SortedSslp sort(const Sslp& g, VarId var, std::span<const Symbol> ascending) {
  std::unordered_map<std::uint32_t, std::size_t> rank;
  for (std::size_t i = 0; i < ascending.size(); ++i) rank.emplace(ascending[i].value, i);
  const std::size_t k = ascending.size();
  VarId roots[] = {var};
  const auto order = reachable_order(g, roots);

  // occurs[v][i]: symbol ascending[i] occurs in the value of v.
  std::vector<std::vector<bool>> occurs(g.num_vars());
  for (VarId v : order) {
    std::vector<bool> mask(k, false);
    for (const auto& item : g.rhs(v)) {
      if (item.is_var()) {
        for (std::size_t i = 0; i < k; ++i) mask[i] = mask[i] || occurs[item.id][i];
      } else {
        auto it = rank.find(item.id);
        if (it == rank.end()) {
          throw Error(ErrorKind::kInvalidArgument, "symbol " + std::to_string(item.id) + " missing from the order");
        }
        mask[it->second] = true;
      }
    }
    occurs[v] = std::move(mask);
  }

  SortedSslp out;
  // copy[v][i]: variable deriving ascending[i]^{|value(v)|_i}.
  std::vector<std::vector<VarId>> copy(g.num_vars());
  for (VarId v : order) {
    copy[v].assign(k, kNone);
    for (std::size_t i = 0; i < k; ++i) {
      if (!occurs[v][i]) continue;
      std::vector<Item> rhs;
      for (const auto& item : g.rhs(v)) {
        if (item.is_var()) {
          if (occurs[item.id][i]) rhs.push_back(Item::var(copy[item.id][i]));
        } else if (rank.at(item.id) == i) {
          rhs.push_back(item);
        }
      }
      copy[v][i] = out.grammar.add_rule(std::move(rhs));
    }
  }
  std::vector<Item> start;
  for (std::size_t i = 0; i < k; ++i) {
    if (occurs[var][i]) start.push_back(Item::var(copy[var][i]));
  }
  if (!start.empty()) {
    out.start = out.grammar.add_rule(std::move(start));
    out.grammar.set_start(*out.start);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Length-lexicographic comparison

std::strong_ordering compare_llex(const Sslp& g1, VarId a1, const Sslp& g2, VarId a2, const CompareOptions& options) {
  Sslp g = g1;
  VarId offset = g.absorb(g2);
  auto lens = lengths(g);
  return compare_llex_in(g, lens, a1, a2 + offset, options);
}

namespace {

bool symbol_less(const CompareOptions& options, Symbol x, Symbol y) {
  return options.less ? options.less(x, y) : x < y;
}

std::strong_ordering order_of(const CompareOptions& options, Symbol x, Symbol y) {
  if (symbol_less(options, x, y)) return std::strong_ordering::less;
  if (symbol_less(options, y, x)) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace

std::strong_ordering compare_llex_in(const Sslp& g_in, std::span<const BigInt> lens_in, VarId a, VarId b,
                                     const CompareOptions& options) {
  if (a == b) return std::strong_ordering::equal;
  const BigInt& la = lens_in[a];
  const BigInt& lb = lens_in[b];
  if (la != lb) return la < lb ? std::strong_ordering::less : std::strong_ordering::greater;
  if (la <= options.expand_below) {
    auto x = eval(g_in, a);
    auto y = eval(g_in, b);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] != y[i]) return order_of(options, x[i], y[i]);
    }
    return std::strong_ordering::equal;
  }
  {
    VarId roots[] = {a, b};
    auto ids = canonical_ids(g_in, roots);
    if (ids[0] == ids[1]) return std::strong_ordering::equal;
  }
  // Longest common prefix by a k-ary search over prefix lengths; prefixes of length lo are equal,
  // prefixes of length hi are not.
  Sslp g = g_in;
  std::vector<BigInt> lens(lens_in.begin(), lens_in.end());
  BigInt lo = 0;
  BigInt hi = la;
  constexpr int kProbes = 8;
  while (hi - lo > 1) {
    std::vector<BigInt> probes;
    for (int i = 1; i <= kProbes; ++i) {
      BigInt p = lo + (hi - lo) * i / (kProbes + 1);
      if (p > lo && p < hi && (probes.empty() || probes.back() != p)) probes.push_back(p);
    }
    std::vector<VarId> roots;
    for (const auto& p : probes) {
      roots.push_back(*extract_factor(g, lens, a, 0, p));
      roots.push_back(*extract_factor(g, lens, b, 0, p));
    }
    auto ids = canonical_ids(g, roots);
    BigInt new_lo = lo;
    BigInt new_hi = hi;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      if (ids[2 * i] == ids[2 * i + 1]) {
        new_lo = probes[i];
      } else {
        new_hi = probes[i];
        break;
      }
    }
    lo = new_lo;
    hi = new_hi;
  }
  // The first mismatch is at position lo.
  return order_of(options, symbol_at(g, lens, a, lo), symbol_at(g, lens, b, lo));
}

// ---------------------------------------------------------------------------------------------
// Text format

Symbol SymbolTable::intern(std::string_view name) {
  auto [it, inserted] = index_.emplace(std::string(name), static_cast<std::uint32_t>(names_.size()));
  if (inserted) names_.emplace_back(name);
  return Symbol{it->second};
}

Sslp parse_sslp(std::string_view text, SymbolTable& symbols) {
  const GrammarDocument doc = read_grammar_document(text);
  const NameIndex index(doc);
  Sslp g;
  for (const auto& rule : doc.rules) g.add_rule({}, rule.lhs);
  for (std::size_t v = 0; v < doc.rules.size(); ++v) {
    std::vector<Item> rhs;
    for (const auto& tok : doc.rules[v].rhs) {
      rhs.push_back(tok.quoted ? Item::sym(symbols.intern(tok.text)) : Item::var(index.at(tok.text, doc.rules[v].line)));
    }
    g.set_rule(static_cast<VarId>(v), std::move(rhs));
  }
  if (!doc.rules.empty()) g.set_start(index.start(doc));
  topological_order(g);
  return g;
}

std::string print_sslp(const Sslp& g, const SymbolTable& symbols) {
  std::vector<std::string> raw(g.num_vars());
  for (VarId v = 0; v < g.num_vars(); ++v) raw[v] = g.name(v);
  const auto names = printable_names(raw);
  std::string out;
  if (g.start()) out += "start " + names[*g.start()] + "\n";
  for (VarId v = 0; v < g.num_vars(); ++v) {
    out += names[v] + " ->";
    for (const auto& item : g.rhs(v)) {
      out += ' ';
      out += item.is_var() ? names[item.id] : quote_terminal(symbols.name(item.symbol()));
    }
    out += '\n';
  }
  return out;
}

}  // namespace forestslp
