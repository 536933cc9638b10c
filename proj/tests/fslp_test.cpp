#include <random>

#include "doctest.h"
#include "forestslp/error.hpp"
#include "forestslp/fslp.hpp"
#include "constants.hpp"
#include "oracles.hpp"

using namespace forestslp;
using namespace testing_support;

namespace {

std::string repeat(const std::string& s, std::size_t k, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < k; ++i) out += (i ? sep : "") + s;
  return out;
}

// Expected value of Example 3.2 as text.
std::string example_3_2_text(int n) {
  std::string as = repeat("a", std::size_t{1} << n);
  std::string t = "c";
  for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) t = "b(" + as + " " + t + " " + as + ")";
  return t;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInvalidArgument;
}

// Rewrites every leaf a into a(E) with E -> eps, which keeps normal-form inputs normal.
Fslp leaves_to_nodes(Fslp f) {
  VarId e = f.add(Rhs::empty());
  for (VarId v = 0; v < f.num_vars(); ++v) {
    if (f.rhs(v).op == Rhs::Op::kLeaf) f.set_rhs(v, Rhs::node(f.rhs(v).label, e));
  }
  return f;
}

}  // namespace

TEST_CASE("Example 3.2") {
  LabelSet labels;
  Fslp f = example_3_2(labels, 2);
  CHECK(print_forest(eval(f), labels) == example_3_2_text(2));
  auto rank = validate(f);
  for (VarId v = 0; v < f.num_vars(); ++v) {
    bool is_b = f.name(v)[0] == 'B';
    CHECK(rank[v] == (is_b ? 1 : 0));
  }
  for (int n = 0; n <= 6; ++n) {
    Fslp g = example_3_2(labels, n);
    CHECK(size(g) == static_cast<std::size_t>(2 * n + 7));
    Forest t = eval(g);
    CHECK(value_sizes(g)[g.start()] == t.size());
  }
}

TEST_CASE("Example 3.3 values") {
  LabelSet labels;
  Fslp f = example_3_3_f(labels, 1);
  VarId b = 0;
  for (VarId v = 0; v < f.num_vars(); ++v) {
    if (f.name(v) == "B") b = v;
  }
  CHECK(print_forest(eval(f, b), labels) ==
        repeat("e(e(a b) c)", 3) + " " + repeat("e(a e(b c))", 2));
  Fslp g = example_3_3_fprime(labels, 1);
  Forest t = eval(g);
  std::string fp = repeat("e(a b c)", 5);
  CHECK(print_forest(t, labels) == "d(" + fp + " d(" + fp + " " + fp + "))");
}

TEST_CASE("size of the transliterated section 2 grammar") {
  LabelSet labels;
  Label a = labels.intern("a"), b = labels.intern("b");
  Fslp f;
  VarId c = f.add(Rhs::leaf(b));
  VarId bv = f.add(Rhs::h(c, f.add(Rhs::h(f.add(Rhs::leaf(a)), c))));
  VarId av = f.add(Rhs::h(c, f.add(Rhs::h(bv, bv))));
  f.set_start(f.add(Rhs::h(av, f.add(Rhs::h(av, bv)))));
  CHECK(size(f) == 8);
  CHECK(print_forest(eval(f), labels) == "b b a b b a b b b a b b a b b a b");
  Fslp one;
  one.set_start(one.add(Rhs::leaf(a)));
  CHECK(size(one) == 1);
}

TEST_CASE("validation errors") {
  Fslp f;
  VarId x = f.add(Rhs::param());
  f.add(Rhs::h(x, x));
  CHECK(kind_of([&] { validate(f); }) == ErrorKind::kUndefinedOperation);
  Fslp g;
  VarId e = g.add(Rhs::empty());
  g.add(Rhs::v(e, e));
  CHECK(kind_of([&] { validate(g); }) == ErrorKind::kUndefinedOperation);
  Fslp c;
  c.add(Rhs::h(1, 1));
  c.add(Rhs::h(0, 0));
  CHECK(kind_of([&] { validate(c); }) == ErrorKind::kCycle);
  Fslp p;
  p.set_start(p.add(Rhs::param()));
  CHECK(kind_of([&] { validate(p); }) == ErrorKind::kInvalidForest);
  Fslp empty;
  empty.set_start(empty.add(Rhs::empty()));
  CHECK(eval(empty).empty());
}

TEST_CASE("ranks agree with evaluation") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    Fslp f = random_fslp(rng, 30, 1, 3, 300);
    auto rank = validate(f);
    auto sizes = value_sizes(f);
    for (VarId v = 0; v < f.num_vars(); ++v) {
      Forest t = eval(f, v);
      REQUIRE(t.rank() == rank[v]);
      REQUIRE(t.size() == sizes[v]);
    }
  }
}

TEST_CASE("text round trip") {
  LabelSet labels;
  Fslp f = example_3_3_f(labels, 2);
  std::string text = print_fslp(f, labels);
  Fslp g = parse_fslp(text, labels);
  CHECK(g == f);
  CHECK(print_fslp(g, labels) == text);
  CHECK_THROWS_AS(parse_fslp("S -> h A\nA -> eps\n", labels), SyntaxError);
  CHECK(kind_of([&] { parse_fslp("S -> h A B\nA -> eps\n", labels); }) == ErrorKind::kUndefinedVariable);
  CHECK(kind_of([&] { parse_fslp("S -> v A A\nA -> eps\n", labels); }) == ErrorKind::kUndefinedOperation);
  CHECK_THROWS_AS(parse_fslp("S -> frob A\n", labels), SyntaxError);
}

TEST_CASE("normal form examples") {
  LabelSet labels;
  // Already normal: returned unchanged.
  Fslp n;
  VarId e = n.add(Rhs::empty());
  VarId t = n.add(Rhs::node(labels.intern("a"), e));
  n.set_start(n.add(Rhs::h(t, t)));
  Fslp nn = normal_form(n);
  CHECK(nn == n);
  CHECK(nn.tag() == NormalFormTag::kNormal);

  // A = B C with B of rank 1.
  Label a = labels.intern("a"), b = labels.intern("b");
  Fslp f;
  VarId x = f.add(Rhs::param());
  VarId ctx = f.add(Rhs::node(a, x));
  VarId leaf = f.add(Rhs::leaf(b));
  VarId hv = f.add(Rhs::h(ctx, leaf));
  f.set_start(f.add(Rhs::v(hv, leaf)));
  Fslp g = normal_form(f);
  CHECK(check_normal_form(g).empty());
  CHECK(eval(g) == eval(f));
  CHECK(check_normal_form(f) != "");

  for (int k = 0; k <= 4; ++k) {
    Fslp e3 = example_3_3_f(labels, k);
    Fslp e3n = normal_form(e3);
    CHECK(check_normal_form(e3n).empty());
    CHECK(eval(e3n) == eval(e3));
    Fslp e3p = example_3_3_fprime(labels, k);
    CHECK(eval(normal_form(e3p)) == eval(e3p));
  }
}

TEST_CASE("normal form on random FSLPs") {
  std::mt19937_64 rng(22);
  double worst = 0;
  for (int i = 0; i < 1500; ++i) {
    Fslp f = random_fslp(rng, 5 + rng() % 40, 1, 3, 2000);
    Fslp g = normal_form(f);
    REQUIRE(check_normal_form(g) == "");
    REQUIRE(eval(g) == eval(f));
    worst = std::max(worst, static_cast<double>(size(g)) / static_cast<double>(size(prune(f))));
    REQUIRE(size(g) <= kNormalFormFactor * size(prune(f)));
    Fslp s = strong_normal_form(f);
    REQUIRE(check_strong_normal_form(s) == "");
    REQUIRE(eval(s) == eval(f));
  }
  MESSAGE("largest normal form size ratio " << worst);
}

TEST_CASE("strong normal form on a two-symbol spine") {
  LabelSet labels;
  Label a = labels.intern("a"), b = labels.intern("b"), c = labels.intern("c");
  Fslp f;
  VarId e = f.add(Rhs::empty());
  VarId big = f.add(Rhs::node(a, e));
  for (int i = 0; i < 5; ++i) big = f.add(Rhs::h(big, big));  // 32 leaves
  VarId d2 = f.add(Rhs::node2(b, big, e));                    // |D2| = 34
  VarId d1 = f.add(Rhs::node2(c, e, e));                      // |D1| = 2
  VarId spine = f.add(Rhs::v(d2, d1), "B");
  VarId arg = f.add(Rhs::node(a, e));
  VarId start = f.add(Rhs::v(spine, arg), "A");
  f.set_start(start);
  REQUIRE(check_normal_form(f).empty());
  CHECK(check_strong_normal_form(f) != "");
  Fslp s = strong_normal_form(f);
  CHECK(check_strong_normal_form(s).empty());
  CHECK(eval(s) == eval(f));
  // A = D2<C1>, C1 = D1<C>.
  const Rhs& r = s.rhs(s.start());
  REQUIRE(r.op == Rhs::Op::kVConcat);
  CHECK(s.rhs(r.left).op == Rhs::Op::kNode2);
  CHECK(s.rhs(r.left).label == b);
  const Rhs& c1 = s.rhs(r.right);
  REQUIRE(c1.op == Rhs::Op::kVConcat);
  CHECK(s.rhs(c1.left).label == c);
  auto sizes = value_sizes(s);
  CHECK(sizes[c1.right] == 1);

  // Spines of length one are left alone.
  Fslp one;
  VarId e1 = one.add(Rhs::empty());
  VarId ctx = one.add(Rhs::node2(a, e1, e1));
  one.set_start(one.add(Rhs::v(ctx, one.add(Rhs::node(b, e1)))));
  CHECK(strong_normal_form(one) == one);
}

TEST_CASE("strong normal form of Example 3.3") {
  LabelSet labels;
  for (int n = 0; n <= 3; ++n) {
    for (Fslp f : {example_3_3_f(labels, n), example_3_3_fprime(labels, n)}) {
      Fslp s = strong_normal_form(f);
      CHECK(check_strong_normal_form(s).empty());
      CHECK(eval(s) == eval(f));
    }
  }
}

TEST_CASE("spine and horizontal SSLPs") {
  LabelSet labels;
  Fslp f = leaves_to_nodes(example_3_2(labels, 3));
  REQUIRE(check_normal_form(f).empty());
  Sslp spine = spine_sslp(f);
  Sslp hor = hor_sslp(f);
  auto cls = classify(f);
  std::size_t longest = 0;
  for (VarId v = 0; v < f.num_vars(); ++v) {
    if (cls[v] == VarClass::kV1Bot) CHECK(eval(spine, v) == std::vector<Symbol>{Symbol{v}});
    if (cls[v] == VarClass::kV0Bot) CHECK(eval(hor, v) == std::vector<Symbol>{Symbol{v}});
    if (cls[v] == VarClass::kV1Top || cls[v] == VarClass::kV1Bot) {
      auto s = eval(spine, v);
      longest = std::max(longest, s.size());
      // Recombine: value(A) = D1<D2<...<Dk>...>>.
      Forest acc = Forest::param();
      for (Symbol d : s) acc = acc.substitute(eval(f, d.value));
      CHECK(acc == eval(f, v));
    }
    if (cls[v] == VarClass::kV0Top || cls[v] == VarClass::kV0Bot) {
      Forest acc;
      for (Symbol d : eval(hor, v)) acc.append(eval(f, d.value));
      CHECK(acc == eval(f, v));
    }
  }
  CHECK(longest == 8);
  CHECK_THROWS_AS(spine_sslp(example_3_2(labels, 1)), Error);
}

TEST_CASE("spine of a two-symbol vertical concatenation") {
  LabelSet labels;
  Label a = labels.intern("a");
  Fslp f;
  VarId e = f.add(Rhs::empty());
  VarId p = f.add(Rhs::node2(a, e, e));
  VarId q = f.add(Rhs::node2(a, e, e));
  VarId pq = f.add(Rhs::v(p, q));
  f.set_start(f.add(Rhs::v(pq, f.add(Rhs::node(a, e)))));
  Sslp spine = spine_sslp(f);
  CHECK(eval(spine, pq) == std::vector<Symbol>{Symbol{p}, Symbol{q}});
}

TEST_CASE("baseline compression") {
  LabelSet labels;
  Label a = labels.intern("a"), r = labels.intern("r");
  for (int k = 1; k <= 12; ++k) {
    Forest leaves;
    for (int i = 0; i < (1 << k); ++i) leaves.append(Forest::leaf(a));
    Forest t = Forest::tree(r, leaves);
    Fslp f = build_baseline(t);
    CHECK(eval(f) == t);
    CHECK(size(f) <= static_cast<std::size_t>(k + 3));
  }
  Fslp one = build_baseline(Forest::leaf(a));
  CHECK(size(one) == 1);
  CHECK(eval(build_baseline(Forest{})).empty());
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    Forest t = random_forest(rng, 1 + rng() % 500, 1, 3);
    REQUIRE(eval(build_baseline(t)) == t);
  }
}
