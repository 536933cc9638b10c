#include <functional>
#include <memory>
#include <random>

#include "doctest.h"
#include "forestslp/ac.hpp"
#include "forestslp/error.hpp"
#include "oracles.hpp"

using namespace forestslp;
using namespace testing_support;

namespace {

struct Node {
  Label label;
  std::vector<std::unique_ptr<Node>> kids;
};
using Nodes = std::vector<std::unique_ptr<Node>>;

Nodes to_nodes(const Forest& f) {
  std::function<std::unique_ptr<Node>(std::size_t)> go = [&](std::size_t p) {
    auto n = std::make_unique<Node>();
    n->label = f.label_at(p);
    for (std::size_t c : f.children(p)) n->kids.push_back(go(c));
    return n;
  };
  Nodes out;
  for (std::size_t r : f.roots()) out.push_back(go(r));
  return out;
}

Forest from_nodes(const Nodes& ns) {
  std::vector<Forest::Cell> cells;
  std::function<void(const Node&)> go = [&](const Node& n) {
    std::size_t at = cells.size();
    cells.push_back({n.label.id, 1});
    for (const auto& k : n.kids) go(*k);
    cells[at].extent = static_cast<std::uint32_t>(cells.size() - at);
  };
  for (const auto& n : ns) go(*n);
  return Forest::from_cells(std::move(cells));
}

void collect(Nodes& ns, std::vector<Node*>& out) {
  for (auto& n : ns) {
    out.push_back(n.get());
    collect(n->kids, out);
  }
}

// One application of a commutativity or associativity equation somewhere in the forest.
// Returns false if no position applies.
bool rewrite_once(std::mt19937_64& rng, Nodes& roots, const AcTheory& theory) {
  std::vector<Node*> all;
  collect(roots, all);
  std::shuffle(all.begin(), all.end(), rng);
  for (Node* n : all) {
    const int kind = rng() % 3;
    if (kind == 0 && theory.comm.contains(n->label) && n->kids.size() >= 2) {
      std::size_t i = rng() % n->kids.size(), j = rng() % n->kids.size();
      std::swap(n->kids[i], n->kids[j]);
      return true;
    }
    if (kind == 1 && theory.assoc.contains(n->label)) {
      for (std::size_t i = 0; i < n->kids.size(); ++i) {
        if (n->kids[i]->label != n->label) continue;
        auto child = std::move(n->kids[i]);
        n->kids.erase(n->kids.begin() + i);
        for (std::size_t k = 0; k < child->kids.size(); ++k) {
          n->kids.insert(n->kids.begin() + i + k, std::move(child->kids[k]));
        }
        return true;
      }
    }
    if (kind == 2 && theory.assoc.contains(n->label) && !n->kids.empty()) {
      std::size_t i = rng() % n->kids.size();
      std::size_t j = i + rng() % (n->kids.size() - i + 1);
      auto group = std::make_unique<Node>();
      group->label = n->label;
      for (std::size_t k = i; k < j; ++k) group->kids.push_back(std::move(n->kids[k]));
      n->kids.erase(n->kids.begin() + i, n->kids.begin() + j);
      n->kids.insert(n->kids.begin() + i, std::move(group));
      return true;
    }
  }
  return false;
}

Forest rewrite(std::mt19937_64& rng, const Forest& f, const AcTheory& theory, int steps) {
  Nodes ns = to_nodes(f);
  for (int i = 0; i < steps; ++i) rewrite_once(rng, ns, theory);
  return from_nodes(ns);
}

AcTheory random_theory(std::mt19937_64& rng, std::uint32_t first, std::uint32_t count) {
  AcTheory t;
  for (std::uint32_t l = first; l < first + count; ++l) {
    if (rng() % 2) t.assoc.insert(Label{l});
    if (rng() % 2) t.comm.insert(Label{l});
  }
  return t;
}

// Random FSLP that derives a tree shaped like f, compressed by the baseline plus random
// normal-form round trips, so that the inputs are not all baselines.
Fslp grammar_for(std::mt19937_64& rng, const Forest& f) {
  Fslp g = build_baseline(f);
  return rng() % 2 ? normal_form(g) : g;
}

}  // namespace

TEST_CASE("theory text") {
  LabelSet labels;
  AcTheory t = parse_theory("assoc: a e  # comment\n\ncomm: d a\n", labels);
  CHECK(t.assoc.contains(labels.intern("a")));
  CHECK(t.assoc.contains(labels.intern("e")));
  CHECK_FALSE(t.assoc.contains(labels.intern("d")));
  CHECK(t.comm.contains(labels.intern("d")));
  AcTheory again = parse_theory(print_theory(t, labels), labels);
  CHECK(print_theory(again, labels) == print_theory(t, labels));
  CHECK_THROWS_AS(parse_theory("both: a", labels), SyntaxError);
  CHECK_THROWS_AS(parse_theory("assoc a", labels), SyntaxError);
}

TEST_CASE("associative normal form examples") {
  LabelSet labels;
  Forest f = parse_forest_interning("a(a(c d) b(c d) a(e))", labels);
  LabelSubset assoc;
  assoc.insert(labels.intern("a"));
  Fslp g = nf_assoc(build_baseline(f), assoc);
  CHECK(print_forest(eval(g), labels) == "a(c d b(c d) e)");
  CHECK(eval(g) == ref_nf_assoc(f, assoc));

  Forest deep = parse_forest_interning("a(b(a(a(c))) a)", labels);
  CHECK(print_forest(eval(nf_assoc(build_baseline(deep), assoc)), labels) == "a(b(a(c)))");
}

TEST_CASE("associative normal form against the reference") {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 1000; ++i) {
    Fslp f = random_fslp(rng, 5 + rng() % 30, 1, 3, 2000);
    LabelSubset assoc;
    for (std::uint32_t l = 1; l <= 3; ++l) {
      if (rng() % 2) assoc.insert(Label{l});
    }
    Fslp g = nf_assoc(f, assoc);
    REQUIRE(eval(g) == ref_nf_assoc(eval(f), assoc));
  }
}

TEST_CASE("commutative normal form examples") {
  LabelSet labels;
  letter_labels(labels, 3);
  LabelSubset comm;
  comm.insert(labels.intern("c"));
  Forest f = parse_forest_interning("c(b a)", labels);
  CHECK(print_forest(eval(canonize_comm(build_baseline(f), comm)), labels) == "c(a b)");
  Forest g = parse_forest_interning("c(b(a) a(b) b c(c b))", labels);
  CHECK(print_forest(eval(canonize_comm(build_baseline(g), comm)), labels) == "c(b a(b) b(a) c(b c))");
}

TEST_CASE("commutative normal form against the reference") {
  std::mt19937_64 rng(62);
  for (int i = 0; i < 1000; ++i) {
    Forest f = random_forest(rng, 200, 1, 3);
    LabelSubset comm;
    for (std::uint32_t l = 1; l <= 3; ++l) {
      if (rng() % 2) comm.insert(Label{l});
    }
    Fslp g = canonize_comm(build_baseline(f), comm);
    REQUIRE(check_normal_form(g) == "");
    REQUIRE(eval(g) == ref_nf_comm(f, comm));
  }
  for (int i = 0; i < 300; ++i) {
    Fslp f = random_fslp(rng, 5 + rng() % 30, 1, 3, 2000);
    LabelSubset comm;
    for (std::uint32_t l = 1; l <= 3; ++l) {
      if (rng() % 2) comm.insert(Label{l});
    }
    REQUIRE(eval(canonize_comm(f, comm)) == ref_nf_comm(eval(f), comm));
  }
}

TEST_CASE("term-string grammars") {
  std::mt19937_64 rng(63);
  for (int i = 0; i < 300; ++i) {
    Fslp f = normal_form(random_fslp(rng, 5 + rng() % 30, 1, 3, 2000));
    Sslp s = forest_string_sslp(f);
    std::vector<Symbol> expected;
    for (GammaSymbol c : term_string(eval(f))) expected.push_back(Symbol{c});
    REQUIRE(expand(s, *s.start()) == expected);
  }
  LabelSet labels;
  CHECK_THROWS_AS(forest_string_sslp(build_baseline(parse_forest_interning("a(b)", labels))), Error);
}

TEST_CASE("llex comparison of forests") {
  LabelSet labels;
  Fslp a = build_baseline(parse_forest_interning("a", labels));
  Fslp ab = build_baseline(parse_forest_interning("a(b)", labels));
  CHECK(compare_forests(a, a.start(), ab, ab.start()) == std::strong_ordering::less);
  CHECK(compare_forests(ab, ab.start(), a, a.start()) == std::strong_ordering::greater);
  CHECK(compare_forests(ab, ab.start(), ab, ab.start()) == std::strong_ordering::equal);

  std::mt19937_64 rng(64);
  for (int i = 0; i < 500; ++i) {
    Forest x = random_forest(rng, rng() % 12, 1, 2), y = random_forest(rng, rng() % 12, 1, 2);
    Fslp fx = build_baseline(x), fy = build_baseline(y);
    auto tx = term_string(x), ty = term_string(y);
    REQUIRE(compare_forests(fx, fx.start(), fy, fy.start()) == llex_compare(tx, ty));
  }
}

TEST_CASE("Example 3.3 under associativity of e and commutativity of d") {
  for (int n = 0; n <= 3; ++n) {
    LabelSet labels;
    Fslp f = example_3_3_f(labels, n), fp = example_3_3_fprime(labels, n);
    AcTheory theory = parse_theory("assoc: e\ncomm: d\n", labels);
    CHECK(ac_equal(f, fp, theory));
    CHECK(ref_ac_equal(eval(f), eval(fp), theory.assoc, theory.comm));
    CHECK_FALSE(ac_equal(f, fp, AcTheory{}));
    // With one d node (n = 0) commutativity has nothing to reorder.
    CHECK(ac_equal(f, fp, parse_theory("assoc: e\n", labels)) == (n == 0));
    CHECK_FALSE(ac_equal(f, fp, parse_theory("comm: d\n", labels)));
    for (const char* text : {"assoc: e\n", "comm: d\n", "assoc: e d\ncomm: d e\n"}) {
      AcTheory t = parse_theory(text, labels);
      CHECK(ac_equal(f, fp, t) == ref_ac_equal(eval(f), eval(fp), t.assoc, t.comm));
    }
  }
}

TEST_CASE("random pairs against the reference") {
  std::mt19937_64 rng(65);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) {
    AcTheory theory = random_theory(rng, 1, 3);
    Forest x = random_forest(rng, 1 + rng() % 60, 1, 3);
    Forest y = i % 2 ? rewrite(rng, x, theory, 1 + rng() % 6) : random_forest(rng, 1 + rng() % 60, 1, 3);
    if (i % 4 == 1) y = rewrite(rng, random_forest(rng, 1 + rng() % 60, 1, 3), theory, 3);
    bool expected = ref_ac_equal(x, y, theory.assoc, theory.comm);
    equal += expected;
    REQUIRE(ac_equal(grammar_for(rng, x), grammar_for(rng, y), theory) == expected);
  }
  CHECK(equal >= 200);
}

TEST_CASE("unordered tree isomorphism") {
  std::mt19937_64 rng(66);
  AcTheory theory;
  for (std::uint32_t l = 1; l <= 2; ++l) theory.comm.insert(Label{l});
  int equal = 0;
  for (int i = 0; i < 400; ++i) {
    Forest x = random_tree(rng, 1 + rng() % 40, 1, 2);
    Forest y = i % 2 ? rewrite(rng, x, theory, 10) : random_tree(rng, 1 + rng() % 40, 1, 2);
    bool expected = ahu_canonical(x) == ahu_canonical(y);
    equal += expected;
    REQUIRE(ac_equal(build_baseline(x), build_baseline(y), theory) == expected);
  }
  CHECK(equal >= 200);
}

TEST_CASE("invariance under single equations and idempotence") {
  std::mt19937_64 rng(67);
  for (int i = 0; i < 500; ++i) {
    AcTheory theory = random_theory(rng, 1, 3);
    Forest x = random_forest(rng, 1 + rng() % 80, 1, 3);
    Nodes ns = to_nodes(x);
    if (!rewrite_once(rng, ns, theory)) continue;
    Forest y = from_nodes(ns);
    REQUIRE(ac_equal(build_baseline(x), build_baseline(y), theory));

    Fslp once = canonize_comm(nf_assoc(build_baseline(x), theory.assoc), theory.comm);
    Fslp twice = canonize_comm(nf_assoc(once, theory.assoc), theory.comm);
    REQUIRE(eval(once) == eval(twice));
  }
}

TEST_CASE("compressed inputs with large values") {
  LabelSet labels;
  Fslp f = example_3_3_f(labels, 40), fp = example_3_3_fprime(labels, 40);
  AcTheory theory = parse_theory("assoc: e\ncomm: d\n", labels);
  CHECK(ac_equal(f, fp, theory));
  CHECK_FALSE(ac_equal(f, fp, parse_theory("comm: d\n", labels)));
}
