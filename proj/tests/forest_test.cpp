#include <random>

#include "doctest.h"
#include "forestslp/error.hpp"
#include "forestslp/forest.hpp"
#include "oracles.hpp"

using namespace forestslp;
using namespace testing_support;

namespace {

LabelSet abc() {
  LabelSet labels;
  for (const char* n : {"a", "b", "c", "d", "e"}) labels.intern(n);
  return labels;
}

Forest parse(const char* text, LabelSet& labels) { return parse_forest_interning(text, labels); }

}  // namespace

TEST_CASE("parse and print") {
  LabelSet labels = abc();
  Forest f = parse("a(b c) d(e)", labels);
  CHECK(f.size() == 5);
  CHECK(f.tree_count() == 2);
  CHECK(print_forest(f, labels) == "a(b c) d(e)");
  CHECK(parse("", labels).empty());
  CHECK(print_forest(Forest{}, labels) == "");
  Forest ctx = parse("a(x b)", labels);
  CHECK(ctx.rank() == 1);
  CHECK(print_forest(ctx, labels) == "a(x b)");
  CHECK(print_forest(parse("a()", labels), labels) == "a");
}

TEST_CASE("parse errors") {
  LabelSet labels = abc();
  CHECK_THROWS_AS(parse_forest("a(b", labels), SyntaxError);
  try {
    parse_forest("q", labels);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnknownLabel);
  }
  try {
    parse_forest("a(x) x", labels);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidForest);
  }
  try {
    parse_forest("x(a)", labels);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidForest);
  }
}

TEST_CASE("fcns worked example") {
  LabelSet labels = abc();
  Forest f = parse("a(b c) d(e)", labels);
  Forest b = fcns(f);
  CHECK(print_forest(b, labels) == "a(b(_bot c(_bot _bot)) d(e(_bot _bot) _bot))");
  CHECK(b.size() == 2 * f.size() + 1);
  CHECK(fcns_inverse(b) == f);
  CHECK(print_forest(fcns(Forest{}), labels) == "_bot");
  CHECK(print_forest(fcns(parse("a", labels)), labels) == "a(_bot _bot)");
  CHECK(fcns_inverse(parse("_bot", labels)).empty());
  CHECK_THROWS_AS(fcns_inverse(parse("a(_bot)", labels)), Error);
  CHECK_THROWS_AS(fcns_inverse(parse("a(b _bot)", labels)), Error);
}

TEST_CASE("fcns round trip on random forests") {
  std::mt19937_64 rng(11);
  LabelSet labels = abc();
  for (int i = 0; i < 200; ++i) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(0, 1000)(rng);
    Forest f = random_forest(rng, n, 1, 5);
    Forest b = fcns(f);
    REQUIRE(b.size() == 2 * f.size() + 1);
    REQUIRE(fcns_inverse(b) == f);
    REQUIRE(parse_forest(print_forest(f, labels), labels) == f);
  }
}

TEST_CASE("term strings") {
  LabelSet labels = abc();
  Forest f = parse("a(b c) d(e)", labels);
  auto s = term_string(f);
  CHECK(s.size() == 3 * f.size());
  auto a = term_string(parse("a", labels));
  auto ab = term_string(parse("a(b)", labels));
  CHECK(llex_compare(a, ab) == std::strong_ordering::less);
  auto b = term_string(parse("b", labels));
  CHECK(llex_compare(a, b) == std::strong_ordering::less);
}

TEST_CASE("associative normal form") {
  LabelSet labels = abc();
  Label a = *labels.find("a");
  Forest t = parse("a(a(c d) b(c d) a(e))", labels);
  CHECK(print_forest(ref_nf_assoc(t, {a}), labels) == "a(c d b(c d) e)");
  CHECK(ref_nf_assoc(t, {}) == t);
  CHECK(print_forest(ref_nf_assoc(parse("a(a(a(b)))", labels), {a}), labels) == "a(b)");
}

TEST_CASE("commutative normal form") {
  LabelSet labels = abc();
  Label c = *labels.find("c");
  CHECK(print_forest(ref_nf_comm(parse("c(b a)", labels), {c}), labels) == "c(a b)");
  Forest t = parse("c(b(a a) a c(b a))", labels);
  CHECK(ref_nf_comm(t, {}) == t);
  CHECK(print_forest(ref_nf_comm(t, {c}), labels) == "c(a b(a a) c(a b))");
}

TEST_CASE("reference normal forms are idempotent") {
  std::mt19937_64 rng(5);
  LabelSet labels = abc();
  for (int i = 0; i < 300; ++i) {
    Forest f = random_forest(rng, std::uniform_int_distribution<std::size_t>(0, 60)(rng), 1, 4);
    LabelSubset assoc, comm;
    for (std::uint32_t l = 1; l <= 4; ++l) {
      if (rng() % 2) assoc.insert(Label{l});
      if (rng() % 2) comm.insert(Label{l});
    }
    Forest na = ref_nf_assoc(f, assoc);
    CHECK(ref_nf_assoc(na, assoc) == na);
    CHECK(na.size() <= f.size());
    Forest nc = ref_nf_comm(f, comm);
    CHECK(ref_nf_comm(nc, comm) == nc);
    CHECK(nc.size() == f.size());
    CHECK(ref_ac_equal(f, f, assoc, comm));
    Forest g = random_forest(rng, f.size(), 1, 4);
    CHECK(ref_ac_equal(f, g, {}, {}) == (f == g));
    CHECK(ref_ac_equal(f, g, assoc, comm) == ref_ac_equal(g, f, assoc, comm));
  }
}

TEST_CASE("Example 3.3 trees agree modulo AC at n = 1") {
  LabelSet labels = abc();
  // f = (e(e(ab)c))^3 (e(a e(bc)))^2, tree d(d(f f) f); f' = e(abc)^5, tree d(f' d(f' f')).
  std::string f = "e(e(a b) c) e(e(a b) c) e(e(a b) c) e(a e(b c)) e(a e(b c))";
  std::string fp = "e(a b c) e(a b c) e(a b c) e(a b c) e(a b c)";
  Forest t1 = parse(("d(d(" + f + " " + f + ") " + f + ")").c_str(), labels);
  Forest t2 = parse(("d(" + fp + " d(" + fp + " " + fp + "))").c_str(), labels);
  Label e = *labels.find("e"), d = *labels.find("d");
  CHECK(ref_ac_equal(t1, t2, {e}, {d}));
  CHECK_FALSE(ref_ac_equal(t1, t2, {e}, {}));
  CHECK_FALSE(ref_ac_equal(t1, t2, {}, {d}));
  CHECK_FALSE(ref_ac_equal(parse("a(b c)", labels), parse("a(c b)", labels), {}, {}));
}
