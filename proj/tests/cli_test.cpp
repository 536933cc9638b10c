#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "doctest.h"

namespace {

struct Run {
  int status;
  std::string out;
};

const std::string kTool = FSLPTOOL_PATH;
const std::string kData = TEST_DATA_DIR;

Run run(const std::string& args) {
  std::string cmd = kTool + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const std::string& name) { return kData + "/" + name; }

std::string temp(const std::string& name) { return std::string(TEST_TEMP_DIR) + "/" + name; }

}  // namespace

TEST_CASE("eq on Example 3.3") {
  auto r = run("eq --theory " + data("example33.theory") + " " + data("example33_f.fslp") + " " +
               data("example33_fprime.fslp"));
  CHECK(r.status == 0);
  CHECK(r.out == "EQUAL\n");
  r = run("eq " + data("example33_f.fslp") + " " + data("example33_fprime.fslp"));
  CHECK(r.status == 1);
  CHECK(r.out == "UNEQUAL\n");
}

TEST_CASE("eval") {
  CHECK(run("eval " + data("empty.fslp")).out == "\n");
  auto r = run("eval " + data("small.tree"));
  CHECK(r.status == 0);
  CHECK(r.out == "a(b(c d) e(f)) g(h)\n");
  CHECK(run("eval " + data("example32_n20.fslp")).status == 5);
}

TEST_CASE("stats prints the exact value size") {
  auto r = run("stats " + data("example32_n20.fslp"));
  CHECK(r.status == 0);
  // 2^20 b's, each with 2 * 2^20 a-leaves, plus the c leaf.
  CHECK(r.out.find("nodes 2199024304129\n") != std::string::npos);
  CHECK(r.out.find("size 47\n") != std::string::npos);
}

TEST_CASE("conversion round trips") {
  const std::string tree = "a(b(c d) e(f) a(a))";
  { std::ofstream(temp("t.tree")) << tree << "\n"; }
  for (std::string fmt : {"fslp", "topdag", "tslp"}) {
    const std::string file = temp("t." + fmt);
    REQUIRE(run("convert --to " + fmt + " -o " + file + " " + temp("t.tree")).status == 0);
    CHECK(run("eval " + file).out == tree + "\n");
    CHECK(run("eq " + file + " " + temp("t.tree")).status == 0);
    for (std::string other : {"fslp", "topdag", "tslp", "tree"}) {
      const std::string back = temp("u." + other);
      REQUIRE(run("convert --to " + other + " -o " + back + " " + file).status == 0);
      CHECK(run("eq " + back + " " + temp("t.tree")).out == "EQUAL\n");
    }
  }
}

TEST_CASE("normalize passes") {
  { std::ofstream(temp("n.tree")) << "d(e(a e(b c)) d(b a))\n"; }
  { std::ofstream(temp("n.theory")) << "assoc: e\ncomm: d\n"; }
  REQUIRE(run("compress -o " + temp("n.fslp") + " " + temp("n.tree")).status == 0);
  for (std::string pass : {"--nf", "--strong-nf"}) {
    REQUIRE(run("normalize " + pass + " -o " + temp("m.fslp") + " " + temp("n.fslp")).status == 0);
    CHECK(run("eval " + temp("m.fslp")).out == "d(e(a e(b c)) d(b a))\n");
  }
  REQUIRE(run("normalize --assoc --theory " + temp("n.theory") + " -o " + temp("m.fslp") + " " + temp("n.fslp")).status == 0);
  CHECK(run("eval " + temp("m.fslp")).out == "d(e(a b c) d(b a))\n");
  REQUIRE(run("normalize --ac --theory " + temp("n.theory") + " -o " + temp("m.fslp") + " " + temp("n.fslp")).status == 0);
  auto r = run("eval " + temp("m.fslp"));
  CHECK(r.out == "d(d(a b) e(a b c))\n");
  CHECK(run("normalize --assoc " + temp("n.fslp")).status == 2);
  CHECK(run("normalize --nf --ac " + temp("n.fslp")).status == 2);
}

TEST_CASE("exit codes") {
  CHECK(run("").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("eval " + temp("missing.fslp")).status == 2);
  { std::ofstream(temp("bad.tree")) << "a(b\n"; }
  CHECK(run("eval " + temp("bad.tree")).status == 3);
  { std::ofstream(temp("cycle.fslp")) << "start A\nA -> h A A\n"; }
  CHECK(run("eval " + temp("cycle.fslp")).status == 3);
  { std::ofstream(temp("two.tree")) << "a b\n"; }
  CHECK(run("convert --to topdag " + temp("two.tree")).status == 4);
  { std::ofstream(temp("one.tree")) << "a\n"; }
  CHECK(run("convert --to topdag " + temp("one.tree")).status == 4);
  CHECK(run("convert --to tslp --from fslp " + temp("two.tree")).status == 3);
}

TEST_CASE("stdin input and deterministic output") {
  { std::ofstream(temp("s.tree")) << "a(b(c) b(c) b(c))\n"; }
  auto x = run("convert --to topdag --from tree - < " + temp("s.tree"));
  auto y = run("convert --to topdag --from tree - < " + temp("s.tree"));
  CHECK(x.status == 0);
  CHECK(x.out == y.out);
}
