#include <fstream>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "forestslp/ac.hpp"
#include "forestslp/error.hpp"
#include "forestslp/fcns.hpp"
#include "forestslp/fslp.hpp"
#include "forestslp/topdag.hpp"

using namespace forestslp;

namespace {

enum class Format { kTree, kFslp, kTopdag, kTslp };

const std::map<std::string, Format> kFormats = {
    {"tree", Format::kTree}, {"fslp", Format::kFslp}, {"topdag", Format::kTopdag}, {"tslp", Format::kTslp}};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

Format format_of(const std::string& path, const std::string& flag) {
  if (!flag.empty()) return kFormats.at(flag);
  auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    auto it = kFormats.find(path.substr(dot + 1));
    if (it != kFormats.end()) return it->second;
  }
  return Format::kFslp;
}

// A loaded input. grammar derives the represented forest; topdag and tslp keep the original
// text form so that same-format conversions are the identity.
struct Input {
  Format format;
  Fslp grammar;
  std::optional<TopDag> topdag;
  std::optional<Fslp> tslp;
};

Input load(const std::string& path, Format format, LabelSet& labels) {
  std::string text = read_input(path);
  Input in{format, {}, {}, {}};
  switch (format) {
    case Format::kTree: in.grammar = build_baseline(parse_forest_interning(text, labels)); break;
    case Format::kFslp:
      in.grammar = parse_fslp(text, labels);
      validate(in.grammar);
      break;
    case Format::kTopdag:
      in.topdag = parse_topdag(text, labels);
      in.grammar = topdag_to_fslp(*in.topdag);
      break;
    case Format::kTslp:
      in.tslp = parse_fslp(text, labels);
      if (auto why = check_tslp(*in.tslp); !why.empty()) throw Error(ErrorKind::kInvalidArgument, "not a TSLP: " + why);
      in.grammar = fcns_tslp_to_fslp(*in.tslp);
      break;
  }
  return in;
}

std::string render(const Input& in, Format to, const LabelSet& labels, std::size_t cap) {
  switch (to) {
    case Format::kTree: return print_forest(eval(in.grammar, in.grammar.start(), cap), labels) + "\n";
    case Format::kFslp: return print_fslp(in.grammar, labels);
    case Format::kTopdag: return print_topdag(in.topdag ? *in.topdag : fslp_to_topdag(in.grammar), labels);
    case Format::kTslp: return print_fslp(in.tslp ? *in.tslp : fslp_to_fcns_tslp(in.grammar), labels);
  }
  return {};
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

AcTheory load_theory(const std::string& path, LabelSet& labels) {
  return path.empty() ? AcTheory{} : parse_theory(read_input(path), labels);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kExplosionGuard: return 5;
    case ErrorKind::kNotNormalForm:
    case ErrorKind::kNotATree:
    case ErrorKind::kTreeTooSmall:
    case ErrorKind::kNotAnFcnsImage:
    case ErrorKind::kInvalidArgument: return 4;
    default: return 3;
  }
}

std::string stats(const Input& in) {
  const Fslp& f = in.grammar;
  std::set<std::uint32_t> used;
  for (VarId v : topological_order(f, std::vector<VarId>{f.start()})) {
    const Rhs& r = f.rhs(v);
    if (r.op == Rhs::Op::kLeaf || r.op == Rhs::Op::kNode || r.op == Rhs::Op::kNode2) used.insert(r.label.id);
  }
  std::ostringstream out;
  const Fslp* shown = in.tslp ? &*in.tslp : &f;
  if (in.topdag) {
    out << "size " << size(*in.topdag) << "\n";
    out << "variables " << in.topdag->num_vars() << "\n";
  } else {
    out << "size " << size(*shown) << "\n";
    out << "variables " << shown->num_vars() << "\n";
  }
  out << "nodes " << value_sizes(f)[f.start()] << "\n";
  out << "sigma " << used.size() << "\n";
  try {
    out << "topdag_size " << (in.topdag ? size(*in.topdag) : size(fslp_to_topdag(f))) << "\n";
  } catch (const Error&) {
    out << "topdag_size -\n";
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grammar-compressed forests: conversion, normalization and AC-equality"};
  app.require_subcommand(1);
  std::string from, to = "fslp", output;
  std::size_t cap = 10'000'000;
  std::vector<std::string> inputs;
  std::string theory_path;
  bool nf = false, strong = false, assoc = false, ac = false;

  auto formats = CLI::IsMember({"tree", "fslp", "topdag", "tslp"});
  auto input_options = [&](CLI::App* sub, std::size_t count) {
    sub->add_option("input", inputs, "input file, '-' for stdin")->required()->expected(static_cast<int>(count));
    sub->add_option("--from", from, "input format (default: file extension, else fslp)")->check(formats);
  };
  auto output_option = [&](CLI::App* sub) { sub->add_option("-o,--output", output, "output file (default stdout)"); };
  auto cap_option = [&](CLI::App* sub) {
    sub->add_option("--max-nodes", cap, "refuse to decompress beyond this many nodes");
  };

  auto* convert = app.add_subcommand("convert", "translate between tree, fslp, topdag and tslp");
  input_options(convert, 1);
  convert->add_option("--to", to, "output format")->required()->check(formats);
  output_option(convert);
  cap_option(convert);

  auto* normalize = app.add_subcommand("normalize", "normal forms and AC canonization");
  input_options(normalize, 1);
  auto* passes = normalize->add_option_group("pass");
  passes->add_flag("--nf", nf, "normal form");
  passes->add_flag("--strong-nf", strong, "strong normal form");
  passes->add_flag("--assoc", assoc, "associative normal form (needs --theory)");
  passes->add_flag("--ac", ac, "AC canonical form (needs --theory)");
  passes->require_option(1);
  normalize->add_option("--theory", theory_path, "theory file with assoc:/comm: lines");
  output_option(normalize);

  auto* eq = app.add_subcommand("eq", "equality modulo an AC theory; exit 0 if equal, 1 if not");
  input_options(eq, 2);
  eq->add_option("--theory", theory_path, "theory file (default: syntactic equality)");

  auto* evaluate = app.add_subcommand("eval", "decompress to a forest");
  input_options(evaluate, 1);
  output_option(evaluate);
  cap_option(evaluate);

  auto* compress = app.add_subcommand("compress", "baseline FSLP of a forest");
  input_options(compress, 1);
  output_option(compress);

  auto* stat = app.add_subcommand("stats", "grammar size, value size and alphabet size");
  input_options(stat, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    LabelSet labels;
    auto load_one = [&](std::size_t i) { return load(inputs.at(i), format_of(inputs.at(i), from), labels); };
    if (convert->parsed()) {
      write_output(output, render(load_one(0), kFormats.at(to), labels, cap));
    } else if (normalize->parsed()) {
      if ((assoc || ac) && theory_path.empty()) throw UsageError("--assoc and --ac need --theory");
      Input in = load_one(0);
      AcTheory theory = load_theory(theory_path, labels);
      Fslp result;
      if (nf) result = normal_form(in.grammar);
      if (strong) result = strong_normal_form(in.grammar);
      if (assoc) result = nf_assoc(in.grammar, theory.assoc);
      if (ac) result = canonize_comm(nf_assoc(in.grammar, theory.assoc), theory.comm);
      write_output(output, print_fslp(result, labels));
    } else if (eq->parsed()) {
      Input a = load_one(0), b = load_one(1);
      bool equal = ac_equal(a.grammar, b.grammar, load_theory(theory_path, labels));
      std::cout << (equal ? "EQUAL" : "UNEQUAL") << "\n";
      return equal ? 0 : 1;
    } else if (evaluate->parsed()) {
      Input in = load_one(0);
      write_output(output, render(in, Format::kTree, labels, cap));
    } else if (compress->parsed()) {
      if (format_of(inputs[0], from) != Format::kTree && !from.empty()) throw UsageError("compress reads a tree file");
      Input in = load(inputs[0], Format::kTree, labels);
      write_output(output, print_fslp(in.grammar, labels));
    } else if (stat->parsed()) {
      std::cout << stats(load_one(0));
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return 0;
}
