#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace forestslp {

// Line-oriented grammar files shared by every program kind:
//
//   # comment
//   start S
//   S -> item item ...
//
// Items are bare words ([A-Za-z0-9_]+) or double-quoted terminals with \" and \\ escapes.
struct GrammarToken {
  std::string text;
  bool quoted = false;
};

struct GrammarRule {
  std::size_t line = 0;
  std::string lhs;
  std::vector<GrammarToken> rhs;
};

struct GrammarDocument {
  std::optional<std::string> start;
  std::size_t start_line = 0;
  std::vector<GrammarRule> rules;
};

GrammarDocument read_grammar_document(std::string_view text);

bool is_grammar_word(std::string_view word);
std::string quote_terminal(std::string_view text);

// Resolves rule names to dense ids in file order. Throws on duplicates and undefined names.
class NameIndex {
 public:
  explicit NameIndex(const GrammarDocument& doc);

  std::uint32_t at(const std::string& name, std::size_t line) const;
  std::uint32_t start(const GrammarDocument& doc) const;
  std::size_t size() const { return index_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Printable names for variables; unnamed or clashing variables get fresh "_vN" names.
std::vector<std::string> printable_names(const std::vector<std::string>& names);

}  // namespace forestslp
