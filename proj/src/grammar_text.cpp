#include "forestslp/grammar_text.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "forestslp/error.hpp"

namespace forestslp {

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<GrammarToken> tokenize_line(std::string_view line, std::size_t line_no) {
  std::vector<GrammarToken> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      break;
    } else if (c == '"') {
      GrammarToken tok{{}, true};
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char d = line[i++];
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\\') {
          if (i == line.size()) break;
          d = line[i++];
        }
        tok.text.push_back(d);
      }
      if (!closed) throw SyntaxError(line_no, "unterminated terminal");
      out.push_back(std::move(tok));
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({"->", false});
      i += 2;
    } else if (is_word_char(c)) {
      std::size_t start = i;
      while (i < line.size() && is_word_char(line[i])) ++i;
      out.push_back({std::string(line.substr(start, i - start)), false});
    } else {
      throw SyntaxError(line_no, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

}  // namespace

bool is_grammar_word(std::string_view word) {
  return !word.empty() && std::all_of(word.begin(), word.end(), is_word_char);
}

std::string quote_terminal(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

GrammarDocument read_grammar_document(std::string_view text) {
  GrammarDocument doc;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto tokens = tokenize_line(text.substr(pos, end - pos), line_no);
    pos = end + 1;
    if (tokens.empty()) continue;
    if (!tokens[0].quoted && tokens[0].text == "start" && (tokens.size() < 2 || tokens[1].text != "->")) {
      if (tokens.size() != 2 || tokens[1].quoted) throw SyntaxError(line_no, "expected 'start NAME'");
      if (doc.start) throw SyntaxError(line_no, "duplicate start declaration");
      doc.start = tokens[1].text;
      doc.start_line = line_no;
      continue;
    }
    if (tokens.size() < 2 || tokens[0].quoted || tokens[1].quoted || tokens[1].text != "->") {
      throw SyntaxError(line_no, "expected 'NAME -> ...'");
    }
    GrammarRule rule;
    rule.line = line_no;
    rule.lhs = tokens[0].text;
    rule.rhs.assign(tokens.begin() + 2, tokens.end());
    for (const auto& t : rule.rhs) {
      if (!t.quoted && t.text == "->") throw SyntaxError(line_no, "unexpected '->'");
    }
    doc.rules.push_back(std::move(rule));
  }
  return doc;
}

NameIndex::NameIndex(const GrammarDocument& doc) {
  for (std::size_t i = 0; i < doc.rules.size(); ++i) {
    auto [it, inserted] = index_.emplace(doc.rules[i].lhs, static_cast<std::uint32_t>(i));
    if (!inserted) throw SyntaxError(doc.rules[i].line, "duplicate rule for '" + doc.rules[i].lhs + "'");
  }
}

std::uint32_t NameIndex::at(const std::string& name, std::size_t line) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw Error(ErrorKind::kUndefinedVariable, "line " + std::to_string(line) + ": undefined variable '" + name + "'");
  }
  return it->second;
}

std::uint32_t NameIndex::start(const GrammarDocument& doc) const {
  if (doc.start) return at(*doc.start, doc.start_line);
  if (doc.rules.empty()) throw SyntaxError(0, "empty grammar");
  return 0;
}

std::vector<std::string> printable_names(const std::vector<std::string>& names) {
  std::vector<std::string> out(names.size());
  std::unordered_set<std::string> used;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!names[i].empty() && used.insert(names[i]).second) out[i] = names[i];
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!out[i].empty()) continue;
    std::string candidate = "_v" + std::to_string(i);
    while (used.count(candidate) != 0) candidate += "_";
    used.insert(candidate);
    out[i] = candidate;
  }
  return out;
}

}  // namespace forestslp
