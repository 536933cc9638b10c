#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "forestslp/bigint.hpp"

namespace forestslp {

using VarId = std::uint32_t;

// Opaque terminal token of a string grammar.
struct Symbol {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(Symbol, Symbol) = default;
};

struct Item {
  enum class Kind : std::uint8_t { kVar, kSymbol };

  Kind kind = Kind::kSymbol;
  std::uint32_t id = 0;

  static Item var(VarId v) { return {Kind::kVar, v}; }
  static Item sym(Symbol s) { return {Kind::kSymbol, s.value}; }
  bool is_var() const { return kind == Kind::kVar; }
  Symbol symbol() const { return Symbol{id}; }

  friend bool operator==(const Item&, const Item&) = default;
};

inline constexpr std::size_t kDefaultExpansionCap = 100'000'000;

// String straight-line program. Every variable has a right-hand side that is a sequence of
// variables and symbols; the reference relation must be acyclic.
class Sslp {
 public:
  VarId add_rule(std::vector<Item> rhs, std::string name = {});
  void set_rule(VarId var, std::vector<Item> rhs) { rules_.at(var) = std::move(rhs); }

  const std::vector<Item>& rhs(VarId var) const { return rules_.at(var); }
  std::size_t num_vars() const { return rules_.size(); }

  std::optional<VarId> start() const { return start_; }
  void set_start(VarId var) { start_ = var; }

  // Empty when the variable is unnamed.
  const std::string& name(VarId var) const;
  void set_name(VarId var, std::string name);

  // Copies every rule of other into this grammar and returns the id offset.
  VarId absorb(const Sslp& other);

  friend bool operator==(const Sslp&, const Sslp&) = default;

 private:
  std::vector<std::vector<Item>> rules_;
  std::vector<std::string> names_;
  std::optional<VarId> start_;
};

// Children-before-parents order of all variables. Throws CycleError.
std::vector<VarId> topological_order(const Sslp& g);
// Variables reachable from the given roots, children first.
std::vector<VarId> reachable_order(const Sslp& g, std::span<const VarId> roots);

// Number of operation occurrences: a right-hand side of k items with t symbols counts
// max(k - 1, 0) + t, and an empty right-hand side counts one.
std::size_t size(const Sslp& g);

std::vector<BigInt> lengths(const Sslp& g);
BigInt length(const Sslp& g, VarId var);

// Throws ExplosionGuard when the value is longer than cap.
std::vector<Symbol> eval(const Sslp& g, VarId var, std::size_t cap = kDefaultExpansionCap);

Symbol symbol_at(const Sslp& g, std::span<const BigInt> lens, VarId var, BigInt pos);

// Adds rules to g that derive the factor [from, to) of var. Returns nullopt for an empty factor.
// lens must hold the lengths of all variables of g and is extended with the new ones.
std::optional<VarId> extract_factor(Sslp& g, std::vector<BigInt>& lens, VarId var, const BigInt& from,
                                    const BigInt& to);

// Sigma_1-factorization. Variables [0, n) of grammar are the input's variables with the same
// ids; every other variable is upper or lower.
struct Factorization {
  enum class Part : std::uint8_t { kOriginal, kUpper, kLower };

  // value(var) = value(left) [value(middle)] [last] value(right)
  struct Decomposition {
    VarId left;
    std::optional<VarId> middle;
    std::optional<Symbol> last;
    VarId right;
  };

  Sslp grammar;
  std::vector<Part> part;
  std::vector<Decomposition> decomposition;  // indexed by original variable
};

Factorization factorize(const Sslp& g, std::span<const Symbol> sigma1);
// Shape check of the factorization invariants; returns an empty string when they hold.
std::string check_factorization(const Factorization& f, std::span<const Symbol> sigma1);

// Counting construction: the value of the returned start is the value of var sorted ascending
// by the given symbol order. ascending must list every symbol of the value.
struct SortedSslp {
  Sslp grammar;
  std::optional<VarId> start;  // nullopt when the value is empty
};
SortedSslp sort(const Sslp& g, VarId var, std::span<const Symbol> ascending);

// Length-lexicographic comparison of two compressed strings. Lengths are compared exactly;
// equal-length values go through the recompression equality engine and, when unequal, a search
// for the first mismatch. Values no longer than expand_below are compared by expansion.
struct CompareOptions {
  std::size_t expand_below = 4096;
  std::function<bool(Symbol, Symbol)> less;  // defaults to numeric order
};
std::strong_ordering compare_llex(const Sslp& g1, VarId a1, const Sslp& g2, VarId a2,
                                  const CompareOptions& options = {});
// Both variables in one grammar; lens are the lengths of all of g's variables.
std::strong_ordering compare_llex_in(const Sslp& g, std::span<const BigInt> lens, VarId a, VarId b,
                                     const CompareOptions& options = {});

// Text format: "start NAME" and "NAME -> item ..." lines, terminals quoted.
class SymbolTable {
 public:
  Symbol intern(std::string_view name);
  const std::string& name(Symbol s) const { return names_.at(s.value); }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

Sslp parse_sslp(std::string_view text, SymbolTable& symbols);
std::string print_sslp(const Sslp& g, const SymbolTable& symbols);

}  // namespace forestslp
