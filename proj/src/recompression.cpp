#include "forestslp/recompression.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "forestslp/error.hpp"

namespace forestslp {

namespace {

using Letter = std::int64_t;

struct WItem {
  bool is_var = false;
  std::uint32_t var = 0;
  Letter letter = 0;
  BigInt mult = 1;  // letters only
};

struct PairHash {
  std::size_t operator()(const std::pair<Letter, Letter>& p) const {
    return std::hash<Letter>()(p.first) * 1000003u ^ std::hash<Letter>()(p.second);
  }
};

class Engine {
 public:
  Engine(const Sslp& g, std::span<const VarId> roots) {
    order_ = reachable_order(g, roots);
    // Each root gets a private unit rule so that no root is referenced by another rule.
    const std::size_t n = g.num_vars();
    rules_.resize(n + roots.size());
    alive_.assign(n + roots.size(), false);
    is_root_.assign(n + roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      auto r = static_cast<VarId>(n + i);
      WItem w;
      w.is_var = true;
      w.var = roots[i];
      rules_[r].push_back(w);
      is_root_[r] = true;
      roots_.push_back(r);
    }
    Letter max_letter = -1;
    for (VarId v : order_) {
      alive_[v] = true;
      for (const auto& item : g.rhs(v)) {
        WItem w;
        w.is_var = item.is_var();
        if (w.is_var) {
          w.var = item.id;
        } else {
          w.letter = item.id;
          max_letter = std::max<Letter>(max_letter, item.id);
        }
        rules_[v].push_back(std::move(w));
      }
    }
    next_letter_ = max_letter + 1;
    for (VarId r : roots_) {
      alive_[r] = true;
      order_.push_back(r);
    }
    // Drop empty variables up front so every live variable has a nonempty value.
    std::vector<WItem> tmp;
    for (VarId v : order_) {
      tmp.clear();
      for (auto& w : rules_[v]) {
        if (!w.is_var || alive_[w.var]) tmp.push_back(std::move(w));
      }
      rules_[v].swap(tmp);
      if (rules_[v].empty() && !is_root_[v]) alive_[v] = false;
    }
  }

  std::vector<std::int64_t> run(RecompressionStats* stats) {
    std::size_t phases = 0;
    std::size_t peak = 0;
    while (!done()) {
      block_phase();
      if (done()) {
        ++phases;
        break;
      }
      pair_phase();
      ++phases;
      peak = std::max(peak, total_items());
      if (phases > 100000) throw Error(ErrorKind::kInvalidArgument, "recompression did not converge");
    }
    if (stats) {
      stats->phases = phases;
      stats->peak_items = std::max(peak, total_items());
    }
    std::vector<std::int64_t> out;
    for (VarId r : roots_) {
      const auto& rhs = rules_[r];
      out.push_back(rhs.empty() ? -1 : rhs[0].letter);
    }
    return out;
  }

 private:
  bool done() const {
    for (VarId r : roots_) {
      const auto& rhs = rules_[r];
      if (rhs.empty()) continue;
      if (rhs.size() != 1 || rhs[0].is_var || rhs[0].mult != 1) return false;
    }
    return true;
  }

  std::size_t total_items() const {
    std::size_t n = 0;
    for (VarId v : order_) n += alive_[v] ? rules_[v].size() : 0;
    return n;
  }

  static void push_merge(std::vector<WItem>& out, WItem w) {
    if (!w.is_var && !out.empty() && !out.back().is_var && out.back().letter == w.letter) {
      out.back().mult += w.mult;
      return;
    }
    out.push_back(std::move(w));
  }

  // Removes maximal runs at variable boundaries, then replaces every run a^m (m >= 2) with a
  // fresh letter keyed by (a, m).
  void block_phase() {
    std::vector<std::optional<WItem>> pref(rules_.size());
    std::vector<std::optional<WItem>> suff(rules_.size());
    std::vector<WItem> next;
    for (VarId v : order_) {
      if (!alive_[v]) continue;
      next.clear();
      for (auto& w : rules_[v]) {
        if (!w.is_var) {
          push_merge(next, std::move(w));
          continue;
        }
        VarId c = w.var;
        if (pref[c]) push_merge(next, *pref[c]);
        if (alive_[c]) next.push_back(std::move(w));
        if (suff[c]) push_merge(next, *suff[c]);
      }
      rules_[v].swap(next);
      if (is_root_[v] || rules_[v].empty()) continue;
      auto& rhs = rules_[v];
      if (!rhs.front().is_var) {
        pref[v] = std::move(rhs.front());
        rhs.erase(rhs.begin());
      }
      if (!rhs.empty() && !rhs.back().is_var) {
        suff[v] = std::move(rhs.back());
        rhs.pop_back();
      }
      if (rhs.empty()) alive_[v] = false;
    }
    for (VarId v : order_) {
      if (!alive_[v]) continue;
      for (auto& w : rules_[v]) {
        if (w.is_var || w.mult == 1) continue;
        auto key = std::make_pair(w.letter, w.mult);
        auto it = blocks_.find(key);
        if (it == blocks_.end()) it = blocks_.emplace(key, next_letter_++).first;
        w.letter = it->second;
        w.mult = 1;
      }
    }
  }

  // Chooses a partition of the letters into left and right and replaces every occurrence of
  // ab with a left, b right, by a fresh letter keyed by (a, b).
  void pair_phase() {
    choose_partition();
    std::vector<std::optional<WItem>> lpop(rules_.size());
    std::vector<std::optional<WItem>> rpop(rules_.size());
    std::vector<WItem> next;
    for (VarId v : order_) {
      if (!alive_[v]) continue;
      next.clear();
      for (auto& w : rules_[v]) {
        if (!w.is_var) {
          next.push_back(std::move(w));
          continue;
        }
        VarId c = w.var;
        if (lpop[c]) next.push_back(*lpop[c]);
        if (alive_[c]) next.push_back(std::move(w));
        if (rpop[c]) next.push_back(*rpop[c]);
      }
      rules_[v].swap(next);
      if (is_root_[v]) continue;
      auto& rhs = rules_[v];
      if (!rhs.empty() && !rhs.front().is_var && side(rhs.front().letter) == kRight) {
        lpop[v] = std::move(rhs.front());
        rhs.erase(rhs.begin());
      }
      if (!rhs.empty() && !rhs.back().is_var && side(rhs.back().letter) == kLeft) {
        rpop[v] = std::move(rhs.back());
        rhs.pop_back();
      }
      if (rhs.empty()) alive_[v] = false;
    }
    for (VarId v : order_) {
      if (!alive_[v]) continue;
      auto& rhs = rules_[v];
      next.clear();
      for (std::size_t i = 0; i < rhs.size(); ++i) {
        if (i + 1 < rhs.size() && !rhs[i].is_var && !rhs[i + 1].is_var && side(rhs[i].letter) == kLeft &&
            side(rhs[i + 1].letter) == kRight) {
          auto key = std::make_pair(rhs[i].letter, rhs[i + 1].letter);
          auto it = pairs_.find(key);
          if (it == pairs_.end()) it = pairs_.emplace(key, next_letter_++).first;
          WItem w;
          w.letter = it->second;
          next.push_back(std::move(w));
          ++i;
        } else {
          next.push_back(std::move(rhs[i]));
        }
      }
      rhs.swap(next);
    }
  }

  enum Side : std::uint8_t { kUnassigned, kLeft, kRight };

  Side side(Letter a) const {
    auto it = side_.find(a);
    return it == side_.end() ? kUnassigned : it->second;
  }

  void choose_partition() {
    // First and last letters of every live variable.
    std::vector<Letter> first(rules_.size()), last(rules_.size());
    for (VarId v : order_) {
      if (!alive_[v] || rules_[v].empty()) continue;
      const auto& f = rules_[v].front();
      const auto& l = rules_[v].back();
      first[v] = f.is_var ? first[f.var] : f.letter;
      last[v] = l.is_var ? last[l.var] : l.letter;
    }
    // Occurrence counts of each rule in the derivation trees of the roots.
    std::vector<long double> occ(rules_.size(), 0.0L);
    for (VarId r : roots_) occ[r] += 1.0L;
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      VarId v = *it;
      if (!alive_[v]) continue;
      for (const auto& w : rules_[v]) {
        if (w.is_var) occ[w.var] += occ[v];
      }
    }
    // Weighted adjacency of distinct letters; direction recorded for the final orientation.
    std::unordered_map<std::pair<Letter, Letter>, long double, PairHash> weight;
    for (VarId v : order_) {
      if (!alive_[v]) continue;
      const auto& rhs = rules_[v];
      for (std::size_t i = 0; i + 1 < rhs.size(); ++i) {
        Letter a = rhs[i].is_var ? last[rhs[i].var] : rhs[i].letter;
        Letter b = rhs[i + 1].is_var ? first[rhs[i + 1].var] : rhs[i + 1].letter;
        if (a != b) weight[{a, b}] += occ[v];
      }
    }
    std::map<Letter, std::vector<std::pair<Letter, long double>>> adj;
    for (const auto& [p, w] : weight) {
      adj[p.first].emplace_back(p.second, w);
      adj[p.second].emplace_back(p.first, w);
    }
    side_.clear();
    for (auto& [c, nbrs] : adj) {
      long double to_left = 0, to_right = 0;
      for (const auto& [d, w] : nbrs) {
        Side s = side(d);
        if (s == kLeft) to_left += w;
        if (s == kRight) to_right += w;
      }
      side_[c] = to_right >= to_left ? kLeft : kRight;
    }
    long double forward = 0, backward = 0;
    for (const auto& [p, w] : weight) {
      Side a = side(p.first), b = side(p.second);
      if (a == kLeft && b == kRight) forward += w;
      if (a == kRight && b == kLeft) backward += w;
    }
    if (backward > forward) {
      for (auto& [c, s] : side_) s = s == kLeft ? kRight : kLeft;
    }
  }

  std::vector<VarId> order_;
  std::vector<std::vector<WItem>> rules_;
  std::vector<bool> alive_;
  std::vector<bool> is_root_;
  std::vector<VarId> roots_;
  Letter next_letter_ = 0;
  std::map<std::pair<Letter, BigInt>, Letter> blocks_;
  std::unordered_map<std::pair<Letter, Letter>, Letter, PairHash> pairs_;
  std::unordered_map<Letter, Side> side_;
};

}  // namespace

std::vector<std::int64_t> canonical_ids(const Sslp& g, std::span<const VarId> roots, RecompressionStats* stats) {
  return Engine(g, roots).run(stats);
}

std::vector<std::int64_t> canonical_ids(const Sslp& g, std::span<const VarId> roots) {
  return canonical_ids(g, roots, nullptr);
}

bool equal_values(const Sslp& g, VarId a, VarId b) {
  VarId roots[] = {a, b};
  auto ids = canonical_ids(g, roots);
  return ids[0] == ids[1];
}

}  // namespace forestslp
