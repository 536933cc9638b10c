#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "forestslp/error.hpp"

namespace forestslp::detail {

// Iterative post-order over an implicit dag. deps(node, out) appends the dependencies of node.
// Keys are 64-bit so callers can pack (kind, id) pairs. Throws CycleError on a cycle.
template <class Deps>
std::vector<std::uint64_t> post_order(const std::vector<std::uint64_t>& roots, Deps&& deps) {
  enum : std::uint8_t { kGrey = 1, kBlack = 2 };
  std::unordered_map<std::uint64_t, std::uint8_t> state;
  std::vector<std::uint64_t> out;
  struct Frame {
    std::uint64_t node;
    std::vector<std::uint64_t> next;
    std::size_t i;
  };
  std::vector<Frame> stack;
  for (std::uint64_t root : roots) {
    if (state.count(root)) continue;
    state[root] = kGrey;
    stack.push_back({root, {}, 0});
    deps(root, stack.back().next);
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.i == top.next.size()) {
        state[top.node] = kBlack;
        out.push_back(top.node);
        stack.pop_back();
        continue;
      }
      std::uint64_t child = top.next[top.i++];
      auto it = state.find(child);
      if (it != state.end()) {
        if (it->second == kGrey) throw Error(ErrorKind::kCycle, "cyclic dependency");
        continue;
      }
      state.emplace(child, kGrey);
      Frame frame{child, {}, 0};
      deps(child, frame.next);
      stack.push_back(std::move(frame));
    }
  }
  return out;
}

inline std::uint64_t key(std::uint32_t kind, std::uint32_t id) {
  return (static_cast<std::uint64_t>(kind) << 32) | id;
}
inline std::uint32_t key_kind(std::uint64_t k) { return static_cast<std::uint32_t>(k >> 32); }
inline std::uint32_t key_id(std::uint64_t k) { return static_cast<std::uint32_t>(k); }

}  // namespace forestslp::detail
