#pragma once

// Iterative Tarjan over an implicit graph.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace asyncdyn::detail {

inline constexpr std::uint32_t kUnvisited =
    std::numeric_limits<std::uint32_t>::max();

struct SccResult {
  // Component id per vertex, kUnvisited for vertices not reached from the
  // roots. Ids are assigned in completion order, so every edge between
  // components goes from a higher id to a lower one.
  std::vector<std::uint32_t> component;
  std::uint32_t count = 0;
};

// `out(v, j)` returns the j-th successor of v for j < degree, or nullopt
// when that edge does not exist.
template <class Out>
SccResult tarjan(std::uint64_t vertex_count, std::uint64_t degree,
                 const std::vector<std::uint64_t>& roots, Out out) {
  SccResult result;
  result.component.assign(vertex_count, kUnvisited);
  std::vector<std::uint32_t> index(vertex_count, kUnvisited);
  std::vector<std::uint32_t> low(vertex_count, 0);
  std::vector<std::uint64_t> stack;
  struct Frame {
    std::uint64_t v;
    std::uint64_t next;
  };
  std::vector<Frame> calls;
  std::uint32_t counter = 0;

  for (std::uint64_t root : roots) {
    if (index[root] != kUnvisited) continue;
    index[root] = low[root] = counter++;
    stack.push_back(root);
    calls.push_back({root, 0});
    while (!calls.empty()) {
      Frame& f = calls.back();
      const std::uint64_t v = f.v;
      if (f.next < degree) {
        const std::optional<std::uint64_t> w = out(v, f.next++);
        if (!w) continue;
        if (index[*w] == kUnvisited) {
          index[*w] = low[*w] = counter++;
          stack.push_back(*w);
          calls.push_back({*w, 0});
        } else if (result.component[*w] == kUnvisited && index[*w] < low[v]) {
          // On the stack: not yet assigned to a finished component.
          low[v] = index[*w];
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::uint64_t w;
        do {
          w = stack.back();
          stack.pop_back();
          result.component[w] = result.count;
        } while (w != v);
        ++result.count;
      }
      calls.pop_back();
      if (!calls.empty()) {
        const std::uint64_t parent = calls.back().v;
        if (low[v] < low[parent]) low[parent] = low[v];
      }
    }
  }
  return result;
}

}  // namespace asyncdyn::detail
