#include "asyncdyn/analyzer.h"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "asyncdyn/error.h"
#include "scc.h"

namespace asyncdyn {

namespace {

constexpr std::uint64_t kIndexLimit = detail::kUnvisited;

void require_states(std::uint64_t states, std::uint64_t budget,
                    const std::string& what) {
  if (states > budget || states >= kIndexLimit) {
    fail(ErrorKind::kBudgetExceeded,
         what + ": " + std::to_string(states) +
             " states exceed the enumeration budget of " +
             std::to_string(std::min(budget, kIndexLimit - 1)));
  }
}

// Shortest mask sequence whose repetition equals `masks` repeated.
std::vector<std::uint64_t> primitive_root(std::vector<std::uint64_t> masks) {
  const std::size_t len = masks.size();
  for (std::size_t p = 1; p < len; ++p) {
    if (len % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < len && periodic; ++i) {
      periodic = masks[i] == masks[i - p];
    }
    if (periodic) {
      masks.resize(p);
      break;
    }
  }
  return masks;
}

std::vector<ActivationSet> to_sets(const std::vector<std::uint64_t>& masks) {
  std::vector<ActivationSet> out;
  out.reserve(masks.size());
  for (auto m : masks) out.emplace_back(m);
  return out;
}

struct Step {
  StateIndex from;
  std::uint64_t mask;
};

// Breadth-first search inside one component from `source`. Returns the
// parent edge per reached state (or nothing for unreached states).
std::vector<std::optional<Step>> bfs_within(const TransitionGraph& g,
                                            StateIndex source,
                                            std::vector<StateIndex>& order) {
  std::vector<std::optional<Step>> parent(g.state_count());
  std::vector<bool> seen(g.state_count(), false);
  const auto comp = g.component(source);
  order.clear();
  order.push_back(source);
  seen[source] = true;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const StateIndex u = order[head];
    for (std::uint64_t m = 0; m < g.mask_count(); ++m) {
      const StateIndex v = g.target(u, m);
      if (seen[v] || g.component(v) != comp) continue;
      seen[v] = true;
      parent[v] = Step{u, m};
      order.push_back(v);
    }
  }
  return parent;
}

std::vector<std::uint64_t> path_masks(
    const std::vector<std::optional<Step>>& parent, StateIndex source,
    StateIndex target) {
  std::vector<std::uint64_t> masks;
  for (StateIndex v = target; v != source; v = parent[v]->from) {
    masks.push_back(parent[v]->mask);
  }
  std::reverse(masks.begin(), masks.end());
  return masks;
}

// Closed walk from `start` inside its component that activates every node and
// moves at least once. Greedy: repeatedly go to the nearest edge that adds
// coverage (or the first state change), then return to `start`.
std::vector<std::uint64_t> oscillation_walk(const TransitionGraph& g,
                                            StateIndex start) {
  const std::uint64_t all = g.mask_count() - 1;
  std::uint64_t covered = 0;
  bool changed = false;
  StateIndex cur = start;
  std::vector<std::uint64_t> walk;
  std::vector<StateIndex> order;

  auto take = [&](StateIndex from, std::uint64_t mask) {
    walk.push_back(mask);
    covered |= mask;
    const StateIndex to = g.target(from, mask);
    changed = changed || to != from;
    return to;
  };

  while (covered != all || !changed) {
    const auto parent = bfs_within(g, cur, order);
    std::vector<std::uint32_t> dist(g.state_count(), 0);
    for (StateIndex v : order) {
      if (v != cur) dist[v] = dist[parent[v]->from] + 1;
    }
    std::optional<Step> best;
    int best_gain = 0;
    std::uint32_t best_dist = 0;
    for (StateIndex u : order) {
      if (best && dist[u] > best_dist) break;
      for (std::uint64_t m = 0; m < g.mask_count(); ++m) {
        const StateIndex v = g.target(u, m);
        if (g.component(v) != g.component(u)) continue;
        const int gain = std::popcount(m & ~covered) +
                         ((!changed && v != u) ? 1 : 0);
        if (gain > best_gain) {
          best = Step{u, m};
          best_gain = gain;
          best_dist = dist[u];
        }
      }
    }
    if (!best) fail(ErrorKind::kInvalidWitness, "component cannot oscillate");
    StateIndex at = cur;
    for (std::uint64_t m : path_masks(parent, cur, best->from)) at = take(at, m);
    cur = take(at, best->mask);
  }
  if (cur != start) {
    const auto parent = bfs_within(g, cur, order);
    for (std::uint64_t m : path_masks(parent, cur, start)) cur = take(cur, m);
  }
  return primitive_root(std::move(walk));
}

struct ComponentFacts {
  std::vector<std::uint64_t> coverage;
  std::vector<bool> changes;
};

ComponentFacts component_facts(const TransitionGraph& g) {
  ComponentFacts facts{std::vector<std::uint64_t>(g.component_count(), 0),
                       std::vector<bool>(g.component_count(), false)};
  for (StateIndex u = 0; u < g.state_count(); ++u) {
    const auto c = g.component(u);
    for (std::uint64_t m = 0; m < g.mask_count(); ++m) {
      const StateIndex v = g.target(u, m);
      if (g.component(v) != c) continue;
      facts.coverage[c] |= m;
      if (v != u) facts.changes[c] = true;
    }
  }
  return facts;
}

}  // namespace

TransitionGraph::TransitionGraph(const TransitionModel& model,
                                 const AnalysisOptions& options)
    : model_(&model), n_(model.node_count()), states_(model.state_count()) {
  require_states(states_, options.state_budget, "transition graph");
  if (n_ >= 32 || mask_count() > options.edge_budget / states_) {
    fail(ErrorKind::kBudgetExceeded,
         "transition graph needs " + std::to_string(states_) + " x 2^" +
             std::to_string(n_) + " edges, above the edge budget of " +
             std::to_string(options.edge_budget));
  }
  targets_.resize(states_ * mask_count());
  for (StateIndex s = 0; s < states_; ++s) {
    for (std::uint64_t m = 0; m < mask_count(); ++m) {
      targets_[s * mask_count() + m] =
          static_cast<std::uint32_t>(model.successor(s, ActivationSet(m)));
    }
  }
  std::vector<std::uint64_t> roots(states_);
  std::iota(roots.begin(), roots.end(), 0);
  auto scc = detail::tarjan(states_, mask_count(), roots,
                            [this](std::uint64_t v, std::uint64_t m)
                                -> std::optional<std::uint64_t> {
                              return target(v, m);
                            });
  component_ = std::move(scc.component);
  component_count_ = scc.count;
}

std::vector<StateIndex> stable_states(const TransitionModel& model,
                                      const AnalysisOptions& options) {
  require_states(model.state_count(), options.state_budget, "stable states");
  std::vector<StateIndex> out;
  for (StateIndex s = 0; s < model.state_count(); ++s) {
    if (model.is_fixed(s)) out.push_back(s);
  }
  return out;
}

std::vector<State> stable_states(const HistorylessSystem& system,
                                 const AnalysisOptions& options) {
  std::vector<State> out;
  for (StateIndex s : stable_states(static_cast<const TransitionModel&>(system),
                                    options)) {
    out.push_back(system.space().decode(s));
  }
  return out;
}

std::vector<StateIndex> spectrum(const TransitionGraph& graph,
                                 StateIndex from) {
  std::vector<bool> seen(graph.state_count(), false);
  std::vector<StateIndex> queue{from};
  seen[from] = true;
  std::vector<StateIndex> out;
  const std::uint64_t all = graph.mask_count() - 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const StateIndex u = queue[head];
    if (graph.target(u, all) == u) out.push_back(u);
    for (std::uint64_t m = 0; m < graph.mask_count(); ++m) {
      const StateIndex v = graph.target(u, m);
      if (!seen[v]) {
        seen[v] = true;
        queue.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<State> spectrum(const HistorylessSystem& system, const State& from,
                            const AnalysisOptions& options) {
  system.space().validate(from);
  const TransitionGraph graph(system, options);
  std::vector<State> out;
  for (StateIndex s : spectrum(graph, system.space().encode(from))) {
    out.push_back(system.space().decode(s));
  }
  return out;
}

CommitMap committed_map(const TransitionGraph& graph) {
  const auto facts = component_facts(graph);
  const auto count = graph.component_count();
  const std::uint64_t all = graph.mask_count() - 1;
  constexpr StateIndex kNone = ~StateIndex{0};
  constexpr StateIndex kMany = ~StateIndex{0} - 1;
  // Per component: the single reachable stable state, kNone or kMany; and
  // whether a fair oscillation is reachable.
  std::vector<StateIndex> reach(count, kNone);
  std::vector<bool> oscillates(count, false);

  std::vector<std::vector<StateIndex>> members(count);
  for (StateIndex s = 0; s < graph.state_count(); ++s) {
    members[graph.component(s)].push_back(s);
  }
  auto merge = [&](StateIndex& into, StateIndex other) {
    if (other == kNone || into == kMany) return;
    if (into == kNone || other == kMany) {
      into = other;
    } else if (into != other) {
      into = kMany;
    }
  };
  for (std::uint32_t c = 0; c < count; ++c) {
    oscillates[c] = facts.changes[c] && facts.coverage[c] == all;
    for (StateIndex u : members[c]) {
      if (graph.target(u, all) == u) merge(reach[c], u);
      for (std::uint64_t m = 0; m < graph.mask_count(); ++m) {
        const auto d = graph.component(graph.target(u, m));
        if (d == c) continue;
        merge(reach[c], reach[d]);
        if (oscillates[d]) oscillates[c] = true;
      }
    }
  }
  CommitMap map;
  map.target.resize(graph.state_count());
  for (StateIndex s = 0; s < graph.state_count(); ++s) {
    const auto c = graph.component(s);
    if (!oscillates[c] && reach[c] != kNone && reach[c] != kMany) {
      map.target[s] = reach[c];
    }
  }
  return map;
}

ConvergenceVerdict decide_convergence(const TransitionGraph& graph) {
  ConvergenceVerdict verdict;
  verdict.stats = {graph.state_count(), graph.edge_count(),
                   graph.component_count()};
  const auto facts = component_facts(graph);
  const std::uint64_t all = graph.mask_count() - 1;
  for (StateIndex s = 0; s < graph.state_count(); ++s) {
    const auto c = graph.component(s);
    if (!facts.changes[c] || facts.coverage[c] != all) continue;
    verdict.convergent = false;
    verdict.witness = Witness{graph.model().window_of(s),
                              to_sets(oscillation_walk(graph, s))};
    break;
  }
  return verdict;
}

ConvergenceVerdict decide_convergence(const TransitionModel& model,
                                      const AnalysisOptions& options) {
  return decide_convergence(TransitionGraph(model, options));
}

ConvergenceVerdict decide_r_convergence(const TransitionModel& model, int r,
                                        const AnalysisOptions& options) {
  if (r < 1) fail(ErrorKind::kInvalidInput, "r must be at least 1");
  const std::size_t n = model.node_count();
  const std::uint64_t budget = std::min(options.state_budget, kIndexLimit - 1);
  if (n >= 32) fail(ErrorKind::kBudgetExceeded, "too many nodes for r-fair product");
  std::uint64_t counters = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (counters > budget / static_cast<std::uint64_t>(r)) {
      fail(ErrorKind::kBudgetExceeded,
           "r-fair product exceeds the enumeration budget of " +
               std::to_string(budget));
    }
    counters *= static_cast<std::uint64_t>(r);
  }
  if (model.state_count() > budget / counters) {
    fail(ErrorKind::kBudgetExceeded,
         "r-fair product of " + std::to_string(model.state_count()) + " x " +
             std::to_string(counters) +
             " vertices exceeds the enumeration budget of " +
             std::to_string(budget));
  }
  const std::uint64_t vertices = model.state_count() * counters;
  const std::uint64_t masks = std::uint64_t{1} << n;
  const auto ur = static_cast<std::uint64_t>(r);

  // Vertex = state * r^n + counter code, node 0's counter most significant.
  auto out = [&](std::uint64_t v, std::uint64_t m)
      -> std::optional<std::uint64_t> {
    std::uint64_t code = v % counters;
    std::uint64_t next = 0;
    std::uint64_t weight = counters;
    for (std::size_t i = 0; i < n; ++i) {
      weight /= ur;
      const std::uint64_t c = (code / weight) % ur;
      std::uint64_t c2 = 0;
      if (((m >> i) & 1U) == 0) {
        c2 = c + 1;
        if (c2 >= ur) return std::nullopt;
      }
      next += c2 * weight;
    }
    return model.successor(v / counters, ActivationSet(m)) * counters + next;
  };

  std::vector<std::uint64_t> roots;
  roots.reserve(model.state_count());
  for (StateIndex s = 0; s < model.state_count(); ++s) {
    roots.push_back(s * counters);
  }
  const auto scc = detail::tarjan(vertices, masks, roots, out);

  ConvergenceVerdict verdict;
  verdict.stats.components = scc.count;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> moving;
  for (std::uint64_t u = 0; u < vertices; ++u) {
    const auto c = scc.component[u];
    if (c == detail::kUnvisited) continue;
    ++verdict.stats.states;
    for (std::uint64_t m = 0; m < masks; ++m) {
      const auto v = out(u, m);
      if (!v) continue;
      ++verdict.stats.edges;
      if (!moving && scc.component[*v] == c && *v / counters != u / counters) {
        moving.emplace(u, m);
      }
    }
  }
  if (!moving) return verdict;

  // Close the loop from the edge's head back to its tail inside the
  // component.
  const auto [u, m] = *moving;
  const std::uint64_t head = *out(u, m);
  const auto c = scc.component[u];
  std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>
      parent;
  std::vector<std::uint64_t> queue{head};
  parent.emplace(head, std::make_pair(head, 0));
  for (std::size_t i = 0; i < queue.size() && !parent.count(u); ++i) {
    const std::uint64_t x = queue[i];
    for (std::uint64_t m2 = 0; m2 < masks; ++m2) {
      const auto y = out(x, m2);
      if (!y || scc.component[*y] != c || parent.count(*y)) continue;
      parent.emplace(*y, std::make_pair(x, m2));
      queue.push_back(*y);
    }
  }
  std::vector<std::uint64_t> back;
  for (std::uint64_t x = u; x != head; x = parent.at(x).first) {
    back.push_back(parent.at(x).second);
  }
  std::vector<std::uint64_t> cycle{m};
  cycle.insert(cycle.end(), back.rbegin(), back.rend());
  verdict.convergent = false;
  verdict.witness = Witness{model.window_of(u / counters),
                            to_sets(primitive_root(std::move(cycle)))};
  return verdict;
}

}  // namespace asyncdyn
