#include "asyncdyn/uncoupled.h"

#include <algorithm>
#include <random>

#include "asyncdyn/error.h"

namespace asyncdyn {

namespace {

bool best_responding(const NodeUtility& u, const State& state) {
  const auto br = best_responses(u, state);
  return std::find(br.begin(), br.end(), state[u.node()]) != br.end();
}

int mod(int x, int k) { return ((x % k) + k) % k; }

void require_four_actions(const ActionSpace& space) {
  for (std::size_t j = 0; j < space.node_count(); ++j) {
    if (space.size(j) < 4) {
      fail(ErrorKind::kUnsupported,
           "the 2-recall protocol needs at least four actions per node; node " +
               std::to_string(j + 1) + " has " +
               std::to_string(space.size(j)));
    }
  }
}

std::vector<bool> pne_mask(const Game& game, std::uint64_t budget) {
  std::vector<bool> pne(game.space().state_count(), false);
  for (const State& p : enumerate_pne(game, budget)) {
    pne[game.space().encode(p)] = true;
  }
  return pne;
}

}  // namespace

State cyclic_successor(const ActionSpace& space, const State& state) {
  space.validate(state);
  State next = state;
  for (std::size_t i = next.size(); i-- > 0;) {
    next[i] = (next[i] + 1) % space.size(i);
    if (next[i] != 0) break;
  }
  return next;
}

int three_recall_step(const NodeUtility& u, const State& a, const State& b,
                      const State& c) {
  const std::size_t i = u.node();
  if (b == c) {
    const auto br = best_responses(u, c);
    if (std::find(br.begin(), br.end(), c[i]) != br.end()) return c[i];
    return br.front();
  }
  if (a == b) return cyclic_successor(u.space(), a)[i];
  return c[i];
}

int two_recall_step(const NodeUtility& u, const State& a, const State& b) {
  const ActionSpace& space = u.space();
  require_four_actions(space);
  space.validate(a);
  space.validate(b);
  const std::size_t i = u.node();
  bool move_on = a != b;
  bool query = true;
  for (std::size_t j = 0; j < space.node_count(); ++j) {
    const int k = space.size(j);
    move_on = move_on && mod(a[j] - b[j], k) <= 1;
    query = query && mod(b[j] - a[j], k) <= 2;
  }
  if (move_on) return cyclic_successor(space, a)[i];
  if (query) {
    return best_responding(u, b) ? b[i] : mod(b[i] - 1, space.size(i));
  }
  return b[i];
}

KRecallSystem three_recall_system(const Game& game) {
  std::vector<NodeReaction> reactions;
  for (std::size_t i = 0; i < game.space().node_count(); ++i) {
    reactions.push_back(
        [u = game.node_utility(i)](const HistoryWindow& w, std::uint64_t) {
          return three_recall_step(u, w[0], w[1], w[2]);
        });
  }
  return KRecallSystem(game.space(), 3, true, std::move(reactions));
}

KRecallSystem two_recall_system(const Game& game) {
  require_four_actions(game.space());
  std::vector<NodeReaction> reactions;
  for (std::size_t i = 0; i < game.space().node_count(); ++i) {
    reactions.push_back(
        [u = game.node_utility(i)](const HistoryWindow& w, std::uint64_t) {
          return two_recall_step(u, w[0], w[1]);
        });
  }
  return KRecallSystem(game.space(), 2, true, std::move(reactions));
}

std::vector<int> stay_or_roll_support(const NodeUtility& u,
                                      const State& state) {
  if (best_responding(u, state)) return {state[u.node()]};
  std::vector<int> all(static_cast<std::size_t>(u.space().size(u.node())));
  for (std::size_t x = 0; x < all.size(); ++x) all[x] = static_cast<int>(x);
  return all;
}

SupportSystem stay_or_roll_system(const Game& game, std::uint64_t budget) {
  const ActionSpace& space = game.space();
  space.require_within(budget, "stay-or-roll support system");
  SupportSystem out{space, {}};
  for (std::size_t i = 0; i < space.node_count(); ++i) {
    const NodeUtility u = game.node_utility(i);
    std::vector<std::vector<int>> per_state;
    per_state.reserve(space.state_count());
    for (StateIndex s = 0; s < space.state_count(); ++s) {
      per_state.push_back(stay_or_roll_support(u, space.decode(s)));
    }
    out.support.push_back(std::move(per_state));
  }
  return out;
}

const char* to_string(StabilizationVerdict::Kind kind) {
  switch (kind) {
    case StabilizationVerdict::Kind::kSelfStabilizing:
      return "SelfStabilizing";
    case StabilizationVerdict::Kind::kFails:
      return "Fails";
    case StabilizationVerdict::Kind::kNoPne:
      return "NoPNE";
  }
  return "Unknown";
}

StabilizationVerdict check_self_stabilization(Protocol protocol,
                                              const Game& game,
                                              std::uint64_t budget) {
  const auto pne = pne_mask(game, budget);
  if (std::find(pne.begin(), pne.end(), true) == pne.end()) {
    return {StabilizationVerdict::Kind::kNoPne, {}};
  }
  const KRecallSystem system = protocol == Protocol::kThreeRecall
                                   ? three_recall_system(game)
                                   : two_recall_system(game);
  const LiftedSystem lifted = lift_k_recall(system, budget);
  const std::uint64_t windows = lifted.state_count();
  const std::uint64_t base = game.space().state_count();
  const auto all = ActivationSet::all(game.space().node_count());

  // Under the synchronous schedule each window has one successor. Walk every
  // path to its terminal cycle; a window is good iff that cycle only shows
  // PNE states.
  enum : std::uint8_t { kFresh, kOnPath, kDone };
  std::vector<std::uint8_t> mark(windows, kFresh);
  std::vector<bool> good(windows, false);
  std::vector<StateIndex> path;
  for (StateIndex w0 = 0; w0 < windows; ++w0) {
    if (mark[w0] != kFresh) continue;
    path.clear();
    StateIndex w = w0;
    while (mark[w] == kFresh) {
      mark[w] = kOnPath;
      path.push_back(w);
      w = lifted.successor(w, all);
    }
    bool verdict;
    if (mark[w] == kOnPath) {
      verdict = true;
      StateIndex x = w;
      do {
        verdict = verdict && pne[x % base];
        x = lifted.successor(x, all);
      } while (x != w);
    } else {
      verdict = good[w];
    }
    for (StateIndex x : path) {
      good[x] = verdict;
      mark[x] = kDone;
    }
  }
  for (StateIndex w = 0; w < windows; ++w) {
    if (!good[w]) {
      return {StabilizationVerdict::Kind::kFails, lifted.window_of(w)};
    }
  }
  return {StabilizationVerdict::Kind::kSelfStabilizing, {}};
}

namespace {

// Successors of s in the support graph, as state indices.
template <class Visit>
void for_each_support_successor(const SupportSystem& system, StateIndex s,
                                Visit visit) {
  const ActionSpace& space = system.space;
  const std::size_t n = space.node_count();
  std::vector<std::size_t> pick(n, 0);
  while (true) {
    StateIndex t = 0;
    for (std::size_t i = 0; i < n; ++i) {
      t += static_cast<StateIndex>(system.support[i][s][pick[i]]) *
           space.weight(i);
    }
    visit(t);
    std::size_t i = n;
    while (i-- > 0) {
      if (++pick[i] < system.support[i][s].size()) break;
      pick[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) return;
  }
}

}  // namespace

std::vector<StateIndex> support_reachable(const SupportSystem& system,
                                          const State& from) {
  const ActionSpace& space = system.space;
  space.validate(from);
  std::vector<bool> seen(space.state_count(), false);
  std::vector<StateIndex> order{space.encode(from)};
  seen[order.front()] = true;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for_each_support_successor(system, order[head], [&](StateIndex t) {
      if (!seen[t]) {
        seen[t] = true;
        order.push_back(t);
      }
    });
  }
  std::sort(order.begin(), order.end());
  return order;
}

StabilizationVerdict check_self_stabilization_randomized(const Game& game,
                                                         std::uint64_t budget) {
  const auto pne = pne_mask(game, budget);
  if (std::find(pne.begin(), pne.end(), true) == pne.end()) {
    return {StabilizationVerdict::Kind::kNoPne, {}};
  }
  const SupportSystem system = stay_or_roll_system(game, budget);
  const std::uint64_t states = system.space.state_count();
  std::vector<std::vector<StateIndex>> preds(states);
  std::uint64_t edges = 0;
  for (StateIndex s = 0; s < states; ++s) {
    for_each_support_successor(system, s, [&](StateIndex t) {
      if (++edges > budget) {
        fail(ErrorKind::kBudgetExceeded,
             "stay-or-roll support graph exceeds the budget of " +
                 std::to_string(budget) + " edges");
      }
      preds[t].push_back(s);
    });
  }
  // Backward search from the equilibria.
  std::vector<bool> reaches(states, false);
  std::vector<StateIndex> queue;
  for (StateIndex s = 0; s < states; ++s) {
    if (pne[s]) {
      reaches[s] = true;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (StateIndex p : preds[queue[head]]) {
      if (!reaches[p]) {
        reaches[p] = true;
        queue.push_back(p);
      }
    }
  }
  for (StateIndex s = 0; s < states; ++s) {
    if (!reaches[s]) {
      return {StabilizationVerdict::Kind::kFails,
              {system.space.decode(s)}};
    }
  }
  return {StabilizationVerdict::Kind::kSelfStabilizing, {}};
}

std::optional<std::uint64_t> simulate_stay_or_roll(const Game& game,
                                                   const State& from,
                                                   std::uint64_t seed,
                                                   std::uint64_t steps) {
  const ActionSpace& space = game.space();
  space.validate(from);
  const auto pne = pne_mask(game, kDefaultStateBudget);
  std::vector<NodeUtility> us;
  for (std::size_t i = 0; i < space.node_count(); ++i) {
    us.push_back(game.node_utility(i));
  }
  std::mt19937_64 engine(seed);
  State a = from;
  for (std::uint64_t t = 0; t <= steps; ++t) {
    if (pne[space.encode(a)]) return t;
    State next = a;
    for (std::size_t i = 0; i < us.size(); ++i) {
      if (!best_responding(us[i], a)) {
        next[i] = static_cast<int>(engine() %
                                   static_cast<std::uint64_t>(space.size(i)));
      }
    }
    a = std::move(next);
  }
  return std::nullopt;
}

Game fixture_game_2x2x2() {
  // u_i(x, y, z) is coordinate i of M_x[y][z].
  static const int m[2][2][2][3] = {
      {{{1, 1, 1}, {1, 0, 1}}, {{1, 0, 0}, {0, 1, 1}}},
      {{{0, 1, 0}, {0, 1, 1}}, {{0, 0, 0}, {1, 0, 1}}},
  };
  const ActionSpace space({2, 2, 2});
  std::vector<std::vector<Utility>> u(3, std::vector<Utility>(8));
  for (StateIndex s = 0; s < 8; ++s) {
    const State a = space.decode(s);
    for (std::size_t i = 0; i < 3; ++i) u[i][s] = m[a[0]][a[1]][a[2]][i];
  }
  return Game(space, std::move(u));
}

}  // namespace asyncdyn
