#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "asyncdyn/game.h"
#include "asyncdyn/system.h"

namespace asyncdyn {

// Lexicographic successor with carry; the maximal state wraps to all zeros.
State cyclic_successor(const ActionSpace& space, const State& state);

// Node u.node()'s reaction to the window (a, b, c), c most recent.
int three_recall_step(const NodeUtility& u, const State& a, const State& b,
                      const State& c);

// Node u.node()'s reaction to the window (a, b), b most recent. Throws
// Unsupported when some node has fewer than four actions.
int two_recall_step(const NodeUtility& u, const State& a, const State& b);

// Stationary k-recall systems whose node i reaction is built from
// game.node_utility(i) alone.
KRecallSystem three_recall_system(const Game& game);
KRecallSystem two_recall_system(const Game& game);

// Actions stay-or-roll plays with positive probability: the current action
// when it is a best response, otherwise any action.
std::vector<int> stay_or_roll_support(const NodeUtility& u, const State& state);

// Positive-probability moves of a randomized historyless protocol under the
// synchronous schedule.
struct SupportSystem {
  ActionSpace space;
  // support[i][s]: actions node i may play from state s.
  std::vector<std::vector<std::vector<int>>> support;
};

SupportSystem stay_or_roll_system(const Game& game,
                                  std::uint64_t budget = kDefaultStateBudget);

enum class Protocol { kThreeRecall, kTwoRecall };

struct StabilizationVerdict {
  enum class Kind { kSelfStabilizing, kFails, kNoPne };
  Kind kind = Kind::kSelfStabilizing;
  // Initial window (oldest first) for deterministic protocols, a single state
  // for stay-or-roll.
  std::vector<State> witness;
};

const char* to_string(StabilizationVerdict::Kind kind);

// Deterministic exhaustive check over every initial window under the
// synchronous schedule.
StabilizationVerdict check_self_stabilization(
    Protocol protocol, const Game& game,
    std::uint64_t budget = kDefaultStateBudget);

// Support reachability: stabilizing iff a PNE is reachable from every state.
StabilizationVerdict check_self_stabilization_randomized(
    const Game& game, std::uint64_t budget = kDefaultStateBudget);

// States reachable from `from` in the support graph.
std::vector<StateIndex> support_reachable(const SupportSystem& system,
                                          const State& from);

// Seeded simulation of stay-or-roll from `from` for `steps` synchronous
// steps. Returns the first time a PNE is hit, or nothing.
std::optional<std::uint64_t> simulate_stay_or_roll(const Game& game,
                                                   const State& from,
                                                   std::uint64_t seed,
                                                   std::uint64_t steps);

// The three-node, two-action game whose unique PNE is (0,0,0) and from which
// stay-or-roll cannot reach it.
Game fixture_game_2x2x2();

}  // namespace asyncdyn
