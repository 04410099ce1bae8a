#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "asyncdyn/action_space.h"
#include "asyncdyn/system.h"

namespace asyncdyn {

using Utility = std::int64_t;

// One node's utility over all joint states, indexed by StateIndex. This is
// the only input an uncoupled protocol gets.
class NodeUtility {
 public:
  NodeUtility(ActionSpace space, std::size_t node, std::vector<Utility> table);

  const ActionSpace& space() const { return *space_; }
  std::size_t node() const { return node_; }
  Utility operator()(const State& state) const {
    return table_[space_->encode(state)];
  }
  Utility at(StateIndex index) const { return table_[index]; }
  const std::vector<Utility>& table() const { return table_; }

 private:
  std::shared_ptr<const ActionSpace> space_;
  std::size_t node_;
  std::vector<Utility> table_;
};

class Game {
 public:
  // utilities[i][s] is node i's payoff at the state with index s.
  Game(ActionSpace space, std::vector<std::vector<Utility>> utilities);

  const ActionSpace& space() const { return space_; }
  Utility utility(std::size_t node, const State& state) const {
    return utilities_[node][space_.encode(state)];
  }
  Utility utility(std::size_t node, StateIndex index) const {
    return utilities_[node][index];
  }
  NodeUtility node_utility(std::size_t node) const {
    return NodeUtility(space_, node, utilities_[node]);
  }
  const std::vector<std::vector<Utility>>& utilities() const {
    return utilities_;
  }

 private:
  ActionSpace space_;
  std::vector<std::vector<Utility>> utilities_;
};

// Ascending argmax of u_i(x, a_-i) over x.
std::vector<int> best_responses(const NodeUtility& u, const State& state);
std::vector<int> best_responses(const Game& game, std::size_t node,
                                const State& state);

std::vector<State> enumerate_pne(const Game& game,
                                 std::uint64_t budget = kDefaultStateBudget);

enum class TieBreak { kRefuse, kMin };

// f_i(a) = the best response to a_-i. Throws NonUniqueBestResponse on a tie
// unless tie_break is kMin.
HistorylessSystem br_system(const Game& game, TieBreak tie_break = TieBreak::kRefuse);

// u_i(a) = 1 if f_i(a) = a_i else 0.
Game induced_game(const HistorylessSystem& system,
                  std::uint64_t budget = kDefaultStateBudget);

}  // namespace asyncdyn
