#include "asyncdyn/game.h"

#include <algorithm>

#include "asyncdyn/error.h"

namespace asyncdyn {

NodeUtility::NodeUtility(ActionSpace space, std::size_t node,
                         std::vector<Utility> table)
    : space_(std::make_shared<const ActionSpace>(std::move(space))),
      node_(node),
      table_(std::move(table)) {
  if (node_ >= space_->node_count()) {
    fail(ErrorKind::kInvalidInput, "utility node index out of range");
  }
  if (table_.size() != space_->state_count()) {
    fail(ErrorKind::kInvalidInput,
         "utility table of node " + std::to_string(node_ + 1) + " has " +
             std::to_string(table_.size()) + " entries, expected " +
             std::to_string(space_->state_count()));
  }
}

Game::Game(ActionSpace space, std::vector<std::vector<Utility>> utilities)
    : space_(std::move(space)), utilities_(std::move(utilities)) {
  space_.require_within(kDefaultStateBudget, "game utility tables");
  if (utilities_.size() != space_.node_count()) {
    fail(ErrorKind::kInvalidInput, "game needs one utility table per node");
  }
  for (std::size_t i = 0; i < utilities_.size(); ++i) {
    if (utilities_[i].size() != space_.state_count()) {
      fail(ErrorKind::kInvalidInput,
           "utility table of node " + std::to_string(i + 1) + " has " +
               std::to_string(utilities_[i].size()) + " entries, expected " +
               std::to_string(space_.state_count()));
    }
  }
}

std::vector<int> best_responses(const NodeUtility& u, const State& state) {
  const ActionSpace& space = u.space();
  space.validate(state);
  const std::size_t i = u.node();
  const std::uint64_t w = space.weight(i);
  const StateIndex base =
      space.encode(state) - static_cast<StateIndex>(state[i]) * w;
  std::vector<int> best;
  Utility top = 0;
  for (int x = 0; x < space.size(i); ++x) {
    const Utility v = u.at(base + static_cast<StateIndex>(x) * w);
    if (best.empty() || v > top) {
      best.assign(1, x);
      top = v;
    } else if (v == top) {
      best.push_back(x);
    }
  }
  return best;
}

std::vector<int> best_responses(const Game& game, std::size_t node,
                                const State& state) {
  return best_responses(game.node_utility(node), state);
}

std::vector<State> enumerate_pne(const Game& game, std::uint64_t budget) {
  const ActionSpace& space = game.space();
  space.require_within(budget, "equilibrium enumeration");
  std::vector<NodeUtility> us;
  for (std::size_t i = 0; i < space.node_count(); ++i) {
    us.push_back(game.node_utility(i));
  }
  std::vector<State> out;
  for (StateIndex s = 0; s < space.state_count(); ++s) {
    const State a = space.decode(s);
    bool equilibrium = true;
    for (std::size_t i = 0; i < us.size() && equilibrium; ++i) {
      const auto br = best_responses(us[i], a);
      equilibrium = std::find(br.begin(), br.end(), a[i]) != br.end();
    }
    if (equilibrium) out.push_back(a);
  }
  return out;
}

HistorylessSystem br_system(const Game& game, TieBreak tie_break) {
  const ActionSpace& space = game.space();
  std::vector<NodeUtility> us;
  for (std::size_t i = 0; i < space.node_count(); ++i) {
    us.push_back(game.node_utility(i));
  }
  std::vector<State> table;
  table.reserve(space.state_count());
  for (StateIndex s = 0; s < space.state_count(); ++s) {
    const State a = space.decode(s);
    State row(a.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
      const auto br = best_responses(us[i], a);
      if (br.size() > 1 && tie_break == TieBreak::kRefuse) {
        fail(ErrorKind::kNonUniqueBestResponse,
             "node " + std::to_string(i + 1) + " has " +
                 std::to_string(br.size()) + " best responses at " +
                 to_string(a));
      }
      row[i] = br.front();
    }
    table.push_back(std::move(row));
  }
  return HistorylessSystem::from_table(space, table);
}

Game induced_game(const HistorylessSystem& system, std::uint64_t budget) {
  const ActionSpace& space = system.space();
  space.require_within(budget, "induced game");
  std::vector<std::vector<Utility>> u(space.node_count(),
                                      std::vector<Utility>(space.state_count()));
  for (StateIndex s = 0; s < space.state_count(); ++s) {
    const StateIndex r = system.reaction_index(s);
    for (std::size_t i = 0; i < space.node_count(); ++i) {
      u[i][s] = space.digit(r, i) == space.digit(s, i) ? 1 : 0;
    }
  }
  return Game(space, std::move(u));
}

}  // namespace asyncdyn
