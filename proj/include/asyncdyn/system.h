#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asyncdyn/action_space.h"
#include "asyncdyn/activation.h"
#include "asyncdyn/history.h"

namespace asyncdyn {

// What the analyzer needs from a finite deterministic system: encoded states
// and the successor under each activation set.
class TransitionModel {
 public:
  virtual ~TransitionModel() = default;

  virtual std::size_t node_count() const = 0;
  virtual std::uint64_t state_count() const = 0;
  virtual StateIndex successor(StateIndex index, ActivationSet active) const = 0;
  virtual std::string label(StateIndex index) const = 0;
  // The history a graph state stands for, oldest first. One state for a
  // historyless system.
  virtual std::vector<State> window_of(StateIndex index) const = 0;

  bool is_fixed(StateIndex index) const {
    return successor(index, ActivationSet::all(node_count())) == index;
  }
};

using ReactionRule = std::function<State(const State&)>;

class HistorylessSystem : public TransitionModel {
 public:
  // `table[i]` is the reaction at the state with index i.
  static HistorylessSystem from_table(ActionSpace space,
                                      const std::vector<State>& table);
  // The rule is tabulated when the space fits `budget`, otherwise kept and
  // evaluated on demand. `self_independent` is a claim by the caller, used
  // only when the space is too large to scan.
  static HistorylessSystem from_rule(ActionSpace space, ReactionRule rule,
                                     bool self_independent = false,
                                     std::uint64_t budget = kDefaultStateBudget);

  const ActionSpace& space() const { return *space_; }
  bool has_table() const { return !table_->empty(); }
  bool declared_self_independent() const { return declared_self_independent_; }

  State reaction(const State& state) const;
  StateIndex reaction_index(StateIndex index) const;
  // Reaction rows in index order. Throws BudgetExceeded for rule-only systems.
  std::vector<State> table() const;

  std::size_t node_count() const override { return space_->node_count(); }
  std::uint64_t state_count() const override { return space_->state_count(); }
  StateIndex successor(StateIndex index, ActivationSet active) const override;
  std::string label(StateIndex index) const override {
    return space_->label(index);
  }
  std::vector<State> window_of(StateIndex index) const override {
    return {space_->decode(index)};
  }

  bool same_reaction(const HistorylessSystem& other) const;

 private:
  HistorylessSystem(std::shared_ptr<const ActionSpace> space,
                    std::shared_ptr<const std::vector<StateIndex>> table,
                    ReactionRule rule, bool declared);

  std::shared_ptr<const ActionSpace> space_;
  std::shared_ptr<const std::vector<StateIndex>> table_;
  ReactionRule rule_;
  bool declared_self_independent_ = false;
};

// Node i's reaction to the k most recent states at timestep t.
using NodeReaction =
    std::function<int(const HistoryWindow& window, std::uint64_t t)>;

class KRecallSystem {
 public:
  KRecallSystem(ActionSpace space, std::size_t k, bool stationary,
                std::vector<NodeReaction> reactions);

  // A historyless system read as a stationary 1-recall system.
  static KRecallSystem from_historyless(const HistorylessSystem& system);

  const ActionSpace& space() const { return space_; }
  std::size_t k() const { return k_; }
  bool stationary() const { return stationary_; }
  int react(std::size_t node, const HistoryWindow& last_k,
            std::uint64_t t) const {
    return reactions_[node](last_k, t);
  }

 private:
  ActionSpace space_;
  std::size_t k_;
  bool stationary_;
  std::vector<NodeReaction> reactions_;
};

// A stationary k-recall system as a deterministic system over windows in
// A^k. Window index = mixed-radix code with the oldest state most
// significant.
class LiftedSystem : public TransitionModel {
 public:
  LiftedSystem(const KRecallSystem& system, std::uint64_t budget);

  const KRecallSystem& base() const { return base_; }
  std::size_t k() const { return base_.k(); }

  StateIndex encode(const HistoryWindow& window) const;
  HistoryWindow decode(StateIndex index) const;

  std::size_t node_count() const override { return base_.space().node_count(); }
  std::uint64_t state_count() const override { return count_; }
  StateIndex successor(StateIndex index, ActivationSet active) const override;
  std::string label(StateIndex index) const override;
  std::vector<State> window_of(StateIndex index) const override {
    return decode(index).states();
  }

 private:
  KRecallSystem base_;
  std::uint64_t base_count_;
  std::uint64_t count_;
  // Encoded full reaction per window.
  std::vector<StateIndex> reaction_;
};

State step(const HistorylessSystem& system, const State& state,
           ActivationSet active);

// Uses the last k states of `window`. Throws InsufficientHistory when the
// window is shorter than k or t < k.
State step_history(const KRecallSystem& system, const HistoryWindow& window,
                   std::uint64_t t, ActivationSet active);

bool is_stable(const HistorylessSystem& system, const State& state);

struct SelfIndependenceViolation {
  std::size_t node;
  State first;
  State second;
};

struct SelfIndependenceReport {
  bool self_independent = true;
  // True when the verdict is the caller's declaration, not a scan.
  bool declared_only = false;
  std::vector<SelfIndependenceViolation> violations;
};

// Exhaustive on tabulated systems; reports at most `max_witnesses`
// violations. Untabulated systems fall back to their declaration, or throw
// BudgetExceeded when none was made.
SelfIndependenceReport check_self_independent(const HistorylessSystem& system,
                                              std::size_t max_witnesses = 16);

// Throws Unsupported for non-stationary systems.
LiftedSystem lift_k_recall(const KRecallSystem& system,
                           std::uint64_t budget = kDefaultStateBudget);

}  // namespace asyncdyn
