#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "asyncdyn/simulator.h"
#include "asyncdyn/system.h"

namespace asyncdyn {

struct AnalysisOptions {
  std::uint64_t state_budget = kDefaultStateBudget;
  // Ceiling on materialized edges (states times 2^n).
  std::uint64_t edge_budget = std::uint64_t{1} << 26;
};

// Every state with one edge per activation subset. Edge labels are the
// subset bitmasks 0 .. 2^n - 1. Keeps a reference to the model, which must
// outlive the graph.
class TransitionGraph {
 public:
  explicit TransitionGraph(const TransitionModel& model,
                           const AnalysisOptions& options = {});

  const TransitionModel& model() const { return *model_; }
  std::size_t node_count() const { return n_; }
  std::uint64_t state_count() const { return states_; }
  std::uint64_t mask_count() const { return std::uint64_t{1} << n_; }
  std::uint64_t edge_count() const { return states_ * mask_count(); }

  StateIndex target(StateIndex from, std::uint64_t mask) const {
    return targets_[from * mask_count() + mask];
  }

  // Components are numbered so that edges never go from a lower id to a
  // higher one.
  std::uint32_t component(StateIndex s) const { return component_[s]; }
  std::uint32_t component_count() const { return component_count_; }

 private:
  const TransitionModel* model_;
  std::size_t n_;
  std::uint64_t states_;
  std::vector<std::uint32_t> targets_;
  std::vector<std::uint32_t> component_;
  std::uint32_t component_count_ = 0;
};

struct AnalysisStats {
  std::uint64_t states = 0;
  std::uint64_t edges = 0;
  std::uint64_t components = 0;
};

struct ConvergenceVerdict {
  bool convergent = true;
  std::optional<Witness> witness;
  AnalysisStats stats;
};

std::vector<StateIndex> stable_states(const TransitionModel& model,
                                      const AnalysisOptions& options = {});
std::vector<State> stable_states(const HistorylessSystem& system,
                                 const AnalysisOptions& options = {});

// Stable states reachable from `from`, ascending.
std::vector<StateIndex> spectrum(const TransitionGraph& graph, StateIndex from);
std::vector<State> spectrum(const HistorylessSystem& system, const State& from,
                            const AnalysisOptions& options = {});

// Per state, the stable state it is committed to, if any.
struct CommitMap {
  std::vector<std::optional<StateIndex>> target;
  bool committed(StateIndex s) const { return target[s].has_value(); }
};

CommitMap committed_map(const TransitionGraph& graph);

ConvergenceVerdict decide_convergence(const TransitionGraph& graph);
ConvergenceVerdict decide_convergence(const TransitionModel& model,
                                      const AnalysisOptions& options = {});

// r-fair convergence via the product with per-node idle counters. The
// product holds |A| * r^n vertices and must fit options.state_budget.
ConvergenceVerdict decide_r_convergence(const TransitionModel& model, int r,
                                        const AnalysisOptions& options = {});

}  // namespace asyncdyn
