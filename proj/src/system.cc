#include "asyncdyn/system.h"

#include "asyncdyn/error.h"

namespace asyncdyn {

namespace {

void require_active_within(ActivationSet active, std::size_t n) {
  if (!active.within(n)) {
    fail(ErrorKind::kInvalidInput, "activation set " + active.to_string() +
                                       " names a node outside 1.." +
                                       std::to_string(n));
  }
}

}  // namespace

HistorylessSystem::HistorylessSystem(
    std::shared_ptr<const ActionSpace> space,
    std::shared_ptr<const std::vector<StateIndex>> table, ReactionRule rule,
    bool declared)
    : space_(std::move(space)),
      table_(std::move(table)),
      rule_(std::move(rule)),
      declared_self_independent_(declared) {}

HistorylessSystem HistorylessSystem::from_table(
    ActionSpace space, const std::vector<State>& table) {
  if (table.size() != space.state_count()) {
    fail(ErrorKind::kInvalidInput,
         "reaction table has " + std::to_string(table.size()) +
             " rows, expected " + std::to_string(space.state_count()));
  }
  auto rows = std::make_shared<std::vector<StateIndex>>();
  rows->reserve(table.size());
  for (const auto& row : table) {
    space.validate(row);
    rows->push_back(space.encode(row));
  }
  return HistorylessSystem(
      std::make_shared<const ActionSpace>(std::move(space)), std::move(rows),
      nullptr, false);
}

HistorylessSystem HistorylessSystem::from_rule(ActionSpace space,
                                               ReactionRule rule,
                                               bool self_independent,
                                               std::uint64_t budget) {
  if (!rule) fail(ErrorKind::kInvalidInput, "reaction rule is empty");
  auto rows = std::make_shared<std::vector<StateIndex>>();
  if (space.state_count() <= budget) {
    rows->reserve(space.state_count());
    for (StateIndex i = 0; i < space.state_count(); ++i) {
      const State out = rule(space.decode(i));
      space.validate(out);
      rows->push_back(space.encode(out));
    }
    rule = nullptr;
  }
  return HistorylessSystem(
      std::make_shared<const ActionSpace>(std::move(space)), std::move(rows),
      std::move(rule), self_independent);
}

State HistorylessSystem::reaction(const State& state) const {
  space_->validate(state);
  if (has_table()) return space_->decode((*table_)[space_->encode(state)]);
  State out = rule_(state);
  space_->validate(out);
  return out;
}

StateIndex HistorylessSystem::reaction_index(StateIndex index) const {
  if (has_table()) return (*table_)[index];
  return space_->encode(reaction(space_->decode(index)));
}

std::vector<State> HistorylessSystem::table() const {
  if (!has_table()) {
    space_->require_within(0, "reaction table");
  }
  std::vector<State> out;
  out.reserve(table_->size());
  for (StateIndex row : *table_) out.push_back(space_->decode(row));
  return out;
}

StateIndex HistorylessSystem::successor(StateIndex index,
                                        ActivationSet active) const {
  if (active.empty()) return index;
  const StateIndex full = reaction_index(index);
  const std::size_t n = node_count();
  if (active == ActivationSet::all(n)) return full;
  StateIndex out = index;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active.contains(i)) continue;
    const std::uint64_t w = space_->weight(i);
    out = out - static_cast<StateIndex>(space_->digit(index, i)) * w +
          static_cast<StateIndex>(space_->digit(full, i)) * w;
  }
  return out;
}

bool HistorylessSystem::same_reaction(const HistorylessSystem& other) const {
  if (!(space() == other.space())) return false;
  for (StateIndex i = 0; i < state_count(); ++i) {
    if (reaction_index(i) != other.reaction_index(i)) return false;
  }
  return true;
}

KRecallSystem::KRecallSystem(ActionSpace space, std::size_t k,
                             bool stationary,
                             std::vector<NodeReaction> reactions)
    : space_(std::move(space)),
      k_(k),
      stationary_(stationary),
      reactions_(std::move(reactions)) {
  if (k_ < 1) fail(ErrorKind::kInvalidInput, "recall depth k must be >= 1");
  if (reactions_.size() != space_.node_count()) {
    fail(ErrorKind::kInvalidInput,
         "expected one reaction per node, got " +
             std::to_string(reactions_.size()));
  }
  for (const auto& r : reactions_) {
    if (!r) fail(ErrorKind::kInvalidInput, "node reaction is empty");
  }
}

KRecallSystem KRecallSystem::from_historyless(const HistorylessSystem& system) {
  std::vector<NodeReaction> reactions;
  for (std::size_t i = 0; i < system.node_count(); ++i) {
    reactions.push_back([system, i](const HistoryWindow& w, std::uint64_t) {
      return system.reaction(w.back())[i];
    });
  }
  return KRecallSystem(system.space(), 1, true, std::move(reactions));
}

State step(const HistorylessSystem& system, const State& state,
           ActivationSet active) {
  system.space().validate(state);
  require_active_within(active, system.node_count());
  if (active.empty()) return state;
  const State full = system.reaction(state);
  State out = state;
  for (std::size_t i : active.members()) out[i] = full[i];
  return out;
}

State step_history(const KRecallSystem& system, const HistoryWindow& window,
                   std::uint64_t t, ActivationSet active) {
  if (window.size() < system.k()) {
    fail(ErrorKind::kInsufficientHistory,
         "window holds " + std::to_string(window.size()) +
             " states but the system recalls " + std::to_string(system.k()));
  }
  if (t < system.k()) {
    fail(ErrorKind::kInsufficientHistory,
         "timestep " + std::to_string(t) + " precedes recall depth " +
             std::to_string(system.k()));
  }
  window.validate(system.space());
  require_active_within(active, system.space().node_count());
  State out = window.back();
  if (active.empty()) return out;
  const HistoryWindow recent = window.last(system.k());
  for (std::size_t i : active.members()) {
    const int a = system.react(i, recent, t);
    if (a < 0 || a >= system.space().size(i)) {
      fail(ErrorKind::kInvalidInput,
           "reaction of node " + std::to_string(i + 1) + " returned action " +
               std::to_string(a) + " outside its action space");
    }
    out[i] = a;
  }
  return out;
}

bool is_stable(const HistorylessSystem& system, const State& state) {
  return system.reaction(state) == state;
}

SelfIndependenceReport check_self_independent(const HistorylessSystem& system,
                                              std::size_t max_witnesses) {
  SelfIndependenceReport report;
  if (!system.has_table()) {
    if (!system.declared_self_independent()) {
      system.space().require_within(0, "self-independence scan");
    }
    report.declared_only = true;
    return report;
  }
  const ActionSpace& space = system.space();
  for (std::size_t i = 0; i < space.node_count(); ++i) {
    const std::uint64_t w = space.weight(i);
    for (StateIndex s = 0; s < space.state_count(); ++s) {
      // Compare each state with the variant where node i plays 0.
      const int own = space.digit(s, i);
      if (own == 0) continue;
      const StateIndex base = s - static_cast<StateIndex>(own) * w;
      if (space.digit(system.reaction_index(s), i) !=
          space.digit(system.reaction_index(base), i)) {
        report.self_independent = false;
        if (report.violations.size() < max_witnesses) {
          report.violations.push_back({i, space.decode(base), space.decode(s)});
        }
      }
    }
  }
  return report;
}

LiftedSystem::LiftedSystem(const KRecallSystem& system, std::uint64_t budget)
    : base_(system), base_count_(system.space().state_count()) {
  if (!system.stationary()) {
    fail(ErrorKind::kUnsupported,
         "non-stationary systems depend on the time counter and cannot be "
         "lifted to a finite window space");
  }
  system.space().require_within(budget, "lifted window space");
  count_ = 1;
  for (std::size_t j = 0; j < system.k(); ++j) {
    if (count_ > budget / base_count_) {
      fail(ErrorKind::kBudgetExceeded,
           "lifted window space exceeds the enumeration budget of " +
               std::to_string(budget));
    }
    count_ *= base_count_;
  }
  reaction_.resize(count_);
  const auto all = ActivationSet::all(node_count());
  for (StateIndex w = 0; w < count_; ++w) {
    // Stationary reactions ignore t; any t >= k is valid.
    reaction_[w] = system.space().encode(
        step_history(system, decode(w), system.k(), all));
  }
}

StateIndex LiftedSystem::encode(const HistoryWindow& window) const {
  if (window.size() != k()) {
    fail(ErrorKind::kInvalidInput, "window length " +
                                       std::to_string(window.size()) +
                                       " differs from k=" + std::to_string(k()));
  }
  StateIndex index = 0;
  for (const auto& s : window.states()) {
    base_.space().validate(s);
    index = index * base_count_ + base_.space().encode(s);
  }
  return index;
}

HistoryWindow LiftedSystem::decode(StateIndex index) const {
  std::vector<State> states(k());
  for (std::size_t j = k(); j-- > 0;) {
    states[j] = base_.space().decode(index % base_count_);
    index /= base_count_;
  }
  return HistoryWindow(std::move(states));
}

StateIndex LiftedSystem::successor(StateIndex index,
                                   ActivationSet active) const {
  const ActionSpace& space = base_.space();
  const StateIndex current = index % base_count_;
  StateIndex next = current;
  if (!active.empty()) {
    const StateIndex full = reaction_[index];
    for (std::size_t i = 0; i < space.node_count(); ++i) {
      if (!active.contains(i)) continue;
      const std::uint64_t w = space.weight(i);
      next = next - static_cast<StateIndex>(space.digit(current, i)) * w +
             static_cast<StateIndex>(space.digit(full, i)) * w;
    }
  }
  // Drop the oldest state, append the new one.
  return (index % (count_ / base_count_)) * base_count_ + next;
}

std::string LiftedSystem::label(StateIndex index) const {
  std::string out;
  const HistoryWindow w = decode(index);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (j) out += '|';
    out += base_.space().label(w[j]);
  }
  return out;
}

LiftedSystem lift_k_recall(const KRecallSystem& system, std::uint64_t budget) {
  return LiftedSystem(system, budget);
}

}  // namespace asyncdyn
