#pragma once

#include <cstdint>
#include <deque>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "asyncdyn/history.h"
#include "asyncdyn/schedule.h"
#include "asyncdyn/system.h"

namespace asyncdyn {

inline constexpr std::uint64_t kDefaultMaxSteps = 1'000'000;

// Stored states beyond this many are dropped from the front.
inline constexpr std::size_t kTrajectoryKeep = 1U << 16;

struct Trajectory {
  HistoryWindow initial;
  // a^t for t in [first_time, first_time + states.size()); a^0 is
  // initial.back().
  std::deque<State> states;
  // activations[j] produced states[j]; the entry for a^0 is empty.
  std::deque<ActivationSet> activations;
  std::uint64_t first_time = 0;
  // Number of steps computed.
  std::uint64_t length = 0;

  bool complete() const { return first_time == 0; }
  const State& at(std::uint64_t t) const { return states[t - first_time]; }
};

namespace verdicts {
struct Converged {
  State state;
  std::uint64_t time;
};
// The run revisited a (window, schedule phase) pair: segment holds the
// states a^start .. a^(start+period).
struct Cycling {
  std::uint64_t start;
  std::uint64_t period;
  std::vector<State> segment;
  std::vector<ActivationSet> activations;
};
struct BudgetExhausted {
  State last;
};
}  // namespace verdicts

using RunVerdict = std::variant<verdicts::Converged, verdicts::Cycling,
                                verdicts::BudgetExhausted>;

std::string verdict_name(const RunVerdict& verdict);

struct RunResult {
  Trajectory trajectory;
  RunVerdict verdict;
};

RunResult run(const HistorylessSystem& system, const State& initial,
              const Schedule& schedule,
              std::uint64_t max_steps = kDefaultMaxSteps);

// Non-stationary systems never report Converged or Cycling since the time
// counter can change later reactions.
RunResult run(const KRecallSystem& system, const HistoryWindow& initial,
              const Schedule& schedule,
              std::uint64_t max_steps = kDefaultMaxSteps);

// Initial history (oldest first) plus a schedule cycle repeated forever.
struct Witness {
  std::vector<State> initial;
  std::vector<ActivationSet> cycle;
};

// Throws InvalidWitness when the cycle is empty or misses a node, or the
// initial window does not fit the system.
RunVerdict replay_witness(const HistorylessSystem& system,
                          const Witness& witness);
RunVerdict replay_witness(const KRecallSystem& system, const Witness& witness);

// One record per computed step: "t<TAB>{activation}<TAB>(state)". The initial
// state is written with activation "-".
void write_trace(std::ostream& out, const Trajectory& trajectory);

}  // namespace asyncdyn
