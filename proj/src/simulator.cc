#include "asyncdyn/simulator.h"

#include <unordered_map>

#include "asyncdyn/error.h"

namespace asyncdyn {

namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<int>& key) const {
    // FNV-1a over the coordinates.
    std::uint64_t h = 1469598103934665603ULL;
    for (int v : key) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

class Recorder {
 public:
  explicit Recorder(Trajectory& trajectory) : t_(trajectory) {}

  void push(const State& state, ActivationSet active) {
    t_.states.push_back(state);
    t_.activations.push_back(active);
    ++t_.length;
    if (t_.states.size() > kTrajectoryKeep) {
      t_.states.pop_front();
      t_.activations.pop_front();
      ++t_.first_time;
    }
  }

 private:
  Trajectory& t_;
};

void require_steps(std::uint64_t max_steps) {
  if (max_steps == 0) {
    fail(ErrorKind::kInvalidInput, "max_steps must be positive");
  }
}

// Shared driver. `advance` computes the next state from the current window;
// `fixed` says whether the current window is absorbing.
template <class Advance, class Fixed>
RunResult drive(Trajectory trajectory, const Schedule& schedule,
                std::uint64_t max_steps, std::size_t window_len,
                bool detect, Advance advance, Fixed fixed) {
  Recorder recorder(trajectory);
  ScheduleStream stream(schedule);
  std::deque<State> window(trajectory.initial.states().end() - window_len,
                           trajectory.initial.states().end());
  std::unordered_map<std::vector<int>, std::uint64_t, KeyHash> seen;
  const bool phased = detect && schedule.finitely_phased();
  const auto finite = schedule.finite_length();
  // Earliest time of the current run of equal states.
  std::uint64_t run_start = 0;

  auto key_of = [&](std::uint64_t phase) {
    std::vector<int> key;
    for (const auto& s : window) key.insert(key.end(), s.begin(), s.end());
    key.push_back(static_cast<int>(phase));
    return key;
  };

  for (std::uint64_t t = 0;; ++t) {
    if (detect && fixed(window)) {
      return {std::move(trajectory),
              verdicts::Converged{window.back(), run_start}};
    }
    if (phased) {
      if (auto phase = stream.phase()) {
        auto [it, fresh] = seen.emplace(key_of(*phase), t);
        if (!fresh) {
          verdicts::Cycling cycling{it->second, t - it->second, {}, {}};
          if (trajectory.first_time <= it->second) {
            for (std::uint64_t s = it->second; s <= t; ++s) {
              cycling.segment.push_back(trajectory.at(s));
              if (s > it->second) {
                cycling.activations.push_back(
                    trajectory.activations[s - trajectory.first_time]);
              }
            }
          }
          return {std::move(trajectory), std::move(cycling)};
        }
      }
    }
    if (t >= max_steps || (finite && t >= *finite)) {
      return {std::move(trajectory), verdicts::BudgetExhausted{window.back()}};
    }
    const ActivationSet active = stream.next();
    State next = advance(window, t + 1, active);
    if (next != window.back()) run_start = t + 1;
    recorder.push(next, active);
    window.push_back(std::move(next));
    if (window.size() > window_len) window.pop_front();
  }
}

}  // namespace

std::string verdict_name(const RunVerdict& verdict) {
  if (std::holds_alternative<verdicts::Converged>(verdict)) return "Converged";
  if (std::holds_alternative<verdicts::Cycling>(verdict)) return "Cycling";
  return "BudgetExhausted";
}

RunResult run(const HistorylessSystem& system, const State& initial,
              const Schedule& schedule, std::uint64_t max_steps) {
  require_steps(max_steps);
  system.space().validate(initial);
  if (schedule.node_count() != system.node_count()) {
    fail(ErrorKind::kInvalidInput, "schedule and system disagree on n");
  }
  Trajectory trajectory{HistoryWindow(initial), {initial}, {ActivationSet{}},
                        0, 0};
  RunResult result = drive(
      std::move(trajectory), schedule, max_steps, 1, true,
      [&](const std::deque<State>& w, std::uint64_t, ActivationSet active) {
        return step(system, w.back(), active);
      },
      [&](const std::deque<State>& w) { return is_stable(system, w.back()); });
  return result;
}

RunResult run(const KRecallSystem& system, const HistoryWindow& initial,
              const Schedule& schedule, std::uint64_t max_steps) {
  require_steps(max_steps);
  if (initial.size() < system.k()) {
    fail(ErrorKind::kInsufficientHistory,
         "initial history holds " + std::to_string(initial.size()) +
             " states but the system recalls " + std::to_string(system.k()));
  }
  initial.validate(system.space());
  if (schedule.node_count() != system.space().node_count()) {
    fail(ErrorKind::kInvalidInput, "schedule and system disagree on n");
  }
  const std::size_t k = system.k();
  const auto all = ActivationSet::all(system.space().node_count());
  // The last window entry sits at time initial.size() - 1; the first
  // computed state is a^{initial.size()}.
  const std::uint64_t offset = initial.size() - 1;
  Trajectory trajectory{initial, {initial.back()}, {ActivationSet{}}, 0, 0};
  return drive(
      std::move(trajectory), schedule, max_steps, k, system.stationary(),
      [&](const std::deque<State>& w, std::uint64_t t, ActivationSet active) {
        return step_history(system,
                            HistoryWindow(std::vector<State>(w.begin(), w.end())),
                            t + offset, active);
      },
      [&](const std::deque<State>& w) {
        for (const auto& s : w) {
          if (s != w.back()) return false;
        }
        return step_history(system,
                            HistoryWindow(std::vector<State>(w.begin(), w.end())),
                            k, all) == w.back();
      });
}

namespace {

void check_witness_cycle(const Witness& witness, std::size_t n) {
  if (witness.cycle.empty()) {
    fail(ErrorKind::kInvalidWitness, "witness schedule cycle is empty");
  }
  for (const auto& set : witness.cycle) {
    if (!set.within(n)) {
      fail(ErrorKind::kInvalidWitness,
           "witness activation set " + set.to_string() + " is out of range");
    }
  }
  if (!covers_all(witness.cycle, n)) {
    fail(ErrorKind::kInvalidWitness,
         "witness schedule is unfair: some node is never activated");
  }
  if (witness.initial.empty()) {
    fail(ErrorKind::kInvalidWitness, "witness has no initial state");
  }
}

}  // namespace

RunVerdict replay_witness(const HistorylessSystem& system,
                          const Witness& witness) {
  check_witness_cycle(witness, system.node_count());
  if (witness.initial.size() != 1 ||
      !system.space().contains(witness.initial.front())) {
    fail(ErrorKind::kInvalidWitness, "witness initial state is malformed");
  }
  // The (state, phase) space is finite, so the run must close up within
  // |A| * |cycle| steps.
  const std::uint64_t bound =
      system.state_count() * witness.cycle.size() + 1;
  return run(system, witness.initial.front(),
             Schedule::periodic(witness.cycle, system.node_count()), bound)
      .verdict;
}

RunVerdict replay_witness(const KRecallSystem& system, const Witness& witness) {
  check_witness_cycle(witness, system.space().node_count());
  if (witness.initial.size() < system.k()) {
    fail(ErrorKind::kInvalidWitness, "witness history is shorter than k");
  }
  for (const auto& s : witness.initial) {
    if (!system.space().contains(s)) {
      fail(ErrorKind::kInvalidWitness, "witness history is malformed");
    }
  }
  std::uint64_t windows = 1;
  for (std::size_t j = 0; j < system.k(); ++j) {
    windows *= system.space().state_count();
  }
  return run(system, HistoryWindow(witness.initial),
             Schedule::periodic(witness.cycle, system.space().node_count()),
             windows * witness.cycle.size() + 1)
      .verdict;
}

void write_trace(std::ostream& out, const Trajectory& trajectory) {
  for (std::size_t j = 0; j < trajectory.states.size(); ++j) {
    const std::uint64_t t = trajectory.first_time + j;
    out << t << '\t';
    if (t == 0) {
      out << '-';
    } else {
      out << trajectory.activations[j].to_string();
    }
    out << '\t' << to_string(trajectory.states[j]) << '\n';
  }
}

}  // namespace asyncdyn
