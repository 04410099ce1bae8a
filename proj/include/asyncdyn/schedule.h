#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "asyncdyn/activation.h"

namespace asyncdyn {

namespace schedules {

// sigma(t) = sets[t-1] while the list lasts, the empty set afterwards.
struct ExplicitList {
  std::vector<ActivationSet> sets;
};

// prefix once, then cycle forever.
struct Periodic {
  std::vector<ActivationSet> prefix;
  std::vector<ActivationSet> cycle;
};

// Each node independently activated with probability p.
struct SeededRandom {
  std::uint64_t seed = 0;
  double p = 0.5;
};

// Random sets, patched so every node appears in every r consecutive steps.
struct SeededRFair {
  std::uint64_t seed = 0;
  int r = 1;
};

struct Synchronous {};

// {1}, {2}, ..., {n}, {1}, ...
struct RoundRobin {};

}  // namespace schedules

using ScheduleSpec =
    std::variant<schedules::ExplicitList, schedules::Periodic,
                 schedules::SeededRandom, schedules::SeededRFair,
                 schedules::Synchronous, schedules::RoundRobin>;

class Schedule {
 public:
  Schedule(ScheduleSpec spec, std::size_t node_count);

  static Schedule synchronous(std::size_t n) {
    return Schedule(schedules::Synchronous{}, n);
  }
  static Schedule round_robin(std::size_t n) {
    return Schedule(schedules::RoundRobin{}, n);
  }
  static Schedule periodic(std::vector<ActivationSet> cycle, std::size_t n,
                           std::vector<ActivationSet> prefix = {}) {
    return Schedule(schedules::Periodic{std::move(prefix), std::move(cycle)},
                    n);
  }

  const ScheduleSpec& spec() const { return spec_; }
  std::size_t node_count() const { return node_count_; }

  // Schedules whose future is a function of a finite phase counter.
  bool finitely_phased() const;
  // Explicit lists end; every other schedule is infinite.
  bool is_finite() const;
  std::optional<std::size_t> finite_length() const;

 private:
  ScheduleSpec spec_;
  std::size_t node_count_;
};

// Sequential reader over a schedule. Seeded schedules draw from an internal
// engine, so a stream is single-pass; copy the Schedule to restart.
class ScheduleStream {
 public:
  explicit ScheduleStream(const Schedule& schedule);

  // Activation set for the next timestep.
  ActivationSet next();

  // Phase of the step that next() would return, for finitely phased
  // schedules once any prefix is consumed. Equal phases imply equal futures.
  std::optional<std::uint64_t> phase() const;

  // Steps consumed so far.
  std::uint64_t position() const { return position_; }

 private:
  Schedule schedule_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
  std::vector<int> idle_;
};

std::vector<ActivationSet> schedule_prefix(const Schedule& schedule,
                                           std::size_t length);

// Every node in 0..n-1 appears in every window of r consecutive entries.
// Windows lie entirely inside `prefix`. Throws InvalidInput for r < 1.
bool check_r_fair(const std::vector<ActivationSet>& prefix, int r,
                  std::size_t node_count);

// Union of the sets equals all nodes.
bool covers_all(const std::vector<ActivationSet>& sets, std::size_t node_count);

}  // namespace asyncdyn
