#pragma once

#include <cstddef>
#include <vector>

#include "asyncdyn/action_space.h"
#include "asyncdyn/error.h"

namespace asyncdyn {

// Oldest state first; back() is the current state.
class HistoryWindow {
 public:
  HistoryWindow(std::vector<State> states) : states_(std::move(states)) {
    if (states_.empty()) {
      fail(ErrorKind::kInvalidInput, "history window must hold a state");
    }
  }
  HistoryWindow(State state) : states_{std::move(state)} {}

  const std::vector<State>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  const State& operator[](std::size_t i) const { return states_[i]; }
  const State& back() const { return states_.back(); }

  // The `k` most recent states. Requires k <= size().
  HistoryWindow last(std::size_t k) const {
    return HistoryWindow(std::vector<State>(states_.end() - k, states_.end()));
  }

  void validate(const ActionSpace& space) const {
    for (const auto& s : states_) space.validate(s);
  }

  bool operator==(const HistoryWindow&) const = default;

 private:
  std::vector<State> states_;
};

}  // namespace asyncdyn
