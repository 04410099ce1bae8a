#include "asyncdyn/action_space.h"

#include <limits>
#include <sstream>

#include "asyncdyn/error.h"

namespace asyncdyn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
      return "InvalidInput";
    case ErrorKind::kInsufficientHistory:
      return "InsufficientHistory";
    case ErrorKind::kUnsupported:
      return "Unsupported";
    case ErrorKind::kBudgetExceeded:
      return "BudgetExceeded";
    case ErrorKind::kNonUniqueBestResponse:
      return "NonUniqueBestResponse";
    case ErrorKind::kInvalidWitness:
      return "InvalidWitness";
    case ErrorKind::kParseError:
      return "ParseError";
    case ErrorKind::kSchemaError:
      return "SchemaError";
  }
  return "Unknown";
}

ActionSpace::ActionSpace(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) {
    fail(ErrorKind::kInvalidInput, "action space needs at least one node");
  }
  if (sizes_.size() > kMaxNodes) {
    fail(ErrorKind::kInvalidInput,
         "action space has more than " + std::to_string(kMaxNodes) + " nodes");
  }
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  weights_.assign(sizes_.size(), 1);
  std::uint64_t acc = 1;
  bool saturated = false;
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    if (sizes_[i] < 1) {
      fail(ErrorKind::kInvalidInput, "node " + std::to_string(i + 1) +
                                         " has an empty action space");
    }
    weights_[i] = saturated ? 0 : acc;
    const auto k = static_cast<std::uint64_t>(sizes_[i]);
    if (saturated || acc > kMax / k) {
      saturated = true;
    } else {
      acc *= k;
    }
  }
  state_count_ = saturated ? kMax : acc;
}

void ActionSpace::require_within(std::uint64_t budget,
                                 const std::string& what) const {
  if (state_count_ > budget) {
    fail(ErrorKind::kBudgetExceeded,
         what + ": " + std::to_string(state_count_) +
             " joint states exceed the enumeration budget of " +
             std::to_string(budget));
  }
}

bool ActionSpace::contains(const State& state) const {
  if (state.size() != sizes_.size()) return false;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] < 0 || state[i] >= sizes_[i]) return false;
  }
  return true;
}

void ActionSpace::validate(const State& state) const {
  if (state.size() != sizes_.size()) {
    fail(ErrorKind::kInvalidInput,
         "state has " + std::to_string(state.size()) + " coordinates, expected " +
             std::to_string(sizes_.size()));
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] < 0 || state[i] >= sizes_[i]) {
      fail(ErrorKind::kInvalidInput,
           "action " + std::to_string(state[i]) + " of node " +
               std::to_string(i + 1) + " is outside 0.." +
               std::to_string(sizes_[i] - 1));
    }
  }
}

StateIndex ActionSpace::encode(const State& state) const {
  StateIndex index = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    index = index * static_cast<StateIndex>(sizes_[i]) +
            static_cast<StateIndex>(state[i]);
  }
  return index;
}

State ActionSpace::decode(StateIndex index) const {
  State state(sizes_.size());
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    const auto k = static_cast<StateIndex>(sizes_[i]);
    state[i] = static_cast<int>(index % k);
    index /= k;
  }
  return state;
}

State ActionSpace::project_out(const State& state, std::size_t node) const {
  State rest;
  rest.reserve(state.size() - 1);
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (i != node) rest.push_back(state[i]);
  }
  return rest;
}

std::string ActionSpace::label(const State& state) const {
  bool letters = true;
  for (int k : sizes_) letters = letters && k <= 26;
  if (letters) {
    std::string out;
    for (int a : state) out.push_back(static_cast<char>('a' + a));
    return out;
  }
  return to_string(state);
}

std::string to_string(const State& state) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (i) out << ',';
    out << state[i];
  }
  out << ')';
  return out.str();
}

}  // namespace asyncdyn
