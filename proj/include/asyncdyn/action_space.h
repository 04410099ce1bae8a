#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace asyncdyn {

// Mixed-radix code of a joint state. Node 0 is the most significant digit, so
// numeric order on indices is lexicographic order on action tuples.
using StateIndex = std::uint64_t;

// Joint action tuple; entry i is node i's action in 0..k_i-1.
using State = std::vector<int>;

// Default ceiling on the number of joint states any table or graph may hold.
inline constexpr std::uint64_t kDefaultStateBudget = std::uint64_t{1} << 20;

// Upper bound on nodes that can appear in an activation set.
inline constexpr std::size_t kMaxNodes = 63;

class ActionSpace {
 public:
  explicit ActionSpace(std::vector<int> sizes);

  std::size_t node_count() const { return sizes_.size(); }
  int size(std::size_t node) const { return sizes_[node]; }
  const std::vector<int>& sizes() const { return sizes_; }

  // Product of all action counts, saturated at UINT64_MAX.
  std::uint64_t state_count() const { return state_count_; }

  // Throws BudgetExceeded when the joint space is larger than `budget`.
  void require_within(std::uint64_t budget, const std::string& what) const;

  bool contains(const State& state) const;
  // Throws InvalidInput if `state` has the wrong length or a coordinate is
  // out of range.
  void validate(const State& state) const;

  StateIndex encode(const State& state) const;
  State decode(StateIndex index) const;

  // Digit of `node` inside an encoded state.
  int digit(StateIndex index, std::size_t node) const {
    return static_cast<int>((index / weights_[node]) %
                            static_cast<std::uint64_t>(sizes_[node]));
  }
  std::uint64_t weight(std::size_t node) const { return weights_[node]; }

  // a with coordinate `node` removed.
  State project_out(const State& state, std::size_t node) const;

  // Letters a, b, c, ... per node when every k_i <= 26, otherwise a
  // parenthesised comma list of integers.
  std::string label(const State& state) const;
  std::string label(StateIndex index) const { return label(decode(index)); }

  bool operator==(const ActionSpace& other) const {
    return sizes_ == other.sizes_;
  }

 private:
  std::vector<int> sizes_;
  std::vector<std::uint64_t> weights_;
  std::uint64_t state_count_ = 1;
};

std::string to_string(const State& state);

}  // namespace asyncdyn
