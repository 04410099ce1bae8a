#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace asyncdyn {

// Set of nodes activated in one timestep, stored as a bitmask over 0-based
// node indices. Rendered 1-based, e.g. "{1,2}".
class ActivationSet {
 public:
  constexpr ActivationSet() = default;
  constexpr explicit ActivationSet(std::uint64_t bits) : bits_(bits) {}

  // 0-based node indices.
  static ActivationSet of(std::initializer_list<std::size_t> nodes);
  // 1-based node labels, as they appear in documents and on screen.
  static ActivationSet from_labels(const std::vector<int>& labels);

  static constexpr ActivationSet all(std::size_t node_count) {
    return ActivationSet(node_count >= 64 ? ~std::uint64_t{0}
                                          : (std::uint64_t{1} << node_count) - 1);
  }
  static constexpr ActivationSet single(std::size_t node) {
    return ActivationSet(std::uint64_t{1} << node);
  }

  constexpr bool contains(std::size_t node) const {
    return (bits_ >> node) & 1U;
  }
  constexpr bool empty() const { return bits_ == 0; }
  int size() const { return std::popcount(bits_); }
  constexpr std::uint64_t bits() const { return bits_; }

  // True if every member is below `node_count`.
  constexpr bool within(std::size_t node_count) const {
    return (bits_ & ~all(node_count).bits_) == 0;
  }

  constexpr ActivationSet operator|(ActivationSet other) const {
    return ActivationSet(bits_ | other.bits_);
  }
  ActivationSet& operator|=(ActivationSet other) {
    bits_ |= other.bits_;
    return *this;
  }
  constexpr bool operator==(const ActivationSet&) const = default;
  constexpr auto operator<=>(const ActivationSet&) const = default;

  std::vector<std::size_t> members() const;
  std::vector<int> labels() const;
  std::string to_string() const;

 private:
  std::uint64_t bits_ = 0;
};

}  // namespace asyncdyn
