#include <algorithm>
#include <bit>

#include "asyncdyn/error.h"
#include "asyncdyn/reductions.h"

namespace asyncdyn {

namespace {

class SnakeSearch {
 public:
  SnakeSearch(int z, std::uint64_t budget)
      : z_(z),
        budget_(budget),
        vertices_(1U << z),
        adjacent_(vertices_, 0),
        on_path_(vertices_, false),
        untouched_(vertices_) {}

  std::vector<std::uint32_t> run() {
    enter(0);
    // Every chordless cycle through 0 can be carried onto one whose second
    // vertex is 1 by permuting coordinates, and 1 is the least choice.
    enter(1);
    extend();
    return best_;
  }

 private:
  void touch(std::uint32_t v, int delta) {
    for (int b = 0; b < z_; ++b) {
      const std::uint32_t w = v ^ (1U << b);
      if (adjacent_[w] == 0 && !on_path_[w]) --untouched_;
      adjacent_[w] += delta;
      if (adjacent_[w] == 0 && !on_path_[w]) ++untouched_;
    }
  }

  void enter(std::uint32_t v) {
    if (adjacent_[v] == 0) --untouched_;
    on_path_[v] = true;
    path_.push_back(v);
    touch(v, +1);
  }

  void leave() {
    const std::uint32_t v = path_.back();
    touch(v, -1);
    path_.pop_back();
    on_path_[v] = false;
    if (adjacent_[v] == 0) ++untouched_;
  }

  void extend() {
    if (++visited_ > budget_) {
      fail(ErrorKind::kBudgetExceeded,
           "snake search in Q_" + std::to_string(z_) + " exceeded " +
               std::to_string(budget_) + " partial paths");
    }
    // Each further vertex must be untouched so far, plus one closing vertex.
    if (path_.size() + untouched_ + 1 <= best_.size()) return;
    const std::uint32_t tail = path_.back();
    std::vector<std::uint32_t> next;
    for (int b = 0; b < z_; ++b) next.push_back(tail ^ (1U << b));
    std::sort(next.begin(), next.end());
    for (std::uint32_t w : next) {
      if (on_path_[w]) continue;
      const bool touches_head = std::popcount(w ^ path_.front()) == 1;
      if (adjacent_[w] == 1) {
        enter(w);
        extend();
        leave();
      } else if (adjacent_[w] == 2 && touches_head && path_.size() >= 3) {
        if (path_.size() + 1 > best_.size()) {
          best_ = path_;
          best_.push_back(w);
        }
      }
    }
  }

  int z_;
  std::uint64_t budget_;
  std::uint32_t vertices_;
  std::vector<int> adjacent_;
  std::vector<bool> on_path_;
  std::uint64_t untouched_;
  std::vector<std::uint32_t> path_;
  std::vector<std::uint32_t> best_;
  std::uint64_t visited_ = 0;
};

std::size_t position_in(const Snake& snake, std::uint32_t v) {
  const auto it = std::find(snake.cycle.begin(), snake.cycle.end(), v);
  return it == snake.cycle.end() ? snake.cycle.size()
                                 : static_cast<std::size_t>(it - snake.cycle.begin());
}

}  // namespace

Snake longest_snake(int z, std::uint64_t budget) {
  if (z < 2) fail(ErrorKind::kInvalidInput, "snake dimension must be >= 2");
  if (z > 7) {
    fail(ErrorKind::kBudgetExceeded,
         "exhaustive snake search is limited to dimensions up to 7");
  }
  SnakeSearch search(z, budget);
  return Snake{z, search.run()};
}

bool is_snake(int z, const std::vector<std::uint32_t>& cycle) {
  const std::size_t len = cycle.size();
  if (z < 1 || z > 31 || len < 4) return false;
  for (std::uint32_t v : cycle) {
    if (v >= (1U << z)) return false;
  }
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = i + 1; j < len; ++j) {
      if (cycle[i] == cycle[j]) return false;
      const bool consecutive = j == i + 1 || (i == 0 && j == len - 1);
      const bool adjacent = std::popcount(cycle[i] ^ cycle[j]) == 1;
      if (adjacent != consecutive) return false;
    }
  }
  return true;
}

Snake normalize_snake(const Snake& snake) {
  const std::uint32_t ones = (1U << snake.z) - 1;
  std::size_t pick = 0;
  for (std::size_t p = 0; p < snake.size(); ++p) {
    // Translating by cycle[p] puts cycle[p] at 0 and sends ones to
    // ones ^ cycle[p].
    if (position_in(snake, ones ^ snake.cycle[p]) == snake.size()) {
      pick = p;
      break;
    }
  }
  Snake out{snake.z, {}};
  const std::uint32_t shift = snake.cycle[pick];
  for (std::size_t k = 0; k < snake.size(); ++k) {
    out.cycle.push_back(snake.cycle[(pick + k) % snake.size()] ^ shift);
  }
  return out;
}

int snake_g(const Snake& snake, std::uint32_t v, int coordinate) {
  const std::uint32_t bit = 1U << (snake.z - 1 - coordinate);
  const std::uint32_t u = v ^ bit;
  const std::size_t len = snake.size();
  const std::size_t pv = position_in(snake, v);
  const std::size_t pu = position_in(snake, u);
  std::uint32_t head;
  if (pv < len && pu < len) {
    // Adjacent snake vertices are consecutive on the cycle.
    head = (pv + 1) % len == pu ? u : v;
  } else if (pv < len) {
    head = v;
  } else if (pu < len) {
    head = u;
  } else {
    head = std::min(u, v);
  }
  return (head & bit) ? 1 : 0;
}

namespace {

void require_snake_nodes(int n) {
  if (n < 5 || n > 9) {
    fail(ErrorKind::kInvalidInput,
         "snake systems need 5 <= n <= 9, got " + std::to_string(n));
  }
}

std::uint32_t cube_of(const State& a) {
  std::uint32_t v = 0;
  for (std::size_t i = 2; i < a.size(); ++i) v = (v << 1) | static_cast<std::uint32_t>(a[i]);
  return v;
}

void check_snake_for(int n, const Snake& snake) {
  if (snake.z != n - 2 || !is_snake(snake.z, snake.cycle) ||
      snake.cycle.front() != 0) {
    fail(ErrorKind::kInvalidInput,
         "snake must be a normalized snake in Q_" + std::to_string(n - 2));
  }
}

}  // namespace

HistorylessSystem build_snake_system(int n) {
  require_snake_nodes(n);
  return build_snake_system(n, normalize_snake(longest_snake(n - 2)));
}

HistorylessSystem build_snake_system(int n, const Snake& snake) {
  require_snake_nodes(n);
  check_snake_for(n, snake);
  const ActionSpace space(std::vector<int>(static_cast<std::size_t>(n), 2));
  auto rule = [snake, n](const State& a) {
    State out(a.size());
    const std::uint32_t cube = cube_of(a);
    for (int i = 0; i < 2; ++i) {
      bool others_zero = a[1 - i] == 0 && cube == 0;
      out[i] = others_zero ? 0 : 1;
    }
    for (int i = 2; i < n; ++i) {
      out[i] = (a[0] == 1 && a[1] == 1) ? 1 : snake_g(snake, cube, i - 2);
    }
    return out;
  };
  return HistorylessSystem::from_rule(space, rule, true);
}

HistorylessSystem build_disjointness(int n, const std::vector<int>& a,
                                     const std::vector<int>& b) {
  require_snake_nodes(n);
  return build_disjointness(n, normalize_snake(longest_snake(n - 2)), a, b);
}

HistorylessSystem build_disjointness(int n, const Snake& snake,
                                     const std::vector<int>& a,
                                     const std::vector<int>& b) {
  require_snake_nodes(n);
  check_snake_for(n, snake);
  const int q = static_cast<int>(snake.size());
  std::vector<bool> in_a(1U << snake.z, false), in_b(1U << snake.z, false);
  for (const auto* set : {&a, &b}) {
    for (int j : *set) {
      if (j < 1 || j > q) {
        fail(ErrorKind::kInvalidInput, "set element " + std::to_string(j) +
                                           " outside [1, " +
                                           std::to_string(q) + "]");
      }
      (set == &a ? in_a : in_b)[snake.cycle[static_cast<std::size_t>(j - 1)]] =
          true;
    }
  }
  const ActionSpace space(std::vector<int>(static_cast<std::size_t>(n), 2));
  auto rule = [snake, n, in_a, in_b](const State& s) {
    State out(s.size());
    const std::uint32_t cube = cube_of(s);
    // Node 1 picks 0 only on a vertex of A while node 2 plays 1, and
    // symmetrically for node 2 and B.
    out[0] = (in_a[cube] && s[1] == 1) ? 0 : 1;
    out[1] = (in_b[cube] && s[0] == 1) ? 0 : 1;
    for (int i = 2; i < n; ++i) {
      out[i] = (s[0] == 0 && s[1] == 0) ? snake_g(snake, cube, i - 2) : 1;
    }
    return out;
  };
  return HistorylessSystem::from_rule(space, rule, true);
}

}  // namespace asyncdyn
