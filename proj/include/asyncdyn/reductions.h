#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "asyncdyn/game.h"
#include "asyncdyn/system.h"

namespace asyncdyn {

// ---- circuits ----

struct Wire {
  enum class Kind { kInput, kGate };
  Kind kind = Kind::kInput;
  std::size_t index = 0;
};

struct Gate {
  std::vector<Wire> inputs;
  // Output per input combination, first input most significant; size
  // 2^inputs.size(), entries 0 or 1.
  std::vector<int> truth_table;
};

struct CircuitDescription {
  std::vector<int> input_values;
  std::vector<Gate> gates;
};

// Node order: inputs, gates, then one identity node per gate that reads its
// own output.
HistorylessSystem build_circuit(const CircuitDescription& circuit);

// ---- diffusion ----

struct SocialGraph {
  std::size_t users = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// Action 0 is X, 1 is Y. A user picks X when at least half of its friends
// use X; users without friends always pick X.
HistorylessSystem build_majority(const SocialGraph& graph);

// ---- interdomain routing ----

using Route = std::vector<std::size_t>;  // AS path, source first, ends at d

struct ExportDenial {
  std::size_t from;
  Route route;
  std::size_t to;
};

struct BgpInstance {
  std::size_t as_count = 0;
  std::size_t destination = 0;
  std::vector<std::pair<std::size_t, std::size_t>> links;
  // Per AS, permitted routes best first. The destination's entry is ignored.
  std::vector<std::vector<Route>> ranked_routes;
  std::vector<ExportDenial> denials;
};

// One node per non-destination AS, in AS order. Action 0 is the empty route,
// action r > 0 the r-th ranked route.
HistorylessSystem build_bgp(const BgpInstance& instance);

// Node index of each AS in build_bgp's system; SIZE_MAX for the destination.
std::vector<std::size_t> bgp_node_of(const BgpInstance& instance);

// Routes chosen in `state` form a tree toward the destination: every chosen
// route's next hop is the destination or has chosen the route's suffix.
bool bgp_is_routing_tree(const BgpInstance& instance, const State& state);

// ---- Turing machines ----

struct TmMove {
  int next_state = 0;
  int write = 0;
  int dir = 0;  // -1, 0 or +1
};

struct TMDescription {
  int states = 1;
  std::vector<bool> halting;
  int symbols = 2;
  int tape_length = 1;
  // delta[q][symbol]; rows of halting states are ignored.
  std::vector<std::vector<TmMove>> delta;
};

// Head action fields. `parity` flips on every head advance.
struct HeadAction {
  int q = 0;
  int gamma = 0;
  int j = 0;
  int d = 0;
  int parity = 0;
};

// Cells are nodes 0..n-1 with actions Γ; the head is node n.
HistorylessSystem build_tm(const TMDescription& tm);
int encode_head(const TMDescription& tm, const HeadAction& head);
HeadAction decode_head(const TMDescription& tm, int action);

// ---- snakes ----

struct Snake {
  int z = 0;
  // Cycle in order; vertex bit z-1-j is coordinate j.
  std::vector<std::uint32_t> cycle;
  std::size_t size() const { return cycle.size(); }
};

inline constexpr std::uint64_t kDefaultSnakeBudget = 200'000'000;

// Longest chordless cycle through vertex 0 of Q_z, lexicographically least
// vertex sequence among the longest. 2 <= z <= 7; BudgetExceeded when the
// search visits more than `budget` partial paths.
Snake longest_snake(int z, std::uint64_t budget = kDefaultSnakeBudget);

bool is_snake(int z, const std::vector<std::uint32_t>& cycle);

// Translate (XOR) and rotate the snake so 0 comes first, keeping 1^z off the
// snake when some translation allows it.
Snake normalize_snake(const Snake& snake);

// Head of the edge {v, v xor bit(i)} under the snake orientation, reported
// as coordinate i of that head.
int snake_g(const Snake& snake, std::uint32_t v, int coordinate);

// 5 <= n <= 9; the snake lives in Q_{n-2}.
HistorylessSystem build_snake_system(int n);
HistorylessSystem build_snake_system(int n, const Snake& snake);

// A and B hold 1-based indices into the normalized snake of Q_{n-2}.
HistorylessSystem build_disjointness(int n, const std::vector<int>& a,
                                     const std::vector<int>& b);
HistorylessSystem build_disjointness(int n, const Snake& snake,
                                     const std::vector<int>& a,
                                     const std::vector<int>& b);

// ---- named instances ----

using FixtureParams = std::map<std::string, int>;
using FixtureValue = std::variant<HistorylessSystem, KRecallSystem, Game>;

// fig1, ex-three-stable, ex-unbounded-latched, ring (n), futile (n),
// game-2x2x2, coordination-2x2, matching-pennies.
FixtureValue fixture(const std::string& name, const FixtureParams& params = {});
std::vector<std::string> fixture_names();

}  // namespace asyncdyn
