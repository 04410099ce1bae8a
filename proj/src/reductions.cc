#include "asyncdyn/reductions.h"

#include <algorithm>
#include <limits>
#include <set>

#include "asyncdyn/error.h"
#include "asyncdyn/uncoupled.h"

namespace asyncdyn {

HistorylessSystem build_circuit(const CircuitDescription& circuit) {
  const std::size_t inputs = circuit.input_values.size();
  const std::size_t gates = circuit.gates.size();
  for (std::size_t k = 0; k < inputs; ++k) {
    const int v = circuit.input_values[k];
    if (v != 0 && v != 1) {
      fail(ErrorKind::kInvalidInput,
           "input " + std::to_string(k) + " must be 0 or 1");
    }
  }
  // wiring[g][p] = node index feeding input p of gate g.
  std::vector<std::vector<std::size_t>> wiring(gates);
  std::vector<std::size_t> identity_source;  // gate read by each identity node
  for (std::size_t g = 0; g < gates; ++g) {
    const Gate& gate = circuit.gates[g];
    if (gate.inputs.size() > 16 ||
        gate.truth_table.size() != (std::size_t{1} << gate.inputs.size())) {
      fail(ErrorKind::kInvalidInput,
           "gate " + std::to_string(g) + " truth table needs 2^" +
               std::to_string(gate.inputs.size()) + " entries");
    }
    for (int v : gate.truth_table) {
      if (v != 0 && v != 1) {
        fail(ErrorKind::kInvalidInput,
             "gate " + std::to_string(g) + " truth table entries must be 0/1");
      }
    }
    std::optional<std::size_t> identity;
    for (const Wire& w : gate.inputs) {
      if (w.kind == Wire::Kind::kInput) {
        if (w.index >= inputs) {
          fail(ErrorKind::kInvalidInput,
               "gate " + std::to_string(g) + " reads missing input " +
                   std::to_string(w.index));
        }
        wiring[g].push_back(w.index);
      } else if (w.index >= gates) {
        fail(ErrorKind::kInvalidInput, "gate " + std::to_string(g) +
                                           " reads missing gate " +
                                           std::to_string(w.index));
      } else if (w.index == g) {
        if (!identity) {
          identity = inputs + gates + identity_source.size();
          identity_source.push_back(g);
        }
        wiring[g].push_back(*identity);
      } else {
        wiring[g].push_back(inputs + w.index);
      }
    }
  }
  const std::size_t n = inputs + gates + identity_source.size();
  if (n == 0) fail(ErrorKind::kInvalidInput, "circuit is empty");
  auto rule = [circuit, wiring, identity_source, inputs, gates](const State& a) {
    State out(a.size());
    for (std::size_t k = 0; k < inputs; ++k) out[k] = circuit.input_values[k];
    for (std::size_t g = 0; g < gates; ++g) {
      std::size_t row = 0;
      for (std::size_t src : wiring[g]) row = (row << 1) | static_cast<std::size_t>(a[src]);
      out[inputs + g] = circuit.gates[g].truth_table[row];
    }
    for (std::size_t k = 0; k < identity_source.size(); ++k) {
      out[inputs + gates + k] = a[inputs + identity_source[k]];
    }
    return out;
  };
  return HistorylessSystem::from_rule(ActionSpace(std::vector<int>(n, 2)), rule,
                                      true);
}

HistorylessSystem build_majority(const SocialGraph& graph) {
  if (graph.users == 0) fail(ErrorKind::kInvalidInput, "graph has no users");
  std::vector<std::set<std::size_t>> friends(graph.users);
  for (const auto& [u, v] : graph.edges) {
    if (u >= graph.users || v >= graph.users) {
      fail(ErrorKind::kInvalidInput, "edge names a missing user");
    }
    if (u == v) fail(ErrorKind::kInvalidInput, "self-loop at user " + std::to_string(u));
    friends[u].insert(v);
    friends[v].insert(u);
  }
  auto rule = [friends](const State& a) {
    State out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::size_t x = 0;
      for (std::size_t f : friends[i]) x += a[f] == 0 ? 1 : 0;
      out[i] = 2 * x >= friends[i].size() ? 0 : 1;
    }
    return out;
  };
  return HistorylessSystem::from_rule(
      ActionSpace(std::vector<int>(graph.users, 2)), rule, true);
}

namespace {

struct RouteSlot {
  // Node of the next hop, or SIZE_MAX when it is the destination.
  std::size_t next_node;
  // Action the next hop must be playing; ignored for the destination.
  int needed;
  bool exported;
};

void validate_bgp(const BgpInstance& inst,
                  const std::set<std::pair<std::size_t, std::size_t>>& linked) {
  if (inst.as_count < 2) fail(ErrorKind::kInvalidInput, "need at least two ASes");
  if (inst.destination >= inst.as_count) {
    fail(ErrorKind::kInvalidInput, "destination is not an AS");
  }
  if (inst.ranked_routes.size() != inst.as_count) {
    fail(ErrorKind::kInvalidInput, "need one ranking per AS");
  }
  for (std::size_t i = 0; i < inst.as_count; ++i) {
    if (i == inst.destination) continue;
    std::set<Route> seen;
    for (const Route& r : inst.ranked_routes[i]) {
      const std::string where = "route of AS " + std::to_string(i);
      if (r.size() < 2 || r.front() != i || r.back() != inst.destination) {
        fail(ErrorKind::kInvalidInput,
             where + " must start at the AS and end at the destination");
      }
      std::set<std::size_t> hops(r.begin(), r.end());
      if (hops.size() != r.size()) {
        fail(ErrorKind::kInvalidInput, where + " is not simple");
      }
      for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        if (!linked.count({r[k], r[k + 1]})) {
          fail(ErrorKind::kInvalidInput, where + " uses a missing link");
        }
      }
      if (!seen.insert(r).second) {
        fail(ErrorKind::kInvalidInput, where + " is ranked twice");
      }
    }
  }
}

}  // namespace

std::vector<std::size_t> bgp_node_of(const BgpInstance& instance) {
  std::vector<std::size_t> node(instance.as_count,
                                std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (std::size_t i = 0; i < instance.as_count; ++i) {
    if (i != instance.destination) node[i] = next++;
  }
  return node;
}

HistorylessSystem build_bgp(const BgpInstance& instance) {
  std::set<std::pair<std::size_t, std::size_t>> linked;
  for (const auto& [u, v] : instance.links) {
    if (u >= instance.as_count || v >= instance.as_count || u == v) {
      fail(ErrorKind::kInvalidInput, "malformed link");
    }
    linked.insert({u, v});
    linked.insert({v, u});
  }
  validate_bgp(instance, linked);
  const auto node_of = bgp_node_of(instance);
  constexpr auto kDest = std::numeric_limits<std::size_t>::max();

  std::vector<int> sizes;
  std::vector<std::vector<RouteSlot>> slots;
  for (std::size_t i = 0; i < instance.as_count; ++i) {
    if (i == instance.destination) continue;
    sizes.push_back(static_cast<int>(instance.ranked_routes[i].size()) + 1);
    std::vector<RouteSlot> mine;
    for (const Route& r : instance.ranked_routes[i]) {
      const std::size_t hop = r[1];
      const Route suffix(r.begin() + 1, r.end());
      RouteSlot slot{kDest, 0, true};
      if (hop != instance.destination) {
        slot.next_node = node_of[hop];
        const auto& theirs = instance.ranked_routes[hop];
        const auto it = std::find(theirs.begin(), theirs.end(), suffix);
        // A suffix the next hop never ranks is never on offer.
        slot.needed =
            it == theirs.end() ? -1 : static_cast<int>(it - theirs.begin()) + 1;
      }
      for (const auto& denial : instance.denials) {
        if (denial.from == hop && denial.to == i && denial.route == suffix) {
          slot.exported = false;
        }
      }
      mine.push_back(slot);
    }
    slots.push_back(std::move(mine));
  }
  auto rule = [slots](const State& a) {
    State out(a.size());
    for (std::size_t v = 0; v < a.size(); ++v) {
      out[v] = 0;
      for (std::size_t r = 0; r < slots[v].size(); ++r) {
        const RouteSlot& s = slots[v][r];
        const bool offered =
            s.next_node == std::numeric_limits<std::size_t>::max() ||
            a[s.next_node] == s.needed;
        if (offered && s.exported) {
          out[v] = static_cast<int>(r) + 1;
          break;
        }
      }
    }
    return out;
  };
  return HistorylessSystem::from_rule(ActionSpace(sizes), rule, true);
}

bool bgp_is_routing_tree(const BgpInstance& instance, const State& state) {
  const auto node_of = bgp_node_of(instance);
  for (std::size_t i = 0; i < instance.as_count; ++i) {
    if (i == instance.destination) continue;
    const int action = state[node_of[i]];
    if (action == 0) continue;
    const Route& r =
        instance.ranked_routes[i][static_cast<std::size_t>(action - 1)];
    const std::size_t hop = r[1];
    if (hop == instance.destination) continue;
    const int theirs = state[node_of[hop]];
    if (theirs == 0) return false;
    const Route& next =
        instance.ranked_routes[hop][static_cast<std::size_t>(theirs - 1)];
    if (next != Route(r.begin() + 1, r.end())) return false;
  }
  return true;
}

namespace {

void validate_tm(const TMDescription& tm) {
  if (tm.states < 1 || tm.symbols < 1 || tm.tape_length < 1) {
    fail(ErrorKind::kInvalidInput,
         "machine needs states, symbols and tape cells");
  }
  if (tm.halting.size() != static_cast<std::size_t>(tm.states) ||
      tm.delta.size() != static_cast<std::size_t>(tm.states)) {
    fail(ErrorKind::kInvalidInput,
         "halting flags and transition rows must cover every state");
  }
  for (int q = 0; q < tm.states; ++q) {
    if (tm.halting[static_cast<std::size_t>(q)]) continue;
    const auto& row = tm.delta[static_cast<std::size_t>(q)];
    if (row.size() != static_cast<std::size_t>(tm.symbols)) {
      fail(ErrorKind::kInvalidInput,
           "transition row of state " + std::to_string(q) + " is incomplete");
    }
    for (const TmMove& m : row) {
      if (m.next_state < 0 || m.next_state >= tm.states || m.write < 0 ||
          m.write >= tm.symbols || m.dir < -1 || m.dir > 1) {
        fail(ErrorKind::kInvalidInput,
             "transition of state " + std::to_string(q) + " is out of range");
      }
    }
  }
}

}  // namespace

int encode_head(const TMDescription& tm, const HeadAction& h) {
  return (((h.q * tm.symbols + h.gamma) * tm.tape_length + h.j) * 3 +
          (h.d + 1)) * 2 + h.parity;
}

HeadAction decode_head(const TMDescription& tm, int action) {
  HeadAction h;
  h.parity = action % 2;
  action /= 2;
  h.d = action % 3 - 1;
  action /= 3;
  h.j = action % tm.tape_length;
  action /= tm.tape_length;
  h.gamma = action % tm.symbols;
  h.q = action / tm.symbols;
  return h;
}

HistorylessSystem build_tm(const TMDescription& tm) {
  validate_tm(tm);
  const auto n = static_cast<std::size_t>(tm.tape_length);
  std::vector<int> sizes(n, tm.symbols);
  sizes.push_back(tm.states * tm.symbols * tm.tape_length * 3 * 2);
  auto rule = [tm, n](const State& a) {
    State out(a);
    HeadAction h = decode_head(tm, a[n]);
    out[static_cast<std::size_t>(h.j)] = h.gamma;
    if (!tm.halting[static_cast<std::size_t>(h.q)] &&
        a[static_cast<std::size_t>(h.j)] == h.gamma) {
      const int moved = h.j + h.d;
      if (moved >= 0 && moved < tm.tape_length) h.j = moved;
      const TmMove& m = tm.delta[static_cast<std::size_t>(h.q)]
                                [static_cast<std::size_t>(a[static_cast<std::size_t>(h.j)])];
      h.q = m.next_state;
      h.gamma = m.write;
      h.d = m.dir;
      h.parity ^= 1;
    }
    out[n] = encode_head(tm, h);
    return out;
  };
  // Cells keep their own symbol and the head reads its own state, so this
  // system is not self-independent.
  return HistorylessSystem::from_rule(ActionSpace(sizes), rule);
}

namespace {

HistorylessSystem table_2x2(const std::vector<State>& rows) {
  return HistorylessSystem::from_table(ActionSpace({2, 2}), rows);
}

int param(const FixtureParams& params, const std::string& key, int fallback,
          int lo, int hi) {
  const auto it = params.find(key);
  const int v = it == params.end() ? fallback : it->second;
  if (v < lo || v > hi) {
    fail(ErrorKind::kInvalidInput, "fixture parameter " + key + "=" +
                                       std::to_string(v) + " outside [" +
                                       std::to_string(lo) + ", " +
                                       std::to_string(hi) + "]");
  }
  return v;
}

bool all_equal_except(const State& a, std::size_t skip, int value) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (k != skip && a[k] != value) return false;
  }
  return true;
}

Game game_2x2(const std::vector<std::vector<Utility>>& u) {
  return Game(ActionSpace({2, 2}), u);
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"fig1",    "ex-three-stable", "ex-unbounded-latched",
          "ring",    "futile",          "game-2x2x2",
          "coordination-2x2", "matching-pennies"};
}

FixtureValue fixture(const std::string& name, const FixtureParams& params) {
  // Actions: 0 = alpha, 1 = beta, 2 = gamma.
  if (name == "fig1") {
    return table_2x2({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  }
  if (name == "ex-three-stable") {
    return table_2x2({{1, 1}, {0, 1}, {1, 0}, {1, 1}});
  }
  if (name == "ex-unbounded-latched") {
    // Node 3 is a latch: 0 while node 2 was last seen at alpha, 1 while it
    // was last seen at beta with no recorded alpha-to-beta change, 2 once the
    // change was seen.
    const ActionSpace space({2, 2, 3});
    return HistorylessSystem::from_rule(space, [](const State& a) {
      int latch;
      if (a[2] == 2) {
        latch = 2;
      } else if (a[1] == 0) {
        latch = 0;
      } else {
        latch = a[2] == 0 ? 2 : 1;
      }
      return State{a[2] == 2 ? 1 : 0, a[0], latch};
    });
  }
  if (name == "ring") {
    const int n = param(params, "n", 4, 2, 20);
    return HistorylessSystem::from_rule(
        ActionSpace(std::vector<int>(static_cast<std::size_t>(n), 2)),
        [](const State& a) {
          State out(a.size());
          for (std::size_t i = 0; i < a.size(); ++i) {
            out[i] = all_equal_except(a, i, 0) ? 0 : 1;
          }
          return out;
        },
        true);
  }
  if (name == "futile") {
    const int n = param(params, "n", 3, 3, 12);
    // Nodes 1 and 2 play matching pennies (node 1 on {alpha, beta}, node 2 on
    // {beta, gamma}) while everyone else plays beta, so beta^n is not stable
    // and no n-1 equal actions are ever created.
    return HistorylessSystem::from_rule(
        ActionSpace(std::vector<int>(static_cast<std::size_t>(n), 3)),
        [](const State& a) {
          State out(a.size());
          bool tail_beta = true;
          for (std::size_t k = 2; k < a.size(); ++k) tail_beta = tail_beta && a[k] == 1;
          for (std::size_t i = 0; i < a.size(); ++i) {
            if (all_equal_except(a, i, 0)) {
              out[i] = 0;
            } else if (all_equal_except(a, i, 2)) {
              out[i] = 2;
            } else if (i == 0 && tail_beta && a[1] == 2) {
              out[i] = 0;
            } else if (i == 1 && tail_beta && a[0] == 1) {
              out[i] = 2;
            } else {
              out[i] = 1;
            }
          }
          return out;
        },
        true);
  }
  if (name == "game-2x2x2") return fixture_game_2x2x2();
  if (name == "coordination-2x2") {
    return game_2x2({{1, 0, 0, 1}, {1, 0, 0, 1}});
  }
  if (name == "matching-pennies") {
    return game_2x2({{1, 0, 0, 1}, {0, 1, 1, 0}});
  }
  fail(ErrorKind::kInvalidInput, "unknown fixture '" + name + "'");
}

}  // namespace asyncdyn
