// Runs the eleven acceptance criteria and prints one PASS/FAIL line each.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.h"
#include "asyncdyn/analyzer.h"
#include "asyncdyn/error.h"
#include "asyncdyn/game.h"
#include "asyncdyn/reductions.h"
#include "asyncdyn/simulator.h"
#include "asyncdyn/uncoupled.h"

namespace {

using namespace asyncdyn;

// A witness from criteria 1-10 and how to re-check it.
struct PendingReplay {
  std::string origin;
  std::function<bool()> replay;
};

std::vector<PendingReplay> g_replays;

void collect_convergence_witness(const std::string& origin,
                                 const HistorylessSystem& sys,
                                 const ConvergenceVerdict& v) {
  if (!v.witness) {
    g_replays.push_back({origin, [] { return false; }});
    return;
  }
  g_replays.push_back({origin, [sys, w = *v.witness] {
                         return std::holds_alternative<verdicts::Cycling>(
                             replay_witness(sys, w));
                       }});
}

void collect_r_witness(const std::string& origin, const HistorylessSystem& sys,
                       const ConvergenceVerdict& v, int r) {
  if (!v.witness) {
    g_replays.push_back({origin, [] { return false; }});
    return;
  }
  g_replays.push_back({origin, [sys, w = *v.witness, r] {
                         const Schedule s = Schedule::periodic(w.cycle, sys.node_count());
                         const bool fair = check_r_fair(
                             schedule_prefix(s, 3 * w.cycle.size() + r), r,
                             sys.node_count());
                         return fair && std::holds_alternative<verdicts::Cycling>(
                                            replay_witness(sys, w));
                       }});
}

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

HistorylessSystem fixture_system(const std::string& name, const FixtureParams& p = {}) {
  return std::get<HistorylessSystem>(fixture(name, p));
}

// 1
void fig1(Check& c) {
  const auto sys = fixture_system("fig1");
  c.expect(stable_states(sys) == std::vector<State>{{0, 0}, {1, 1}}, "stable states");
  const auto v = decide_convergence(sys);
  c.expect(!v.convergent, "fig1 reported convergent");
  c.expect(v.witness.has_value(), "no witness");
  collect_convergence_witness("criterion 1 fig1", sys, v);
}

// 2
void self_independent_oscillation(Check& c) {
  std::mt19937_64 rng(20240601);
  int found = 0;
  while (found < 1000) {
    const std::size_t n = 2 + rng() % 3;
    std::vector<int> sizes(n);
    for (auto& k : sizes) k = 2 + static_cast<int>(rng() % 2);
    const auto sys = oracle::random_self_independent(rng, ActionSpace(sizes));
    if (stable_states(sys).size() < 2) continue;
    ++found;
    const auto v = decide_convergence(sys);
    c.expect(!v.convergent, "system " + std::to_string(found) + " convergent");
    // A tenth of the witnesses go on to criterion 11.
    if (found % 10 == 0) collect_convergence_witness("criterion 2 #" + std::to_string(found), sys, v);
  }
}

// 3
void counterexamples(Check& c) {
  const auto three = fixture_system("ex-three-stable");
  c.expect(decide_convergence(three).convergent, "ex-three-stable not convergent");
  c.expect(stable_states(three).size() == 3, "ex-three-stable stable count");
  const auto latched = fixture_system("ex-unbounded-latched");
  c.expect(decide_convergence(latched).convergent, "ex-unbounded-latched not convergent");
  std::vector<State> projected;
  for (const State& s : stable_states(latched)) projected.push_back({s[0], s[1]});
  c.expect(projected == std::vector<State>{{0, 0}, {1, 1}}, "latched projections");
}

// 4
void game_equivalence(Check& c) {
  const ActionSpace space({2, 2});
  int unique = 0;
  for (int code = 0; code < 6561; ++code) {
    std::vector<std::vector<Utility>> u(2, std::vector<Utility>(4));
    for (int k = 0, x = code; k < 8; ++k, x /= 3) u[k / 4][k % 4] = x % 3;
    const Game g(space, u);
    try {
      const auto sys = br_system(g);
      ++unique;
      c.expect(enumerate_pne(g) == stable_states(sys), "pne mismatch at " + std::to_string(code));
    } catch (const Error& e) {
      c.expect(e.kind() == ErrorKind::kNonUniqueBestResponse, e.what());
    }
  }
  c.expect(unique > 0, "no unique-BR games");
  int systems = 0;
  for (int c1 = 0; c1 < 4; ++c1) {
    for (int c2 = 0; c2 < 4; ++c2) {
      std::vector<State> table;
      for (StateIndex s = 0; s < 4; ++s) {
        const State a = space.decode(s);
        table.push_back({(c1 >> a[1]) & 1, (c2 >> a[0]) & 1});
      }
      const auto sys = HistorylessSystem::from_table(space, table);
      c.expect(br_system(induced_game(sys)).same_reaction(sys), "round trip");
      ++systems;
    }
  }
  c.expect(systems == 16, "system count");
}

// 5
void ring_threshold(Check& c) {
  for (int n : {4, 5}) {
    const auto sys = fixture_system("ring", {{"n", n}});
    for (int r = 1; r <= n; ++r) {
      const auto v = decide_r_convergence(sys, r);
      c.expect(v.convergent == (r < n - 1),
               "ring n=" + std::to_string(n) + " r=" + std::to_string(r));
      if (!v.convergent) {
        collect_r_witness("criterion 5 ring n=" + std::to_string(n) + " r=" + std::to_string(r),
                          sys, v, r);
      }
    }
  }
}

// 6
void futile_count(Check& c) {
  const auto sys = fixture_system("futile", {{"n", 3}});
  const TransitionGraph graph(sys);
  int nonempty = 0;
  for (StateIndex s = 0; s < sys.state_count(); ++s) nonempty += spectrum(graph, s).empty() ? 0 : 1;
  c.expect(nonempty == 14, "nonempty spectra = " + std::to_string(nonempty));
}

// 7
void snake_threshold(Check& c) {
  const std::size_t q = oracle::longest_induced_cycle(3);
  const Snake snake = normalize_snake(longest_snake(3));
  c.expect(snake.size() == q, "snake length differs from oracle");
  const auto sys = build_snake_system(5, snake);
  const int s = static_cast<int>(q);
  const auto below = decide_r_convergence(sys, s - 1);
  c.expect(below.convergent, "not convergent at r=|S|-1");
  const auto at = decide_r_convergence(sys, s);
  c.expect(!at.convergent, "convergent at r=|S|");
  if (!at.convergent) collect_r_witness("criterion 7 snake r=|S|", sys, at, s);
}

// 8
void disjointness_sweep(Check& c) {
  const Snake snake = normalize_snake(longest_snake(3));
  const int q = static_cast<int>(snake.size());
  const std::size_t q_oracle = oracle::longest_induced_cycle(3);
  c.expect(static_cast<std::size_t>(q) == q_oracle, "snake length");
  for (int am = 0; am < (1 << q); ++am) {
    for (int bm = 0; bm < (1 << q); ++bm) {
      std::vector<int> a, b;
      for (int j = 0; j < q; ++j) {
        if (am >> j & 1) a.push_back(j + 1);
        if (bm >> j & 1) b.push_back(j + 1);
      }
      const auto sys = build_disjointness(5, snake, a, b);
      const auto v = decide_convergence(sys);
      c.expect(v.convergent == ((am & bm) == 0),
               "A=" + std::to_string(am) + " B=" + std::to_string(bm));
      if (!v.convergent && (am * 64 + bm) % 37 == 0) {
        collect_convergence_witness("criterion 8 A=" + std::to_string(am) + " B=" +
                                        std::to_string(bm), sys, v);
      }
    }
  }
}

// 9
void tm_equivalence(Check& c) {
  long machines = 0, halting = 0;
  for (int live = 1; live <= 2; ++live) {
    const int states = live + 1;
    std::vector<TmMove> moves;
    for (int q = 0; q < states; ++q)
      for (int w = 0; w < 2; ++w)
        for (int d = -1; d <= 1; ++d) moves.push_back({q, w, d});
    const long choices = static_cast<long>(moves.size());
    long total = 1;
    for (int k = 0; k < 2 * live; ++k) total *= choices;
    for (long code = 0; code < total; ++code) {
      TMDescription tm;
      tm.states = states;
      tm.symbols = 2;
      tm.tape_length = 2;
      tm.halting.assign(static_cast<std::size_t>(states), false);
      tm.halting.back() = true;
      tm.delta.assign(static_cast<std::size_t>(states), {});
      long x = code;
      for (int q = 0; q < live; ++q) {
        for (int sym = 0; sym < 2; ++sym) {
          tm.delta[static_cast<std::size_t>(q)].push_back(moves[static_cast<std::size_t>(x % choices)]);
          x /= choices;
        }
      }
      const auto sys = build_tm(tm);
      const auto v = decide_convergence(sys);
      const bool oracle_halts = oracle::tm_halts_everywhere(tm);
      ++machines;
      halting += oracle_halts ? 1 : 0;
      c.expect(v.convergent == oracle_halts, "TM code " + std::to_string(code));
      if (!v.convergent && code % 997 == 0) {
        collect_convergence_witness("criterion 9 TM " + std::to_string(code), sys, v);
      }
    }
  }
  std::printf("      %ld machines, %ld halt from every configuration\n", machines, halting);
}

Game random_game(std::mt19937_64& rng, const ActionSpace& space, int top) {
  std::vector<std::vector<Utility>> u(space.node_count(), std::vector<Utility>(space.state_count()));
  for (auto& row : u)
    for (auto& x : row) x = static_cast<Utility>(rng() % static_cast<unsigned>(top));
  return Game(space, u);
}

// 10
void protocol_grid(Check& c) {
  const ActionSpace two({2, 2});
  int a_count = 0;
  for (int code = 0; code < 6561; ++code) {
    std::vector<std::vector<Utility>> u(2, std::vector<Utility>(4));
    for (int k = 0, x = code; k < 8; ++k, x /= 3) u[k / 4][k % 4] = x % 3;
    const Game g(two, u);
    if (enumerate_pne(g).empty()) continue;
    ++a_count;
    c.expect(check_self_stabilization(Protocol::kThreeRecall, g).kind ==
                 StabilizationVerdict::Kind::kSelfStabilizing,
             "(a) game " + std::to_string(code));
  }
  std::mt19937_64 rng(1234);
  int b_count = 0;
  while (b_count < 200) {
    const Game g = random_game(rng, ActionSpace({4, 4}), 10);
    if (enumerate_pne(g).empty()) continue;
    ++b_count;
    c.expect(check_self_stabilization(Protocol::kTwoRecall, g).kind ==
                 StabilizationVerdict::Kind::kSelfStabilizing,
             "(b) game " + std::to_string(b_count));
  }
  int c_count = 0;
  while (c_count < 200) {
    const int k = 2 + static_cast<int>(rng() % 4);
    const Game g = random_game(rng, ActionSpace({2, k}), 10);
    if (enumerate_pne(g).empty()) continue;
    ++c_count;
    c.expect(check_self_stabilization_randomized(g).kind ==
                 StabilizationVerdict::Kind::kSelfStabilizing,
             "(c) game " + std::to_string(c_count));
  }
  const Game m = fixture_game_2x2x2();
  const auto v = check_self_stabilization_randomized(m);
  c.expect(v.kind == StabilizationVerdict::Kind::kFails, "(d) not Fails");
  c.expect(v.witness == std::vector<State>{{0, 0, 1}}, "(d) witness is not (1,1,2)");
  g_replays.push_back({"criterion 10(d) stay-or-roll", [m, w = v.witness] {
                         if (w.size() != 1) return false;
                         const auto pne = enumerate_pne(m);
                         for (StateIndex s : support_reachable(stay_or_roll_system(m), w[0])) {
                           for (const State& p : pne) {
                             if (m.space().encode(p) == s) return false;
                           }
                         }
                         for (std::uint64_t seed = 0; seed < 20; ++seed) {
                           if (simulate_stay_or_roll(m, w[0], seed, 5000)) return false;
                         }
                         return true;
                       }});
  std::printf("      (a) %d games  (b) %d games  (c) %d games\n", a_count, b_count, c_count);
}

// 11
void witness_integrity(Check& c) {
  for (const auto& p : g_replays) {
    bool ok = false;
    try {
      ok = p.replay();
    } catch (const std::exception& e) {
      c.expect(false, p.origin + ": " + e.what());
    }
    c.expect(ok, p.origin + " did not replay");
  }
  std::printf("      %zu witnesses replayed\n", g_replays.size());
}

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  void (*body)(Check&);
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "fig1 stable states and replayable oscillation", 1, fig1},
      {2, "1000 self-independent systems with >= 2 stable states oscillate", 60, self_independent_oscillation},
      {3, "ex-three-stable and ex-unbounded-latched converge", 1, counterexamples},
      {4, "PNE = stable states of best response; round trip on 2x2", 60, game_equivalence},
      {5, "ring r-convergent exactly for r < n-1 (n = 4, 5)", 30, ring_threshold},
      {6, "futile n = 3 has 4n+2 = 14 states with nonempty spectrum", 5, futile_count},
      {7, "snake system n = 5: convergent at r = |S|-1, not at r = |S|", 300, snake_threshold},
      {8, "disjointness n = 5: convergent iff A and B are disjoint (all pairs)", 600, disjointness_sweep},
      {9, "TM reduction verdict equals halting-from-all-configurations oracle", 300, tm_equivalence},
      {10, "uncoupled protocols grid (3-recall, 2-recall, stay-or-roll, game-2x2x2)", 300, protocol_grid},
      {11, "every witness from criteria 1-10 replays", 60, witness_integrity},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(secs <= cr.limit_s, "took longer than the time limit");
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", check.ok ? "PASS" : "FAIL", cr.id,
                cr.title, secs, check.ok ? "" : " -- ", check.why.str().c_str());
    std::fflush(stdout);
    failed += check.ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", 11 - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
