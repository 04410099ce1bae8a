#include <gtest/gtest.h>

#include <optional>

#include "asyncdyn/analyzer.h"
#include "asyncdyn/error.h"
#include "asyncdyn/game.h"
#include "asyncdyn/reductions.h"

namespace asyncdyn {
namespace {

Game fixture_game(const std::string& name) {
  return std::get<Game>(fixture(name));
}

TEST(BestResponse, AscendingArgmax) {
  const Game g(ActionSpace({3, 2}),
               {{5, 1, 5, 0, 2, 0}, {0, 0, 0, 0, 0, 0}});
  EXPECT_EQ(best_responses(g, 0, {1, 0}), (std::vector<int>{0, 1}));
  EXPECT_EQ(best_responses(g, 0, {0, 1}), (std::vector<int>{0}));
  EXPECT_EQ(best_responses(g, 1, {2, 0}), (std::vector<int>{0, 1}));
}

TEST(Pne, CoordinationAndMatchingPennies) {
  EXPECT_EQ(enumerate_pne(fixture_game("coordination-2x2")),
            (std::vector<State>{{0, 0}, {1, 1}}));
  EXPECT_TRUE(enumerate_pne(fixture_game("matching-pennies")).empty());
  EXPECT_EQ(enumerate_pne(fixture_game("game-2x2x2")),
            (std::vector<State>{{0, 0, 0}}));
}

TEST(Pne, MatchesStableStatesOfBestResponseSystem) {
  // Every 2x2 game with payoffs in {0,1,2} and unique best responses.
  const ActionSpace space({2, 2});
  int checked = 0;
  for (int code = 0; code < 6561; ++code) {
    std::vector<std::vector<Utility>> u(2, std::vector<Utility>(4));
    for (int k = 0, c = code; k < 8; ++k, c /= 3) u[k / 4][k % 4] = c % 3;
    const Game g(space, u);
    std::optional<HistorylessSystem> sys;
    try {
      sys = br_system(g);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kNonUniqueBestResponse);
      continue;
    }
    ++checked;
    ASSERT_EQ(enumerate_pne(g), stable_states(*sys)) << code;
  }
  EXPECT_GT(checked, 1000);
}

TEST(InducedGame, RoundTripOnAllSelfIndependent2x2Systems) {
  // f_1 depends on a_2 and f_2 on a_1: 4 x 4 choices.
  const ActionSpace space({2, 2});
  for (int c1 = 0; c1 < 4; ++c1) {
    for (int c2 = 0; c2 < 4; ++c2) {
      std::vector<State> table;
      for (StateIndex s = 0; s < 4; ++s) {
        const State a = space.decode(s);
        table.push_back({(c1 >> a[1]) & 1, (c2 >> a[0]) & 1});
      }
      const auto sys = HistorylessSystem::from_table(space, table);
      const auto back = br_system(induced_game(sys));
      EXPECT_TRUE(back.same_reaction(sys)) << c1 << " " << c2;
    }
  }
}

TEST(BrSystem, TiesRefusedOrBrokenLow) {
  const Game flat(ActionSpace({2, 2}), {{0, 0, 0, 0}, {1, 0, 0, 1}});
  try {
    br_system(flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonUniqueBestResponse);
  }
  const auto low = br_system(flat, TieBreak::kMin);
  EXPECT_EQ(low.reaction({1, 1}), (State{0, 1}));
  EXPECT_TRUE(check_self_independent(low).self_independent);
}

TEST(Game, RejectsShapeMismatch) {
  EXPECT_THROW(Game(ActionSpace({2, 2}), {{0, 0, 0, 0}}), Error);
  EXPECT_THROW(Game(ActionSpace({2, 2}), {{0, 0, 0}, {0, 0, 0, 0}}), Error);
}

}  // namespace
}  // namespace asyncdyn
