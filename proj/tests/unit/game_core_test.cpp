// Copyright 2026 The garena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <gtest/gtest.h>

#include "garena/errors.hpp"
#include "garena/game_core.hpp"
#include "test_support.hpp"

namespace garena {
namespace {

constexpr BinaryAction C = BinaryAction::kCooperate;
constexpr BinaryAction D = BinaryAction::kDefect;

TEST(PdPayoff, DefaultTable) {
  EXPECT_EQ(pd_payoff(C, C), std::make_pair(3, 3));
  EXPECT_EQ(pd_payoff(D, C), std::make_pair(5, 0));
  EXPECT_EQ(pd_payoff(C, D), std::make_pair(0, 5));
  EXPECT_EQ(pd_payoff(D, D), std::make_pair(1, 1));
}

TEST(PdPayoff, SymmetryAndDominance) {
  for (BinaryAction a : {C, D}) {
    for (BinaryAction b : {C, D}) {
      auto ab = pd_payoff(a, b);
      auto ba = pd_payoff(b, a);
      EXPECT_EQ(ab.first, ba.second);
      EXPECT_EQ(ab.second, ba.first);
      auto t = trust_payoff(a, b);
      auto tr = trust_payoff(b, a);
      EXPECT_EQ(t.first, tr.second);
    }
  }
  bool strict = false;
  for (BinaryAction other : {C, D}) {
    EXPECT_GE(pd_payoff(D, other).first, pd_payoff(C, other).first);
    strict |= pd_payoff(D, other).first > pd_payoff(C, other).first;
  }
  EXPECT_TRUE(strict);
}

TEST(PdPayoff, TableValidation) {
  EXPECT_NO_THROW(validate_pd({5, 3, 1, 0}));
  EXPECT_THROW(validate_pd({3, 3, 1, 0}), ConfigError);   // T == R
  EXPECT_THROW(validate_pd({5, 3, 1, 1}), ConfigError);   // P == S
  EXPECT_THROW(validate_pd({10, 3, 1, 0}), ConfigError);  // 2R <= T+S
}

TEST(TrustPayoff, Defaults) {
  EXPECT_EQ(trust_payoff(C, C), std::make_pair(1, 1));
  EXPECT_EQ(trust_payoff(kCheat, kCheat), std::make_pair(0, 0));
  EXPECT_EQ(trust_payoff(C, kCheat), std::make_pair(-1, 2));
  EXPECT_EQ(trust_payoff(kCheat, C), std::make_pair(2, -1));
  TrustPayoffs bad;
  bad.both_cheat = {1, 0};
  EXPECT_THROW(validate_trust(bad), ConfigError);
}

TEST(Dictator, Settle) {
  EXPECT_EQ(dictator_settle(100, 100), std::make_pair(100, 0));
  EXPECT_EQ(dictator_settle(100, 50), std::make_pair(50, 50));
  EXPECT_EQ(dictator_settle(0, 0), std::make_pair(0, 0));
  EXPECT_THROW(dictator_settle(100, 101), IllegalAllocation);
  EXPECT_THROW(dictator_settle(100, -1), IllegalAllocation);
}

TEST(Dictator, RolesAlternate) {
  MatchConfig cfg = default_config(GameKind::kDictator, true);
  GameState s = game_init(cfg);
  for (int round = 1; round <= cfg.rounds; ++round) {
    auto acting = acting_players(s);
    ASSERT_EQ(acting.size(), 1u);
    EXPECT_EQ(acting[0], dictator_seat(round));
    JointActions a(2, Abstain{});
    const int keep = acting[0] == 0 ? 70 : 100;
    a[acting[0]] = Allocation{keep};
    auto [next, result] = game_step(s, a);
    EXPECT_EQ(result.payoffs[acting[0]], keep);
    EXPECT_EQ(result.payoffs[1 - acting[0]], 100 - keep);
    s = next;
  }
  EXPECT_TRUE(s.terminal);
  // Seat 0 dictates rounds 1,3,5,7,9.
  EXPECT_EQ(s.cumulative, (std::vector<int>{5 * 70 + 5 * 0, 5 * 30 + 5 * 100}));
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(validate(default_config(GameKind::kPrisonersDilemma)));
  MatchConfig c = default_config(GameKind::kPrisonersDilemma);
  c.rounds = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = default_config(GameKind::kNim);
  c.initial_piles = {3, 0};
  EXPECT_THROW(validate(c), ConfigError);
  c = default_config(GameKind::kWhoIsSpy);
  c.words = {"Violin", "violin"};
  EXPECT_THROW(validate(c), ConfigError);
  c = default_config(GameKind::kWhoIsSpy);
  c.player_count = 3;
  EXPECT_THROW(validate(c), ConfigError);
  c = default_config(GameKind::kTrustGame);
  c.player_count = 3;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, Defaults) {
  EXPECT_EQ(default_config(GameKind::kPrisonersDilemma, true).rounds, 10);
  EXPECT_EQ(default_config(GameKind::kTrustGame, true).rounds, 10);
  EXPECT_EQ(default_config(GameKind::kPrisonersDilemma, false).rounds, 1);
  EXPECT_EQ(default_config(GameKind::kNim).initial_piles, (std::vector<int>{3, 4, 5}));
  EXPECT_EQ(default_config(GameKind::kDictator).endowment, 100);
}

TEST(GameStep, MultiRoundPdAccumulates) {
  MatchConfig cfg = default_config(GameKind::kPrisonersDilemma);
  cfg.rounds = 5;
  GameState s = game_init(cfg);
  for (int r = 0; r < 2; ++r) s = game_step(s, {C, C}).first;
  const auto before = s.cumulative;
  auto [next, result] = game_step(s, {C, D});
  EXPECT_EQ(result.round_no, 3);
  EXPECT_EQ(result.payoffs, (std::vector<int>{0, 5}));
  EXPECT_EQ(next.cumulative[0], before[0] + 0);
  EXPECT_EQ(next.cumulative[1], before[1] + 5);
  EXPECT_EQ(std::get<MatrixState>(next.detail).round_no, 4);
  EXPECT_FALSE(next.terminal);
}

TEST(GameStep, RejectsWrongShapes) {
  GameState s = game_init(default_config(GameKind::kPrisonersDilemma));
  EXPECT_THROW(game_step(s, {C}), IllegalMove);
  EXPECT_THROW(game_step(s, {C, Abstain{}}), IllegalMove);
  EXPECT_THROW(game_step(s, {C, NimMove{0, 1}}), IllegalMove);
  s = game_step(s, {C, C}).first;
  EXPECT_TRUE(s.terminal);
  EXPECT_THROW(game_step(s, {C, C}), IllegalMove);
}

TEST(GameStep, NimLastMoverPaid) {
  MatchConfig cfg = default_config(GameKind::kNim);
  cfg.initial_piles = {1};
  GameState s = game_init(cfg);
  auto [next, result] = game_step(s, {NimMove{0, 1}, Abstain{}});
  EXPECT_TRUE(next.terminal);
  EXPECT_EQ(result.payoffs, (std::vector<int>{1, 0}));
  const MatchOutcome o = game_outcome(next);
  EXPECT_EQ(o.winners, std::vector<int>{0});
  EXPECT_EQ(o.scores, (std::vector<double>{1.0, 0.0}));
}

TEST(Outcome, DrawAndForfeit) {
  GameState s = game_init(default_config(GameKind::kPrisonersDilemma));
  s = game_step(s, {D, D}).first;
  const MatchOutcome draw = game_outcome(s);
  EXPECT_EQ(draw.scores, (std::vector<double>{0.5, 0.5}));
  EXPECT_TRUE(draw.winners.empty());
  EXPECT_THROW(game_outcome(game_init(default_config(GameKind::kPrisonersDilemma))),
               UnfinishedMatch);
  const MatchOutcome f =
      forfeit_outcome(game_init(default_config(GameKind::kTrustGame)), 1, "late");
  EXPECT_EQ(f.scores, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(f.forfeit_by, 1);
}

// Random legal play through every game: replaying the same joint actions
// from the same config reproduces the same states, and two-player scores
// sum to one.
TEST(GameStep, ReplayDeterminismProperty) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 300; ++trial) {
    const GameKind game = kAllGames[trial % kAllGames.size()];
    MatchConfig cfg = default_config(game, trial % 2 == 0);
    if (game == GameKind::kWhoIsSpy) cfg.player_count = 4 + trial % 3;
    cfg.rng_seed = gen();
    GameState s = game_init(cfg);
    std::vector<JointActions> script;
    while (!s.terminal) {
      JointActions a(cfg.player_count, Abstain{});
      for (int seat : acting_players(s)) {
        const LegalActions legal = legal_actions(s, seat);
        switch (legal.kind) {
          case LegalActions::Kind::kBinary:
            a[seat] = legal.binary[gen() % legal.binary.size()];
            break;
          case LegalActions::Kind::kNimMove:
            a[seat] = legal.nim_moves[gen() % legal.nim_moves.size()];
            break;
          case LegalActions::Kind::kAllocation:
            a[seat] = Allocation{static_cast<int>(gen() % (legal.max_keep + 1))};
            break;
          case LegalActions::Kind::kDescription:
            a[seat] = Description{"d" + std::to_string(gen() % 3)};
            break;
          case LegalActions::Kind::kVote:
            if (gen() % 5 == 0) {
              a[seat] = Abstain{};
            } else {
              a[seat] = Vote{legal.vote_targets[gen() % legal.vote_targets.size()]};
            }
            break;
          case LegalActions::Kind::kNone:
            break;
        }
      }
      script.push_back(a);
      s = game_step(s, a).first;
    }
    GameState again = game_init(cfg);
    for (const auto& a : script) again = game_step(again, a).first;
    ASSERT_EQ(again, s);
    const MatchOutcome o = game_outcome(s);
    if (game != GameKind::kWhoIsSpy) {
      ASSERT_DOUBLE_EQ(o.scores[0] + o.scores[1], 1.0);
    } else {
      ASSERT_FALSE(o.winners.empty());
    }
  }
}

TEST(Describe, ActionNames) {
  EXPECT_EQ(describe(Action{C}, GameKind::kPrisonersDilemma), "cooperate");
  EXPECT_EQ(describe(Action{kCheat}, GameKind::kTrustGame), "cheat");
  EXPECT_EQ(describe(Action{D}, GameKind::kPrisonersDilemma), "defect");
  EXPECT_EQ(game_kind_from_string("nim"), GameKind::kNim);
  EXPECT_THROW(game_kind_from_string("werewolf"), ConfigError);
}

}  // namespace
}  // namespace garena
