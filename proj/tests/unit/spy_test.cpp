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

#include <map>

#include <gtest/gtest.h>

#include "garena/errors.hpp"
#include "garena/game_core.hpp"
#include "garena/rating.hpp"
#include "garena/serialize.hpp"
#include "test_support.hpp"

namespace garena {
namespace {

using VoteList = std::vector<std::pair<int, int>>;

MatchConfig spy_config(int players, std::uint64_t seed = 1) {
  MatchConfig c = default_config(GameKind::kWhoIsSpy);
  c.player_count = players;
  c.rng_seed = seed;
  return c;
}

const SpyState& spy(const GameState& s) { return std::get<SpyState>(s.detail); }

// Every living seat describes with a neutral token.
GameState describe_all(GameState s, std::vector<StepRecord>* steps = nullptr) {
  while (spy(s).phase == SpyPhase::kDescribe) {
    JointActions a(s.config.player_count, Abstain{});
    a[spy(s).speaker] = Description{"thing"};
    auto [next, r] = game_step(s, a);
    if (steps) steps->push_back({r, {}, {}, {}, {}});
    s = next;
  }
  return s;
}

GameState vote(GameState s, const std::map<int, int>& ballots,
               std::vector<StepRecord>* steps = nullptr) {
  JointActions a(s.config.player_count, Abstain{});
  for (auto [voter, target] : ballots) a[voter] = Vote{target};
  auto [next, r] = game_step(s, a);
  if (steps) steps->push_back({r, {}, {}, {}, {}});
  return next;
}

TEST(SpyTally, SpecExamples) {
  const std::vector<bool> four(4, true);
  EXPECT_EQ(spy_tally_votes(VoteList{{1, 0}, {2, 0}, {3, 1}, {0, 1}}, four), 0);
  EXPECT_EQ(spy_tally_votes(VoteList{{0, 1}, {1, 0}, {2, 3}, {3, 2}}, four), 0);
  const std::vector<bool> six(6, true);
  EXPECT_EQ(spy_tally_votes(VoteList{{0, 5}, {1, 5}, {2, 5}, {3, 5}, {4, 5}, {5, 0}}, six), 5);
}

TEST(SpyTally, StrictRejections) {
  std::vector<bool> alive{true, true, true, false};
  EXPECT_THROW(spy_tally_votes(VoteList{{0, 0}, {1, 0}, {2, 0}}, alive), IllegalVote);
  EXPECT_THROW(spy_tally_votes(VoteList{{0, 1}, {1, 0}, {2, 3}}, alive), IllegalVote);
  EXPECT_THROW(spy_tally_votes(VoteList{{0, 1}, {1, 0}, {3, 0}}, alive), IllegalVote);
  EXPECT_THROW(spy_tally_votes(VoteList{{0, 1}, {1, 0}}, alive), IllegalVote);
  EXPECT_THROW(spy_tally_votes(VoteList{{0, 1}, {0, 2}, {1, 0}, {2, 0}}, alive), IllegalVote);
}

TEST(SpyTally, Abstentions) {
  std::vector<bool> alive(5, true);
  EXPECT_EQ(spy_tally_with_abstentions(VoteList{}, alive), std::nullopt);
  EXPECT_EQ(spy_tally_with_abstentions(VoteList{{0, 3}}, alive), 3);
  EXPECT_EQ(spy_tally_with_abstentions(VoteList{{0, 3}, {1, 2}}, alive), 2);
}

// Recount by hand: count per target, highest count, lowest seat.
TEST(SpyTally, BruteForceRecount) {
  std::mt19937 gen(11);
  for (int t = 0; t < 2000; ++t) {
    const int n = 4 + static_cast<int>(gen() % 3);
    std::vector<bool> alive(n, true);
    VoteList votes;
    for (int v = 0; v < n; ++v) {
      int target;
      do {
        target = static_cast<int>(gen() % n);
      } while (target == v);
      votes.push_back({v, target});
    }
    std::vector<int> count(n, 0);
    for (auto [v, target] : votes) ++count[target];
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (count[i] > count[best]) best = i;
    }
    ASSERT_EQ(spy_tally_votes(votes, alive), best);
  }
}

TEST(SpyInit, OneSpyDeterministic) {
  for (int n = 4; n <= 6; ++n) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const SpyState s = spy_init(spy_config(n), seed);
      EXPECT_EQ(std::count(s.roles.begin(), s.roles.end(), SpyRole::kSpy), 1);
      EXPECT_EQ(s.words[spy_seat(s)], "cello");
      EXPECT_EQ(std::count(s.words.begin(), s.words.end(), "violin"), n - 1);
      EXPECT_EQ(s.phase, SpyPhase::kDescribe);
      EXPECT_EQ(s.round_no, 1);
      EXPECT_EQ(spy_init(spy_config(n), seed), s);
    }
  }
  EXPECT_THROW(spy_init(spy_config(3), 0), ConfigError);
  EXPECT_THROW(spy_init(spy_config(7), 0), ConfigError);
}

// Expected result of the termination rule for a given alive pattern.
std::optional<std::vector<int>> win_rule(const std::vector<bool>& alive, int spy_seat) {
  const int n = static_cast<int>(alive.size());
  if (!alive[spy_seat]) {
    std::vector<int> civilians;
    for (int i = 0; i < n; ++i) {
      if (i != spy_seat) civilians.push_back(i);
    }
    return civilians;
  }
  int civ = 0;
  for (int i = 0; i < n; ++i) civ += (i != spy_seat && alive[i]) ? 1 : 0;
  if (civ <= 2) return std::vector<int>{spy_seat};
  return std::nullopt;
}

TEST(SpyWin, EnumerateAliveConfigurations) {
  for (int n = 4; n <= 6; ++n) {
    SpyState s = spy_init(spy_config(n), 5);
    const int sp = spy_seat(s);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      for (int i = 0; i < n; ++i) s.alive[i] = (mask >> i) & 1u;
      ASSERT_EQ(spy_check_win(s), win_rule(s.alive, sp)) << "n=" << n << " mask=" << mask;
    }
  }
  // Named cases.
  SpyState s = spy_init(spy_config(6), 5);
  const int sp = spy_seat(s);
  int killed = 0;
  for (int i = 0; i < 6 && killed < 3; ++i) {
    if (i != sp) {
      s.alive[i] = false;
      ++killed;
    }
  }
  EXPECT_EQ(spy_check_win(s), std::vector<int>{sp});
  s.alive.assign(6, true);
  s.alive[(sp + 1) % 6] = false;
  EXPECT_EQ(spy_check_win(s), std::nullopt);
}

TEST(SpyWin, SurvivingTheRoundCapWins) {
  MatchConfig cfg = spy_config(6);
  cfg.rounds = 1;
  GameState s = describe_all(game_init(cfg));
  ASSERT_EQ(spy(s).phase, SpyPhase::kVote);
  s = vote(s, {});  // everyone abstains
  EXPECT_TRUE(s.terminal);
  EXPECT_EQ(game_outcome(s).winners, std::vector<int>{spy_seat(spy(s))});
}

TEST(SpyFlow, DescribeThenVote) {
  GameState s = game_init(spy_config(4));
  EXPECT_EQ(acting_players(s), std::vector<int>{0});
  s = describe_all(s);
  EXPECT_EQ(spy(s).phase, SpyPhase::kVote);
  EXPECT_EQ(acting_players(s).size(), 4u);
  EXPECT_EQ(spy(s).descriptions.size(), 4u);
}

TEST(SpyFlow, SayingOwnWordEliminates) {
  GameState s = game_init(spy_config(5, 3));
  const int speaker = spy(s).speaker;
  JointActions a(5, Abstain{});
  a[speaker] = Description{"VIOLIN"};
  if (spy(s).words[speaker] != "violin") a[speaker] = Description{"Cello"};
  auto [next, r] = game_step(s, a);
  EXPECT_FALSE(spy(next).alive[speaker]);
  EXPECT_EQ(r.eliminated, speaker);
  EXPECT_EQ(spy(next).descriptions.back().text, "[redacted]");
  EXPECT_EQ(spy(next).eliminations.back().cause, EliminationCause::kSaidOwnWord);
}

TEST(SpyFlow, VotePhaseRemovesExactlyOne) {
  GameState s = describe_all(game_init(spy_config(6, 9)));
  const int sp = spy_seat(spy(s));
  const int target = (sp + 1) % 6;
  std::map<int, int> ballots;
  for (int v = 0; v < 6; ++v) ballots[v] = v == target ? sp : target;
  GameState after = vote(s, ballots);
  const auto alive_before = std::count(spy(s).alive.begin(), spy(s).alive.end(), true);
  const auto alive_after = std::count(spy(after).alive.begin(), spy(after).alive.end(), true);
  EXPECT_EQ(alive_before - alive_after, 1);
  EXPECT_FALSE(spy(after).alive[target]);
  EXPECT_EQ(spy(after).round_no, 2);
  EXPECT_EQ(spy(after).phase, SpyPhase::kDescribe);
}

TEST(SpyFlow, IllegalVoteRejected) {
  GameState s = describe_all(game_init(spy_config(4)));
  JointActions a(4, Abstain{});
  a[0] = Vote{0};
  EXPECT_THROW(game_step(s, a), IllegalVote);
}

MatchRecord finished_record(const MatchConfig& cfg, const std::vector<StepRecord>& steps,
                            const GameState& final_state) {
  MatchRecord r;
  r.match_id = "spy";
  r.config = cfg;
  for (int i = 0; i < cfg.player_count; ++i) r.participants.push_back("p" + std::to_string(i));
  r.steps = steps;
  r.outcome = game_outcome(final_state);
  return r;
}

TEST(SpyPoints, SpyCaughtInRoundOneSixPlayers) {
  const MatchConfig cfg = spy_config(6, 21);
  std::vector<StepRecord> steps;
  GameState s = describe_all(game_init(cfg), &steps);
  const int sp = spy_seat(spy(s));
  std::map<int, int> ballots;
  for (int v = 0; v < 6; ++v) ballots[v] = v == sp ? (sp + 1) % 6 : sp;
  s = vote(s, ballots, &steps);
  ASSERT_TRUE(s.terminal);
  const auto points = spy_points(finished_record(cfg, steps, s));
  for (int i = 0; i < 6; ++i) EXPECT_EQ(points[i], i == sp ? 0 : 10 + 2 * 1) << i;
}

TEST(SpyPoints, SpyWinsFourPlayersAfterOnePhase) {
  const MatchConfig cfg = spy_config(4, 22);
  std::vector<StepRecord> steps;
  GameState s = describe_all(game_init(cfg), &steps);
  const int sp = spy_seat(spy(s));
  const int victim = (sp + 1) % 4;
  std::map<int, int> ballots;
  for (int v = 0; v < 4; ++v) ballots[v] = v == victim ? sp : victim;
  s = vote(s, ballots, &steps);
  ASSERT_TRUE(s.terminal);
  const auto points = spy_points(finished_record(cfg, steps, s));
  EXPECT_EQ(points[sp], 30 + 2);
  EXPECT_EQ(points[victim], 0);
  for (int i = 0; i < 4; ++i) {
    if (i != sp && i != victim) EXPECT_EQ(points[i], 2);
  }
}

TEST(SpyPoints, UnfinishedRejected) {
  const MatchConfig cfg = spy_config(4);
  std::vector<StepRecord> steps;
  GameState s = describe_all(game_init(cfg), &steps);
  MatchRecord r;
  r.config = cfg;
  r.participants = {"a", "b", "c", "d"};
  r.steps = steps;
  r.outcome = aborted_outcome(s, "gone");
  EXPECT_THROW(spy_points(r), UnfinishedMatch);
  r.outcome.status = MatchStatus::kFinished;
  EXPECT_THROW(spy_points(r), UnfinishedMatch);
}

// Seeded matches with scripted agents: one spy, observations never carry the
// other word, the winner set follows the rule, and votes recount.
TEST(SpyProperty, ScriptedMatches) {
  const std::vector<WordPair> pairs{{"violin", "cello"}, {"river", "lake"}, {"apple", "pear"}};
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    MatchConfig cfg = spy_config(4 + static_cast<int>(seed % 3), seed);
    cfg.words = pairs[seed % pairs.size()];
    std::vector<AgentRegistration> regs;
    for (int i = 0; i < cfg.player_count; ++i) {
      regs.push_back(testing::scripted("s" + std::to_string(i), StrategyKind::kSpyScripted));
    }
    const MatchRecord rec = testing::play(regs, cfg);
    GameState s = game_init(cfg);
    ASSERT_EQ(std::count(spy(s).roles.begin(), spy(s).roles.end(), SpyRole::kSpy), 1);
    for (const auto& step : rec.steps) {
      for (int seat = 0; seat < cfg.player_count; ++seat) {
        const std::string own = spy(s).words[seat];
        const std::string other = own == cfg.words.civilian ? cfg.words.spy : cfg.words.civilian;
        const std::string text = observation_to_json(perceive(s, seat)).dump();
        ASSERT_EQ(text.find(other), std::string::npos);
        ASSERT_EQ(text.find("role"), std::string::npos);
      }
      if (spy(s).phase == SpyPhase::kVote) {
        std::vector<int> count(cfg.player_count, 0);
        bool any = false;
        for (const auto& a : step.result.actions) {
          if (const auto* v = std::get_if<Vote>(&a)) {
            ++count[v->target];
            any = true;
          }
        }
        const int best = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
        ASSERT_EQ(step.result.eliminated, any ? std::optional<int>(best) : std::nullopt);
      }
      s = game_step(s, step.result.actions).first;
    }
    ASSERT_TRUE(s.terminal);
    const auto expected = spy_check_win(spy(s));
    ASSERT_TRUE(expected.has_value());
    ASSERT_EQ(rec.outcome.winners, *expected);
  }
}

}  // namespace
}  // namespace garena
