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

// The player-agent loop: perceive a game state, decide on an action, and
// remember the result. Scripted strategies live here too; remote agents
// implement the same Agent interface in protocol.hpp.

#ifndef GARENA_AGENTS_HPP_
#define GARENA_AGENTS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "garena/game_core.hpp"

namespace garena {

// One past step as every player saw it.
struct PublicStep {
  int round_no = 0;
  int step = 0;
  JointActions actions;
  int own_payoff = 0;
  std::optional<int> eliminated;
  bool operator==(const PublicStep&) const = default;
};

struct NimView {
  std::vector<int> piles;
  int to_move = 0;
  bool operator==(const NimView&) const = default;
};

struct DictatorView {
  int endowment = 0;
  bool is_dictator = false;
  bool operator==(const DictatorView&) const = default;
};

// What a Who Is Spy player may know: their own word and the public record.
// Roles and other players' words are never part of it.
struct SpyView {
  std::string word;
  SpyPhase phase = SpyPhase::kDescribe;
  std::vector<bool> alive;
  std::vector<SpyDescription> descriptions;
  std::vector<SpyBallot> votes;
  std::vector<SpyElimination> eliminations;
  bool operator==(const SpyView&) const = default;
};

struct Observation {
  GameKind game = GameKind::kPrisonersDilemma;
  int player = 0;
  int player_count = 2;
  int round_no = 1;
  // 1-based index of the step being decided.
  int step = 1;
  int total_rounds = 1;
  int own_cumulative = 0;
  std::vector<PublicStep> history;
  LegalActions legal;
  // nullopt: no deadline.
  std::optional<std::int64_t> deadline_ms;
  std::optional<NimView> nim;
  std::optional<DictatorView> dictator;
  std::optional<SpyView> spy;
  bool operator==(const Observation&) const = default;
};

// Projects the authoritative state onto what `player` may see.
Observation perceive(const GameState& state, int player);

struct AgentMemory {
  int self = 0;
  std::vector<RoundResult> history;
  std::vector<std::string> reflections;
  long long cumulative_payoff = 0;
  bool operator==(const AgentMemory&) const = default;
};

AgentMemory remember(AgentMemory memory, const RoundResult& round,
                     std::optional<std::string> reflection = std::nullopt);

struct Decision {
  Action action;
  std::optional<std::string> rationale;
  bool operator==(const Decision&) const = default;
};

enum class StrategyKind {
  kAlwaysCooperate,
  kAlwaysDefect,
  kTitForTat,
  kGrimTrigger,
  kRandomSeeded,
  kNimOptimal,
  kNimRandom,
  kDictatorFair,
  kDictatorSelfish,
  kSpyScripted,
};

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::kAlwaysCooperate, StrategyKind::kAlwaysDefect,
    StrategyKind::kTitForTat,       StrategyKind::kGrimTrigger,
    StrategyKind::kRandomSeeded,    StrategyKind::kNimOptimal,
    StrategyKind::kNimRandom,       StrategyKind::kDictatorFair,
    StrategyKind::kDictatorSelfish, StrategyKind::kSpyScripted,
};

std::string_view to_string(StrategyKind kind);
// Throws ConfigError.
StrategyKind strategy_from_string(std::string_view name);
std::vector<GameKind> supported_games(StrategyKind kind);
bool supports(StrategyKind kind, GameKind game);

// Pure: identical arguments give identical decisions. On a game the strategy
// does not know it plays the first legal action.
Decision decide(StrategyKind strategy, const Observation& obs,
                const AgentMemory& memory, std::uint64_t seed);

// The per-round token SpyScripted says for `word`.
std::string spy_token(std::string_view word, int round_no);

// A seat at the table for the duration of one match.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual void on_match_start(const std::string& /*match_id*/, int /*seat*/,
                              const MatchConfig& /*config*/) {}
  // May throw AgentFailure.
  virtual Decision decide(const Observation& obs) = 0;
  virtual void on_round(const RoundResult& /*result*/) {}
  virtual void on_match_end(const MatchOutcome& /*outcome*/) {}
  // nullopt: no deadline.
  virtual std::optional<std::int64_t> deadline_ms() const { return std::nullopt; }
};

// Strategy per game for one scripted participant.
struct ScriptedProfile {
  std::map<GameKind, StrategyKind> by_game;
  bool operator==(const ScriptedProfile&) const = default;
};

ScriptedProfile single_strategy_profile(StrategyKind kind);

class ScriptedAgent : public Agent {
 public:
  ScriptedAgent(StrategyKind strategy, std::uint64_t seed)
      : strategy_(strategy), seed_(seed) {}

  void on_match_start(const std::string& match_id, int seat,
                      const MatchConfig& config) override;
  Decision decide(const Observation& obs) override;
  void on_round(const RoundResult& result) override;

  const AgentMemory& memory() const { return memory_; }
  StrategyKind strategy() const { return strategy_; }

 private:
  StrategyKind strategy_;
  std::uint64_t seed_;
  AgentMemory memory_;
  std::optional<std::string> pending_reflection_;
};

}  // namespace garena

#endif  // GARENA_AGENTS_HPP_
