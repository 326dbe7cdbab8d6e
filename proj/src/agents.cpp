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

#include "garena/agents.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "garena/rng.hpp"

namespace garena {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::string_view kStrategyNames[] = {
    "always_cooperate", "always_defect", "tit_for_tat",  "grim_trigger",
    "random_seeded",    "nim_optimal",   "nim_random",   "dictator_fair",
    "dictator_selfish", "spy_scripted",
};

template <class Steps>
void collect_binary(const Steps& steps, int opponent,
                    std::vector<BinaryAction>& out) {
  for (const auto& step : steps) {
    if (opponent < 0 || opponent >= static_cast<int>(step.actions.size())) continue;
    if (auto* a = std::get_if<BinaryAction>(&step.actions[opponent])) {
      out.push_back(*a);
    }
  }
}

// Memory when it has followed the match, otherwise the observed history.
// Remote clients keep no memory, so both routes must agree.
std::vector<BinaryAction> opponent_binary_history(const Observation& obs,
                                                  const AgentMemory& memory) {
  std::vector<BinaryAction> out;
  const int opponent = 1 - obs.player;
  if (!memory.history.empty()) {
    collect_binary(memory.history, opponent, out);
  } else {
    collect_binary(obs.history, opponent, out);
  }
  return out;
}

std::mt19937_64 decision_rng(const Observation& obs, std::uint64_t seed) {
  return std::mt19937_64(derive_seed(
      seed, {static_cast<std::uint64_t>(obs.step),
             static_cast<std::uint64_t>(obs.player)}));
}

std::string random_token(std::mt19937_64& rng) {
  return fmt::format("{:08x}", static_cast<std::uint32_t>(rng()));
}

Decision random_decision(const Observation& obs, std::uint64_t seed) {
  auto rng = decision_rng(obs, seed);
  const LegalActions& legal = obs.legal;
  switch (legal.kind) {
    case LegalActions::Kind::kNone:
      return {Abstain{}, std::nullopt};
    case LegalActions::Kind::kBinary:
      return {legal.binary[uniform_below(rng, legal.binary.size())], std::nullopt};
    case LegalActions::Kind::kNimMove:
      return {legal.nim_moves[uniform_below(rng, legal.nim_moves.size())],
              std::nullopt};
    case LegalActions::Kind::kAllocation:
      return {Allocation{static_cast<int>(uniform_below(rng, legal.max_keep + 1))},
              std::nullopt};
    case LegalActions::Kind::kDescription:
      return {Description{random_token(rng)}, std::nullopt};
    case LegalActions::Kind::kVote:
      if (legal.vote_targets.empty()) return {Abstain{}, std::nullopt};
      return {Vote{legal.vote_targets[uniform_below(rng, legal.vote_targets.size())]},
              std::nullopt};
  }
  return {legal.first(), std::nullopt};
}

// Most frequent description of a round; ties go to the one said first.
std::optional<std::string> majority_token(const std::vector<SpyDescription>& ds,
                                          int round) {
  std::vector<std::pair<std::string, int>> counts;
  for (const auto& d : ds) {
    if (d.round != round) continue;
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& c) { return c.first == d.text; });
    if (it == counts.end()) {
      counts.emplace_back(d.text, 1);
    } else {
      ++it->second;
    }
  }
  if (counts.empty()) return std::nullopt;
  return std::max_element(counts.begin(), counts.end(),
                          [](const auto& a, const auto& b) {
                            return a.second < b.second;
                          })
      ->first;
}

Decision spy_scripted(const Observation& obs, std::uint64_t seed) {
  const SpyView& view = *obs.spy;
  if (obs.legal.kind == LegalActions::Kind::kDescription) {
    auto rng = decision_rng(obs, seed);
    // One time in four, echo the previous speaker of this round instead.
    if (uniform_below(rng, 4) == 0) {
      for (auto it = view.descriptions.rbegin(); it != view.descriptions.rend();
           ++it) {
        if (it->round == obs.round_no && it->player != obs.player) {
          return {Description{it->text},
                  fmt::format("echo seat {}", it->player)};
        }
      }
    }
    return {Description{spy_token(view.word, obs.round_no)}, std::nullopt};
  }
  if (obs.legal.kind != LegalActions::Kind::kVote || obs.legal.vote_targets.empty()) {
    return {obs.legal.first(), std::nullopt};
  }
  const int n = obs.player_count;
  std::vector<int> odd(n, 0);
  for (int round = 1; round <= obs.round_no; ++round) {
    const auto majority = majority_token(view.descriptions, round);
    if (!majority) continue;
    for (const auto& d : view.descriptions) {
      if (d.round == round && d.text != *majority) ++odd[d.player];
    }
  }
  int best = obs.legal.vote_targets.front();
  for (int target : obs.legal.vote_targets) {
    if (odd[target] > odd[best]) best = target;
  }
  return {Vote{best}, fmt::format("seat {} strayed {} times", best, odd[best])};
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  return kStrategyNames[static_cast<int>(kind)];
}

StrategyKind strategy_from_string(std::string_view name) {
  for (StrategyKind k : kAllStrategies) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown strategy '{}'", name));
}

std::vector<GameKind> supported_games(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kAlwaysCooperate:
    case StrategyKind::kAlwaysDefect:
    case StrategyKind::kTitForTat:
    case StrategyKind::kGrimTrigger:
      return {GameKind::kPrisonersDilemma, GameKind::kTrustGame};
    case StrategyKind::kRandomSeeded:
      return {kAllGames.begin(), kAllGames.end()};
    case StrategyKind::kNimOptimal:
    case StrategyKind::kNimRandom:
      return {GameKind::kNim};
    case StrategyKind::kDictatorFair:
    case StrategyKind::kDictatorSelfish:
      return {GameKind::kDictator};
    case StrategyKind::kSpyScripted:
      return {GameKind::kWhoIsSpy};
  }
  return {};
}

bool supports(StrategyKind kind, GameKind game) {
  const auto games = supported_games(kind);
  return std::find(games.begin(), games.end(), game) != games.end();
}

ScriptedProfile single_strategy_profile(StrategyKind kind) {
  ScriptedProfile p;
  for (GameKind g : supported_games(kind)) p.by_game[g] = kind;
  return p;
}

std::string spy_token(std::string_view word, int round_no) {
  const std::uint64_t h = fnv1a(fmt::format("{}#{}", word, round_no));
  return fmt::format("{:08x}", static_cast<std::uint32_t>(h >> 32));
}

Observation perceive(const GameState& state, int player) {
  Observation obs;
  const MatchConfig& cfg = state.config;
  obs.game = cfg.game;
  obs.player = player;
  obs.player_count = cfg.player_count;
  obs.step = static_cast<int>(state.history.size()) + 1;
  obs.total_rounds = cfg.rounds;
  obs.own_cumulative = state.cumulative[player];
  obs.legal = legal_actions(state, player);
  for (const auto& r : state.history) {
    obs.history.push_back(
        {r.round_no, r.step, r.actions, r.payoffs[player], r.eliminated});
  }
  std::visit(Overloaded{
                 [&](const MatrixState& m) { obs.round_no = m.round_no; },
                 [&](const NimState& n) {
                   obs.round_no = obs.step;
                   obs.nim = NimView{n.piles, n.to_move};
                 },
                 [&](const DictatorState& d) {
                   obs.round_no = d.round_no;
                   obs.dictator =
                       DictatorView{cfg.endowment, dictator_seat(d.round_no) == player};
                 },
                 [&](const SpyState& s) {
                   obs.round_no = s.round_no;
                   obs.spy = SpyView{s.words[player], s.phase,      s.alive,
                                     s.descriptions,  s.votes,      s.eliminations};
                 },
             },
             state.detail);
  return obs;
}

AgentMemory remember(AgentMemory memory, const RoundResult& round,
                     std::optional<std::string> reflection) {
  if (memory.self >= 0 && memory.self < static_cast<int>(round.payoffs.size())) {
    memory.cumulative_payoff += round.payoffs[memory.self];
  }
  memory.history.push_back(round);
  if (reflection) memory.reflections.push_back(std::move(*reflection));
  return memory;
}

Decision decide(StrategyKind strategy, const Observation& obs,
                const AgentMemory& memory, std::uint64_t seed) {
  const LegalActions& legal = obs.legal;
  if (legal.kind == LegalActions::Kind::kNone) return {Abstain{}, std::nullopt};
  const bool binary = legal.kind == LegalActions::Kind::kBinary;

  switch (strategy) {
    case StrategyKind::kAlwaysCooperate:
      if (binary) return {BinaryAction::kCooperate, std::nullopt};
      break;
    case StrategyKind::kAlwaysDefect:
      if (binary) return {BinaryAction::kDefect, std::nullopt};
      break;
    case StrategyKind::kTitForTat:
      if (binary) {
        const auto seen = opponent_binary_history(obs, memory);
        if (seen.empty()) return {BinaryAction::kCooperate, "open with cooperation"};
        return {seen.back(), "mirror last move"};
      }
      break;
    case StrategyKind::kGrimTrigger:
      if (binary) {
        const auto seen = opponent_binary_history(obs, memory);
        const bool triggered =
            std::find(seen.begin(), seen.end(), BinaryAction::kDefect) != seen.end();
        return {triggered ? BinaryAction::kDefect : BinaryAction::kCooperate,
                triggered ? std::optional<std::string>("triggered") : std::nullopt};
      }
      break;
    case StrategyKind::kRandomSeeded:
      return random_decision(obs, seed);
    case StrategyKind::kNimOptimal:
      if (legal.kind == LegalActions::Kind::kNimMove && obs.nim) {
        return {nim_optimal_move(NimState{obs.nim->piles, obs.nim->to_move}),
                fmt::format("nim-sum {}", nim_sum(obs.nim->piles))};
      }
      break;
    case StrategyKind::kNimRandom:
      if (legal.kind == LegalActions::Kind::kNimMove) return random_decision(obs, seed);
      break;
    case StrategyKind::kDictatorFair:
      if (legal.kind == LegalActions::Kind::kAllocation) {
        return {Allocation{(legal.max_keep + 1) / 2}, std::nullopt};
      }
      break;
    case StrategyKind::kDictatorSelfish:
      if (legal.kind == LegalActions::Kind::kAllocation) {
        return {Allocation{legal.max_keep}, std::nullopt};
      }
      break;
    case StrategyKind::kSpyScripted:
      if (obs.spy) return spy_scripted(obs, seed);
      break;
  }
  return {legal.first(), std::nullopt};
}

void ScriptedAgent::on_match_start(const std::string&, int seat,
                                   const MatchConfig&) {
  memory_ = AgentMemory{};
  memory_.self = seat;
  pending_reflection_.reset();
}

Decision ScriptedAgent::decide(const Observation& obs) {
  Decision d = garena::decide(strategy_, obs, memory_, seed_);
  pending_reflection_ = d.rationale;
  return d;
}

void ScriptedAgent::on_round(const RoundResult& result) {
  memory_ = remember(std::move(memory_), result, std::move(pending_reflection_));
  pending_reflection_.reset();
}

}  // namespace garena
