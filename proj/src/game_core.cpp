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

#include "garena/game_core.hpp"

#include <algorithm>
#include <cctype>
#include <map>
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

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool two_player(GameKind game) { return game != GameKind::kWhoIsSpy; }

}  // namespace

std::string_view to_string(GameKind game) {
  switch (game) {
    case GameKind::kPrisonersDilemma: return "prisoners_dilemma";
    case GameKind::kTrustGame: return "trust_game";
    case GameKind::kNim: return "nim";
    case GameKind::kDictator: return "dictator";
    case GameKind::kWhoIsSpy: return "who_is_spy";
  }
  return "?";
}

GameKind game_kind_from_string(std::string_view name) {
  for (GameKind g : kAllGames) {
    if (to_string(g) == name) return g;
  }
  throw ConfigError(fmt::format("unknown game '{}'", name));
}

std::string_view to_string(BinaryAction action, GameKind game) {
  if (action == BinaryAction::kCooperate) return "cooperate";
  return game == GameKind::kTrustGame ? "cheat" : "defect";
}

BinaryAction binary_action_from_string(std::string_view name) {
  if (name == "cooperate") return BinaryAction::kCooperate;
  if (name == "defect" || name == "cheat") return BinaryAction::kDefect;
  throw ConfigError(fmt::format("unknown binary action '{}'", name));
}

std::string_view to_string(SpyPhase phase) {
  switch (phase) {
    case SpyPhase::kDescribe: return "describe";
    case SpyPhase::kVote: return "vote";
    case SpyPhase::kFinished: return "finished";
  }
  return "?";
}

void validate_pd(const PdPayoffs& t) {
  if (!(t.temptation > t.reward && t.reward > t.punishment &&
        t.punishment > t.sucker)) {
    throw ConfigError("PD payoffs must satisfy T > R > P > S");
  }
  if (!(2 * t.reward > t.temptation + t.sucker)) {
    throw ConfigError("PD payoffs must satisfy 2R > T + S");
  }
}

void validate_trust(const TrustPayoffs& t) {
  if (t.both_cheat != std::pair{0, 0}) {
    throw ConfigError("Trust payoffs: mutual cheating must pay (0, 0)");
  }
}

MatchConfig default_config(GameKind game, bool multi_round) {
  MatchConfig c;
  c.game = game;
  switch (game) {
    case GameKind::kPrisonersDilemma:
    case GameKind::kTrustGame:
    case GameKind::kDictator:
      c.rounds = multi_round ? 10 : 1;
      break;
    case GameKind::kNim:
      c.rounds = 1;
      break;
    case GameKind::kWhoIsSpy:
      c.player_count = 4;
      c.rounds = 6;
      break;
  }
  return c;
}

void validate(const MatchConfig& c) {
  if (c.rounds < 1) throw ConfigError("rounds must be >= 1");
  switch (c.game) {
    case GameKind::kPrisonersDilemma:
      validate_pd(c.payoffs.pd);
      break;
    case GameKind::kTrustGame:
      validate_trust(c.payoffs.trust);
      break;
    case GameKind::kNim:
      if (c.initial_piles.empty()) throw ConfigError("Nim needs at least one pile");
      for (int p : c.initial_piles) {
        if (p < 1) throw ConfigError("Nim piles must be >= 1");
      }
      if (c.rounds != 1) throw ConfigError("Nim is played as a single game");
      break;
    case GameKind::kDictator:
      if (c.endowment < 0) throw ConfigError("endowment must be >= 0");
      break;
    case GameKind::kWhoIsSpy:
      if (c.player_count < 4 || c.player_count > 6) {
        throw ConfigError(fmt::format(
            "Who Is Spy needs 4-6 players, got {}", c.player_count));
      }
      if (c.words.civilian.empty() || c.words.spy.empty() ||
          iequals(c.words.civilian, c.words.spy)) {
        throw ConfigError("Who Is Spy words must be distinct and non-empty");
      }
      return;
  }
  if (c.player_count != 2) {
    throw ConfigError(fmt::format("{} is a two-player game", to_string(c.game)));
  }
}

std::string describe(const Action& action, GameKind game) {
  return std::visit(
      Overloaded{
          [](const Abstain&) -> std::string { return "-"; },
          [game](BinaryAction a) { return std::string(to_string(a, game)); },
          [](const NimMove& m) {
            return fmt::format("take {} from pile {}", m.take, m.pile_index);
          },
          [](const Allocation& a) { return fmt::format("keep {}", a.keep); },
          [](const Description& d) { return fmt::format("\"{}\"", d.text); },
          [](const Vote& v) { return fmt::format("vote {}", v.target); },
      },
      action);
}

// ---------------------------------------------------------------------------

std::pair<int, int> pd_payoff(BinaryAction a1, BinaryAction a2,
                              const PdPayoffs& t) {
  const bool c1 = a1 == BinaryAction::kCooperate;
  const bool c2 = a2 == BinaryAction::kCooperate;
  if (c1 && c2) return {t.reward, t.reward};
  if (c1) return {t.sucker, t.temptation};
  if (c2) return {t.temptation, t.sucker};
  return {t.punishment, t.punishment};
}

std::pair<int, int> trust_payoff(BinaryAction a1, BinaryAction a2,
                                 const TrustPayoffs& t) {
  const bool c1 = a1 == BinaryAction::kCooperate;
  const bool c2 = a2 == BinaryAction::kCooperate;
  if (c1 && c2) return t.both_cooperate;
  if (c1) return t.cooperate_cheat;
  if (c2) return t.cheat_cooperate;
  return t.both_cheat;
}

std::pair<int, int> dictator_settle(int endowment, int keep) {
  if (keep < 0 || keep > endowment) {
    throw IllegalAllocation(
        -1, fmt::format("cannot keep {} of {}", keep, endowment));
  }
  return {keep, endowment - keep};
}

// ---------------------------------------------------------------------------

unsigned nim_sum(std::span<const int> piles) {
  unsigned s = 0;
  for (int p : piles) s ^= static_cast<unsigned>(p);
  return s;
}

bool nim_terminal(const NimState& state) {
  return std::all_of(state.piles.begin(), state.piles.end(),
                     [](int p) { return p == 0; });
}

std::vector<NimMove> nim_legal_moves(const NimState& state) {
  std::vector<NimMove> moves;
  for (int i = 0; i < static_cast<int>(state.piles.size()); ++i) {
    for (int take = 1; take <= state.piles[i]; ++take) moves.push_back({i, take});
  }
  return moves;
}

NimState nim_apply(const NimState& state, const NimMove& move) {
  if (move.pile_index < 0 ||
      move.pile_index >= static_cast<int>(state.piles.size()) ||
      move.take < 1 || move.take > state.piles[move.pile_index]) {
    throw IllegalMove(state.to_move,
                      fmt::format("illegal Nim move: take {} from pile {}",
                                  move.take, move.pile_index));
  }
  NimState next = state;
  next.piles[move.pile_index] -= move.take;
  next.to_move = 1 - state.to_move;
  return next;
}

std::optional<int> nim_winner(const NimState& state) {
  if (!nim_terminal(state)) return std::nullopt;
  return 1 - state.to_move;
}

NimMove nim_optimal_move(const NimState& state) {
  if (nim_terminal(state)) {
    throw IllegalMove(state.to_move, "no move from a terminal Nim position");
  }
  const unsigned s = nim_sum(state.piles);
  const int n = static_cast<int>(state.piles.size());
  if (s != 0) {
    for (int i = 0; i < n; ++i) {
      const unsigned pile = static_cast<unsigned>(state.piles[i]);
      const unsigned target = pile ^ s;
      if (target < pile) return {i, static_cast<int>(pile - target)};
    }
  }
  for (int i = 0; i < n; ++i) {
    if (state.piles[i] > 0) return {i, 1};
  }
  throw IllegalMove(state.to_move, "unreachable");
}

// ---------------------------------------------------------------------------

SpyState spy_init(const MatchConfig& config, std::uint64_t rng_seed) {
  if (config.game != GameKind::kWhoIsSpy) {
    throw ConfigError("spy_init needs a Who Is Spy config");
  }
  validate(config);
  const int n = config.player_count;
  std::mt19937_64 rng(derive_seed(rng_seed, {0x5059ULL}));
  const int spy = static_cast<int>(uniform_below(rng, n));

  SpyState s;
  s.roles.assign(n, SpyRole::kCivilian);
  s.roles[spy] = SpyRole::kSpy;
  s.words.assign(n, config.words.civilian);
  s.words[spy] = config.words.spy;
  s.alive.assign(n, true);
  s.phase = SpyPhase::kDescribe;
  s.round_no = 1;
  s.max_rounds = config.rounds;
  s.speaker = 0;
  s.phases_survived.assign(n, 0);
  return s;
}

namespace {

std::optional<int> tally(std::span<const std::pair<int, int>> votes,
                         const std::vector<bool>& alive, bool strict) {
  const int n = static_cast<int>(alive.size());
  std::vector<int> cast(n, 0);
  std::vector<int> received(n, 0);
  for (auto [voter, target] : votes) {
    if (voter < 0 || voter >= n || !alive[voter]) {
      throw IllegalVote(voter, fmt::format("seat {} cannot vote", voter));
    }
    if (target < 0 || target >= n || !alive[target]) {
      throw IllegalVote(voter, fmt::format("seat {} is not a living target", target));
    }
    if (target == voter) throw IllegalVote(voter, "self-vote");
    if (++cast[voter] > 1) throw IllegalVote(voter, "voted twice");
    ++received[target];
  }
  if (strict) {
    for (int p = 0; p < n; ++p) {
      if (alive[p] && cast[p] == 0) {
        throw IllegalVote(p, fmt::format("seat {} did not vote", p));
      }
    }
  }
  if (votes.empty()) return std::nullopt;
  // max_element returns the first maximum, i.e. the lowest tied seat.
  return static_cast<int>(std::max_element(received.begin(), received.end()) -
                          received.begin());
}

}  // namespace

int spy_tally_votes(std::span<const std::pair<int, int>> votes,
                    const std::vector<bool>& alive) {
  auto out = tally(votes, alive, true);
  if (!out) throw IllegalVote(-1, "no votes cast");
  return *out;
}

std::optional<int> spy_tally_with_abstentions(
    std::span<const std::pair<int, int>> votes, const std::vector<bool>& alive) {
  return tally(votes, alive, false);
}

int spy_seat(const SpyState& state) {
  return static_cast<int>(
      std::find(state.roles.begin(), state.roles.end(), SpyRole::kSpy) -
      state.roles.begin());
}

int alive_civilians(const SpyState& state) {
  int count = 0;
  for (std::size_t i = 0; i < state.roles.size(); ++i) {
    if (state.alive[i] && state.roles[i] == SpyRole::kCivilian) ++count;
  }
  return count;
}

std::optional<std::vector<int>> spy_check_win(const SpyState& state) {
  const int spy = spy_seat(state);
  if (!state.alive[spy]) {
    std::vector<int> civilians;
    for (int i = 0; i < static_cast<int>(state.roles.size()); ++i) {
      if (i != spy) civilians.push_back(i);
    }
    return civilians;
  }
  if (alive_civilians(state) <= 2 || state.round_no > state.max_rounds) {
    return std::vector<int>{spy};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

GameState game_init(const MatchConfig& config) {
  validate(config);
  GameState s;
  s.config = config;
  s.cumulative.assign(config.player_count, 0);
  switch (config.game) {
    case GameKind::kPrisonersDilemma:
    case GameKind::kTrustGame:
      s.detail = MatrixState{};
      break;
    case GameKind::kNim:
      s.detail = NimState{config.initial_piles, 0};
      break;
    case GameKind::kDictator:
      s.detail = DictatorState{};
      break;
    case GameKind::kWhoIsSpy:
      s.detail = spy_init(config, config.rng_seed);
      break;
  }
  return s;
}

std::vector<int> acting_players(const GameState& state) {
  if (state.terminal) return {};
  return std::visit(
      Overloaded{
          [](const MatrixState&) { return std::vector<int>{0, 1}; },
          [](const NimState& n) { return std::vector<int>{n.to_move}; },
          [](const DictatorState& d) {
            return std::vector<int>{dictator_seat(d.round_no)};
          },
          [](const SpyState& s) {
            if (s.phase == SpyPhase::kDescribe) return std::vector<int>{s.speaker};
            std::vector<int> out;
            if (s.phase == SpyPhase::kVote) {
              for (int i = 0; i < static_cast<int>(s.alive.size()); ++i) {
                if (s.alive[i]) out.push_back(i);
              }
            }
            return out;
          },
      },
      state.detail);
}

bool LegalActions::allows(const Action& action) const {
  switch (kind) {
    case Kind::kNone:
      return std::holds_alternative<Abstain>(action);
    case Kind::kBinary:
      if (auto* a = std::get_if<BinaryAction>(&action)) {
        return std::find(binary.begin(), binary.end(), *a) != binary.end();
      }
      return false;
    case Kind::kNimMove:
      if (auto* m = std::get_if<NimMove>(&action)) {
        return std::binary_search(nim_moves.begin(), nim_moves.end(), *m);
      }
      return false;
    case Kind::kAllocation:
      if (auto* a = std::get_if<Allocation>(&action)) {
        return a->keep >= 0 && a->keep <= max_keep;
      }
      return false;
    case Kind::kDescription:
      if (auto* d = std::get_if<Description>(&action)) {
        return d->text.size() <= kMaxDescriptionBytes &&
               d->text.find_first_of("\r\n") == std::string::npos;
      }
      return false;
    case Kind::kVote:
      if (std::holds_alternative<Abstain>(action)) return true;
      if (auto* v = std::get_if<Vote>(&action)) {
        return std::find(vote_targets.begin(), vote_targets.end(), v->target) !=
               vote_targets.end();
      }
      return false;
  }
  return false;
}

Action LegalActions::first() const {
  switch (kind) {
    case Kind::kNone: return Abstain{};
    case Kind::kBinary: return binary.front();
    case Kind::kNimMove: return nim_moves.front();
    case Kind::kAllocation: return Allocation{0};
    case Kind::kDescription: return Description{""};
    case Kind::kVote:
      if (vote_targets.empty()) return Abstain{};
      return Vote{vote_targets.front()};
  }
  return Abstain{};
}

LegalActions legal_actions(const GameState& state, int player) {
  LegalActions legal;
  const auto acting = acting_players(state);
  if (std::find(acting.begin(), acting.end(), player) == acting.end()) {
    return legal;
  }
  std::visit(
      Overloaded{
          [&](const MatrixState&) {
            legal.kind = LegalActions::Kind::kBinary;
            legal.binary = {BinaryAction::kCooperate, BinaryAction::kDefect};
          },
          [&](const NimState& n) {
            legal.kind = LegalActions::Kind::kNimMove;
            legal.nim_moves = nim_legal_moves(n);
          },
          [&](const DictatorState&) {
            legal.kind = LegalActions::Kind::kAllocation;
            legal.max_keep = state.config.endowment;
          },
          [&](const SpyState& s) {
            if (s.phase == SpyPhase::kDescribe) {
              legal.kind = LegalActions::Kind::kDescription;
              return;
            }
            legal.kind = LegalActions::Kind::kVote;
            for (int i = 0; i < static_cast<int>(s.alive.size()); ++i) {
              if (s.alive[i] && i != player) legal.vote_targets.push_back(i);
            }
          },
      },
      state.detail);
  return legal;
}

namespace {

void require_abstain_except(const JointActions& actions,
                            const std::vector<int>& acting) {
  for (int i = 0; i < static_cast<int>(actions.size()); ++i) {
    if (std::find(acting.begin(), acting.end(), i) != acting.end()) continue;
    if (!std::holds_alternative<Abstain>(actions[i])) {
      throw IllegalMove(i, fmt::format("seat {} is not on turn", i));
    }
  }
}

template <class T>
const T& expect_action(const JointActions& actions, int seat,
                       const char* what) {
  const T* a = std::get_if<T>(&actions[seat]);
  if (a == nullptr) {
    throw IllegalMove(seat, fmt::format("seat {} must supply {}", seat, what));
  }
  return *a;
}

int next_alive_after(const SpyState& s, int seat) {
  for (int i = seat + 1; i < static_cast<int>(s.alive.size()); ++i) {
    if (s.alive[i]) return i;
  }
  return -1;
}

void finish_if_won(SpyState& s, GameState& g) {
  if (spy_check_win(s)) {
    s.phase = SpyPhase::kFinished;
    s.speaker = -1;
    g.terminal = true;
  }
}

void step_spy(GameState& g, SpyState& s, const JointActions& actions,
              RoundResult& result) {
  const int n = static_cast<int>(s.alive.size());
  if (s.phase == SpyPhase::kDescribe) {
    const int speaker = s.speaker;
    require_abstain_except(actions, {speaker});
    const auto& d = expect_action<Description>(actions, speaker, "a description");
    if (d.text.size() > kMaxDescriptionBytes ||
        d.text.find_first_of("\r\n") != std::string::npos) {
      throw IllegalMove(speaker, "description must be one short line");
    }
    if (iequals(d.text, s.words[speaker])) {
      // Saying one's own word is an elimination; the text never becomes public.
      s.descriptions.push_back({s.round_no, speaker, "[redacted]"});
      result.actions[speaker] = Description{"[redacted]"};
      s.alive[speaker] = false;
      s.eliminations.push_back(
          {s.round_no, speaker, EliminationCause::kSaidOwnWord});
      result.eliminated = speaker;
    } else {
      s.descriptions.push_back({s.round_no, speaker, d.text});
    }
    s.speaker = next_alive_after(s, speaker);
    if (s.speaker < 0) s.phase = SpyPhase::kVote;
    if (result.eliminated) finish_if_won(s, g);
    return;
  }

  // Vote phase: Abstain is an accepted abstention.
  std::vector<std::pair<int, int>> ballots;
  for (int i = 0; i < n; ++i) {
    if (!s.alive[i]) {
      if (!std::holds_alternative<Abstain>(actions[i])) {
        throw IllegalVote(i, fmt::format("eliminated seat {} cannot vote", i));
      }
      continue;
    }
    if (std::holds_alternative<Abstain>(actions[i])) continue;
    const auto& v = expect_action<Vote>(actions, i, "a vote");
    ballots.emplace_back(i, v.target);
  }
  const auto eliminated = spy_tally_with_abstentions(ballots, s.alive);
  for (auto [voter, target] : ballots) s.votes.push_back({s.round_no, voter, target});
  if (eliminated) {
    s.alive[*eliminated] = false;
    s.eliminations.push_back({s.round_no, *eliminated, EliminationCause::kVoted});
    result.eliminated = eliminated;
  }
  ++s.vote_phases_completed;
  for (int i = 0; i < n; ++i) {
    if (s.alive[i]) ++s.phases_survived[i];
  }
  ++s.round_no;
  s.phase = SpyPhase::kDescribe;
  s.speaker = next_alive_after(s, -1);
  finish_if_won(s, g);
}

}  // namespace

std::pair<GameState, RoundResult> game_step(const GameState& state,
                                            const JointActions& actions) {
  if (state.terminal) throw IllegalMove(-1, "game is already over");
  const int n = state.config.player_count;
  if (static_cast<int>(actions.size()) != n) {
    throw IllegalMove(-1, fmt::format("expected {} actions, got {}", n,
                                      actions.size()));
  }
  GameState next = state;
  RoundResult result;
  result.step = static_cast<int>(state.history.size()) + 1;
  result.payoffs.assign(n, 0);
  result.actions = actions;
  const MatchConfig& cfg = state.config;

  std::visit(
      Overloaded{
          [&](MatrixState& m) {
            const auto a0 = expect_action<BinaryAction>(actions, 0, "an action");
            const auto a1 = expect_action<BinaryAction>(actions, 1, "an action");
            const auto [p0, p1] = cfg.game == GameKind::kPrisonersDilemma
                                      ? pd_payoff(a0, a1, cfg.payoffs.pd)
                                      : trust_payoff(a0, a1, cfg.payoffs.trust);
            result.round_no = m.round_no;
            result.payoffs = {p0, p1};
            ++m.round_no;
            next.terminal = m.round_no > cfg.rounds;
          },
          [&](NimState& nim) {
            const int mover = nim.to_move;
            require_abstain_except(actions, {mover});
            const auto& move = expect_action<NimMove>(actions, mover, "a Nim move");
            result.round_no = result.step;
            nim = nim_apply(nim, move);
            if (nim_terminal(nim)) {
              result.payoffs[mover] = 1;
              next.terminal = true;
            }
          },
          [&](DictatorState& d) {
            const int dictator = dictator_seat(d.round_no);
            require_abstain_except(actions, {dictator});
            const auto& alloc =
                expect_action<Allocation>(actions, dictator, "an allocation");
            std::pair<int, int> split;
            try {
              split = dictator_settle(cfg.endowment, alloc.keep);
            } catch (const IllegalAllocation& e) {
              throw IllegalAllocation(dictator, e.what());
            }
            result.round_no = d.round_no;
            result.payoffs[dictator] = split.first;
            result.payoffs[1 - dictator] = split.second;
            ++d.round_no;
            next.terminal = d.round_no > cfg.rounds;
          },
          [&](SpyState& s) {
            result.round_no = s.round_no;
            step_spy(next, s, actions, result);
          },
      },
      next.detail);

  for (int i = 0; i < n; ++i) next.cumulative[i] += result.payoffs[i];
  next.history.push_back(result);
  return {std::move(next), std::move(result)};
}

// ---------------------------------------------------------------------------

MatchOutcome game_outcome(const GameState& state) {
  if (!state.terminal) throw UnfinishedMatch("match has not reached its end");
  MatchOutcome out;
  out.status = MatchStatus::kFinished;
  out.payoffs = state.cumulative;
  const int n = state.config.player_count;
  if (const auto* spy = std::get_if<SpyState>(&state.detail)) {
    out.winners = *spy_check_win(*spy);
    out.scores.assign(n, 0.0);
    for (int w : out.winners) out.scores[w] = 1.0;
    return out;
  }
  int winner = -1;
  if (const auto* nim = std::get_if<NimState>(&state.detail)) {
    winner = *nim_winner(*nim);
  } else if (state.cumulative[0] != state.cumulative[1]) {
    winner = state.cumulative[0] > state.cumulative[1] ? 0 : 1;
  }
  if (winner < 0) {
    out.scores = {0.5, 0.5};
  } else {
    out.scores = {0.0, 0.0};
    out.scores[winner] = 1.0;
    out.winners = {winner};
  }
  return out;
}

MatchOutcome forfeit_outcome(const GameState& state, int forfeiting_seat,
                             std::string reason) {
  if (!two_player(state.config.game)) {
    throw ConfigError("forfeits apply to two-player games only");
  }
  MatchOutcome out;
  out.status = MatchStatus::kFinished;
  out.payoffs = state.cumulative;
  out.scores = {1.0, 1.0};
  out.scores[forfeiting_seat] = 0.0;
  out.winners = {1 - forfeiting_seat};
  out.forfeit_by = forfeiting_seat;
  out.reason = std::move(reason);
  return out;
}

MatchOutcome aborted_outcome(const GameState& state, std::string reason) {
  MatchOutcome out;
  out.status = MatchStatus::kAborted;
  out.payoffs = state.cumulative;
  out.reason = std::move(reason);
  return out;
}

}  // namespace garena
