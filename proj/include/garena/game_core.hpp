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

// Rules, payoffs and state machines for the five arena games. Everything in
// here is a pure function of its arguments; randomness enters only through
// MatchConfig::rng_seed.

#ifndef GARENA_GAME_CORE_HPP_
#define GARENA_GAME_CORE_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "garena/errors.hpp"

namespace garena {

enum class GameKind { kPrisonersDilemma, kTrustGame, kNim, kDictator, kWhoIsSpy };

inline constexpr std::array<GameKind, 5> kAllGames = {
    GameKind::kPrisonersDilemma, GameKind::kTrustGame, GameKind::kNim,
    GameKind::kDictator, GameKind::kWhoIsSpy};

std::string_view to_string(GameKind game);
// Throws ConfigError on an unknown name.
GameKind game_kind_from_string(std::string_view name);

enum class BinaryAction { kCooperate, kDefect };
// The Trust Game calls defection "cheat".
inline constexpr BinaryAction kCheat = BinaryAction::kDefect;

std::string_view to_string(BinaryAction action, GameKind game);
BinaryAction binary_action_from_string(std::string_view name);

struct PdPayoffs {
  int temptation = 5;
  int reward = 3;
  int punishment = 1;
  int sucker = 0;
  bool operator==(const PdPayoffs&) const = default;
};

// Joint-outcome payoffs as (row player, column player).
struct TrustPayoffs {
  std::pair<int, int> both_cooperate{1, 1};
  std::pair<int, int> cooperate_cheat{-1, 2};
  std::pair<int, int> cheat_cooperate{2, -1};
  std::pair<int, int> both_cheat{0, 0};
  bool operator==(const TrustPayoffs&) const = default;
};

struct PayoffTable {
  PdPayoffs pd;
  TrustPayoffs trust;
  bool operator==(const PayoffTable&) const = default;
};

// T > R > P > S and 2R > T + S.
void validate_pd(const PdPayoffs& table);
// Mutual cheating must pay (0, 0).
void validate_trust(const TrustPayoffs& table);

struct WordPair {
  std::string civilian;
  std::string spy;
  bool operator==(const WordPair&) const = default;
};

struct MatchConfig {
  GameKind game = GameKind::kPrisonersDilemma;
  // Rounds for PD/Trust/Dictator; discussion-round cap for Who Is Spy;
  // ignored (must be 1) for Nim.
  int rounds = 1;
  int player_count = 2;
  PayoffTable payoffs;
  int endowment = 100;
  std::vector<int> initial_piles{3, 4, 5};
  WordPair words{"violin", "cello"};
  std::uint64_t rng_seed = 0;
  bool operator==(const MatchConfig&) const = default;
};

// Defaults for a game and round mode (multi-round PD/Trust/Dictator = 10).
MatchConfig default_config(GameKind game, bool multi_round = false);
void validate(const MatchConfig& config);

// ---------------------------------------------------------------------------
// Actions

struct NimMove {
  int pile_index = 0;
  int take = 1;
  auto operator<=>(const NimMove&) const = default;
};

// Units the dictator keeps for themselves.
struct Allocation {
  int keep = 0;
  bool operator==(const Allocation&) const = default;
};

struct Description {
  std::string text;
  bool operator==(const Description&) const = default;
};

struct Vote {
  int target = 0;
  bool operator==(const Vote&) const = default;
};

// No action: the player is not on turn, or abstained.
struct Abstain {
  bool operator==(const Abstain&) const = default;
};

using Action =
    std::variant<Abstain, BinaryAction, NimMove, Allocation, Description, Vote>;

// One entry per seat; Abstain for seats not on turn.
using JointActions = std::vector<Action>;

std::string describe(const Action& action, GameKind game);

// Longest description accepted in Who Is Spy.
inline constexpr std::size_t kMaxDescriptionBytes = 256;

// ---------------------------------------------------------------------------
// PD, Trust, Dictator

std::pair<int, int> pd_payoff(BinaryAction a1, BinaryAction a2,
                              const PdPayoffs& table = {});
std::pair<int, int> trust_payoff(BinaryAction a1, BinaryAction a2,
                                 const TrustPayoffs& table = {});
// Returns (dictator, receiver). Throws IllegalAllocation when keep is
// outside [0, endowment].
std::pair<int, int> dictator_settle(int endowment, int keep);

// The seat acting as dictator in a 1-based round; roles alternate.
inline int dictator_seat(int round_no) { return (round_no - 1) % 2; }

// ---------------------------------------------------------------------------
// Nim (normal play)

struct NimState {
  std::vector<int> piles;
  int to_move = 0;
  bool operator==(const NimState&) const = default;
};

unsigned nim_sum(std::span<const int> piles);
bool nim_terminal(const NimState& state);
// Ascending pile index, then ascending take. Empty when terminal.
std::vector<NimMove> nim_legal_moves(const NimState& state);
// Throws IllegalMove.
NimState nim_apply(const NimState& state, const NimMove& move);
// The last mover, once every pile is empty.
std::optional<int> nim_winner(const NimState& state);
// A move to a zero nim-sum position when one exists, otherwise take one
// stone from the first non-empty pile. Throws IllegalMove when terminal.
NimMove nim_optimal_move(const NimState& state);

// ---------------------------------------------------------------------------
// Who Is Spy

enum class SpyRole { kCivilian, kSpy };
enum class SpyPhase { kDescribe, kVote, kFinished };

std::string_view to_string(SpyPhase phase);

struct SpyDescription {
  int round = 0;
  int player = 0;
  std::string text;
  bool operator==(const SpyDescription&) const = default;
};

struct SpyBallot {
  int round = 0;
  int voter = 0;
  int target = 0;
  bool operator==(const SpyBallot&) const = default;
};

enum class EliminationCause { kVoted, kSaidOwnWord };

struct SpyElimination {
  int round = 0;
  int player = 0;
  EliminationCause cause = EliminationCause::kVoted;
  bool operator==(const SpyElimination&) const = default;
};

struct SpyState {
  std::vector<SpyRole> roles;
  std::vector<std::string> words;
  std::vector<bool> alive;
  SpyPhase phase = SpyPhase::kDescribe;
  int round_no = 1;
  int max_rounds = 1;
  // Seat expected to describe next; -1 outside the describe phase.
  int speaker = 0;
  std::vector<SpyDescription> descriptions;
  std::vector<SpyBallot> votes;
  std::vector<SpyElimination> eliminations;
  // Vote phases each seat was alive at the end of.
  std::vector<int> phases_survived;
  int vote_phases_completed = 0;
  bool operator==(const SpyState&) const = default;
};

// Throws ConfigError on bad arity or identical words.
SpyState spy_init(const MatchConfig& config, std::uint64_t rng_seed);

// Strict tally: every living player votes once for another living player.
// Plurality wins; ties go to the lowest seat. Throws IllegalVote.
int spy_tally_votes(std::span<const std::pair<int, int>> votes,
                    const std::vector<bool>& alive);

// Same, but living voters missing from `votes` abstain. Returns nullopt when
// nobody voted.
std::optional<int> spy_tally_with_abstentions(
    std::span<const std::pair<int, int>> votes, const std::vector<bool>& alive);

int spy_seat(const SpyState& state);
int alive_civilians(const SpyState& state);

// Civilians win once the spy is out; the spy wins with two or fewer
// civilians left, or by surviving the final discussion round.
std::optional<std::vector<int>> spy_check_win(const SpyState& state);

// ---------------------------------------------------------------------------
// Generic match state

struct MatrixState {
  int round_no = 1;
  bool operator==(const MatrixState&) const = default;
};

struct DictatorState {
  int round_no = 1;
  bool operator==(const DictatorState&) const = default;
};

struct RoundResult {
  // Round for PD/Trust/Dictator, move number for Nim, discussion round for
  // Who Is Spy.
  int round_no = 0;
  // 1-based count of steps applied, including this one.
  int step = 0;
  std::vector<int> payoffs;
  JointActions actions;
  std::optional<int> eliminated;
  bool operator==(const RoundResult&) const = default;
};

struct GameState {
  MatchConfig config;
  std::variant<MatrixState, NimState, DictatorState, SpyState> detail;
  std::vector<int> cumulative;
  std::vector<RoundResult> history;
  bool terminal = false;
  bool operator==(const GameState&) const = default;
};

GameState game_init(const MatchConfig& config);

// Seats expected to supply an action in the next step.
std::vector<int> acting_players(const GameState& state);

struct LegalActions {
  enum class Kind { kNone, kBinary, kNimMove, kAllocation, kDescription, kVote };
  Kind kind = Kind::kNone;
  std::vector<BinaryAction> binary;
  std::vector<NimMove> nim_moves;
  int max_keep = 0;
  std::vector<int> vote_targets;
  bool allows(const Action& action) const;
  // First action in enumeration order; Abstain when nothing is legal.
  Action first() const;
  bool operator==(const LegalActions&) const = default;
};

LegalActions legal_actions(const GameState& state, int player);

// Pure transition. Throws IllegalMove for a rule violation by an acting seat.
std::pair<GameState, RoundResult> game_step(const GameState& state,
                                            const JointActions& actions);

// ---------------------------------------------------------------------------
// Outcomes

enum class MatchStatus { kFinished, kAborted };

struct MatchOutcome {
  MatchStatus status = MatchStatus::kFinished;
  // Two-player games: 1 win, 0.5 draw, 0 loss. Who Is Spy: 1 for winners.
  std::vector<double> scores;
  std::vector<int> winners;
  std::vector<int> payoffs;
  std::optional<int> forfeit_by;
  std::string reason;
  bool operator==(const MatchOutcome&) const = default;
};

// Throws UnfinishedMatch when the state is not terminal.
MatchOutcome game_outcome(const GameState& state);
// Two-player forfeit: the opponent scores 1.
MatchOutcome forfeit_outcome(const GameState& state, int forfeiting_seat,
                             std::string reason);
MatchOutcome aborted_outcome(const GameState& state, std::string reason);

}  // namespace garena

#endif  // GARENA_GAME_CORE_HPP_
