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

// Registration, matchmaking and match execution.
//
// A match is one sequential loop over game_step. Tournaments run matches on
// a pool of workers, then apply ratings in (timestamp, match_id) order, so
// with scripted agents the output does not depend on the worker count.

#ifndef GARENA_ARENA_HPP_
#define GARENA_ARENA_HPP_

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "garena/agents.hpp"
#include "garena/protocol.hpp"
#include "garena/rating.hpp"
#include "garena/record.hpp"
#include "garena/registration.hpp"

namespace garena {

// Thread-safe; keeps registration order.
class AgentRegistry {
 public:
  // Throws RegistrationError for a duplicate or malformed id, or a remote
  // agent that has not completed the handshake.
  std::string register_agent(AgentRegistration registration);
  bool contains(const std::string& agent_id) const;
  std::optional<AgentRegistration> find(const std::string& agent_id) const;
  std::vector<AgentRegistration> all() const;
  // Registered agents whose supported games include `game`, in order.
  std::vector<AgentRegistration> pool(GameKind game) const;
  void remove(const std::string& agent_id);

 private:
  mutable std::mutex mutex_;
  std::vector<AgentRegistration> agents_;
};

enum class TicketState { kWaiting, kRunning, kFinished, kAborted };

std::string_view to_string(TicketState state);

struct MatchTicket {
  std::string match_id;
  MatchConfig config;
  std::vector<std::string> participants;
  TicketState state = TicketState::kWaiting;
  std::uint64_t timestamp = 0;

  // Waiting -> Running -> Finished | Aborted. Throws std::logic_error.
  void transition(TicketState next);
};

// Seats the first `player_count` agents of `pool` that support the game.
// Throws WaitingForPlayers when there are too few.
MatchTicket matchmake(std::span<const AgentRegistration> pool,
                      const MatchConfig& config, std::string match_id,
                      std::uint64_t timestamp = 0);

struct MatchEvent {
  std::uint64_t timestamp = 0;
  std::string match_id;
  std::string event;  // waiting | running | finished | aborted | forfeit | warning
  std::string detail;
  bool operator==(const MatchEvent&) const = default;
};

// Builds the Agent for one seat. Throws ConfigError when the registration
// cannot play `game`.
std::unique_ptr<Agent> instantiate(const AgentRegistration& registration,
                                   GameKind game, std::uint64_t seat_seed);

// Drives the game to its end. Late, missing or illegal decisions forfeit a
// two-player match and become abstentions (or empty descriptions) in Who Is
// Spy; a lost transport aborts. The ticket ends Finished or Aborted.
MatchRecord run_match(MatchTicket& ticket, std::span<Agent* const> seats,
                      std::vector<MatchEvent>* events = nullptr);

struct VariantSpec {
  MatchConfig base;
  int repetitions = 1;
  // Who Is Spy: one pair is drawn per match; empty uses base.words.
  std::vector<WordPair> word_pool;
};

struct TournamentPlan {
  std::vector<VariantSpec> games;
  // Participating agents in order; empty means every registered agent.
  std::vector<std::string> agents;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct ScheduledMatch {
  MatchTicket ticket;
  std::uint64_t variant = 0;
  std::uint64_t group = 0;
  int repetition = 0;
};

struct Schedule {
  std::vector<ScheduledMatch> matches;
  std::vector<std::string> warnings;
};

// Round robin per variant: every eligible pair (or seat group, for Who Is
// Spy) meets `repetitions` times with the seat order alternating. Match
// seeds derive from (plan seed, variant, group, repetition).
Schedule build_schedule(const TournamentPlan& plan, const AgentRegistry& registry);

struct TournamentResult {
  std::vector<MatchRecord> records;  // schedule order
  Leaderboard leaderboard;
  std::vector<std::string> warnings;
  std::vector<MatchEvent> events;
};

// Throws RegistrationError when a plan agent is not registered.
TournamentResult run_tournament(const TournamentPlan& plan,
                                const AgentRegistry& registry,
                                EloParams elo = {});

// ---------------------------------------------------------------------------
// Live arena behind `garena serve`.

struct ServeOptions {
  protocol::Endpoint listen{"127.0.0.1", 0};
  protocol::SessionOptions session;
  // Games offered, tried in rotation.
  std::vector<VariantSpec> games;
  std::uint64_t seed = 0;
  // Stop forming matches after this many; -1 for no limit.
  int max_matches = -1;
  // Called once per completed match, in completion order, on one thread.
  std::function<void(const MatchRecord&)> on_record;
};

class ArenaServer {
 public:
  // Binds immediately; throws protocol::BindError.
  ArenaServer(ServeOptions options, Leaderboard& board);
  ~ArenaServer();

  int port() const { return listener_.port(); }
  // Accepts clients and runs matches until `stop` is set (or max_matches
  // completed), then finishes running matches before returning.
  void run(const std::atomic<bool>& stop);

  const AgentRegistry& registry() const { return registry_; }
  int matches_completed() const { return completed_.load(); }

 private:
  void try_form_matches();
  void finish(MatchRecord record, const std::vector<std::string>& seats);

  ServeOptions options_;
  Leaderboard& board_;
  protocol::TcpListener listener_;
  AgentRegistry registry_;
  std::mutex mutex_;
  std::vector<std::string> idle_;  // arrival order
  std::vector<std::thread> threads_;
  std::atomic<int> started_{0};
  std::atomic<int> completed_{0};
  std::atomic<int> running_{0};
  std::uint64_t clock_ = 0;
  std::size_t rotation_ = 0;
};

}  // namespace garena

#endif  // GARENA_ARENA_HPP_
