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

#include "garena/arena.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "garena/errors.hpp"
#include "garena/rng.hpp"
#include "garena/serialize.hpp"

namespace garena {

using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------
// Registry

std::string AgentRegistry::register_agent(AgentRegistration registration) {
  if (!valid_agent_id(registration.agent_id)) {
    throw RegistrationError(
        fmt::format("invalid agent id '{}'", registration.agent_id));
  }
  if (const auto* remote = std::get_if<RemoteHandle>(&registration.kind)) {
    if (!remote->session || !remote->session->handshaken()) {
      throw RegistrationError(fmt::format(
          "remote agent '{}' has not completed the handshake", registration.agent_id));
    }
  }
  if (registration.display_name.empty()) registration.display_name = registration.agent_id;
  std::lock_guard lock(mutex_);
  for (const auto& a : agents_) {
    if (a.agent_id == registration.agent_id) {
      throw RegistrationError(
          fmt::format("agent id '{}' is already registered", registration.agent_id));
    }
  }
  agents_.push_back(std::move(registration));
  return agents_.back().agent_id;
}

bool AgentRegistry::contains(const std::string& agent_id) const {
  return find(agent_id).has_value();
}

std::optional<AgentRegistration> AgentRegistry::find(const std::string& agent_id) const {
  std::lock_guard lock(mutex_);
  for (const auto& a : agents_) {
    if (a.agent_id == agent_id) return a;
  }
  return std::nullopt;
}

std::vector<AgentRegistration> AgentRegistry::all() const {
  std::lock_guard lock(mutex_);
  return agents_;
}

std::vector<AgentRegistration> AgentRegistry::pool(GameKind game) const {
  std::lock_guard lock(mutex_);
  std::vector<AgentRegistration> out;
  for (const auto& a : agents_) {
    if (a.supported_games.contains(game)) out.push_back(a);
  }
  return out;
}

void AgentRegistry::remove(const std::string& agent_id) {
  std::lock_guard lock(mutex_);
  std::erase_if(agents_, [&](const auto& a) { return a.agent_id == agent_id; });
}

// ---------------------------------------------------------------------------
// Tickets

std::string_view to_string(TicketState state) {
  switch (state) {
    case TicketState::kWaiting:
      return "waiting";
    case TicketState::kRunning:
      return "running";
    case TicketState::kFinished:
      return "finished";
    case TicketState::kAborted:
      return "aborted";
  }
  return "?";
}

void MatchTicket::transition(TicketState next) {
  const bool ok = (state == TicketState::kWaiting && next == TicketState::kRunning) ||
                  (state == TicketState::kRunning &&
                   (next == TicketState::kFinished || next == TicketState::kAborted));
  if (!ok) {
    throw std::logic_error(fmt::format("match {}: cannot go from {} to {}", match_id,
                                       to_string(state), to_string(next)));
  }
  state = next;
}

MatchTicket matchmake(std::span<const AgentRegistration> pool, const MatchConfig& config,
                      std::string match_id, std::uint64_t timestamp) {
  validate(config);
  MatchTicket ticket;
  ticket.match_id = std::move(match_id);
  ticket.config = config;
  ticket.timestamp = timestamp;
  for (const auto& a : pool) {
    if (static_cast<int>(ticket.participants.size()) == config.player_count) break;
    if (!a.supported_games.contains(config.game)) continue;
    if (std::find(ticket.participants.begin(), ticket.participants.end(), a.agent_id) !=
        ticket.participants.end()) {
      continue;
    }
    ticket.participants.push_back(a.agent_id);
  }
  if (static_cast<int>(ticket.participants.size()) < config.player_count) {
    throw WaitingForPlayers(fmt::format("{} needs {} players, {} eligible",
                                        to_string(config.game), config.player_count,
                                        ticket.participants.size()));
  }
  return ticket;
}

std::unique_ptr<Agent> instantiate(const AgentRegistration& registration, GameKind game,
                                   std::uint64_t seat_seed) {
  if (const auto* profile = std::get_if<ScriptedProfile>(&registration.kind)) {
    auto it = profile->by_game.find(game);
    if (it == profile->by_game.end()) {
      throw ConfigError(fmt::format("agent '{}' has no strategy for {}",
                                    registration.agent_id, to_string(game)));
    }
    return std::make_unique<ScriptedAgent>(it->second, seat_seed);
  }
  const auto& remote = std::get<RemoteHandle>(registration.kind);
  if (!registration.supported_games.contains(game)) {
    throw ConfigError(fmt::format("agent '{}' does not play {}", registration.agent_id,
                                  to_string(game)));
  }
  return std::make_unique<protocol::RemoteAgent>(remote.session);
}

// ---------------------------------------------------------------------------
// Match loop

namespace {

std::string_view fault_name(FailureKind kind) {
  return kind == FailureKind::kTimeout ? "timeout" : "illegal";
}

}  // namespace

MatchRecord run_match(MatchTicket& ticket, std::span<Agent* const> seats,
                      std::vector<MatchEvent>* events) {
  const MatchConfig& config = ticket.config;
  validate(config);
  if (static_cast<int>(seats.size()) != config.player_count) {
    throw ConfigError(fmt::format("match {} has {} seats for {} players", ticket.match_id,
                                  seats.size(), config.player_count));
  }
  auto emit = [&](std::string event, std::string detail) {
    if (events != nullptr) {
      events->push_back({ticket.timestamp, ticket.match_id, std::move(event),
                         std::move(detail)});
    }
  };

  MatchRecord record;
  record.match_id = ticket.match_id;
  record.timestamp = ticket.timestamp;
  record.config = config;
  record.participants = ticket.participants;

  emit("waiting", fmt::format("{}", fmt::join(ticket.participants, ",")));
  ticket.transition(TicketState::kRunning);
  emit("running", std::string(to_string(config.game)));

  GameState state = game_init(config);
  const bool spy = config.game == GameKind::kWhoIsSpy;
  std::optional<MatchOutcome> outcome;

  auto abort = [&](const std::string& why) {
    outcome = aborted_outcome(state, why);
  };

  try {
    for (int seat = 0; seat < config.player_count; ++seat) {
      seats[seat]->on_match_start(ticket.match_id, seat, config);
    }
    while (!state.terminal && !outcome) {
      const std::vector<int> acting = acting_players(state);
      JointActions actions(config.player_count, Abstain{});
      StepRecord step;
      step.observation_digests.assign(config.player_count, "");
      step.rationale.assign(config.player_count, std::nullopt);

      for (int seat : acting) {
        Agent& agent = *seats[seat];
        Observation obs = perceive(state, seat);
        // The digest covers game state only, so replay can recompute it.
        step.observation_digests[seat] = observation_digest(obs);
        obs.deadline_ms = agent.deadline_ms();

        std::optional<Decision> decision;
        std::optional<std::pair<FailureKind, std::string>> fault;
        const auto start = Clock::now();
        try {
          decision = agent.decide(obs);
        } catch (const AgentFailure& e) {
          if (e.kind() == FailureKind::kTransportLost) throw;
          fault = {e.kind(), e.what()};
        } catch (const std::exception& e) {
          fault = {FailureKind::kIllegal, e.what()};
        }
        if (decision && obs.deadline_ms) {
          const auto took =
              std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
          if (took.count() > *obs.deadline_ms) {
            fault = {FailureKind::kTimeout,
                     fmt::format("answered after {} ms, deadline {} ms", took.count(),
                                 *obs.deadline_ms)};
            decision.reset();
          }
        }
        if (decision && !obs.legal.allows(decision->action)) {
          fault = {FailureKind::kIllegal,
                   fmt::format("illegal action {}", describe(decision->action, config.game))};
          decision.reset();
        }

        if (decision) {
          actions[seat] = std::move(decision->action);
          step.rationale[seat] = std::move(decision->rationale);
          continue;
        }
        if (!spy) {
          const std::string reason = fmt::format("seat {} ({}) {}: {}", seat,
                                                 ticket.participants[seat],
                                                 fault_name(fault->first), fault->second);
          outcome = forfeit_outcome(state, seat, reason);
          emit("forfeit", reason);
          break;
        }
        const bool describing = obs.legal.kind == LegalActions::Kind::kDescription;
        actions[seat] = describing ? Action{Description{""}} : Action{Abstain{}};
        step.faults.push_back({seat, std::string(fault_name(fault->first)), fault->second});
        spdlog::warn("match {}: seat {} {} ({}), substituted {}", ticket.match_id, seat,
                     fault_name(fault->first), fault->second,
                     describing ? "empty description" : "abstention");
      }
      if (outcome) break;

      auto [next, result] = game_step(state, actions);
      state = std::move(next);
      // Agents see the public result; the transcript keeps what was submitted
      // so replay can re-execute it.
      step.result = result;
      step.result.actions = actions;
      record.steps.push_back(std::move(step));
      for (Agent* agent : seats) agent->on_round(result);
    }
    if (!outcome) outcome = game_outcome(state);
  } catch (const AgentFailure& e) {
    abort(fmt::format("transport lost: {}", e.what()));
  }

  record.outcome = *outcome;
  for (Agent* agent : seats) agent->on_match_end(record.outcome);
  if (record.outcome.status == MatchStatus::kAborted) {
    ticket.transition(TicketState::kAborted);
    emit("aborted", record.outcome.reason);
  } else {
    ticket.transition(TicketState::kFinished);
    emit("finished", fmt::format("scores {}", fmt::join(record.outcome.scores, ",")));
  }
  return record;
}

// ---------------------------------------------------------------------------
// Tournaments

namespace {

constexpr std::uint64_t kWordSalt = 0x574f5244;

MatchConfig match_config(const VariantSpec& spec, std::uint64_t seed) {
  MatchConfig config = spec.base;
  config.rng_seed = seed;
  if (!spec.word_pool.empty()) {
    std::mt19937_64 rng(derive_seed(seed, {kWordSalt}));
    config.words = spec.word_pool[uniform_below(rng, spec.word_pool.size())];
  }
  return config;
}

// Lexicographic k-subsets of [0, n).
std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k > n || k <= 0) return out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::vector<AgentRegistration> plan_agents(const TournamentPlan& plan,
                                           const AgentRegistry& registry) {
  if (plan.agents.empty()) return registry.all();
  std::vector<AgentRegistration> out;
  for (const auto& id : plan.agents) {
    auto reg = registry.find(id);
    if (!reg) throw RegistrationError(fmt::format("agent '{}' is not registered", id));
    if (std::any_of(out.begin(), out.end(),
                    [&](const auto& a) { return a.agent_id == id; })) {
      throw ConfigError(fmt::format("agent '{}' listed twice", id));
    }
    out.push_back(std::move(*reg));
  }
  return out;
}

}  // namespace

Schedule build_schedule(const TournamentPlan& plan, const AgentRegistry& registry) {
  const auto agents = plan_agents(plan, registry);
  Schedule schedule;
  std::uint64_t timestamp = 0;
  for (std::size_t v = 0; v < plan.games.size(); ++v) {
    const VariantSpec& spec = plan.games[v];
    validate(spec.base);
    if (spec.repetitions < 0) {
      throw ConfigError(fmt::format("game {}: repetitions must be >= 0", v));
    }
    const Track track = track_of(spec.base);
    std::vector<const AgentRegistration*> eligible;
    for (const auto& a : agents) {
      if (a.supported_games.contains(spec.base.game)) eligible.push_back(&a);
    }
    const int k = spec.base.player_count;
    if (static_cast<int>(eligible.size()) < k) {
      schedule.warnings.push_back(
          fmt::format("skipping {}: needs {} eligible agents, have {}", to_string(track),
                      k, eligible.size()));
      continue;
    }
    const auto groups = combinations(static_cast<int>(eligible.size()), k);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (int rep = 0; rep < spec.repetitions; ++rep) {
        // Rotate the seats each repetition; for pairs this alternates.
        std::vector<std::string> seats;
        for (int s = 0; s < k; ++s) {
          seats.push_back(eligible[groups[g][(s + rep) % k]]->agent_id);
        }
        const std::uint64_t seed = derive_seed(plan.seed, {v, g, static_cast<std::uint64_t>(rep)});
        ScheduledMatch m;
        m.variant = v;
        m.group = g;
        m.repetition = rep;
        m.ticket.timestamp = ++timestamp;
        m.ticket.config = match_config(spec, seed);
        m.ticket.participants = seats;
        m.ticket.match_id = fmt::format("{:06}_{}_{}_r{}", m.ticket.timestamp,
                                        to_string(track), fmt::join(seats, "-"), rep);
        schedule.matches.push_back(std::move(m));
      }
    }
  }
  return schedule;
}

TournamentResult run_tournament(const TournamentPlan& plan, const AgentRegistry& registry,
                                EloParams elo) {
  if (plan.workers < 1) throw ConfigError("workers must be >= 1");
  const auto agents = plan_agents(plan, registry);
  Schedule schedule = build_schedule(plan, registry);
  std::map<std::string, const AgentRegistration*> by_id;
  for (const auto& a : agents) by_id[a.agent_id] = &a;

  const std::size_t n = schedule.matches.size();
  std::vector<MatchRecord> records(n);
  std::vector<std::vector<MatchEvent>> events(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        MatchTicket& ticket = schedule.matches[i].ticket;
        std::vector<std::unique_ptr<Agent>> owned;
        std::vector<Agent*> seats;
        // Remote sessions serve one match at a time; lock in id order.
        std::vector<std::string> ids = ticket.participants;
        std::sort(ids.begin(), ids.end());
        std::vector<std::unique_lock<std::mutex>> locks;
        for (const auto& id : ids) {
          if (const auto* r = std::get_if<RemoteHandle>(&by_id.at(id)->kind)) {
            locks.emplace_back(r->session->match_lock());
          }
        }
        for (std::size_t s = 0; s < ticket.participants.size(); ++s) {
          owned.push_back(instantiate(*by_id.at(ticket.participants[s]),
                                      ticket.config.game,
                                      derive_seed(ticket.config.rng_seed, {s})));
          seats.push_back(owned.back().get());
        }
        records[i] = run_match(ticket, seats, &events[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int workers = static_cast<int>(std::min<std::size_t>(plan.workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  TournamentResult result{{}, Leaderboard(elo), std::move(schedule.warnings), {}};
  for (const auto& a : agents) result.leaderboard.register_agent(a.agent_id);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return completion_order(records[a], records[b]);
  });
  for (std::size_t i : order) {
    result.leaderboard.apply(records[i]);
    for (auto& ev : events[i]) result.events.push_back(std::move(ev));
  }
  for (const auto& w : result.warnings) {
    result.events.push_back({0, "", "warning", w});
  }
  result.records = std::move(records);
  return result;
}

// ---------------------------------------------------------------------------
// Live arena

ArenaServer::ArenaServer(ServeOptions options, Leaderboard& board)
    : options_(std::move(options)), board_(board), listener_(options_.listen) {
  if (options_.games.empty()) throw ConfigError("serve needs at least one game");
  for (const auto& g : options_.games) validate(g.base);
}

ArenaServer::~ArenaServer() {
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
}

void ArenaServer::run(const std::atomic<bool>& stop) {
  using namespace std::chrono_literals;
  auto limit_reached = [&] {
    return options_.max_matches >= 0 && started_.load() >= options_.max_matches;
  };
  while (!stop.load() && !(limit_reached() && running_.load() == 0)) {
    if (!limit_reached()) {
      if (auto channel = listener_.accept(50ms)) {
        auto session =
            std::make_shared<protocol::RemoteSession>(std::move(channel), options_.session);
        ++running_;
        threads_.emplace_back([this, session] {
          try {
            auto reg = protocol::handshake(
                session, [this](const std::string& id) { return registry_.contains(id); });
            const std::string id = registry_.register_agent(std::move(reg));
            {
              std::lock_guard lock(mutex_);
              board_.register_agent(id);
              idle_.push_back(id);
            }
            spdlog::info("agent '{}' registered", id);
          } catch (const std::exception& e) {
            spdlog::warn("rejected connection: {}", e.what());
          }
          --running_;
        });
      }
    } else {
      std::this_thread::sleep_for(50ms);
    }
    // Idle sessions answer pings between matches.
    std::vector<std::string> dead;
    {
      std::lock_guard lock(mutex_);
      for (const auto& id : idle_) {
        auto reg = registry_.find(id);
        auto& session = std::get<RemoteHandle>(reg->kind).session;
        std::unique_lock match(session->match_lock(), std::try_to_lock);
        if (match.owns_lock() && !session->keepalive_tick()) dead.push_back(id);
      }
      for (const auto& id : dead) {
        std::erase(idle_, id);
        registry_.remove(id);
        spdlog::warn("agent '{}' disconnected", id);
      }
    }
    try_form_matches();
  }
  listener_.close();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  threads_.clear();
}

void ArenaServer::try_form_matches() {
  std::lock_guard lock(mutex_);
  while (options_.max_matches < 0 || started_.load() < options_.max_matches) {
    std::vector<AgentRegistration> pool;
    for (const auto& id : idle_) {
      if (auto reg = registry_.find(id)) pool.push_back(std::move(*reg));
    }
    std::optional<MatchTicket> ticket;
    for (std::size_t tried = 0; tried < options_.games.size() && !ticket; ++tried) {
      const std::size_t g = (rotation_ + tried) % options_.games.size();
      const int number = started_.load();
      const std::uint64_t seed =
          derive_seed(options_.seed, {static_cast<std::uint64_t>(number)});
      const MatchConfig config = match_config(options_.games[g], seed);
      try {
        ticket = matchmake(pool, config,
                           fmt::format("live{:06}_{}", number, to_string(track_of(config))));
        rotation_ = g + 1;
      } catch (const WaitingForPlayers&) {
      }
    }
    if (!ticket) return;
    std::vector<AgentRegistration> seated;
    for (const auto& id : ticket->participants) {
      seated.push_back(*registry_.find(id));
      std::erase(idle_, id);
    }
    ++started_;
    ++running_;
    threads_.emplace_back([this, t = std::move(*ticket), seated]() mutable {
      std::vector<std::unique_ptr<Agent>> owned;
      std::vector<Agent*> seats;
      std::vector<std::unique_lock<std::mutex>> locks;
      for (std::size_t s = 0; s < seated.size(); ++s) {
        locks.emplace_back(std::get<RemoteHandle>(seated[s].kind).session->match_lock());
        owned.push_back(
            instantiate(seated[s], t.config.game, derive_seed(t.config.rng_seed, {s})));
        seats.push_back(owned.back().get());
      }
      MatchRecord record = run_match(t, seats);
      locks.clear();
      finish(std::move(record), t.participants);
      --running_;
    });
  }
}

void ArenaServer::finish(MatchRecord record, const std::vector<std::string>& seats) {
  std::lock_guard lock(mutex_);
  record.timestamp = ++clock_;
  try {
    board_.apply(record);
  } catch (const std::exception& e) {
    spdlog::error("match {}: rating update failed: {}", record.match_id, e.what());
  }
  if (options_.on_record) options_.on_record(record);
  ++completed_;
  for (const auto& id : seats) {
    auto reg = registry_.find(id);
    if (!reg) continue;
    if (std::get<RemoteHandle>(reg->kind).session->lost()) {
      registry_.remove(id);
      spdlog::warn("agent '{}' lost its connection", id);
    } else {
      idle_.push_back(id);
    }
  }
}

}  // namespace garena
