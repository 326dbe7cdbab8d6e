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

#include "garena/protocol.hpp"

#include <fmt/format.h>

#include "garena/serialize.hpp"

namespace garena::protocol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using Clock = std::chrono::steady_clock;

Millis remaining(Clock::time_point until) {
  const auto left = until - Clock::now();
  if (left <= Clock::duration::zero()) return Millis{0};
  return std::chrono::ceil<Millis>(left);
}

json payload_to_json(const Payload& payload) {
  return std::visit(
      Overloaded{
          [](const Hello& h) {
            json games = json::array();
            for (GameKind g : h.games) games.push_back(to_string(g));
            return json{{"name", h.name}, {"games", games}, {"version", h.version}};
          },
          [](const Welcome& w) {
            return json{{"agent_id", w.agent_id},
                        {"protocol_version", w.protocol_version},
                        {"default_deadline_ms", w.default_deadline_ms},
                        {"ping_interval_ms", w.ping_interval_ms}};
          },
          [](const ObservationRequest& r) {
            return json{{"state_view", r.state_view}, {"deadline_ms", r.deadline_ms}};
          },
          [](const ActionResponse& r) {
            json j{{"request_seq", r.request_seq}, {"action", r.action}};
            if (r.rationale) j["rationale"] = *r.rationale;
            return j;
          },
          [](const RoundNotice& n) {
            return json{{"round_no", n.round_no},
                        {"step", n.step},
                        {"actions", n.actions},
                        {"payoffs", n.payoffs},
                        {"eliminated", n.eliminated ? json(*n.eliminated) : json(nullptr)}};
          },
          [](const MatchResult& m) {
            return json{{"seat", m.seat},
                        {"status", m.status},
                        {"scores", m.scores},
                        {"winners", m.winners},
                        {"payoffs", m.payoffs}};
          },
          [](const Error& e) { return json{{"code", e.code}, {"message", e.message}}; },
          [](const Ping&) { return json::object(); },
          [](const Pong&) { return json::object(); },
      },
      payload);
}

Payload payload_from_json(std::string_view tag, const json& p) {
  if (tag == "Hello") {
    Hello h;
    h.name = p.at("name").get<std::string>();
    for (const auto& g : p.at("games")) {
      h.games.push_back(game_kind_from_string(g.get<std::string>()));
    }
    h.version = p.at("version").get<int>();
    return h;
  }
  if (tag == "Welcome") {
    return Welcome{p.at("agent_id").get<std::string>(),
                   p.at("protocol_version").get<int>(),
                   p.at("default_deadline_ms").get<std::int64_t>(),
                   p.at("ping_interval_ms").get<std::int64_t>()};
  }
  if (tag == "ObservationRequest") {
    return ObservationRequest{p.at("state_view"), p.at("deadline_ms").get<std::int64_t>()};
  }
  if (tag == "ActionResponse") {
    ActionResponse r{p.at("request_seq").get<std::uint64_t>(), p.at("action"), std::nullopt};
    if (auto it = p.find("rationale"); it != p.end() && !it->is_null()) {
      r.rationale = it->get<std::string>();
    }
    return r;
  }
  if (tag == "RoundNotice") {
    RoundNotice n{p.at("round_no").get<int>(), p.at("step").get<int>(), p.at("actions"),
                  p.at("payoffs").get<std::vector<int>>(), std::nullopt};
    if (auto it = p.find("eliminated"); it != p.end() && !it->is_null()) {
      n.eliminated = it->get<int>();
    }
    return n;
  }
  if (tag == "MatchResult") {
    return MatchResult{p.at("seat").get<int>(), p.at("status").get<std::string>(),
                       p.at("scores").get<std::vector<double>>(),
                       p.at("winners").get<std::vector<int>>(),
                       p.at("payoffs").get<std::vector<int>>()};
  }
  if (tag == "Error") {
    return Error{p.at("code").get<std::string>(), p.value("message", "")};
  }
  if (tag == "Ping") return Ping{};
  if (tag == "Pong") return Pong{};
  throw ProtocolError(ProtocolErrorCode::kUnknownType, 0,
                      fmt::format("unknown message type '{}'", tag));
}

}  // namespace

std::string_view type_tag(const Payload& payload) {
  static constexpr std::string_view kTags[] = {
      "Hello",       "Welcome",     "ObservationRequest", "ActionResponse",
      "RoundNotice", "MatchResult", "Error",              "Ping",
      "Pong"};
  return kTags[payload.index()];
}

std::string encode(const ProtocolMessage& msg) {
  json j{{"type", type_tag(msg.payload)},
         {"seq", msg.seq},
         {"payload", payload_to_json(msg.payload)}};
  if (msg.match_id) j["match_id"] = *msg.match_id;
  // dump() escapes control characters, so the line never contains '\n'.
  return j.dump();
}

std::optional<ProtocolMessage> decode(std::string_view line) {
  if (line.find_first_not_of(" \t\r\n") == std::string_view::npos) return std::nullopt;
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(ProtocolErrorCode::kMalformed, e.byte,
                        fmt::format("malformed message at byte {}", e.byte));
  }
  if (!j.is_object()) {
    throw ProtocolError(ProtocolErrorCode::kMalformed, 0, "message is not an object");
  }
  std::string tag;
  try {
    tag = j.at("type").get<std::string>();
  } catch (const json::exception& e) {
    throw ProtocolError(ProtocolErrorCode::kMalformed, 0,
                        fmt::format("missing type: {}", e.what()));
  }
  try {
    ProtocolMessage msg;
    msg.seq = j.at("seq").get<std::uint64_t>();
    if (auto it = j.find("match_id"); it != j.end() && !it->is_null()) {
      msg.match_id = it->get<std::string>();
    }
    const json empty = json::object();
    auto it = j.find("payload");
    msg.payload = payload_from_json(tag, it == j.end() ? empty : *it);
    return msg;
  } catch (const ProtocolError&) {
    throw;
  } catch (const std::exception& e) {
    throw ProtocolError(ProtocolErrorCode::kMalformed, 0,
                        fmt::format("bad {} message: {}", tag, e.what()));
  }
}

// ---------------------------------------------------------------------------

RemoteSession::RemoteSession(std::unique_ptr<LineChannel> channel,
                             SessionOptions options)
    : channel_(std::move(channel)),
      options_(options),
      last_traffic_(Clock::now()),
      last_ping_(Clock::now()) {}

void RemoteSession::mark_lost(const std::string& why) {
  lost_ = true;
  channel_->close();
  throw AgentFailure(FailureKind::kTransportLost, why);
}

std::uint64_t RemoteSession::send(Payload payload,
                                  std::optional<std::string> match_id) {
  if (lost_) throw AgentFailure(FailureKind::kTransportLost, "connection lost");
  const std::uint64_t seq = ++out_seq_;
  try {
    channel_->send_line(encode({std::move(match_id), seq, std::move(payload)}));
  } catch (const TransportError& e) {
    mark_lost(e.what());
  }
  return seq;
}

std::optional<ProtocolMessage> RemoteSession::receive(Millis timeout) {
  if (lost_) throw AgentFailure(FailureKind::kTransportLost, "connection lost");
  std::optional<std::string> line;
  try {
    line = channel_->recv_line(timeout);
  } catch (const TransportError& e) {
    mark_lost(e.what());
  }
  if (!line) return std::nullopt;
  last_traffic_ = Clock::now();
  std::optional<ProtocolMessage> msg;
  try {
    msg = decode(*line);
  } catch (const ProtocolError& e) {
    try {
      send(Error{"malformed", e.what()});
    } catch (const AgentFailure&) {
    }
    mark_lost(e.what());
  }
  if (!msg) return std::nullopt;
  if (msg->seq <= in_seq_) {
    try {
      send(Error{"duplicate_seq", fmt::format("seq {} after {}", msg->seq, in_seq_)});
    } catch (const AgentFailure&) {
    }
    mark_lost(fmt::format("non-increasing seq {}", msg->seq));
  }
  in_seq_ = msg->seq;
  if (std::holds_alternative<Pong>(msg->payload)) outstanding_pings_ = 0;
  if (std::holds_alternative<Ping>(msg->payload)) send(Pong{});
  return msg;
}

bool RemoteSession::probe_alive() {
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto sent_at = Clock::now();
    send(Ping{});
    last_ping_ = sent_at;
    const auto until = sent_at + options_.ping_interval;
    while (Clock::now() < until) {
      receive(remaining(until));
      if (last_traffic_ >= sent_at) return true;
    }
  }
  return false;
}

Decision RemoteSession::remote_decide(const std::string& match_id,
                                      const Observation& obs) {
  const std::int64_t deadline_ms = obs.deadline_ms.value_or(options_.default_deadline_ms);
  Observation view = obs;
  view.deadline_ms = deadline_ms;
  const auto start = Clock::now();
  const std::uint64_t request =
      send(ObservationRequest{observation_to_json(view), deadline_ms}, match_id);
  const auto until = start + Millis{deadline_ms};

  while (Clock::now() < until) {
    auto msg = receive(remaining(until));
    if (!msg) continue;
    const auto* response = std::get_if<ActionResponse>(&msg->payload);
    // Anything else, or an answer to an older request, is ignored.
    if (response == nullptr || msg->match_id != match_id ||
        response->request_seq != request) {
      continue;
    }
    Action action;
    try {
      action = action_from_json(response->action);
    } catch (const std::exception& e) {
      throw AgentFailure(FailureKind::kIllegal,
                         fmt::format("unreadable action: {}", e.what()));
    }
    if (!obs.legal.allows(action)) {
      throw AgentFailure(FailureKind::kIllegal,
                         fmt::format("illegal action {}", describe(action, obs.game)));
    }
    return {std::move(action), response->rationale};
  }
  if (last_traffic_ < start && !probe_alive()) {
    mark_lost("no response and two missed pongs");
  }
  throw AgentFailure(FailureKind::kTimeout,
                     fmt::format("no action within {} ms", deadline_ms));
}

bool RemoteSession::keepalive_tick() {
  if (lost_) return false;
  try {
    while (receive(Millis{0})) {
    }
    const auto now = Clock::now();
    if (now - std::max(last_traffic_, last_ping_) >= options_.ping_interval) {
      if (outstanding_pings_ >= 2) mark_lost("two missed pongs");
      send(Ping{});
      ++outstanding_pings_;
      last_ping_ = now;
    }
  } catch (const AgentFailure&) {
    return false;
  }
  return !lost_;
}

void RemoteSession::close() {
  lost_ = true;
  channel_->close();
}

AgentRegistration handshake(const std::shared_ptr<RemoteSession>& session,
                            const std::function<bool(const std::string&)>& name_taken) {
  RemoteSession& s = *session;
  auto reject = [&](const std::string& code, const std::string& why) -> HandshakeError {
    try {
      s.send(Error{code, why});
    } catch (const AgentFailure&) {
    }
    s.close();
    return HandshakeError(fmt::format("{}: {}", code, why));
  };

  const auto until = Clock::now() + s.options_.handshake_timeout;
  std::optional<Hello> hello;
  try {
    while (!hello && Clock::now() < until) {
      auto msg = s.receive(remaining(until));
      if (!msg || std::holds_alternative<Pong>(msg->payload) ||
          std::holds_alternative<Ping>(msg->payload)) {
        continue;
      }
      const auto* h = std::get_if<Hello>(&msg->payload);
      if (h == nullptr) throw reject("expected_hello", "first message must be Hello");
      hello = *h;
    }
  } catch (const AgentFailure& e) {
    throw HandshakeError(fmt::format("connection lost during handshake: {}", e.what()));
  }
  if (!hello) throw reject("handshake_timeout", "no Hello received");
  if (hello->version != kProtocolVersion) {
    throw reject("version_mismatch",
                 fmt::format("server speaks version {}, client sent {}",
                             kProtocolVersion, hello->version));
  }
  if (!valid_agent_id(hello->name)) {
    throw reject("bad_name", fmt::format("'{}' is not a valid agent name", hello->name));
  }
  if (name_taken && name_taken(hello->name)) {
    throw reject("duplicate_name", fmt::format("'{}' is already registered", hello->name));
  }
  s.hello_ = hello;
  try {
    s.send(Welcome{hello->name, kProtocolVersion, s.options_.default_deadline_ms,
                   s.options_.ping_interval.count()});
  } catch (const AgentFailure& e) {
    throw HandshakeError(e.what());
  }
  AgentRegistration reg;
  reg.agent_id = hello->name;
  reg.display_name = hello->name;
  reg.kind = RemoteHandle{session};
  reg.supported_games = {hello->games.begin(), hello->games.end()};
  return reg;
}

// ---------------------------------------------------------------------------

void RemoteAgent::on_match_start(const std::string& match_id, int seat,
                                 const MatchConfig& config) {
  match_id_ = match_id;
  seat_ = seat;
  game_ = config.game;
}

Decision RemoteAgent::decide(const Observation& obs) {
  return session_->remote_decide(match_id_, obs);
}

void RemoteAgent::on_round(const RoundResult& result) {
  session_->send(RoundNotice{result.round_no, result.step,
                             actions_to_json(result.actions, game_), result.payoffs,
                             result.eliminated},
                 match_id_);
}

void RemoteAgent::on_match_end(const MatchOutcome& outcome) {
  try {
    session_->send(
        MatchResult{seat_,
                    outcome.status == MatchStatus::kFinished ? "finished" : "aborted",
                    outcome.scores, outcome.winners, outcome.payoffs},
        match_id_);
  } catch (const AgentFailure&) {
    // The match is already decided.
  }
}

std::optional<std::int64_t> RemoteAgent::deadline_ms() const {
  return session_->options().default_deadline_ms;
}

// ---------------------------------------------------------------------------

ProtocolClient::ProtocolClient(std::unique_ptr<LineChannel> channel)
    : channel_(std::move(channel)) {}

std::uint64_t ProtocolClient::send(Payload payload, std::optional<std::string> match_id) {
  const std::uint64_t seq = ++out_seq_;
  channel_->send_line(encode({std::move(match_id), seq, std::move(payload)}));
  return seq;
}

Welcome ProtocolClient::hello(const Hello& hello, Millis timeout) {
  send(hello);
  const auto until = Clock::now() + timeout;
  while (Clock::now() < until) {
    auto line = channel_->recv_line(remaining(until));
    if (!line) continue;
    auto msg = decode(*line);
    if (!msg) continue;
    if (std::holds_alternative<Ping>(msg->payload)) {
      send(Pong{});
    } else if (auto* w = std::get_if<Welcome>(&msg->payload)) {
      return *w;
    } else if (auto* e = std::get_if<Error>(&msg->payload)) {
      throw HandshakeError(fmt::format("{}: {}", e->code, e->message));
    }
  }
  throw HandshakeError("no Welcome from server");
}

ClientSummary ProtocolClient::play(const Policy& policy, int max_matches) {
  ClientSummary summary;
  while (max_matches < 0 || summary.matches < max_matches) {
    std::optional<std::string> line;
    try {
      line = channel_->recv_line(Millis{1000});
    } catch (const TransportError&) {
      break;
    }
    if (!line) continue;
    auto msg = decode(*line);
    if (!msg) continue;
    if (std::holds_alternative<Ping>(msg->payload)) {
      send(Pong{});
    } else if (auto* req = std::get_if<ObservationRequest>(&msg->payload)) {
      const Observation obs = observation_from_json(req->state_view);
      const Decision d = policy(obs);
      ++summary.requests;
      send(ActionResponse{msg->seq, action_to_json(d.action, obs.game), d.rationale},
           msg->match_id);
    } else if (auto* result = std::get_if<MatchResult>(&msg->payload)) {
      ++summary.matches;
      summary.results.push_back(*result);
    }
  }
  return summary;
}

void ProtocolClient::close() { channel_->close(); }

Policy strategy_policy(StrategyKind strategy, std::uint64_t seed) {
  return [strategy, seed](const Observation& obs) {
    AgentMemory memory;
    memory.self = obs.player;
    return decide(strategy, obs, memory, seed);
  };
}

}  // namespace garena::protocol
