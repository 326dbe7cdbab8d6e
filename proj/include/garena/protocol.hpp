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

// Newline-delimited JSON protocol between the arena and remote agents.
// docs/protocol.md describes every message.

#ifndef GARENA_PROTOCOL_HPP_
#define GARENA_PROTOCOL_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "garena/agents.hpp"
#include "garena/registration.hpp"

namespace garena::protocol {

using nlohmann::json;
using Millis = std::chrono::milliseconds;

inline constexpr int kProtocolVersion = 1;

struct Hello {
  std::string name;
  std::vector<GameKind> games;
  int version = kProtocolVersion;
  bool operator==(const Hello&) const = default;
};

struct Welcome {
  std::string agent_id;
  int protocol_version = kProtocolVersion;
  std::int64_t default_deadline_ms = 30000;
  std::int64_t ping_interval_ms = 15000;
  bool operator==(const Welcome&) const = default;
};

struct ObservationRequest {
  json state_view;
  std::int64_t deadline_ms = 0;
  bool operator==(const ObservationRequest&) const = default;
};

struct ActionResponse {
  // seq of the ObservationRequest being answered.
  std::uint64_t request_seq = 0;
  json action;
  std::optional<std::string> rationale;
  bool operator==(const ActionResponse&) const = default;
};

struct RoundNotice {
  int round_no = 0;
  int step = 0;
  json actions;
  std::vector<int> payoffs;
  std::optional<int> eliminated;
  bool operator==(const RoundNotice&) const = default;
};

struct MatchResult {
  int seat = 0;
  std::string status;
  std::vector<double> scores;
  std::vector<int> winners;
  std::vector<int> payoffs;
  bool operator==(const MatchResult&) const = default;
};

struct Error {
  std::string code;
  std::string message;
  bool operator==(const Error&) const = default;
};

struct Ping {
  bool operator==(const Ping&) const = default;
};
struct Pong {
  bool operator==(const Pong&) const = default;
};

using Payload = std::variant<Hello, Welcome, ObservationRequest, ActionResponse,
                             RoundNotice, MatchResult, Error, Ping, Pong>;

struct ProtocolMessage {
  std::optional<std::string> match_id;
  std::uint64_t seq = 0;
  Payload payload;
  bool operator==(const ProtocolMessage&) const = default;
};

std::string_view type_tag(const Payload& payload);

// One line of UTF-8 JSON, without the trailing newline.
std::string encode(const ProtocolMessage& msg);
// nullopt for an empty or all-whitespace line. Unknown fields are ignored.
// Throws ProtocolError.
std::optional<ProtocolMessage> decode(std::string_view line);

// ---------------------------------------------------------------------------
// Transport

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LineChannel {
 public:
  virtual ~LineChannel() = default;
  // Throws TransportError.
  virtual void send_line(std::string_view line) = 0;
  // nullopt on timeout. Throws TransportError on EOF or socket failure.
  virtual std::optional<std::string> recv_line(Millis timeout) = 0;
  virtual void close() = 0;
};

class SocketChannel : public LineChannel {
 public:
  explicit SocketChannel(int fd) : fd_(fd) {}
  ~SocketChannel() override;
  SocketChannel(const SocketChannel&) = delete;
  SocketChannel& operator=(const SocketChannel&) = delete;

  void send_line(std::string_view line) override;
  std::optional<std::string> recv_line(Millis timeout) override;
  void close() override;

 private:
  int fd_;
  std::string buffer_;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 7345;
};

// "host:port" or ":port". Throws ConfigError.
Endpoint parse_endpoint(std::string_view text);

class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TcpListener {
 public:
  // Port 0 picks a free port. Throws BindError.
  explicit TcpListener(const Endpoint& endpoint);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  int port() const { return port_; }
  // nullptr on timeout.
  std::unique_ptr<SocketChannel> accept(Millis timeout);
  void close();

 private:
  int fd_ = -1;
  int port_ = 0;
};

// Throws TransportError.
std::unique_ptr<SocketChannel> connect_tcp(const Endpoint& endpoint);

// ---------------------------------------------------------------------------
// Server side of one connection

struct SessionOptions {
  Millis handshake_timeout{10000};
  std::int64_t default_deadline_ms = 30000;
  Millis ping_interval{15000};
};

// Owns a connection. Bound to at most one running match at a time; the
// holder of match_lock() is the only reader and writer.
class RemoteSession {
 public:
  RemoteSession(std::unique_ptr<LineChannel> channel, SessionOptions options = {});

  const SessionOptions& options() const { return options_; }
  bool handshaken() const { return hello_.has_value(); }
  const std::optional<Hello>& hello() const { return hello_; }
  bool lost() const { return lost_; }
  std::mutex& match_lock() { return match_mutex_; }

  std::uint64_t send(Payload payload, std::optional<std::string> match_id = {});

  // Sends ObservationRequest and waits for the matching ActionResponse.
  // Throws AgentFailure: kTimeout past the deadline with the client still
  // answering pings, kIllegal for an action outside obs.legal, and
  // kTransportLost for EOF, protocol corruption, or two missed pongs.
  Decision remote_decide(const std::string& match_id, const Observation& obs);

  // Idle keep-alive; call while no match holds the session. Returns false
  // once the connection is considered lost.
  bool keepalive_tick();

  void close();

 private:
  friend AgentRegistration handshake(const std::shared_ptr<RemoteSession>&,
                                     const std::function<bool(const std::string&)>&);

  // Decodes and checks seq. nullopt on timeout or keep-alive line.
  std::optional<ProtocolMessage> receive(Millis timeout);
  // Two unanswered pings, each given one ping interval.
  bool probe_alive();
  [[noreturn]] void mark_lost(const std::string& why);

  std::unique_ptr<LineChannel> channel_;
  SessionOptions options_;
  std::optional<Hello> hello_;
  std::uint64_t out_seq_ = 0;
  std::uint64_t in_seq_ = 0;
  std::atomic<bool> lost_{false};
  int outstanding_pings_ = 0;
  std::chrono::steady_clock::time_point last_traffic_;
  std::chrono::steady_clock::time_point last_ping_;
  std::mutex match_mutex_;
};

// Waits for Hello and answers Welcome, or Error and closes. Throws
// HandshakeError on timeout, version mismatch, bad names, or a name for
// which `name_taken` returns true.
AgentRegistration handshake(const std::shared_ptr<RemoteSession>& session,
                            const std::function<bool(const std::string&)>& name_taken);

// Presents a RemoteSession as an Agent for one match.
class RemoteAgent : public Agent {
 public:
  explicit RemoteAgent(std::shared_ptr<RemoteSession> session)
      : session_(std::move(session)) {}

  void on_match_start(const std::string& match_id, int seat,
                      const MatchConfig& config) override;
  Decision decide(const Observation& obs) override;
  void on_round(const RoundResult& result) override;
  void on_match_end(const MatchOutcome& outcome) override;
  std::optional<std::int64_t> deadline_ms() const override;

 private:
  std::shared_ptr<RemoteSession> session_;
  std::string match_id_;
  int seat_ = 0;
  GameKind game_ = GameKind::kPrisonersDilemma;
};

// ---------------------------------------------------------------------------
// Client side

using Policy = std::function<Decision(const Observation&)>;

struct ClientSummary {
  int requests = 0;
  int matches = 0;
  std::vector<MatchResult> results;
};

// A conforming client: answers pings, replies to every request with the
// policy's action, and never needs game logic of its own.
class ProtocolClient {
 public:
  explicit ProtocolClient(std::unique_ptr<LineChannel> channel);

  // Throws HandshakeError when the server answers with Error.
  Welcome hello(const Hello& hello, Millis timeout = Millis{10000});
  // Runs until the server disconnects or `max_matches` results arrived.
  ClientSummary play(const Policy& policy, int max_matches = -1);
  void close();

 private:
  std::uint64_t send(Payload payload, std::optional<std::string> match_id = {});

  std::unique_ptr<LineChannel> channel_;
  std::uint64_t out_seq_ = 0;
};

// Policy backed by a scripted strategy that keeps only the observation.
Policy strategy_policy(StrategyKind strategy, std::uint64_t seed = 0);

}  // namespace garena::protocol

#endif  // GARENA_PROTOCOL_HPP_
