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
#include <thread>

#include <gtest/gtest.h>

#include "garena/errors.hpp"
#include "garena/protocol.hpp"
#include "garena/rating.hpp"
#include "garena/serialize.hpp"
#include "garena/storage.hpp"
#include "test_support.hpp"

namespace garena::protocol {
namespace {

using namespace std::chrono_literals;

ProtocolMessage random_message(std::mt19937_64& gen) {
  ProtocolMessage m;
  m.seq = gen() % 100000 + 1;
  if (gen() % 2) m.match_id = fmt::format("m{}", gen() % 1000);
  auto text = [&] {
    static const std::vector<std::string> pieces{"a", "b", " ", "\n", "\t", "\"", "\\",
                                                 "{", "}", ":", ",", "\xc3\xa9"};
    std::string s;
    for (int i = static_cast<int>(gen() % 12); i > 0; --i) s += pieces[gen() % pieces.size()];
    return s;
  };
  switch (gen() % 9) {
    case 0: m.payload = Hello{text(), {GameKind::kNim, GameKind::kPrisonersDilemma}, 1}; break;
    case 1: m.payload = Welcome{text(), 1, static_cast<std::int64_t>(gen() % 5000), 200}; break;
    case 2: m.payload = ObservationRequest{json{{"x", text()}}, 1000}; break;
    case 3: {
      ActionResponse r{gen() % 50, json{{"kind", "binary"}, {"value", text()}}, std::nullopt};
      if (gen() % 2) r.rationale = text();
      m.payload = r;
      break;
    }
    case 4: {
      RoundNotice n{1, 2, json::array({1, 2}), {3, 5}, std::nullopt};
      if (gen() % 2) n.eliminated = 2;
      m.payload = n;
      break;
    }
    case 5: m.payload = MatchResult{0, "finished", {1.0, 0.0}, {0}, {5, 0}}; break;
    case 6: m.payload = Error{"malformed", text()}; break;
    case 7: m.payload = Ping{}; break;
    default: m.payload = Pong{}; break;
  }
  return m;
}

TEST(Codec, RoundTripFuzz) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 3000; ++t) {
    const ProtocolMessage m = random_message(gen);
    const std::string line = encode(m);
    ASSERT_EQ(line.find('\n'), std::string::npos);
    auto back = decode(line);
    ASSERT_TRUE(back.has_value());
    ASSERT_EQ(*back, m) << line;
  }
}

TEST(Codec, Rejections) {
  const std::string good = encode({std::nullopt, 1, Ping{}});
  try {
    decode(good.substr(0, good.size() - 3));
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ProtocolErrorCode::kMalformed);
    EXPECT_GT(e.offset(), 0u);
  }
  try {
    decode(R"({"type":"Teleport","seq":1,"payload":{}})");
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ProtocolErrorCode::kUnknownType);
  }
  EXPECT_THROW(decode("[1,2]"), ProtocolError);
  EXPECT_THROW(decode(R"({"seq":1})"), ProtocolError);
  EXPECT_THROW(decode(R"({"type":"Hello","seq":1,"payload":{"name":"x"}})"), ProtocolError);
  EXPECT_EQ(decode("   "), std::nullopt);
  EXPECT_EQ(decode(""), std::nullopt);
  // Unknown fields are ignored.
  auto m = decode(R"({"type":"Ping","seq":4,"payload":{},"extra":true})");
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->seq, 4u);
}

TEST(Endpoint, Parse) {
  EXPECT_EQ(parse_endpoint("127.0.0.1:9000").port, 9000);
  EXPECT_EQ(parse_endpoint("localhost:1").host, "localhost");
  EXPECT_EQ(parse_endpoint(":77").port, 77);
  EXPECT_THROW(parse_endpoint("nothing"), ConfigError);
  EXPECT_THROW(parse_endpoint("h:99999"), ConfigError);
}

SessionOptions fast_options() {
  SessionOptions o;
  o.handshake_timeout = 300ms;
  o.default_deadline_ms = 200;
  o.ping_interval = 100ms;
  return o;
}

struct Wire {
  std::shared_ptr<RemoteSession> server;
  std::unique_ptr<SocketChannel> client;
  std::uint64_t seq = 0;

  void send(Payload p, std::optional<std::string> match_id = {}) {
    client->send_line(encode({std::move(match_id), ++seq, std::move(p)}));
  }
  std::optional<ProtocolMessage> recv(Millis timeout = 1000ms) {
    auto line = client->recv_line(timeout);
    if (!line) return std::nullopt;
    return decode(*line);
  }
};

Wire make_wire(SessionOptions options = fast_options()) {
  auto [a, b] = garena::testing::channel_pair();
  return {std::make_shared<RemoteSession>(std::move(a), options), std::move(b)};
}

Wire handshaken_wire(const std::string& name, SessionOptions options = fast_options()) {
  Wire w = make_wire(options);
  w.send(Hello{name, {GameKind::kPrisonersDilemma}, kProtocolVersion});
  handshake(w.server, {});
  auto welcome = w.recv();
  EXPECT_TRUE(welcome && std::holds_alternative<Welcome>(welcome->payload));
  return w;
}

std::string expect_error(Wire& w) {
  for (;;) {
    auto m = w.recv();
    if (!m) return "";
    if (auto* e = std::get_if<Error>(&m->payload)) return e->code;
  }
}

TEST(Handshake, Welcome) {
  Wire w = make_wire();
  w.send(Hello{"alpha", {GameKind::kNim}, 1});
  const AgentRegistration reg = handshake(w.server, {});
  EXPECT_EQ(reg.agent_id, "alpha");
  EXPECT_EQ(reg.supported_games, std::set<GameKind>{GameKind::kNim});
  EXPECT_TRUE(w.server->handshaken());
  auto m = w.recv();
  ASSERT_TRUE(m.has_value());
  const auto& welcome = std::get<Welcome>(m->payload);
  EXPECT_EQ(welcome.agent_id, "alpha");
  EXPECT_EQ(welcome.protocol_version, 1);
  EXPECT_EQ(welcome.default_deadline_ms, 200);
}

TEST(Handshake, Rejections) {
  {
    Wire w = make_wire();
    w.send(Hello{"alpha", {}, 99});
    EXPECT_THROW(handshake(w.server, {}), HandshakeError);
    EXPECT_EQ(expect_error(w), "version_mismatch");
  }
  {
    Wire w = make_wire();
    w.send(Hello{"alpha", {}, 1});
    EXPECT_THROW(handshake(w.server, [](const std::string& n) { return n == "alpha"; }),
                 HandshakeError);
    EXPECT_EQ(expect_error(w), "duplicate_name");
  }
  {
    Wire w = make_wire();
    w.send(Hello{"has space", {}, 1});
    EXPECT_THROW(handshake(w.server, {}), HandshakeError);
    EXPECT_EQ(expect_error(w), "bad_name");
  }
  {
    Wire w = make_wire();
    w.send(Ping{});
    w.send(Pong{});
    w.send(Welcome{});
    EXPECT_THROW(handshake(w.server, {}), HandshakeError);
    EXPECT_EQ(expect_error(w), "expected_hello");
  }
  {
    Wire w = make_wire();
    const auto start = std::chrono::steady_clock::now();
    EXPECT_THROW(handshake(w.server, {}), HandshakeError);
    EXPECT_GE(std::chrono::steady_clock::now() - start, 250ms);
    EXPECT_EQ(expect_error(w), "handshake_timeout");
  }
}

TEST(Handshake, ClientSide) {
  Wire w = make_wire();
  std::thread server([&] { handshake(w.server, {}); });
  ProtocolClient client(std::move(w.client));
  const Welcome welcome = client.hello(Hello{"beta", {GameKind::kNim}, 1});
  server.join();
  EXPECT_EQ(welcome.agent_id, "beta");

  Wire bad = make_wire();
  std::thread rejecter([&] {
    try {
      handshake(bad.server, [](const std::string&) { return true; });
    } catch (const HandshakeError&) {
    }
  });
  ProtocolClient c2(std::move(bad.client));
  EXPECT_THROW(c2.hello(Hello{"beta", {}, 1}), HandshakeError);
  rejecter.join();
}

Observation pd_obs() {
  return perceive(game_init(default_config(GameKind::kPrisonersDilemma)), 0);
}

// Runs `client` on a thread reading from the wire's client end.
template <class F>
std::jthread client_thread(Wire& w, F client) {
  return std::jthread([&w, client] {
    try {
      client(w);
    } catch (const TransportError&) {
      // The server side hung up first.
    }
  });
}

std::uint64_t await_request(Wire& w) {
  for (;;) {
    auto m = w.recv(2000ms);
    if (!m) return 0;
    if (std::holds_alternative<Ping>(m->payload)) {
      w.send(Pong{});
      continue;
    }
    if (std::holds_alternative<ObservationRequest>(m->payload)) return m->seq;
  }
}

const json kCooperate = action_to_json(Action{BinaryAction::kCooperate}, GameKind::kPrisonersDilemma);

TEST(RemoteDecide, LegalAnswer) {
  Wire w = handshaken_wire("a");
  auto t = client_thread(w, [](Wire& w) {
    const auto seq = await_request(w);
    w.send(ActionResponse{seq, kCooperate, "hi"}, "m1");
  });
  const Decision d = w.server->remote_decide("m1", pd_obs());
  EXPECT_EQ(d.action, Action{BinaryAction::kCooperate});
  EXPECT_EQ(d.rationale, "hi");
}

TEST(RemoteDecide, StaleAndForeignAnswersIgnored) {
  Wire w = handshaken_wire("a");
  auto t = client_thread(w, [](Wire& w) {
    const auto seq = await_request(w);
    w.send(ActionResponse{seq - 1, action_to_json(Action{BinaryAction::kDefect},
                                                  GameKind::kPrisonersDilemma), std::nullopt},
           "m1");
    w.send(ActionResponse{seq, kCooperate, std::nullopt}, "other");
    w.send(ActionResponse{seq, kCooperate, std::nullopt}, "m1");
  });
  EXPECT_EQ(w.server->remote_decide("m1", pd_obs()).action, Action{BinaryAction::kCooperate});
}

TEST(RemoteDecide, IllegalAnswer) {
  Wire w = handshaken_wire("a");
  auto t = client_thread(w, [](Wire& w) {
    const auto seq = await_request(w);
    w.send(ActionResponse{seq, action_to_json(Action{NimMove{0, 1}}, GameKind::kNim),
                          std::nullopt},
           "m1");
  });
  try {
    w.server->remote_decide("m1", pd_obs());
    FAIL();
  } catch (const AgentFailure& e) {
    EXPECT_EQ(e.kind(), FailureKind::kIllegal);
  }
  EXPECT_FALSE(w.server->lost());
}

TEST(RemoteDecide, LateAnswerIsTimeout) {
  Wire w = handshaken_wire("a");
  auto t = client_thread(w, [](Wire& w) {
    const auto seq = await_request(w);
    std::this_thread::sleep_for(300ms);
    w.send(ActionResponse{seq, kCooperate, std::nullopt}, "m1");
    await_request(w);  // answers pings until the wire closes
  });
  const auto start = std::chrono::steady_clock::now();
  try {
    w.server->remote_decide("m1", pd_obs());
    FAIL();
  } catch (const AgentFailure& e) {
    EXPECT_EQ(e.kind(), FailureKind::kTimeout);
  }
  EXPECT_GE(std::chrono::steady_clock::now() - start, 200ms);
  EXPECT_FALSE(w.server->lost());
  w.server->close();
}

TEST(RemoteDecide, SilentClientIsLost) {
  Wire w = handshaken_wire("a");
  try {
    w.server->remote_decide("m1", pd_obs());
    FAIL();
  } catch (const AgentFailure& e) {
    EXPECT_EQ(e.kind(), FailureKind::kTransportLost);
  }
  EXPECT_TRUE(w.server->lost());
  EXPECT_FALSE(w.server->keepalive_tick());
}

TEST(RemoteDecide, DuplicateSeqIsLost) {
  Wire w = handshaken_wire("a");
  auto t = client_thread(w, [](Wire& w) {
    const auto seq = await_request(w);
    --w.seq;  // reuse the previous seq
    w.send(ActionResponse{seq, kCooperate, std::nullopt}, "m1");
  });
  try {
    w.server->remote_decide("m1", pd_obs());
    FAIL();
  } catch (const AgentFailure& e) {
    EXPECT_EQ(e.kind(), FailureKind::kTransportLost);
  }
  EXPECT_TRUE(w.server->lost());
}

TEST(RemoteDecide, MalformedLineIsLost) {
  Wire w = handshaken_wire("a");
  auto t = client_thread(w, [](Wire& w) {
    await_request(w);
    w.client->send_line("{not json");
    auto m = w.recv();
    EXPECT_TRUE(m && std::holds_alternative<Error>(m->payload));
  });
  EXPECT_THROW(w.server->remote_decide("m1", pd_obs()), AgentFailure);
  EXPECT_TRUE(w.server->lost());
}

TEST(Keepalive, PingsAndDetectsSilence) {
  Wire w = handshaken_wire("a");
  int pings = 0;
  for (int i = 0; i < 40 && w.server->keepalive_tick(); ++i) {
    std::this_thread::sleep_for(20ms);
  }
  EXPECT_TRUE(w.server->lost());
  try {
    while (auto m = w.recv(50ms)) pings += std::holds_alternative<Ping>(m->payload);
  } catch (const TransportError&) {
    // Closed by the server after the pings went unanswered.
  }
  EXPECT_GE(pings, 2);

  Wire live = handshaken_wire("b");
  for (int i = 0; i < 30; ++i) {
    ASSERT_TRUE(live.server->keepalive_tick());
    while (auto m = live.recv(0ms)) {
      if (std::holds_alternative<Ping>(m->payload)) live.send(Pong{});
    }
    std::this_thread::sleep_for(20ms);
  }
}

// A silent remote seat aborts the match and the board stays as it was.
TEST(RemoteMatch, SilentClientAborts) {
  Wire w = handshaken_wire("quiet");
  AgentRegistration remote;
  remote.agent_id = "quiet";
  remote.kind = RemoteHandle{w.server};
  remote.supported_games = {GameKind::kPrisonersDilemma};
  const auto other = garena::testing::scripted("tft", StrategyKind::kTitForTat);
  MatchConfig cfg = default_config(GameKind::kPrisonersDilemma, true);
  const MatchRecord rec = garena::testing::play({other, remote}, cfg);
  EXPECT_EQ(rec.outcome.status, MatchStatus::kAborted);

  Leaderboard board;
  board.register_agent("quiet");
  board.register_agent("tft");
  const Leaderboard before = board;
  board.apply(rec);
  EXPECT_TRUE(board == before);
}

// A remote seat driven by the reference policy produces the same game as
// the in-process strategy.
TEST(RemoteMatch, TcpTransparency) {
  TcpListener listener({"127.0.0.1", 0});
  std::jthread client([port = listener.port()] {
    ProtocolClient c(connect_tcp({"127.0.0.1", port}));
    c.hello(Hello{"remote_tft", {GameKind::kPrisonersDilemma}, 1});
    const ClientSummary s = c.play(strategy_policy(StrategyKind::kTitForTat), 1);
    EXPECT_EQ(s.matches, 1);
    EXPECT_EQ(s.requests, 10);
  });
  auto channel = listener.accept(5000ms);
  ASSERT_NE(channel, nullptr);
  auto session = std::make_shared<RemoteSession>(std::move(channel));
  AgentRegistration remote = handshake(session, {});

  const MatchConfig cfg = default_config(GameKind::kPrisonersDilemma, true);
  const auto grim = garena::testing::scripted("grim", StrategyKind::kAlwaysDefect);
  const MatchRecord over_wire = garena::testing::play({remote, grim}, cfg);
  const MatchRecord in_process = garena::testing::play(
      {garena::testing::scripted("remote_tft", StrategyKind::kTitForTat), grim}, cfg);
  client.join();

  EXPECT_EQ(over_wire, in_process);
  EXPECT_EQ(transcript_to_ndjson(over_wire), transcript_to_ndjson(in_process));
  EXPECT_NO_THROW(verify_record(over_wire));
}

TEST(Transport, BindConflict) {
  TcpListener first({"127.0.0.1", 0});
  EXPECT_THROW(TcpListener({"127.0.0.1", first.port()}), BindError);
  EXPECT_THROW(connect_tcp({"127.0.0.1", 1}), TransportError);
}

}  // namespace
}  // namespace garena::protocol
