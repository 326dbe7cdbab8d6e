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

// garena: serve the arena, run tournaments, inspect transcripts.
//
// Exit codes: 0 ok, 1 usage or configuration, 2 environment (network,
// disk), 3 integrity.

#include <charconv>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11/CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "garena/arena.hpp"
#include "garena/errors.hpp"
#include "garena/plan.hpp"
#include "garena/protocol.hpp"
#include "garena/serialize.hpp"
#include "garena/storage.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kEnvironment = 2, kIntegrity = 3 };

constexpr const char* kDefaultListen = "127.0.0.1:7345";
constexpr const char* kDefaultOut = "garena-out";

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

void install_signal_handlers() {
  struct sigaction sa {};
  sa.sa_handler = on_signal;
  sigemptyset(&sa.sa_mask);
  sigaction(SIGINT, &sa, nullptr);
  sigaction(SIGTERM, &sa, nullptr);
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

template <typename T>
T parse_number(const std::string& text, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw garena::ConfigError(fmt::format("{}: '{}' is not a number", what, text));
  }
  return value;
}

// flag > environment > plan > default.
template <typename T>
T resolve(const std::optional<T>& flag, const char* env_name, const std::optional<T>& plan,
          T fallback) {
  if (flag) return *flag;
  if (auto e = env(env_name)) {
    if constexpr (std::is_same_v<T, std::string>) {
      return *e;
    } else {
      return parse_number<T>(*e, env_name);
    }
  }
  if (plan) return *plan;
  return fallback;
}

struct Common {
  std::optional<std::string> plan;
  std::optional<std::string> out;
  std::optional<std::string> listen;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> deadline_ms;
};

garena::Plan load_plan_option(const Common& c) {
  const auto path = c.plan ? c.plan : env("GARENA_PLAN");
  if (!path) return {};
  if (!fs::exists(*path)) throw garena::ConfigError(fmt::format("plan {} not found", *path));
  return garena::load_plan(*path);
}

void write_text(const fs::path& path, const std::string& text) {
  garena::write_file_atomic(path, text);
}

void write_roster(const fs::path& out, const garena::Leaderboard& board) {
  write_text(out / "roster.json", json(board.agents()).dump() + "\n");
}

void write_leaderboards(const fs::path& out, const garena::Leaderboard& board) {
  write_text(out / "leaderboard.csv", export_leaderboard(board, garena::ExportFormat::kCsv));
  write_text(out / "leaderboard.md",
             export_leaderboard(board, garena::ExportFormat::kMarkdown));
  write_text(out / "leaderboard.json", garena::leaderboard_snapshot(board));
  write_roster(out, board);
}

std::string summary_text(const garena::TournamentResult& result) {
  int finished = 0, aborted = 0, forfeits = 0;
  for (const auto& r : result.records) {
    if (r.outcome.status == garena::MatchStatus::kAborted) {
      ++aborted;
    } else {
      ++finished;
      if (r.outcome.forfeit_by) ++forfeits;
    }
  }
  std::string s = fmt::format("matches: {}\nfinished: {}\naborted: {}\nforfeits: {}\n",
                              result.records.size(), finished, aborted, forfeits);
  for (const auto& w : result.warnings) s += fmt::format("warning: {}\n", w);
  for (garena::Track t : garena::kAllTracks) {
    const auto ranking = result.leaderboard.ranking(t);
    if (ranking.empty()) continue;
    s += fmt::format("{}: {}\n", garena::display_name(t), fmt::join(ranking, " > "));
  }
  return s;
}

// Accepts handshakes until every placeholder in `names` has connected.
void connect_remotes(garena::AgentRegistry& registry, const std::vector<std::string>& names,
                     const std::string& listen, const garena::protocol::SessionOptions& opts,
                     std::int64_t timeout_ms) {
  using namespace garena;
  protocol::TcpListener listener(protocol::parse_endpoint(listen));
  spdlog::info("waiting for {} remote agent(s) on port {}", names.size(), listener.port());
  const auto until = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  std::set<std::string> missing(names.begin(), names.end());
  while (!missing.empty()) {
    if (g_stop.load() || std::chrono::steady_clock::now() >= until) {
      throw protocol::TransportError(fmt::format("remote agents did not connect: {}",
                                                 fmt::join(missing, ", ")));
    }
    auto channel = listener.accept(std::chrono::milliseconds(100));
    if (!channel) continue;
    auto session = std::make_shared<protocol::RemoteSession>(std::move(channel), opts);
    try {
      auto reg = protocol::handshake(session, [&](const std::string& id) {
        return !missing.contains(id);
      });
      missing.erase(reg.agent_id);
      registry.register_agent(std::move(reg));
    } catch (const HandshakeError& e) {
      spdlog::warn("rejected connection: {}", e.what());
    }
  }
}

int cmd_tournament(const Common& c) {
  using namespace garena;
  const Plan plan = load_plan_option(c);
  if (!c.plan && !env("GARENA_PLAN")) throw ConfigError("tournament needs --plan");
  const fs::path out = resolve(c.out, "GARENA_OUT", plan.out, std::string(kDefaultOut));
  TournamentPlan tp;
  tp.games = plan.games;
  tp.seed = resolve<std::uint64_t>(c.seed, "GARENA_SEED", plan.seed, 0);
  tp.workers = resolve<int>(c.workers, "GARENA_WORKERS", plan.workers, 1);
  if (tp.workers < 1) throw ConfigError("workers must be >= 1");
  protocol::SessionOptions session;
  session.default_deadline_ms =
      resolve<std::int64_t>(c.deadline_ms, "GARENA_DEADLINE_MS", plan.deadline_ms, 30000);

  const fs::path transcripts = out / "transcripts";
  if (fs::exists(transcripts / "index.ndjson") && fs::file_size(transcripts / "index.ndjson") > 0) {
    throw ConfigError(fmt::format("{} already holds a tournament", out.string()));
  }

  AgentRegistry registry;
  std::vector<std::string> remotes;
  for (const auto& a : plan.agents) {
    tp.agents.push_back(a.id);
    if (a.remote()) {
      remotes.push_back(a.id);
    } else {
      registry.register_agent(scripted_registration(a.id, *a.scripted, a.display_name));
    }
  }
  if (!remotes.empty()) {
    connect_remotes(registry, remotes,
                    resolve(c.listen, "GARENA_LISTEN", plan.listen, std::string(kDefaultListen)),
                    session, plan.connect_timeout_ms);
  }

  TournamentResult result = run_tournament(tp, registry);
  for (const auto& w : result.warnings) spdlog::warn("{}", w);

  TranscriptStore store(transcripts);
  std::vector<const MatchRecord*> ordered;
  for (const auto& r : result.records) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](auto* a, auto* b) { return completion_order(*a, *b); });
  for (const auto* r : ordered) store.append(*r);

  std::string events;
  for (const auto& e : result.events) {
    events += json{{"timestamp", e.timestamp}, {"match_id", e.match_id}, {"event", e.event},
                   {"detail", e.detail}}
                  .dump();
    events += '\n';
  }
  write_text(out / "events.ndjson", events);
  write_leaderboards(out, result.leaderboard);
  const std::string summary = summary_text(result);
  write_text(out / "summary.txt", summary);
  std::cout << summary << "\n"
            << export_leaderboard(result.leaderboard, ExportFormat::kMarkdown);
  return kOk;
}

int cmd_serve(const Common& c, int max_matches) {
  using namespace garena;
  const Plan plan = load_plan_option(c);
  ServeOptions opts;
  opts.listen = protocol::parse_endpoint(
      resolve(c.listen, "GARENA_LISTEN", plan.listen, std::string(kDefaultListen)));
  opts.games = plan.games.empty() ? default_games() : plan.games;
  opts.seed = resolve<std::uint64_t>(c.seed, "GARENA_SEED", plan.seed, 0);
  opts.session.default_deadline_ms =
      resolve<std::int64_t>(c.deadline_ms, "GARENA_DEADLINE_MS", plan.deadline_ms, 30000);
  opts.max_matches = max_matches;
  const fs::path out = resolve(c.out, "GARENA_OUT", plan.out, std::string(kDefaultOut));
  if (!plan.agents.empty()) {
    spdlog::info("serve seats connected remote agents only; plan agents are ignored");
  }
  if (c.workers || plan.workers) {
    spdlog::info("serve runs one thread per match; the worker budget is ignored");
  }

  TranscriptStore store(out / "transcripts");
  Leaderboard board;
  opts.on_record = [&](const MatchRecord& record) {
    store.append(record);
    write_leaderboards(out, board);
    spdlog::info("match {} {}", record.match_id,
                 record.outcome.status == MatchStatus::kFinished ? "finished" : "aborted");
  };
  ArenaServer server(std::move(opts), board);
  std::cout << fmt::format("listening on port {}", server.port()) << std::endl;
  install_signal_handlers();
  server.run(g_stop);
  write_leaderboards(out, board);
  std::cout << fmt::format("{} match(es) completed", server.matches_completed()) << std::endl;
  return kOk;
}

int cmd_replay(const std::string& path, bool verify) {
  using namespace garena;
  if (!fs::exists(path)) {
    std::cerr << fmt::format("error: {} not found\n", path);
    return kUsage;
  }
  const MatchRecord record = verify ? replay(path) : read_transcript(path);
  std::cout << render_transcript(record);
  if (verify) std::cout << "verified: ok\n";
  return kOk;
}

int cmd_annotate(const std::string& path, int round, const std::string& tag) {
  if (!fs::exists(path)) {
    std::cerr << fmt::format("error: {} not found\n", path);
    return kUsage;
  }
  garena::annotate(path, round, tag);
  std::cout << fmt::format("tagged round {} of {} with {}\n", round, path, tag);
  return kOk;
}

int cmd_leaderboard(const std::string& dir, const std::string& format, bool check) {
  using namespace garena;
  const fs::path out(dir);
  if (!fs::is_directory(out / "transcripts")) {
    std::cerr << fmt::format("error: {} has no transcripts directory\n", dir);
    return kUsage;
  }
  std::vector<std::string> roster;
  if (fs::exists(out / "roster.json")) {
    std::ifstream in(out / "roster.json");
    roster = json::parse(in).get<std::vector<std::string>>();
  }
  TranscriptStore store(out / "transcripts");
  const Leaderboard board = rebuild_leaderboard(store, roster);
  if (check) {
    std::ifstream in(out / "leaderboard.json");
    std::stringstream saved;
    saved << in.rdbuf();
    if (saved.str() != leaderboard_snapshot(board)) {
      throw IntegrityError("leaderboard.json does not match the transcripts");
    }
  }
  std::cout << export_leaderboard(board, format == "csv" ? ExportFormat::kCsv
                                                         : ExportFormat::kMarkdown);
  return kOk;
}

int cmd_play(const std::string& server, const std::string& name,
             const std::vector<std::string>& strategies, int max_matches, int connect_wait_ms) {
  using namespace garena;
  ScriptedProfile profile;
  for (const auto& s : strategies) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      for (auto [g, k] : single_strategy_profile(strategy_from_string(s)).by_game) {
        profile.by_game[g] = k;
      }
    } else {
      const GameKind g = game_kind_from_string(s.substr(0, eq));
      const StrategyKind k = strategy_from_string(s.substr(eq + 1));
      if (!supports(k, g)) {
        throw ConfigError(fmt::format("{} cannot play {}", to_string(k), to_string(g)));
      }
      profile.by_game[g] = k;
    }
  }
  if (profile.by_game.empty()) throw ConfigError("play needs at least one --strategy");

  const auto endpoint = protocol::parse_endpoint(server);
  std::unique_ptr<protocol::SocketChannel> channel;
  const auto until = std::chrono::steady_clock::now() + std::chrono::milliseconds(connect_wait_ms);
  while (!channel) {
    try {
      channel = protocol::connect_tcp(endpoint);
    } catch (const protocol::TransportError&) {
      if (std::chrono::steady_clock::now() >= until) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  }
  protocol::ProtocolClient client(std::move(channel));
  protocol::Hello hello{name, {}, protocol::kProtocolVersion};
  for (const auto& [g, k] : profile.by_game) hello.games.push_back(g);
  const auto welcome = client.hello(hello);
  std::cout << fmt::format("registered as {}", welcome.agent_id) << std::endl;

  std::map<GameKind, protocol::Policy> policies;
  for (const auto& [g, k] : profile.by_game) policies[g] = protocol::strategy_policy(k);
  const auto summary = client.play(
      [&](const Observation& obs) { return policies.at(obs.game)(obs); }, max_matches);
  for (const auto& r : summary.results) {
    std::cout << fmt::format("match {}: seat {} scores [{}] payoffs [{}]", r.status, r.seat,
                             fmt::join(r.scores, ","), fmt::join(r.payoffs, ","))
              << "\n";
  }
  return kOk;
}

void add_common(CLI::App* app, Common& c, bool with_workers) {
  app->add_option("--plan", c.plan, "Plan file (YAML); env GARENA_PLAN");
  app->add_option("--out", c.out, "Output directory; env GARENA_OUT");
  app->add_option("--listen", c.listen, "host:port to listen on; env GARENA_LISTEN");
  if (with_workers) {
    app->add_option("--workers", c.workers, "Concurrent matches; env GARENA_WORKERS");
  }
  app->add_option("--seed", c.seed, "Master seed; env GARENA_SEED");
  app->add_option("--deadline-ms", c.deadline_ms,
                  "Per-decision deadline for remote agents; env GARENA_DEADLINE_MS");
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("garena"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Game-theoretic arena for scripted and remote agents"};
  app.require_subcommand(1);

  Common serve_opts;
  int max_matches = -1;
  auto* serve = app.add_subcommand("serve", "Accept remote agents and run live matches");
  add_common(serve, serve_opts, true);
  serve->add_option("--max-matches", max_matches, "Exit after this many matches");

  Common tour_opts;
  auto* tournament = app.add_subcommand("tournament", "Run a tournament from a plan file");
  add_common(tournament, tour_opts, true);

  std::string replay_path;
  bool verify = false;
  auto* replay = app.add_subcommand("replay", "Print a transcript, optionally re-verifying it");
  replay->add_option("transcript", replay_path)->required();
  replay->add_flag("--verify", verify, "Re-execute and check every step");

  std::string annotate_path, tag;
  int round = 0;
  auto* annotate = app.add_subcommand("annotate", "Attach a behaviour tag to a round");
  annotate->add_option("transcript", annotate_path)->required();
  annotate->add_option("--round", round, "Round record number (1-based)")->required();
  annotate->add_option("--tag", tag, "trust|confrontation|pretense|leadership|deception")
      ->required();

  std::string board_dir, format = "markdown";
  bool check = false;
  auto* leaderboard = app.add_subcommand("leaderboard", "Rebuild a leaderboard from transcripts");
  leaderboard->add_option("dir", board_dir, "Tournament output directory")->required();
  leaderboard->add_option("--format", format)->check(CLI::IsMember({"csv", "markdown"}));
  leaderboard->add_flag("--check", check, "Fail unless leaderboard.json matches");

  std::string server = kDefaultListen, name;
  std::vector<std::string> strategies;
  int play_matches = -1, connect_wait_ms = 5000;
  auto* play = app.add_subcommand("play", "Reference remote agent driven by a scripted strategy");
  play->add_option("--server", server, "Arena host:port");
  play->add_option("--name", name, "Agent name")->required();
  play->add_option("--strategy", strategies, "strategy or game=strategy; repeatable")
      ->required();
  play->add_option("--max-matches", play_matches, "Disconnect after this many matches");
  play->add_option("--connect-wait-ms", connect_wait_ms, "Retry connecting this long");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*serve) return cmd_serve(serve_opts, max_matches);
    if (*tournament) return cmd_tournament(tour_opts);
    if (*replay) return cmd_replay(replay_path, verify);
    if (*annotate) return cmd_annotate(annotate_path, round, tag);
    if (*leaderboard) return cmd_leaderboard(board_dir, format, check);
    if (*play) return cmd_play(server, name, strategies, play_matches, connect_wait_ms);
  } catch (const garena::IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kIntegrity;
  } catch (const garena::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const garena::RegistrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const garena::HandshakeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEnvironment;
  } catch (const garena::protocol::BindError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEnvironment;
  } catch (const garena::protocol::TransportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEnvironment;
  } catch (const garena::StorageError& e) {
    std::cerr << "storage error: " << e.what() << "\n";
    return kEnvironment;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
