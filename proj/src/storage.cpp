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

#include "garena/storage.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "garena/errors.hpp"
#include "garena/serialize.hpp"

namespace garena {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json optional_string(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

json step_to_json(const StepRecord& step, GameKind game) {
  json j = round_result_to_json(step.result, game);
  j["kind"] = "step";
  j["observation_digests"] = step.observation_digests;
  json rationale = json::array();
  for (const auto& r : step.rationale) rationale.push_back(optional_string(r));
  j["rationale"] = rationale;
  json faults = json::array();
  for (const auto& f : step.faults) {
    faults.push_back({{"seat", f.seat}, {"kind", f.kind}, {"detail", f.detail}});
  }
  j["faults"] = faults;
  j["tags"] = step.tags;
  return j;
}

StepRecord step_from_json(const json& j) {
  StepRecord step;
  step.result = round_result_from_json(j);
  step.observation_digests = j.at("observation_digests").get<std::vector<std::string>>();
  for (const auto& r : j.at("rationale")) {
    step.rationale.push_back(r.is_null() ? std::nullopt
                                         : std::optional<std::string>(r.get<std::string>()));
  }
  for (const auto& f : j.at("faults")) {
    step.faults.push_back({f.at("seat").get<int>(), f.at("kind").get<std::string>(),
                           f.at("detail").get<std::string>()});
  }
  step.tags = j.at("tags").get<std::vector<std::string>>();
  return step;
}

[[noreturn]] void corrupt(const std::string& why) {
  throw IntegrityError(fmt::format("corrupt transcript: {}", why));
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string transcript_to_ndjson(const MatchRecord& record) {
  std::string out;
  json header = {{"kind", "header"},
                 {"format", kTranscriptFormat},
                 {"match_id", record.match_id},
                 {"timestamp", record.timestamp},
                 {"config", config_to_json(record.config)},
                 {"seed", record.config.rng_seed},
                 {"participants", record.participants}};
  out += header.dump();
  out += '\n';
  for (const auto& step : record.steps) {
    out += step_to_json(step, record.config.game).dump();
    out += '\n';
  }
  json footer = {{"kind", "outcome"}, {"outcome", outcome_to_json(record.outcome)}};
  out += footer.dump();
  out += '\n';
  return out;
}

MatchRecord transcript_from_ndjson(std::string_view text) {
  std::vector<json> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) corrupt("missing final newline");
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::exception& e) {
      corrupt(fmt::format("line {}: {}", lines.size() + 1, e.what()));
    }
  }
  if (lines.empty()) corrupt("empty file");
  if (lines.size() < 2) corrupt("no outcome record");

  MatchRecord record;
  try {
    const json& h = lines.front();
    if (h.at("kind") != "header") corrupt("first record is not a header");
    if (h.at("format").get<int>() != kTranscriptFormat) {
      corrupt(fmt::format("unsupported format {}", h.at("format").dump()));
    }
    record.match_id = h.at("match_id").get<std::string>();
    record.timestamp = h.at("timestamp").get<std::uint64_t>();
    record.config = config_from_json(h.at("config"));
    record.participants = h.at("participants").get<std::vector<std::string>>();
    int last_step = 0;
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
      if (lines[i].at("kind") != "step") corrupt(fmt::format("line {} is not a step", i + 1));
      StepRecord step = step_from_json(lines[i]);
      if (step.result.step != last_step + 1) {
        corrupt(fmt::format("line {}: step {} out of order", i + 1, step.result.step));
      }
      last_step = step.result.step;
      record.steps.push_back(std::move(step));
    }
    const json& f = lines.back();
    if (f.at("kind") != "outcome") corrupt("last record is not the outcome");
    record.outcome = outcome_from_json(f.at("outcome"));
  } catch (const IntegrityError&) {
    throw;
  } catch (const std::exception& e) {
    corrupt(e.what());
  }
  return record;
}

void verify_record(const MatchRecord& record) {
  auto fail = [&](const std::string& why) {
    throw IntegrityError(fmt::format("match {}: {}", record.match_id, why));
  };
  GameState state;
  try {
    validate(record.config);
    state = game_init(record.config);
  } catch (const std::exception& e) {
    fail(fmt::format("bad config: {}", e.what()));
  }
  const int n = record.config.player_count;
  if (static_cast<int>(record.participants.size()) != n) fail("participant count");
  for (const auto& step : record.steps) {
    const int k = step.result.step;
    if (state.terminal) fail(fmt::format("step {} after the game ended", k));
    if (static_cast<int>(step.observation_digests.size()) != n) {
      fail(fmt::format("step {}: digest count", k));
    }
    for (int seat : acting_players(state)) {
      const std::string expect = observation_digest(perceive(state, seat));
      if (step.observation_digests[seat] != expect) {
        fail(fmt::format("step {}: observation digest of seat {} differs", k, seat));
      }
    }
    try {
      auto [next, result] = game_step(state, step.result.actions);
      if (result.round_no != step.result.round_no || result.step != k ||
          result.payoffs != step.result.payoffs ||
          result.eliminated != step.result.eliminated) {
        fail(fmt::format("step {}: recorded result differs from re-execution", k));
      }
      state = std::move(next);
    } catch (const IntegrityError&) {
      throw;
    } catch (const std::exception& e) {
      fail(fmt::format("step {}: {}", k, e.what()));
    }
  }
  MatchOutcome expected;
  const MatchOutcome& got = record.outcome;
  if (got.status == MatchStatus::kAborted) {
    expected = aborted_outcome(state, got.reason);
  } else if (got.forfeit_by) {
    if (state.terminal || *got.forfeit_by < 0 || *got.forfeit_by >= n) {
      fail("forfeit does not fit the recorded steps");
    }
    expected = forfeit_outcome(state, *got.forfeit_by, got.reason);
  } else {
    if (!state.terminal) fail("recorded steps do not finish the game");
    expected = game_outcome(state);
  }
  if (expected != got) fail("outcome differs from re-execution");
}

// ---------------------------------------------------------------------------

void write_file_atomic(const fs::path& path, std::string_view text) {
  const fs::path tmp = path.parent_path() / (".tmp-" + path.filename().string());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError(fmt::format("cannot write {}", tmp.string()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw StorageError(fmt::format("write to {} failed", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw StorageError(fmt::format("cannot rename into {}", path.string()));
  }
}

TranscriptStore::TranscriptStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw StorageError(fmt::format("cannot create directory {}: {}", dir_.string(),
                                   ec.message()));
  }
}

fs::path TranscriptStore::path_for(const std::string& match_id) const {
  return dir_ / (match_id + ".ndjson");
}

fs::path TranscriptStore::append(const MatchRecord& record) {
  const bool ok_name =
      !record.match_id.empty() && record.match_id.size() <= 200 &&
      record.match_id.front() != '.' &&
      std::all_of(record.match_id.begin(), record.match_id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
               c == '.';
      });
  if (!ok_name) {
    throw StorageError(fmt::format("match id '{}' is not a valid file name", record.match_id));
  }
  const fs::path path = path_for(record.match_id);
  if (fs::exists(path)) {
    throw StorageError(fmt::format("transcript for {} already exists", record.match_id));
  }
  write_file_atomic(path, transcript_to_ndjson(record));
  json entry = {{"match_id", record.match_id},
                {"timestamp", record.timestamp},
                {"file", path.filename().string()},
                {"status", record.outcome.status == MatchStatus::kFinished ? "finished"
                                                                           : "aborted"}};
  std::ofstream index(dir_ / "index.ndjson", std::ios::app | std::ios::binary);
  index << entry.dump() << '\n';
  index.flush();
  if (!index) throw StorageError("cannot append to index.ndjson");
  return path;
}

std::vector<IndexEntry> TranscriptStore::index() const {
  std::vector<IndexEntry> out;
  std::ifstream in(dir_ / "index.ndjson");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      out.push_back({j.at("match_id").get<std::string>(), j.at("timestamp").get<std::uint64_t>(),
                     j.at("file").get<std::string>(), j.at("status").get<std::string>()});
    } catch (const json::exception& e) {
      throw IntegrityError(fmt::format("index.ndjson line {}: {}", number, e.what()));
    }
  }
  return out;
}

std::vector<MatchRecord> TranscriptStore::load_all() const {
  std::vector<MatchRecord> out;
  for (const auto& e : index()) out.push_back(read_transcript(dir_ / e.file));
  return out;
}

MatchRecord read_transcript(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw IntegrityError(fmt::format("{} does not exist", path.string()));
  }
  return transcript_from_ndjson(read_all(path));
}

MatchRecord replay(const fs::path& path) {
  MatchRecord record = read_transcript(path);
  verify_record(record);
  return record;
}

void annotate(const fs::path& path, int step, const std::string& tag) {
  if (!is_behavior_tag(tag)) {
    throw ConfigError(fmt::format("unknown tag '{}'; expected one of {}", tag,
                                  fmt::join(kBehaviorTags, ", ")));
  }
  MatchRecord record = read_transcript(path);
  if (step < 1 || step > static_cast<int>(record.steps.size())) {
    throw ConfigError(fmt::format("{} has no round {} (it has {})", path.string(), step,
                                  record.steps.size()));
  }
  record.steps[step - 1].tags.push_back(tag);
  write_file_atomic(path, transcript_to_ndjson(record));
}

std::string render_transcript(const MatchRecord& record) {
  const GameKind game = record.config.game;
  std::string out = fmt::format("match {} ({}, {} rounds, seed {})\n", record.match_id,
                                to_string(game), record.config.rounds, record.config.rng_seed);
  for (std::size_t s = 0; s < record.participants.size(); ++s) {
    out += fmt::format("  seat {}: {}\n", s, record.participants[s]);
  }
  for (const auto& step : record.steps) {
    const auto& r = step.result;
    std::vector<std::string> acts;
    for (std::size_t s = 0; s < r.actions.size(); ++s) {
      if (std::holds_alternative<Abstain>(r.actions[s]) &&
          game == GameKind::kWhoIsSpy) {
        continue;
      }
      acts.push_back(fmt::format("{}={}", s, describe(r.actions[s], game)));
    }
    out += fmt::format("step {:>3} round {:>2}: {}  payoffs [{}]", r.step, r.round_no,
                       fmt::join(acts, " "), fmt::join(r.payoffs, ","));
    if (r.eliminated) out += fmt::format("  eliminated {}", *r.eliminated);
    if (!step.tags.empty()) out += fmt::format("  tags [{}]", fmt::join(step.tags, ","));
    for (const auto& f : step.faults) out += fmt::format("  fault seat {} {}", f.seat, f.kind);
    out += '\n';
  }
  const auto& o = record.outcome;
  out += fmt::format("outcome: {} scores [{}] payoffs [{}]",
                     o.status == MatchStatus::kFinished ? "finished" : "aborted",
                     fmt::join(o.scores, ","), fmt::join(o.payoffs, ","));
  if (!o.winners.empty()) out += fmt::format(" winners [{}]", fmt::join(o.winners, ","));
  if (!o.reason.empty()) out += fmt::format(" ({})", o.reason);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> leaderboard_cells(const Leaderboard& board, const std::string& id) {
  std::vector<std::string> cells;
  for (Track t : kAllTracks) {
    if (t == Track::kWhoIsSpy) {
      auto s = board.spy_score(id);
      cells.push_back(s ? fmt::format("{}", s->points) : "-");
    } else {
      auto r = board.rating(id, t);
      cells.push_back(r ? fmt::format("{:.2f}", r->value) : "-");
    }
  }
  return cells;
}

}  // namespace

std::string export_leaderboard(const Leaderboard& board, ExportFormat format) {
  std::vector<std::string> header{"Agent"};
  for (Track t : kAllTracks) header.emplace_back(display_name(t));
  std::string out;
  if (format == ExportFormat::kCsv) {
    auto quote = [](const std::string& s) {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) {
        if (c == '"') q += '"';
        q += c;
      }
      return q + "\"";
    };
    std::vector<std::string> h;
    for (const auto& c : header) h.push_back(quote(c));
    out += fmt::format("{}\n", fmt::join(h, ","));
    for (const auto& id : board.agents()) {
      out += fmt::format("{},{}\n", quote(id), fmt::join(leaderboard_cells(board, id), ","));
    }
  } else {
    out += fmt::format("| {} |\n", fmt::join(header, " | "));
    out += "|---";
    for (std::size_t i = 1; i < header.size(); ++i) out += "|---:";
    out += "|\n";
    for (const auto& id : board.agents()) {
      out += fmt::format("| {} | {} |\n", id, fmt::join(leaderboard_cells(board, id), " | "));
    }
  }
  return out;
}

std::string leaderboard_snapshot(const Leaderboard& board) {
  json agents = json::array();
  for (const auto& id : board.agents()) {
    json tracks = json::object();
    for (Track t : kAllTracks) {
      if (t == Track::kWhoIsSpy) {
        if (auto s = board.spy_score(id)) {
          tracks[std::string(to_string(t))] = {{"points", s->points},
                                              {"games", s->games_played}};
        }
      } else if (auto r = board.rating(id, t)) {
        tracks[std::string(to_string(t))] = {{"rating", r->value},
                                            {"games", r->games_played}};
      }
    }
    agents.push_back({{"agent", id}, {"tracks", tracks}});
  }
  json j = {{"records_applied", board.records_applied()}, {"agents", agents}};
  return j.dump(2) + "\n";
}

Leaderboard rebuild_leaderboard(const TranscriptStore& store,
                                const std::vector<std::string>& roster, EloParams elo) {
  Leaderboard board(elo);
  for (const auto& id : roster) board.register_agent(id);
  auto records = store.load_all();
  std::sort(records.begin(), records.end(), completion_order);
  for (const auto& r : records) board.apply(r);
  return board;
}

}  // namespace garena
