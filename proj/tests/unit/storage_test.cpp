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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "garena/errors.hpp"
#include "garena/serialize.hpp"
#include "garena/storage.hpp"
#include "test_support.hpp"

namespace garena {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

MatchRecord pd_record(const std::string& id = "m1", std::uint64_t ts = 1) {
  MatchConfig cfg = default_config(GameKind::kPrisonersDilemma, true);
  cfg.rng_seed = 42;
  MatchRecord r = testing::play({testing::scripted("tft", StrategyKind::kTitForTat),
                                 testing::scripted("rnd", StrategyKind::kRandomSeeded)},
                                cfg, id);
  r.timestamp = ts;
  return r;
}

MatchRecord spy_record() {
  MatchConfig cfg = default_config(GameKind::kWhoIsSpy);
  cfg.player_count = 5;
  cfg.rng_seed = 3;
  std::vector<AgentRegistration> regs;
  for (int i = 0; i < 5; ++i) {
    regs.push_back(testing::scripted("s" + std::to_string(i), StrategyKind::kSpyScripted));
  }
  return testing::play(regs, cfg, "spy1");
}

TEST(Transcript, RoundTripAllGames) {
  for (GameKind g : kAllGames) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      MatchConfig cfg = default_config(g, seed % 2 == 0);
      cfg.rng_seed = seed;
      std::vector<AgentRegistration> regs;
      const int n = g == GameKind::kWhoIsSpy ? 4 + static_cast<int>(seed % 3) : 2;
      cfg.player_count = n;
      for (int i = 0; i < n; ++i) {
        regs.push_back(testing::scripted("p" + std::to_string(i), StrategyKind::kRandomSeeded));
      }
      MatchRecord r = testing::play(regs, cfg, "rt");
      r.timestamp = seed + 1;
      const std::string text = transcript_to_ndjson(r);
      ASSERT_EQ(text.back(), '\n');
      const MatchRecord back = transcript_from_ndjson(text);
      ASSERT_EQ(back, r) << to_string(g) << " seed " << seed;
      ASSERT_EQ(transcript_to_ndjson(back), text);
      ASSERT_NO_THROW(verify_record(back));
    }
  }
}

TEST(Transcript, Layout) {
  const std::string text = transcript_to_ndjson(pd_record());
  const auto lines = split_lines(text);
  ASSERT_EQ(lines.size(), 12u);
  EXPECT_EQ(json::parse(lines.front()).at("kind"), "header");
  EXPECT_EQ(json::parse(lines.front()).at("format"), kTranscriptFormat);
  EXPECT_EQ(json::parse(lines[1]).at("kind"), "step");
  EXPECT_EQ(json::parse(lines.back()).at("kind"), "outcome");
}

TEST(Transcript, SpyRecordVerifies) {
  const MatchRecord r = spy_record();
  EXPECT_NO_THROW(verify_record(transcript_from_ndjson(transcript_to_ndjson(r))));
}

TEST(Transcript, TamperingDetected) {
  const auto lines = split_lines(transcript_to_ndjson(pd_record()));
  {
    auto bad = lines;
    json step = json::parse(bad[3]);
    step["payoffs"][0] = step["payoffs"][0].get<int>() + 1;
    bad[3] = step.dump();
    EXPECT_THROW(verify_record(transcript_from_ndjson(join_lines(bad))), IntegrityError);
  }
  {
    auto bad = lines;
    json step = json::parse(bad[2]);
    step["observation_digests"][0] = "0000000000000000";
    bad[2] = step.dump();
    EXPECT_THROW(verify_record(transcript_from_ndjson(join_lines(bad))), IntegrityError);
  }
  {
    auto bad = lines;
    json out = json::parse(bad.back());
    out["outcome"]["scores"] = json::array({0.25, 0.75});
    bad.back() = out.dump();
    EXPECT_THROW(verify_record(transcript_from_ndjson(join_lines(bad))), IntegrityError);
  }
  {
    auto bad = lines;
    bad.erase(bad.begin() + 4);
    EXPECT_THROW(verify_record(transcript_from_ndjson(join_lines(bad))), IntegrityError);
  }
  const std::string text = join_lines(lines);
  EXPECT_THROW(transcript_from_ndjson(""), IntegrityError);
  EXPECT_THROW(transcript_from_ndjson(text.substr(0, text.size() - 1)), IntegrityError);
  EXPECT_THROW(transcript_from_ndjson(text.substr(0, text.size() / 2)), IntegrityError);
  auto wrong_format = lines;
  json header = json::parse(wrong_format[0]);
  header["format"] = 99;
  wrong_format[0] = header.dump();
  EXPECT_THROW(transcript_from_ndjson(join_lines(wrong_format)), IntegrityError);
}

TEST(Transcript, AbortedFooterVerifies) {
  MatchRecord r = pd_record();
  r.steps.resize(4);
  GameState s = game_init(r.config);
  for (const auto& st : r.steps) s = game_step(s, st.result.actions).first;
  r.outcome = aborted_outcome(s, "connection lost");
  const MatchRecord back = transcript_from_ndjson(transcript_to_ndjson(r));
  EXPECT_EQ(back.outcome.status, MatchStatus::kAborted);
  EXPECT_NO_THROW(verify_record(back));
}

TEST(Store, AppendIndexReplay) {
  const fs::path dir = testing::temp_dir("store");
  TranscriptStore store(dir);
  const fs::path p1 = store.append(pd_record("m1", 1));
  store.append(pd_record("m2", 2));
  EXPECT_TRUE(fs::exists(p1));
  EXPECT_THROW(store.append(pd_record("m1", 3)), StorageError);
  const auto idx = store.index();
  ASSERT_EQ(idx.size(), 2u);
  EXPECT_EQ(idx[0].match_id, "m1");
  EXPECT_EQ(idx[1].timestamp, 2u);
  EXPECT_EQ(idx[0].status, "finished");
  EXPECT_EQ(store.load_all().size(), 2u);
  EXPECT_EQ(replay(p1), pd_record("m1", 1));
  for (const auto& entry : fs::directory_iterator(dir)) {
    EXPECT_EQ(entry.path().filename().string().rfind(".tmp", 0), std::string::npos);
  }
  EXPECT_THROW(replay(dir / "absent.ndjson"), IntegrityError);
  EXPECT_THROW(store.append(pd_record("../escape", 4)), StorageError);
  fs::remove_all(dir);
}

TEST(Store, TamperedFileFailsReplay) {
  const fs::path dir = testing::temp_dir("tamper");
  TranscriptStore store(dir);
  const fs::path p = store.append(pd_record());
  std::string text = slurp(p);
  spit(p, text.substr(0, text.size() - 10));
  EXPECT_THROW(replay(p), IntegrityError);
  spit(p, "");
  EXPECT_THROW(replay(p), IntegrityError);
  fs::remove_all(dir);
}

TEST(Annotate, AddsTagAndKeepsVerification) {
  const fs::path dir = testing::temp_dir("annotate");
  TranscriptStore store(dir);
  const fs::path p = store.append(pd_record());
  annotate(p, 2, "deception");
  annotate(p, 2, "trust");
  const MatchRecord r = replay(p);
  EXPECT_EQ(r.steps[1].tags, (std::vector<std::string>{"deception", "trust"}));
  EXPECT_TRUE(r.steps[0].tags.empty());
  EXPECT_NE(render_transcript(r).find("tags [deception,trust]"), std::string::npos);
  EXPECT_THROW(annotate(p, 2, "sarcasm"), ConfigError);
  EXPECT_THROW(annotate(p, 0, "trust"), ConfigError);
  EXPECT_THROW(annotate(p, 11, "trust"), ConfigError);
  EXPECT_EQ(replay(p).steps[1].tags.size(), 2u);
  fs::remove_all(dir);
}

TEST(Export, CsvAndMarkdownAgree) {
  Leaderboard board;
  board.register_agent("tft");
  board.register_agent("rnd");
  board.apply(pd_record());
  const std::string csv = export_leaderboard(board, ExportFormat::kCsv);
  const std::string md = export_leaderboard(board, ExportFormat::kMarkdown);
  const auto csv_lines = split_lines(csv);
  const auto md_lines = split_lines(md);
  ASSERT_EQ(csv_lines.size(), 3u);
  ASSERT_EQ(md_lines.size(), 4u);
  // Same cells in both renderings.
  auto md_cells = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line.substr(1)) {
      if (c == '|') {
        const auto b = cur.find_first_not_of(' ');
        const auto e = cur.find_last_not_of(' ');
        cells.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
        cur.clear();
      } else {
        cur += c;
      }
    }
    return cells;
  };
  auto csv_cells = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    return cells;
  };
  EXPECT_EQ(csv_cells(csv_lines[0]), md_cells(md_lines[0]));
  EXPECT_EQ(csv_cells(csv_lines[1]), md_cells(md_lines[2]));
  EXPECT_EQ(csv_cells(csv_lines[2]), md_cells(md_lines[3]));
  const auto header = csv_cells(csv_lines[0]);
  ASSERT_EQ(header.size(), 1 + kAllTracks.size());
  EXPECT_EQ(header[0], "Agent");
  const auto row = csv_cells(csv_lines[1]);
  for (std::size_t i = 0; i < kAllTracks.size(); ++i) {
    if (kAllTracks[i] == Track::kPdMulti) {
      EXPECT_EQ(row[1 + i], fmt::format("{:.2f}", board.rating(row[0], Track::kPdMulti)->value));
    } else {
      EXPECT_EQ(row[1 + i], "-");
    }
  }
}

TEST(Export, SpyPointsColumn) {
  Leaderboard board;
  for (int i = 0; i < 5; ++i) board.register_agent("s" + std::to_string(i));
  const MatchRecord r = spy_record();
  board.apply(r);
  const auto points = spy_points(r);
  const auto lines = split_lines(export_leaderboard(board, ExportFormat::kCsv));
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::string id = lines[row].substr(0, lines[row].find(','));
    const int seat = id[1] - '0';
    EXPECT_EQ(lines[row].substr(id.size() + 1, lines[row].find(',', id.size() + 1) - id.size() - 1),
              std::to_string(points[seat]));
  }
}

TEST(Rebuild, MatchesLiveBoard) {
  const fs::path dir = testing::temp_dir("rebuild");
  TranscriptStore store(dir);
  Leaderboard live;
  live.register_agent("tft");
  live.register_agent("rnd");
  for (std::uint64_t t = 1; t <= 6; ++t) {
    MatchConfig cfg = default_config(t % 2 ? GameKind::kPrisonersDilemma : GameKind::kTrustGame,
                                     true);
    cfg.rng_seed = t;
    MatchRecord r = testing::play({testing::scripted("tft", StrategyKind::kTitForTat),
                                   testing::scripted("rnd", StrategyKind::kRandomSeeded)},
                                  cfg, fmt::format("m{}", t));
    r.timestamp = t;
    live.apply(r);
    store.append(r);
  }
  const Leaderboard rebuilt = rebuild_leaderboard(store, {"tft", "rnd"});
  EXPECT_TRUE(rebuilt == live);
  EXPECT_EQ(leaderboard_snapshot(rebuilt), leaderboard_snapshot(live));
  EXPECT_EQ(export_leaderboard(rebuilt, ExportFormat::kMarkdown),
            export_leaderboard(live, ExportFormat::kMarkdown));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace garena
