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

// Transcript files, the match index and leaderboard documents.
// docs/transcript_format.md describes the file layout.

#ifndef GARENA_STORAGE_HPP_
#define GARENA_STORAGE_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "garena/rating.hpp"
#include "garena/record.hpp"

namespace garena {

inline constexpr int kTranscriptFormat = 1;

// Header line, one line per step, outcome line; each ends with '\n'.
std::string transcript_to_ndjson(const MatchRecord& record);
// Parses without re-executing. Throws IntegrityError.
MatchRecord transcript_from_ndjson(std::string_view text);

// Re-executes the record through the game engine and checks every step,
// observation digest and the outcome. Throws IntegrityError.
void verify_record(const MatchRecord& record);

struct IndexEntry {
  std::string match_id;
  std::uint64_t timestamp = 0;
  std::string file;
  std::string status;
};

// One directory: <match_id>.ndjson per match plus index.ndjson. Single
// writer.
class TranscriptStore {
 public:
  // Creates the directory. Throws StorageError.
  explicit TranscriptStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& match_id) const;

  // Writes to a temporary file and renames it into place, then appends to
  // the index. Throws StorageError, including for a match_id already stored.
  std::filesystem::path append(const MatchRecord& record);

  std::vector<IndexEntry> index() const;
  // Records in index order. Throws IntegrityError.
  std::vector<MatchRecord> load_all() const;

 private:
  std::filesystem::path dir_;
};

// Throws IntegrityError for a missing, empty or corrupt file.
MatchRecord read_transcript(const std::filesystem::path& path);
// read_transcript followed by verify_record.
MatchRecord replay(const std::filesystem::path& path);

// Appends `tag` to the step record numbered `step` (1-based, as in the
// file). Throws ConfigError for an unknown tag or step, IntegrityError for a
// bad file.
void annotate(const std::filesystem::path& path, int step, const std::string& tag);

// Human-readable rendering of a transcript.
std::string render_transcript(const MatchRecord& record);

enum class ExportFormat { kCsv, kMarkdown };

// One row per agent in registration order, one column per track. Ratings
// use two decimals, Spy points are integers, "-" marks an unplayed track.
std::string export_leaderboard(const Leaderboard& board, ExportFormat format);

// Snapshot as JSON text: agents, ratings per track, match count.
std::string leaderboard_snapshot(const Leaderboard& board);

// Registers `roster` in order, then applies every stored record in
// (timestamp, match_id) order.
Leaderboard rebuild_leaderboard(const TranscriptStore& store,
                                const std::vector<std::string>& roster,
                                EloParams elo = {});

// Writes `text` to `path` atomically. Throws StorageError.
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace garena

#endif  // GARENA_STORAGE_HPP_
