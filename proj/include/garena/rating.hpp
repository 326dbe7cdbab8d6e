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

// Elo ratings per game variant, plus the point ledger used for Who Is Spy.

#ifndef GARENA_RATING_HPP_
#define GARENA_RATING_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "garena/record.hpp"

namespace garena {

// Leaderboard columns, in display order.
enum class Track {
  kWhoIsSpy,
  kPdMulti,
  kPdSingle,
  kTrustMulti,
  kTrustSingle,
  kNim,
  kDictatorMulti,
  kDictatorSingle,
};

inline constexpr std::array<Track, 8> kAllTracks = {
    Track::kWhoIsSpy,    Track::kPdMulti, Track::kPdSingle,
    Track::kTrustMulti,  Track::kTrustSingle, Track::kNim,
    Track::kDictatorMulti, Track::kDictatorSingle};

std::string_view to_string(Track track);
std::string_view display_name(Track track);
Track track_from_string(std::string_view name);
Track track_of(const MatchConfig& config);

struct EloParams {
  double k = 32.0;
  double scale = 400.0;
  double initial = 1000.0;
};

struct Rating {
  double value = 1000.0;
  int games_played = 0;
  bool operator==(const Rating&) const = default;
};

struct SpyScore {
  std::int64_t points = 0;
  int games_played = 0;
  bool operator==(const SpyScore&) const = default;
};

struct SpyPointScheme {
  int civilian_win = 10;
  int spy_win = 30;
  int per_phase_survived = 2;
};

std::pair<double, double> expected_score(double ra, double rb,
                                         const EloParams& params = {});
// sa is A's actual score; B scores 1 - sa.
std::pair<double, double> elo_update(double ra, double rb, double sa,
                                     const EloParams& params = {});

// Per-seat points for a finished Who Is Spy record. Throws UnfinishedMatch.
std::vector<int> spy_points(const MatchRecord& record,
                            const SpyPointScheme& scheme = {});

class Leaderboard {
 public:
  explicit Leaderboard(EloParams elo = {}, SpyPointScheme spy = {});

  // Registration order breaks ranking ties. Re-registering is a no-op.
  void register_agent(const std::string& agent_id);
  bool registered(const std::string& agent_id) const;
  const std::vector<std::string>& agents() const { return agents_; }

  // Aborted records leave the board untouched. Throws RegistrationError for
  // unknown participants and UnfinishedMatch for a malformed Spy record;
  // either way nothing is modified.
  void apply(const MatchRecord& record);

  std::optional<Rating> rating(const std::string& agent_id, Track track) const;
  std::optional<SpyScore> spy_score(const std::string& agent_id) const;
  // Agents with an entry on the track, best first.
  std::vector<std::string> ranking(Track track) const;
  std::size_t records_applied() const { return records_applied_; }
  const EloParams& elo_params() const { return elo_; }

  bool operator==(const Leaderboard& other) const;

 private:
  EloParams elo_;
  SpyPointScheme spy_;
  std::vector<std::string> agents_;
  std::map<std::pair<std::string, Track>, Rating> ratings_;
  std::map<std::string, SpyScore> spy_scores_;
  std::size_t records_applied_ = 0;
};

Leaderboard apply_outcome(Leaderboard board, const MatchRecord& record);

}  // namespace garena

#endif  // GARENA_RATING_HPP_
