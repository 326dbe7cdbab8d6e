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

#include "garena/rating.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace garena {

namespace {

constexpr std::string_view kTrackNames[] = {
    "who_is_spy", "pd_multi", "pd_single", "trust_multi",
    "trust_single", "nim", "dictator_multi", "dictator_single"};

constexpr std::string_view kTrackDisplay[] = {
    "Who is Spy",           "Prisoner's Dilemma (Multi)",
    "Prisoner's Dilemma (Single)", "Trust Game (Multi)",
    "Trust Game (Single)",  "Nim",
    "Dictator (Multi)",     "Dictator (Single)"};

}  // namespace

std::string_view to_string(Track track) {
  return kTrackNames[static_cast<int>(track)];
}

std::string_view display_name(Track track) {
  return kTrackDisplay[static_cast<int>(track)];
}

Track track_from_string(std::string_view name) {
  for (Track t : kAllTracks) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError(fmt::format("unknown track '{}'", name));
}

Track track_of(const MatchConfig& config) {
  const bool multi = config.rounds > 1;
  switch (config.game) {
    case GameKind::kPrisonersDilemma:
      return multi ? Track::kPdMulti : Track::kPdSingle;
    case GameKind::kTrustGame:
      return multi ? Track::kTrustMulti : Track::kTrustSingle;
    case GameKind::kNim:
      return Track::kNim;
    case GameKind::kDictator:
      return multi ? Track::kDictatorMulti : Track::kDictatorSingle;
    case GameKind::kWhoIsSpy:
      return Track::kWhoIsSpy;
  }
  return Track::kPdSingle;
}

std::pair<double, double> expected_score(double ra, double rb,
                                         const EloParams& params) {
  const double ea = 1.0 / (1.0 + std::pow(10.0, (rb - ra) / params.scale));
  const double eb = 1.0 / (1.0 + std::pow(10.0, (ra - rb) / params.scale));
  return {ea, eb};
}

std::pair<double, double> elo_update(double ra, double rb, double sa,
                                     const EloParams& params) {
  const auto [ea, eb] = expected_score(ra, rb, params);
  const double sb = 1.0 - sa;
  return {ra + params.k * (sa - ea), rb + params.k * (sb - eb)};
}

std::vector<int> spy_points(const MatchRecord& record,
                            const SpyPointScheme& scheme) {
  if (record.config.game != GameKind::kWhoIsSpy) {
    throw ConfigError("spy_points needs a Who Is Spy record");
  }
  if (record.outcome.status != MatchStatus::kFinished) {
    throw UnfinishedMatch(fmt::format("match {} did not finish", record.match_id));
  }
  GameState state = game_init(record.config);
  for (const auto& step : record.steps) {
    state = game_step(state, step.result.actions).first;
  }
  const auto& spy = std::get<SpyState>(state.detail);
  const auto winners = spy_check_win(spy);
  if (!state.terminal || !winners) {
    throw UnfinishedMatch(fmt::format("match {} has no winner", record.match_id));
  }
  const int n = record.config.player_count;
  const int spy_at = spy_seat(spy);
  std::vector<int> points(n, 0);
  for (int seat : *winners) {
    points[seat] += seat == spy_at ? scheme.spy_win : scheme.civilian_win;
  }
  for (int seat = 0; seat < n; ++seat) {
    points[seat] += scheme.per_phase_survived * spy.phases_survived[seat];
  }
  return points;
}

Leaderboard::Leaderboard(EloParams elo, SpyPointScheme spy)
    : elo_(elo), spy_(spy) {}

void Leaderboard::register_agent(const std::string& agent_id) {
  if (!registered(agent_id)) agents_.push_back(agent_id);
}

bool Leaderboard::registered(const std::string& agent_id) const {
  return std::find(agents_.begin(), agents_.end(), agent_id) != agents_.end();
}

void Leaderboard::apply(const MatchRecord& record) {
  if (record.outcome.status == MatchStatus::kAborted) return;
  for (const auto& id : record.participants) {
    if (!registered(id)) {
      throw RegistrationError(fmt::format("agent '{}' is not registered", id));
    }
  }
  for (std::size_t i = 0; i < record.participants.size(); ++i) {
    for (std::size_t j = i + 1; j < record.participants.size(); ++j) {
      if (record.participants[i] == record.participants[j]) {
        throw ConfigError(fmt::format("agent '{}' holds two seats in match {}",
                                      record.participants[i], record.match_id));
      }
    }
  }
  const Track track = track_of(record.config);
  if (track == Track::kWhoIsSpy) {
    const auto points = spy_points(record, spy_);
    for (std::size_t i = 0; i < record.participants.size(); ++i) {
      SpyScore& s = spy_scores_[record.participants[i]];
      s.points += points[i];
      ++s.games_played;
    }
  } else {
    if (record.participants.size() != 2 || record.outcome.scores.size() != 2) {
      throw ConfigError(fmt::format("match {} is not a two-player record",
                                    record.match_id));
    }
    const auto key_a = std::pair{record.participants[0], track};
    const auto key_b = std::pair{record.participants[1], track};
    Rating a = ratings_.try_emplace(key_a, Rating{elo_.initial, 0}).first->second;
    Rating b = ratings_.try_emplace(key_b, Rating{elo_.initial, 0}).first->second;
    const auto [ra, rb] =
        elo_update(a.value, b.value, record.outcome.scores[0], elo_);
    ratings_[key_a] = {ra, a.games_played + 1};
    ratings_[key_b] = {rb, b.games_played + 1};
  }
  ++records_applied_;
}

std::optional<Rating> Leaderboard::rating(const std::string& agent_id,
                                          Track track) const {
  auto it = ratings_.find({agent_id, track});
  if (it == ratings_.end()) return std::nullopt;
  return it->second;
}

std::optional<SpyScore> Leaderboard::spy_score(const std::string& agent_id) const {
  auto it = spy_scores_.find(agent_id);
  if (it == spy_scores_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Leaderboard::ranking(Track track) const {
  std::vector<std::pair<double, std::string>> rows;
  for (const auto& id : agents_) {
    if (track == Track::kWhoIsSpy) {
      if (auto s = spy_score(id)) rows.emplace_back(static_cast<double>(s->points), id);
    } else if (auto r = rating(id, track)) {
      rows.emplace_back(r->value, id);
    }
  }
  // Stable: equal values keep registration order.
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<std::string> out;
  for (auto& [_, id] : rows) out.push_back(id);
  return out;
}

bool Leaderboard::operator==(const Leaderboard& other) const {
  return agents_ == other.agents_ && ratings_ == other.ratings_ &&
         spy_scores_ == other.spy_scores_ &&
         records_applied_ == other.records_applied_;
}

Leaderboard apply_outcome(Leaderboard board, const MatchRecord& record) {
  board.apply(record);
  return board;
}

}  // namespace garena
