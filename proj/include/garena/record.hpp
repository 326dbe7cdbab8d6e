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

#ifndef GARENA_RECORD_HPP_
#define GARENA_RECORD_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "garena/game_core.hpp"

namespace garena {

inline constexpr std::string_view kBehaviorTags[] = {
    "trust", "confrontation", "pretense", "leadership", "deception"};

bool is_behavior_tag(std::string_view tag);

// A seat whose action was replaced (missing, late or illegal).
struct StepFault {
  int seat = 0;
  std::string kind;  // "timeout" | "illegal"
  std::string detail;
  bool operator==(const StepFault&) const = default;
};

struct StepRecord {
  RoundResult result;
  // FNV-1a of each acting seat's serialized observation; empty otherwise.
  std::vector<std::string> observation_digests;
  std::vector<std::optional<std::string>> rationale;
  std::vector<StepFault> faults;
  std::vector<std::string> tags;
  bool operator==(const StepRecord&) const = default;
};

// Immutable transcript of one match.
struct MatchRecord {
  std::string match_id;
  // Logical completion order; (timestamp, match_id) totally orders records.
  std::uint64_t timestamp = 0;
  MatchConfig config;
  std::vector<std::string> participants;
  std::vector<StepRecord> steps;
  MatchOutcome outcome;
  bool operator==(const MatchRecord&) const = default;
};

inline bool completion_order(const MatchRecord& a, const MatchRecord& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.match_id < b.match_id;
}

}  // namespace garena

#endif  // GARENA_RECORD_HPP_
