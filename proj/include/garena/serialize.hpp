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

// JSON forms shared by the wire protocol and the transcript files. Readers
// throw nlohmann::json exceptions or ConfigError on bad input.

#ifndef GARENA_SERIALIZE_HPP_
#define GARENA_SERIALIZE_HPP_

#include <string>

#include <nlohmann/json.hpp>

#include "garena/agents.hpp"
#include "garena/game_core.hpp"
#include "garena/record.hpp"

namespace garena {

using nlohmann::json;

json action_to_json(const Action& action, GameKind game);
Action action_from_json(const json& j);

json actions_to_json(const JointActions& actions, GameKind game);
JointActions actions_from_json(const json& j);

json config_to_json(const MatchConfig& config);
MatchConfig config_from_json(const json& j);

json round_result_to_json(const RoundResult& r, GameKind game);
RoundResult round_result_from_json(const json& j);

json outcome_to_json(const MatchOutcome& outcome);
MatchOutcome outcome_from_json(const json& j);

json legal_to_json(const LegalActions& legal, GameKind game);
LegalActions legal_from_json(const json& j);

// The state view sent to remote agents.
json observation_to_json(const Observation& obs);
Observation observation_from_json(const json& j);

// 16 hex digits of FNV-1a over the compact serialization.
std::string observation_digest(const Observation& obs);

}  // namespace garena

#endif  // GARENA_SERIALIZE_HPP_
