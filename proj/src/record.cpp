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

#include "garena/record.hpp"

#include <algorithm>

#include "garena/registration.hpp"

namespace garena {

bool is_behavior_tag(std::string_view tag) {
  return std::find(std::begin(kBehaviorTags), std::end(kBehaviorTags), tag) !=
         std::end(kBehaviorTags);
}

bool valid_agent_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
  });
}

AgentRegistration scripted_registration(std::string agent_id, ScriptedProfile profile,
                                        std::string display_name) {
  AgentRegistration reg;
  reg.display_name = display_name.empty() ? agent_id : std::move(display_name);
  reg.agent_id = std::move(agent_id);
  for (const auto& [game, strategy] : profile.by_game) {
    reg.supported_games.insert(game);
  }
  reg.kind = std::move(profile);
  return reg;
}

}  // namespace garena
