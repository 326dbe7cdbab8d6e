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

#ifndef GARENA_REGISTRATION_HPP_
#define GARENA_REGISTRATION_HPP_

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "garena/agents.hpp"

namespace garena {

namespace protocol {
class RemoteSession;
}

struct RemoteHandle {
  std::shared_ptr<protocol::RemoteSession> session;
};

struct AgentRegistration {
  std::string agent_id;
  std::string display_name;
  std::variant<ScriptedProfile, RemoteHandle> kind;
  std::set<GameKind> supported_games;
};

// Letters, digits, '_', '-', '.'; 1 to 64 bytes. Ids double as file-name
// components.
bool valid_agent_id(std::string_view id);

AgentRegistration scripted_registration(std::string agent_id,
                                        ScriptedProfile profile,
                                        std::string display_name = "");

}  // namespace garena

#endif  // GARENA_REGISTRATION_HPP_
