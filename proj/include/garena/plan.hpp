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

// YAML plan files for tournaments and the live server. The schema is in
// README.md; unknown keys are errors that name their line.

#ifndef GARENA_PLAN_HPP_
#define GARENA_PLAN_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "garena/arena.hpp"
#include "garena/errors.hpp"

namespace garena {

class PlanError : public ConfigError {
 public:
  PlanError(const std::string& source, int line, int column, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct AgentSpec {
  std::string id;
  std::string display_name;
  // Empty for a remote placeholder.
  std::optional<ScriptedProfile> scripted;
  bool remote() const { return !scripted.has_value(); }
};

struct Plan {
  std::vector<AgentSpec> agents;
  std::vector<VariantSpec> games;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::int64_t> deadline_ms;
  std::optional<std::string> out;
  std::optional<std::string> listen;
  // How long `tournament` waits for remote placeholders to connect.
  std::int64_t connect_timeout_ms = 60000;
};

// Throws PlanError (with the line) or ConfigError.
Plan parse_plan(std::string_view text, const std::string& source = "<plan>");
Plan load_plan(const std::filesystem::path& path);

// Multi-round PD when a plan names no games.
std::vector<VariantSpec> default_games();

}  // namespace garena

#endif  // GARENA_PLAN_HPP_
