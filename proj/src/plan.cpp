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

#include "garena/plan.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace garena {

PlanError::PlanError(const std::string& source, int line, int column,
                     const std::string& what)
    : ConfigError(fmt::format("{}:{}:{}: {}", source, line, column, what)), line_(line) {}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& what) const {
    const auto mark = at.Mark();
    throw PlanError(source_, mark.line + 1, mark.column + 1, what);
  }

  void expect_map(const YAML::Node& node, std::string_view what,
                  std::initializer_list<std::string_view> keys) const {
    if (!node.IsMap()) fail(node, fmt::format("{} must be a mapping", what));
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        fail(kv.first, fmt::format("unknown key '{}' in {}", key, what));
      }
    }
  }

  template <typename T>
  T scalar(const YAML::Node& node, std::string_view what) const {
    try {
      if (!node.IsScalar()) fail(node, fmt::format("{} must be a scalar", what));
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, fmt::format("bad value for {}", what));
    }
  }

  template <typename T>
  std::optional<T> optional(const YAML::Node& map, const char* key) const {
    const YAML::Node n = map[key];
    if (!n) return std::nullopt;
    return scalar<T>(n, key);
  }

  std::pair<int, int> int_pair(const YAML::Node& node, std::string_view what) const {
    if (!node.IsSequence() || node.size() != 2) {
      fail(node, fmt::format("{} must be a two-element list", what));
    }
    return {scalar<int>(node[0], what), scalar<int>(node[1], what)};
  }

  AgentSpec agent(const YAML::Node& node) const {
    expect_map(node, "agent", {"id", "name", "strategy", "strategies", "remote"});
    AgentSpec spec;
    if (!node["id"]) fail(node, "agent needs an id");
    spec.id = scalar<std::string>(node["id"], "id");
    if (!valid_agent_id(spec.id)) fail(node["id"], fmt::format("invalid agent id '{}'", spec.id));
    spec.display_name = optional<std::string>(node, "name").value_or(spec.id);
    const bool remote = optional<bool>(node, "remote").value_or(false);
    const int kinds = (node["strategy"] ? 1 : 0) + (node["strategies"] ? 1 : 0) + (remote ? 1 : 0);
    if (kinds != 1) {
      fail(node, fmt::format("agent '{}' needs exactly one of strategy, strategies, remote",
                             spec.id));
    }
    if (remote) return spec;
    ScriptedProfile profile;
    if (const YAML::Node s = node["strategy"]) {
      profile = single_strategy_profile(strategy(s));
    } else {
      const YAML::Node map = node["strategies"];
      if (!map.IsMap()) fail(map, "strategies must map game names to strategies");
      for (const auto& kv : map) {
        const GameKind g = game(kv.first);
        const StrategyKind k = strategy(kv.second);
        if (!supports(k, g)) {
          fail(kv.second, fmt::format("strategy {} cannot play {}", to_string(k), to_string(g)));
        }
        profile.by_game[g] = k;
      }
    }
    spec.scripted = std::move(profile);
    return spec;
  }

  GameKind game(const YAML::Node& node) const {
    const auto name = scalar<std::string>(node, "game");
    try {
      return game_kind_from_string(name);
    } catch (const ConfigError&) {
      fail(node, fmt::format("unknown game '{}'", name));
    }
  }

  StrategyKind strategy(const YAML::Node& node) const {
    const auto name = scalar<std::string>(node, "strategy");
    try {
      return strategy_from_string(name);
    } catch (const ConfigError&) {
      fail(node, fmt::format("unknown strategy '{}'", name));
    }
  }

  VariantSpec variant(const YAML::Node& node) const {
    expect_map(node, "game entry",
               {"game", "multi_round", "rounds", "players", "repetitions", "payoffs",
                "endowment", "piles", "words"});
    if (!node["game"]) fail(node, "game entry needs a game");
    const GameKind g = game(node["game"]);
    VariantSpec spec;
    spec.base = default_config(g, optional<bool>(node, "multi_round").value_or(false));
    if (auto r = optional<int>(node, "rounds")) spec.base.rounds = *r;
    if (auto p = optional<int>(node, "players")) spec.base.player_count = *p;
    spec.repetitions = optional<int>(node, "repetitions").value_or(1);
    if (spec.repetitions < 0) fail(node["repetitions"], "repetitions must be >= 0");
    if (auto e = optional<int>(node, "endowment")) spec.base.endowment = *e;
    if (const YAML::Node piles = node["piles"]) {
      if (!piles.IsSequence()) fail(piles, "piles must be a list");
      spec.base.initial_piles.clear();
      for (const auto& p : piles) spec.base.initial_piles.push_back(scalar<int>(p, "pile"));
    }
    if (const YAML::Node pay = node["payoffs"]) {
      if (g == GameKind::kPrisonersDilemma) {
        expect_map(pay, "payoffs", {"temptation", "reward", "punishment", "sucker"});
        auto& pd = spec.base.payoffs.pd;
        pd.temptation = optional<int>(pay, "temptation").value_or(pd.temptation);
        pd.reward = optional<int>(pay, "reward").value_or(pd.reward);
        pd.punishment = optional<int>(pay, "punishment").value_or(pd.punishment);
        pd.sucker = optional<int>(pay, "sucker").value_or(pd.sucker);
      } else if (g == GameKind::kTrustGame) {
        expect_map(pay, "payoffs",
                   {"both_cooperate", "cooperate_cheat", "cheat_cooperate", "both_cheat"});
        auto& t = spec.base.payoffs.trust;
        if (pay["both_cooperate"]) t.both_cooperate = int_pair(pay["both_cooperate"], "both_cooperate");
        if (pay["cooperate_cheat"]) t.cooperate_cheat = int_pair(pay["cooperate_cheat"], "cooperate_cheat");
        if (pay["cheat_cooperate"]) t.cheat_cooperate = int_pair(pay["cheat_cooperate"], "cheat_cooperate");
        if (pay["both_cheat"]) t.both_cheat = int_pair(pay["both_cheat"], "both_cheat");
      } else {
        fail(pay, fmt::format("{} takes no payoff table", to_string(g)));
      }
    }
    if (const YAML::Node words = node["words"]) {
      if (!words.IsSequence() || words.size() == 0) fail(words, "words must be a non-empty list");
      for (const auto& w : words) {
        if (!w.IsSequence() || w.size() != 2) fail(w, "each word pair is [civilian, spy]");
        spec.word_pool.push_back(
            {scalar<std::string>(w[0], "word"), scalar<std::string>(w[1], "word")});
      }
      spec.base.words = spec.word_pool.front();
    }
    try {
      validate(spec.base);
      for (const auto& w : spec.word_pool) {
        MatchConfig c = spec.base;
        c.words = w;
        validate(c);
      }
    } catch (const ConfigError& e) {
      fail(node, e.what());
    }
    return spec;
  }

  Plan plan(const YAML::Node& root) const {
    Plan plan;
    if (!root || root.IsNull()) return plan;
    expect_map(root, "plan",
               {"agents", "games", "seed", "workers", "deadline_ms", "out", "listen",
                "connect_timeout_ms"});
    plan.seed = optional<std::uint64_t>(root, "seed");
    plan.workers = optional<int>(root, "workers");
    if (plan.workers && *plan.workers < 1) fail(root["workers"], "workers must be >= 1");
    plan.deadline_ms = optional<std::int64_t>(root, "deadline_ms");
    if (plan.deadline_ms && *plan.deadline_ms < 1) fail(root["deadline_ms"], "deadline_ms must be >= 1");
    plan.out = optional<std::string>(root, "out");
    plan.listen = optional<std::string>(root, "listen");
    plan.connect_timeout_ms =
        optional<std::int64_t>(root, "connect_timeout_ms").value_or(plan.connect_timeout_ms);
    if (const YAML::Node agents = root["agents"]) {
      if (!agents.IsSequence()) fail(agents, "agents must be a list");
      std::set<std::string> seen;
      for (const auto& a : agents) {
        AgentSpec spec = agent(a);
        if (!seen.insert(spec.id).second) fail(a, fmt::format("duplicate agent id '{}'", spec.id));
        plan.agents.push_back(std::move(spec));
      }
    }
    if (const YAML::Node games = root["games"]) {
      if (!games.IsSequence()) fail(games, "games must be a list");
      for (const auto& g : games) plan.games.push_back(variant(g));
    }
    return plan;
  }

 private:
  std::string source_;
};

}  // namespace

Plan parse_plan(std::string_view text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw PlanError(source, e.mark.line + 1, e.mark.column + 1, e.msg);
  }
  return Reader(source).plan(root);
}

Plan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read plan {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str(), path.string());
}

std::vector<VariantSpec> default_games() {
  return {VariantSpec{default_config(GameKind::kPrisonersDilemma, true), 1, {}}};
}

}  // namespace garena
