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

#include "garena/serialize.hpp"

#include <fmt/format.h>

#include "garena/rng.hpp"

namespace garena {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json optional_int(const std::optional<int>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<int> read_optional_int(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<int>();
}

std::string_view cause_name(EliminationCause c) {
  return c == EliminationCause::kVoted ? "voted" : "said_own_word";
}

EliminationCause cause_from(const std::string& s) {
  if (s == "voted") return EliminationCause::kVoted;
  if (s == "said_own_word") return EliminationCause::kSaidOwnWord;
  throw ConfigError(fmt::format("unknown elimination cause '{}'", s));
}

SpyPhase phase_from(const std::string& s) {
  if (s == "describe") return SpyPhase::kDescribe;
  if (s == "vote") return SpyPhase::kVote;
  if (s == "finished") return SpyPhase::kFinished;
  throw ConfigError(fmt::format("unknown phase '{}'", s));
}

}  // namespace

json action_to_json(const Action& action, GameKind game) {
  return std::visit(
      Overloaded{
          [](const Abstain&) { return json{{"kind", "abstain"}}; },
          [game](BinaryAction a) {
            return json{{"kind", "binary"}, {"choice", to_string(a, game)}};
          },
          [](const NimMove& m) {
            return json{{"kind", "nim"}, {"pile", m.pile_index}, {"take", m.take}};
          },
          [](const Allocation& a) {
            return json{{"kind", "allocation"}, {"keep", a.keep}};
          },
          [](const Description& d) {
            return json{{"kind", "description"}, {"text", d.text}};
          },
          [](const Vote& v) { return json{{"kind", "vote"}, {"target", v.target}}; },
      },
      action);
}

Action action_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "abstain") return Abstain{};
  if (kind == "binary") {
    return binary_action_from_string(j.at("choice").get<std::string>());
  }
  if (kind == "nim") return NimMove{j.at("pile").get<int>(), j.at("take").get<int>()};
  if (kind == "allocation") return Allocation{j.at("keep").get<int>()};
  if (kind == "description") return Description{j.at("text").get<std::string>()};
  if (kind == "vote") return Vote{j.at("target").get<int>()};
  throw ConfigError(fmt::format("unknown action kind '{}'", kind));
}

json actions_to_json(const JointActions& actions, GameKind game) {
  json out = json::array();
  for (const auto& a : actions) out.push_back(action_to_json(a, game));
  return out;
}

JointActions actions_from_json(const json& j) {
  JointActions out;
  for (const auto& a : j) out.push_back(action_from_json(a));
  return out;
}

json config_to_json(const MatchConfig& c) {
  const auto& pd = c.payoffs.pd;
  const auto& tr = c.payoffs.trust;
  auto pair = [](const std::pair<int, int>& p) { return json::array({p.first, p.second}); };
  return json{
      {"game", to_string(c.game)},
      {"rounds", c.rounds},
      {"player_count", c.player_count},
      {"payoffs",
       {{"pd",
         {{"temptation", pd.temptation},
          {"reward", pd.reward},
          {"punishment", pd.punishment},
          {"sucker", pd.sucker}}},
        {"trust",
         {{"both_cooperate", pair(tr.both_cooperate)},
          {"cooperate_cheat", pair(tr.cooperate_cheat)},
          {"cheat_cooperate", pair(tr.cheat_cooperate)},
          {"both_cheat", pair(tr.both_cheat)}}}}},
      {"endowment", c.endowment},
      {"initial_piles", c.initial_piles},
      {"words", {{"civilian", c.words.civilian}, {"spy", c.words.spy}}},
      {"rng_seed", c.rng_seed},
  };
}

MatchConfig config_from_json(const json& j) {
  MatchConfig c;
  c.game = game_kind_from_string(j.at("game").get<std::string>());
  c.rounds = j.at("rounds").get<int>();
  c.player_count = j.at("player_count").get<int>();
  const json& pd = j.at("payoffs").at("pd");
  c.payoffs.pd = {pd.at("temptation").get<int>(), pd.at("reward").get<int>(),
                  pd.at("punishment").get<int>(), pd.at("sucker").get<int>()};
  const json& tr = j.at("payoffs").at("trust");
  auto pair = [](const json& p) {
    return std::pair<int, int>{p.at(0).get<int>(), p.at(1).get<int>()};
  };
  c.payoffs.trust = {pair(tr.at("both_cooperate")), pair(tr.at("cooperate_cheat")),
                     pair(tr.at("cheat_cooperate")), pair(tr.at("both_cheat"))};
  c.endowment = j.at("endowment").get<int>();
  c.initial_piles = j.at("initial_piles").get<std::vector<int>>();
  c.words = {j.at("words").at("civilian").get<std::string>(),
             j.at("words").at("spy").get<std::string>()};
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return c;
}

json round_result_to_json(const RoundResult& r, GameKind game) {
  return json{{"round_no", r.round_no},
              {"step", r.step},
              {"payoffs", r.payoffs},
              {"actions", actions_to_json(r.actions, game)},
              {"eliminated", optional_int(r.eliminated)}};
}

RoundResult round_result_from_json(const json& j) {
  RoundResult r;
  r.round_no = j.at("round_no").get<int>();
  r.step = j.at("step").get<int>();
  r.payoffs = j.at("payoffs").get<std::vector<int>>();
  r.actions = actions_from_json(j.at("actions"));
  r.eliminated = read_optional_int(j, "eliminated");
  return r;
}

json outcome_to_json(const MatchOutcome& o) {
  return json{{"status", o.status == MatchStatus::kFinished ? "finished" : "aborted"},
              {"scores", o.scores},
              {"winners", o.winners},
              {"payoffs", o.payoffs},
              {"forfeit_by", optional_int(o.forfeit_by)},
              {"reason", o.reason}};
}

MatchOutcome outcome_from_json(const json& j) {
  MatchOutcome o;
  const std::string status = j.at("status").get<std::string>();
  if (status == "finished") {
    o.status = MatchStatus::kFinished;
  } else if (status == "aborted") {
    o.status = MatchStatus::kAborted;
  } else {
    throw ConfigError(fmt::format("unknown match status '{}'", status));
  }
  o.scores = j.at("scores").get<std::vector<double>>();
  o.winners = j.at("winners").get<std::vector<int>>();
  o.payoffs = j.at("payoffs").get<std::vector<int>>();
  o.forfeit_by = read_optional_int(j, "forfeit_by");
  o.reason = j.value("reason", "");
  return o;
}

json legal_to_json(const LegalActions& legal, GameKind game) {
  using Kind = LegalActions::Kind;
  switch (legal.kind) {
    case Kind::kNone:
      return json{{"kind", "none"}};
    case Kind::kBinary: {
      json options = json::array();
      for (auto a : legal.binary) options.push_back(to_string(a, game));
      return json{{"kind", "binary"}, {"options", options}};
    }
    case Kind::kNimMove: {
      json moves = json::array();
      for (const auto& m : legal.nim_moves) moves.push_back({m.pile_index, m.take});
      return json{{"kind", "nim"}, {"moves", moves}};
    }
    case Kind::kAllocation:
      return json{{"kind", "allocation"}, {"max_keep", legal.max_keep}};
    case Kind::kDescription:
      return json{{"kind", "description"}, {"max_bytes", kMaxDescriptionBytes}};
    case Kind::kVote:
      return json{{"kind", "vote"}, {"targets", legal.vote_targets}, {"may_abstain", true}};
  }
  return json{{"kind", "none"}};
}

LegalActions legal_from_json(const json& j) {
  using Kind = LegalActions::Kind;
  LegalActions legal;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "none") {
    legal.kind = Kind::kNone;
  } else if (kind == "binary") {
    legal.kind = Kind::kBinary;
    for (const auto& o : j.at("options")) {
      legal.binary.push_back(binary_action_from_string(o.get<std::string>()));
    }
  } else if (kind == "nim") {
    legal.kind = Kind::kNimMove;
    for (const auto& m : j.at("moves")) {
      legal.nim_moves.push_back({m.at(0).get<int>(), m.at(1).get<int>()});
    }
  } else if (kind == "allocation") {
    legal.kind = Kind::kAllocation;
    legal.max_keep = j.at("max_keep").get<int>();
  } else if (kind == "description") {
    legal.kind = Kind::kDescription;
  } else if (kind == "vote") {
    legal.kind = Kind::kVote;
    legal.vote_targets = j.at("targets").get<std::vector<int>>();
  } else {
    throw ConfigError(fmt::format("unknown legal-action kind '{}'", kind));
  }
  return legal;
}

json observation_to_json(const Observation& obs) {
  json history = json::array();
  for (const auto& s : obs.history) {
    history.push_back({{"round_no", s.round_no},
                       {"step", s.step},
                       {"actions", actions_to_json(s.actions, obs.game)},
                       {"own_payoff", s.own_payoff},
                       {"eliminated", optional_int(s.eliminated)}});
  }
  json j{{"game", to_string(obs.game)},
         {"player", obs.player},
         {"player_count", obs.player_count},
         {"round_no", obs.round_no},
         {"step", obs.step},
         {"total_rounds", obs.total_rounds},
         {"own_cumulative", obs.own_cumulative},
         {"history", history},
         {"legal", legal_to_json(obs.legal, obs.game)},
         {"deadline_ms", obs.deadline_ms ? json(*obs.deadline_ms) : json(nullptr)}};
  if (obs.nim) j["nim"] = {{"piles", obs.nim->piles}, {"to_move", obs.nim->to_move}};
  if (obs.dictator) {
    j["dictator"] = {{"endowment", obs.dictator->endowment},
                     {"is_dictator", obs.dictator->is_dictator}};
  }
  if (obs.spy) {
    const SpyView& v = *obs.spy;
    json ds = json::array();
    for (const auto& d : v.descriptions) {
      ds.push_back({{"round", d.round}, {"player", d.player}, {"text", d.text}});
    }
    json votes = json::array();
    for (const auto& b : v.votes) {
      votes.push_back({{"round", b.round}, {"voter", b.voter}, {"target", b.target}});
    }
    json elim = json::array();
    for (const auto& e : v.eliminations) {
      elim.push_back({{"round", e.round}, {"player", e.player}, {"cause", cause_name(e.cause)}});
    }
    std::vector<int> alive(v.alive.begin(), v.alive.end());
    j["spy"] = {{"word", v.word},         {"phase", to_string(v.phase)},
                {"alive", alive},         {"descriptions", ds},
                {"votes", votes},         {"eliminations", elim}};
  }
  return j;
}

Observation observation_from_json(const json& j) {
  Observation obs;
  obs.game = game_kind_from_string(j.at("game").get<std::string>());
  obs.player = j.at("player").get<int>();
  obs.player_count = j.at("player_count").get<int>();
  obs.round_no = j.at("round_no").get<int>();
  obs.step = j.at("step").get<int>();
  obs.total_rounds = j.at("total_rounds").get<int>();
  obs.own_cumulative = j.at("own_cumulative").get<int>();
  for (const auto& s : j.at("history")) {
    obs.history.push_back({s.at("round_no").get<int>(), s.at("step").get<int>(),
                           actions_from_json(s.at("actions")),
                           s.at("own_payoff").get<int>(),
                           read_optional_int(s, "eliminated")});
  }
  obs.legal = legal_from_json(j.at("legal"));
  if (auto it = j.find("deadline_ms"); it != j.end() && !it->is_null()) {
    obs.deadline_ms = it->get<std::int64_t>();
  }
  if (auto it = j.find("nim"); it != j.end()) {
    obs.nim = NimView{it->at("piles").get<std::vector<int>>(), it->at("to_move").get<int>()};
  }
  if (auto it = j.find("dictator"); it != j.end()) {
    obs.dictator = DictatorView{it->at("endowment").get<int>(),
                                it->at("is_dictator").get<bool>()};
  }
  if (auto it = j.find("spy"); it != j.end()) {
    SpyView v;
    v.word = it->at("word").get<std::string>();
    v.phase = phase_from(it->at("phase").get<std::string>());
    for (int a : it->at("alive").get<std::vector<int>>()) v.alive.push_back(a != 0);
    for (const auto& d : it->at("descriptions")) {
      v.descriptions.push_back({d.at("round").get<int>(), d.at("player").get<int>(),
                                d.at("text").get<std::string>()});
    }
    for (const auto& b : it->at("votes")) {
      v.votes.push_back({b.at("round").get<int>(), b.at("voter").get<int>(),
                         b.at("target").get<int>()});
    }
    for (const auto& e : it->at("eliminations")) {
      v.eliminations.push_back({e.at("round").get<int>(), e.at("player").get<int>(),
                                cause_from(e.at("cause").get<std::string>())});
    }
    obs.spy = std::move(v);
  }
  return obs;
}

std::string observation_digest(const Observation& obs) {
  // The deadline depends on the seat's transport, not on the game.
  Observation view = obs;
  view.deadline_ms.reset();
  return fmt::format("{:016x}", fnv1a(observation_to_json(view).dump()));
}

}  // namespace garena
