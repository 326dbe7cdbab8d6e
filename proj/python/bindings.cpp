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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "garena/arena.hpp"
#include "garena/errors.hpp"
#include "garena/game_core.hpp"
#include "garena/plan.hpp"
#include "garena/protocol.hpp"
#include "garena/rating.hpp"
#include "garena/storage.hpp"

namespace py = pybind11;
using namespace garena;

namespace {

BinaryAction parse_binary(const std::string& s) { return binary_action_from_string(s); }

std::optional<std::string> canonical_line(const std::string& line) {
  auto msg = protocol::decode(line);
  if (!msg) return std::nullopt;
  return protocol::encode(*msg);
}

std::optional<std::string> message_type(const std::string& line) {
  auto msg = protocol::decode(line);
  if (!msg) return std::nullopt;
  return std::string(protocol::type_tag(msg->payload));
}

py::dict run_plan(const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
  const Plan plan = load_plan(path);
  TournamentPlan tp;
  tp.games = plan.games;
  tp.seed = seed.value_or(plan.seed.value_or(0));
  tp.workers = plan.workers.value_or(1);
  AgentRegistry registry;
  for (const auto& a : plan.agents) {
    if (a.remote()) throw ConfigError("remote agents need the garena binary");
    tp.agents.push_back(a.id);
    registry.register_agent(scripted_registration(a.id, *a.scripted, a.display_name));
  }
  TournamentResult result;
  {
    py::gil_scoped_release release;
    result = run_tournament(tp, registry);
  }
  std::vector<std::string> transcripts;
  for (const auto& r : result.records) transcripts.push_back(transcript_to_ndjson(r));
  py::dict out;
  out["transcripts"] = transcripts;
  out["warnings"] = result.warnings;
  out["markdown"] = export_leaderboard(result.leaderboard, ExportFormat::kMarkdown);
  out["csv"] = export_leaderboard(result.leaderboard, ExportFormat::kCsv);
  return out;
}

std::string rebuild_markdown(const std::vector<std::string>& transcripts) {
  Leaderboard board;
  std::vector<MatchRecord> records;
  for (const auto& t : transcripts) records.push_back(transcript_from_ndjson(t));
  std::sort(records.begin(), records.end(), completion_order);
  for (const auto& r : records) {
    for (const auto& p : r.participants) board.register_agent(p);
  }
  for (const auto& r : records) board.apply(r);
  return export_leaderboard(board, ExportFormat::kMarkdown);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Game arena core: games, ratings, wire protocol and transcripts.";

  auto base = py::register_exception<std::runtime_error>(m, "GarenaError");
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<IllegalMove>(m, "IllegalMove", base);
  py::register_exception<IntegrityError>(m, "IntegrityError", base);
  py::register_exception<StorageError>(m, "StorageError", base);
  py::register_exception<ProtocolError>(m, "ProtocolError", base);

  m.def("nim_sum", [](const std::vector<int>& piles) { return nim_sum(piles); }, py::arg("piles"));
  m.def(
      "nim_optimal_move",
      [](const std::vector<int>& piles) {
        NimMove mv = nim_optimal_move(NimState{piles, 0});
        return std::make_pair(mv.pile_index, mv.take);
      },
      py::arg("piles"), "Returns (pile_index, take).");

  m.def(
      "pd_payoff",
      [](const std::string& a, const std::string& b) {
        return pd_payoff(parse_binary(a), parse_binary(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "trust_payoff",
      [](const std::string& a, const std::string& b) {
        return trust_payoff(parse_binary(a), parse_binary(b));
      },
      py::arg("a"), py::arg("b"));
  m.def("dictator_settle", &dictator_settle, py::arg("endowment"), py::arg("keep"));

  m.def(
      "expected_score",
      [](double ra, double rb, double scale) {
        return expected_score(ra, rb, EloParams{32.0, scale, 1000.0});
      },
      py::arg("ra"), py::arg("rb"), py::arg("scale") = 400.0);
  m.def(
      "elo_update",
      [](double ra, double rb, double sa, double k, double scale) {
        return elo_update(ra, rb, sa, EloParams{k, scale, 1000.0});
      },
      py::arg("ra"), py::arg("rb"), py::arg("sa"), py::arg("k") = 32.0,
      py::arg("scale") = 400.0);

  m.attr("PROTOCOL_VERSION") = protocol::kProtocolVersion;
  m.def("canonical_line", &canonical_line, py::arg("line"),
        "Decodes one wire line and re-encodes it; None for a blank line.");
  m.def("message_type", &message_type, py::arg("line"));

  m.def("run_plan", &run_plan, py::arg("path"), py::arg("seed") = py::none());
  m.def("rebuild_markdown", &rebuild_markdown, py::arg("transcripts"));
  m.def(
      "verify_transcript",
      [](const std::string& text) { verify_record(transcript_from_ndjson(text)); },
      py::arg("text"));
  m.def(
      "replay",
      [](const std::filesystem::path& path) { return render_transcript(replay(path)); },
      py::arg("path"));
}
