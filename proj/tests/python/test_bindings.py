# Copyright 2026 The garena Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os
import pathlib

import pytest

import garena

SOURCE = pathlib.Path(os.environ.get("GARENA_SOURCE_DIR", pathlib.Path(__file__).parents[2]))


def test_nim():
    assert garena.nim_sum([1, 2, 3]) == 0
    pile, take = garena.nim_optimal_move([3, 4, 5])
    piles = [3, 4, 5]
    piles[pile] -= take
    assert garena.nim_sum(piles) == 0
    with pytest.raises(garena.IllegalMove):
        garena.nim_optimal_move([0, 0])


def test_payoffs():
    assert garena.pd_payoff("cooperate", "defect") == (0, 5)
    assert garena.trust_payoff("cooperate", "cheat") == (-1, 2)
    assert garena.dictator_settle(100, 70) == (70, 30)
    with pytest.raises(garena.IllegalMove):
        garena.dictator_settle(100, 101)


def test_elo():
    ea, eb = garena.expected_score(1000, 1000)
    assert ea == pytest.approx(0.5) and eb == pytest.approx(0.5)
    ra, rb = garena.elo_update(1000, 1000, 1.0)
    assert (ra, rb) == pytest.approx((1016.0, 984.0))
    ea, _ = garena.expected_score(1100, 900)
    assert ea == pytest.approx(1 / (1 + 10 ** (-0.5)))


def test_protocol_line():
    line = json.dumps({"type": "Ping", "seq": 3, "extra": 1})
    canon = garena.canonical_line(line)
    assert json.loads(canon)["type"] == "Ping"
    assert "extra" not in json.loads(canon)
    assert garena.message_type(canon) == "Ping"
    assert garena.canonical_line("") is None
    with pytest.raises(garena.ProtocolError):
        garena.canonical_line("{not json")
    with pytest.raises(garena.ProtocolError):
        garena.canonical_line('{"type": "Dance", "seq": 1}')


def test_run_plan_and_verify():
    result = garena.run_plan(SOURCE / "plans" / "demo.yaml")
    assert len(result["transcripts"]) == 84
    assert result["markdown"].startswith("| Agent |")
    assert garena.rebuild_markdown(result["transcripts"]) == result["markdown"]
    again = garena.run_plan(SOURCE / "plans" / "demo.yaml")
    assert again["transcripts"] == result["transcripts"]
    first = result["transcripts"][0]
    garena.verify_transcript(first)
    lines = first.splitlines()
    step = json.loads(lines[1])
    step["payoffs"][0] += 7
    lines[1] = json.dumps(step)
    with pytest.raises(garena.IntegrityError):
        garena.verify_transcript("\n".join(lines) + "\n")


def test_replay_file(tmp_path):
    result = garena.run_plan(SOURCE / "plans" / "demo.yaml")
    path = tmp_path / "m.ndjson"
    path.write_text(result["transcripts"][0])
    assert "outcome" in garena.replay(path).lower()
    with pytest.raises(garena.IntegrityError):
        garena.replay(tmp_path / "absent.ndjson")
