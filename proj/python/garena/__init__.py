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

"""Python bindings for the garena arena core."""

from garena._core import (
    PROTOCOL_VERSION,
    ConfigError,
    GarenaError,
    IllegalMove,
    IntegrityError,
    ProtocolError,
    StorageError,
    canonical_line,
    dictator_settle,
    elo_update,
    expected_score,
    message_type,
    nim_optimal_move,
    nim_sum,
    pd_payoff,
    rebuild_markdown,
    replay,
    run_plan,
    trust_payoff,
    verify_transcript,
)

__all__ = [name for name in dir() if not name.startswith("_")]
