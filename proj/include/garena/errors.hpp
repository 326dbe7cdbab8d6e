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

#ifndef GARENA_ERRORS_HPP_
#define GARENA_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace garena {

// Invalid MatchConfig, plan, or payoff table.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A game rule was violated by the acting player.
class IllegalMove : public std::runtime_error {
 public:
  IllegalMove(int player, const std::string& what)
      : std::runtime_error(what), player_(player) {}
  int player() const { return player_; }

 private:
  int player_;
};

class IllegalAllocation : public IllegalMove {
 public:
  using IllegalMove::IllegalMove;
};

class IllegalVote : public IllegalMove {
 public:
  using IllegalMove::IllegalMove;
};

class RegistrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough eligible agents to seat a match yet. Not fatal.
class WaitingForPlayers : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnfinishedMatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transcript failed to parse or its replay disagrees with what it recorded.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProtocolErrorCode { kMalformed, kUnknownType, kDuplicateSeq };

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ProtocolErrorCode code, std::size_t offset,
                const std::string& what)
      : std::runtime_error(what), code_(code), offset_(offset) {}
  ProtocolErrorCode code() const { return code_; }
  // Byte offset into the offending line.
  std::size_t offset() const { return offset_; }

 private:
  ProtocolErrorCode code_;
  std::size_t offset_;
};

// Raised by an agent that could not produce a decision.
enum class FailureKind { kTimeout, kIllegal, kTransportLost };

class AgentFailure : public std::runtime_error {
 public:
  AgentFailure(FailureKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  FailureKind kind() const { return kind_; }

 private:
  FailureKind kind_;
};

class HandshakeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace garena

#endif  // GARENA_ERRORS_HPP_
