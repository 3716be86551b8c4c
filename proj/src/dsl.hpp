// Copyright (c) 2026 The enforcekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Shared front end for the policy and monitor languages. Both use the same
// keyword-driven grammar; policies carry `emit` clauses and `default`,
// monitors carry `error` state flags.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "enforcekit/policy.hpp"

namespace enforcekit::dsl {

struct Position {
  std::size_t line = 1;
  std::size_t column = 1;
};

struct RawTransition {
  EventPattern pattern;
  std::string to;
  std::optional<OutputTemplate> emit;
  Position pos;
  Position to_pos;
};

struct RawState {
  std::string name;
  bool error = false;
  std::vector<RawTransition> transitions;
  Position pos;
};

struct RawDocument {
  enum class Kind { policy, monitor };
  Kind kind = Kind::policy;
  std::string name;
  std::optional<std::string> statement;
  std::optional<Instantiation> instantiate;
  Position instantiate_pos;
  std::vector<EventPattern> alphabet;
  std::vector<Position> alphabet_pos;
  std::optional<std::string> initial;
  Position initial_pos;
  std::vector<RawState> states;
  std::optional<DefaultAction> default_action;
  Position default_pos;
};

/// Syntax only; throws ParseError.
RawDocument parse_document(std::string_view text);

/// Semantic checks shared by both languages (duplicate and unknown states,
/// alphabet membership, binder placement). Throws ValidationError.
void check_common(const RawDocument& doc);

std::string quote(std::string_view text);
std::string format_attr_constraints(const AttrConstraints& attrs);
std::string format_instantiation(const Instantiation& inst);
std::string format_alphabet(const std::vector<EventPattern>& alphabet);

}  // namespace enforcekit::dsl
