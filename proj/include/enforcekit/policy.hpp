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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "enforcekit/diagnostic.hpp"
#include "enforcekit/event.hpp"

namespace enforcekit {

/// Right-hand side of an attribute constraint: a literal value that must
/// match exactly, or a `$binder` naming the value that keys the instance.
struct AttrValue {
  enum class Kind { literal, binder };
  Kind kind = Kind::literal;
  std::string text;  // literal value, or binder name without the '$'

  static AttrValue literal(std::string v) { return {Kind::literal, std::move(v)}; }
  static AttrValue binder(std::string name) { return {Kind::binder, std::move(name)}; }
  bool is_binder() const noexcept { return kind == Kind::binder; }

  friend bool operator==(const AttrValue&, const AttrValue&) = default;
};

using AttrConstraints = std::map<std::string, AttrValue>;

/// Matches concrete events by exact (kind, name) plus attribute constraints.
struct EventPattern {
  EventKind kind = EventKind::callback;
  std::string name;
  AttrConstraints attrs;

  /// (attribute key, binder name) of the pattern's binder, if any.
  std::optional<std::pair<std::string, std::string>> binder() const;

  /// Kind, name and literal constraints. A binder constraint does not take
  /// part in matching; instance_key reports a missing binder attribute.
  bool matches(const Event& event) const;

  friend bool operator==(const EventPattern&, const EventPattern&) = default;
};

/// True when some concrete event can match both patterns.
bool patterns_overlap(const EventPattern& a, const EventPattern& b);

/// `cb name` / `api name{k=v, k=$b}`.
std::string format_pattern(const EventPattern& pattern);

struct InputPlaceholder {
  friend bool operator==(const InputPlaceholder&, const InputPlaceholder&) = default;
};

/// An event the enforcer inserts. Binder values resolve from the instance key.
struct SynthEvent {
  EventKind kind = EventKind::api_call;
  std::string name;
  AttrConstraints attrs;

  friend bool operator==(const SynthEvent&, const SynthEvent&) = default;
};

using OutputItem = std::variant<InputPlaceholder, SynthEvent>;

/// pass = [$in], suppress = [], insert-before = [synth..., $in], and so on.
struct OutputTemplate {
  std::vector<OutputItem> items;

  /// Index of the $in placeholder, nullopt when the input is suppressed.
  std::optional<std::size_t> input_index() const;

  friend bool operator==(const OutputTemplate&, const OutputTemplate&) = default;
};

struct Transition {
  std::string from;
  EventPattern pattern;
  std::string to;
  OutputTemplate output;

  friend bool operator==(const Transition&, const Transition&) = default;
};

enum class DefaultAction { allow, suppress };

struct EditAutomaton {
  std::vector<std::string> states;  // declaration order
  std::string initial;
  std::vector<Transition> transitions;  // grouped by `from` in state order
  DefaultAction default_action = DefaultAction::allow;

  bool has_state(std::string_view state) const;

  friend bool operator==(const EditAutomaton&, const EditAutomaton&) = default;
};

struct Instantiation {
  enum class Mode { singleton, per_component, per_binder };
  Mode mode = Mode::singleton;
  std::string binder_key;  // attribute key, only for per_binder

  friend bool operator==(const Instantiation&, const Instantiation&) = default;
};

/// An enforcement model plus the correctness statement it implements.
/// Specs reference API and callback names only, never application ids.
struct PolicySpec {
  std::string name;
  std::string statement;
  Instantiation instantiate;
  std::vector<EventPattern> alphabet;
  EditAutomaton automaton;

  /// True when `event` matches some alphabet pattern.
  bool in_alphabet(const Event& event) const;

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// Parses the policy language. Throws ParseError on syntax errors and
/// ValidationError on semantic ones (unknown or duplicate state,
/// off-alphabet transition pattern, misplaced binder, repeated $in).
PolicySpec parse_policy(std::string_view text);

/// Canonical text; parse_policy(serialize_policy(s)) == s.
std::string serialize_policy(const PolicySpec& spec);

/// Static checks. Nondeterminism is an error; unreachable states,
/// off-alphabet insertions and suppressed callbacks are warnings.
Diagnostics validate_policy(const PolicySpec& spec);

}  // namespace enforcekit
