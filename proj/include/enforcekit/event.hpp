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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "enforcekit/diagnostic.hpp"

namespace enforcekit {

/// callback = lifecycle event of the application unit; api_call = invocation
/// of a library operation.
enum class EventKind { callback, api_call };

/// Trace-format tag: "cb" or "api".
std::string_view kind_tag(EventKind kind);
std::optional<EventKind> parse_kind_tag(std::string_view tag);

/// Attributes are kept sorted by key so serialization is canonical.
using Attributes = std::map<std::string, std::string>;

/// One intercepted occurrence attributed to a component instance.
struct Event {
  EventKind kind = EventKind::callback;
  std::string name;
  std::string component;
  std::uint64_t seq = 0;
  bool synthetic = false;
  Attributes attrs;

  friend bool operator==(const Event&, const Event&) = default;
};

Event make_callback(std::string name, std::string component, Attributes attrs = {});
Event make_api_call(std::string name, std::string component, Attributes attrs = {});

/// Renders `[!]kind:name@component[ k=v]*` without the seq prefix.
std::string format_event(const Event& event);

/// Parses the seq-less form produced by format_event. Used for alphabet
/// lists on the command line.
Event parse_event(std::string_view text);

struct Trace {
  std::vector<Event> events;

  bool empty() const noexcept { return events.empty(); }
  std::size_t size() const noexcept { return events.size(); }

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Assigns seq 1..n in order.
void renumber(Trace& trace);

/// Reads the line-delimited trace format. Blank lines and `#` comments are
/// skipped; seq comes from the leading integer of each line and must
/// strictly increase.
///
/// Throws ParseError for malformed lines and ValidationError for seq order.
Trace parse_trace(std::string_view text);

/// Canonical trace text, one event per line, no trailing newline.
std::string serialize_trace(const Trace& trace);

struct LifecycleTransition {
  std::string from;
  std::string callback;
  std::string to;

  friend auto operator<=>(const LifecycleTransition&, const LifecycleTransition&) = default;
};

/// States of an application unit and the callbacks that move between them.
class LifecycleModel {
 public:
  /// Throws ValidationError if `initial` or a transition endpoint is not a
  /// state, or if two transitions share (from, callback).
  LifecycleModel(std::string name, std::set<std::string> states, std::string initial,
                 std::set<LifecycleTransition> transitions);

  const std::string& name() const noexcept { return name_; }
  const std::set<std::string>& states() const noexcept { return states_; }
  const std::string& initial() const noexcept { return initial_; }
  const std::set<LifecycleTransition>& transitions() const noexcept { return transitions_; }

  /// Target state, or nullopt if `callback` is not enabled in `from`.
  std::optional<std::string> next(const std::string& from, const std::string& callback) const;

 private:
  std::string name_;
  std::set<std::string> states_;
  std::string initial_;
  std::set<LifecycleTransition> transitions_;
  std::map<std::pair<std::string, std::string>, std::string> index_;
};

/// Replays `component`'s callbacks from the initial state. A callback that is
/// not enabled yields one diagnostic and leaves the replay state unchanged.
Diagnostics validate_lifecycle(const Trace& trace, const LifecycleModel& model,
                               const std::string& component);

}  // namespace enforcekit
