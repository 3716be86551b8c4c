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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "enforcekit/diagnostic.hpp"
#include "enforcekit/event.hpp"
#include "enforcekit/policy.hpp"

namespace enforcekit {

struct MonitorTransition {
  std::string from;
  EventPattern pattern;
  std::string to;

  friend bool operator==(const MonitorTransition&, const MonitorTransition&) = default;
};

/// Safety automaton deciding whether a trace satisfies a policy. Alphabet
/// events without a transition self-loop; error states are absorbing.
///
/// Monitors are written by hand in the monitor language and replayed by code
/// that shares nothing with the enforcer beyond the parsed data types.
struct MonitorAutomaton {
  std::string name;
  std::string statement;
  Instantiation instantiate;
  std::vector<EventPattern> alphabet;
  std::vector<std::string> states;
  std::string initial;
  std::set<std::string> error_states;
  std::vector<MonitorTransition> transitions;

  friend bool operator==(const MonitorAutomaton&, const MonitorAutomaton&) = default;
};

/// Same grammar as policies with the `monitor` keyword, no `emit` clauses,
/// and optional `error` flags on states (`state BAD error:`).
MonitorAutomaton parse_monitor(std::string_view text);
std::string serialize_monitor(const MonitorAutomaton& monitor);

/// Nondeterminism is an error; unreachable states are warnings.
Diagnostics validate_monitor(const MonitorAutomaton& monitor);

struct Violation {
  std::uint64_t seq = 0;
  std::string instance;  // rendered instance key
  std::string state;     // the error state entered

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// One violation per transition into an error state.
std::vector<Violation> check(const Trace& trace, const MonitorAutomaton& monitor);

/// Concrete events to enumerate over and the maximum trace length.
struct EventUniverse {
  std::vector<Event> alphabet;
  std::size_t max_len = 1;
};

/// Number of traces of length 0..max_len over `alphabet_size` symbols,
/// saturating at UINT64_MAX.
std::uint64_t trace_count(std::size_t alphabet_size, std::size_t max_len);

/// Streams every trace over the universe in length-then-lexicographic order
/// (alphabet order), with seq 1..n. Memory is O(max_len).
class TraceEnumerator {
 public:
  explicit TraceEnumerator(EventUniverse universe);

  /// Writes the next trace into `out`; false once exhausted.
  bool next(Trace& out);

 private:
  EventUniverse universe_;
  std::vector<std::size_t> digits_;
  bool started_ = false;
  bool done_ = false;
};

void for_each_trace(const EventUniverse& universe, const std::function<void(const Trace&)>& fn);

struct Verdict {
  bool sound = true;
  bool transparent = true;
  std::uint64_t traces_checked = 0;
  std::uint64_t compliant_inputs = 0;
  std::vector<Trace> unsound_counterexamples;       // input traces, first 10
  std::vector<Trace> intransparent_counterexamples;  // input traces, first 10
};

inline constexpr std::size_t max_counterexamples = 10;

/// Enforces every trace of the universe with `policy` alone, then checks
/// soundness (output has no violations) and transparency (compliant inputs
/// are reproduced byte for byte).
Verdict brute_force_verify(const PolicySpec& policy, const MonitorAutomaton& monitor, const EventUniverse& universe);

}  // namespace enforcekit
