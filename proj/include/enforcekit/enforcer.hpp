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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "enforcekit/event.hpp"
#include "enforcekit/policy.hpp"

namespace enforcekit {

/// Identifies one automaton instance of a policy.
///
///   singleton      -> {"", nullopt}
///   per-component  -> {component, nullopt}
///   per-binder     -> {component, bound value}
///
/// In a per-binder policy, an event matching a pattern without a binder
/// yields {component, nullopt}: it addresses every live instance of that
/// component (fan-out).
struct InstanceKey {
  std::string component;
  std::optional<std::string> binder;

  std::string to_string() const;

  friend auto operator<=>(const InstanceKey&, const InstanceKey&) = default;
  friend bool operator==(const InstanceKey&, const InstanceKey&) = default;
};

/// Precondition: `event` matches the alphabet of `spec`. Throws
/// DispatchError when it does not, or when a matched binder pattern names
/// an attribute the event lacks.
InstanceKey instance_key(const Event& event, const PolicySpec& spec);

/// True for per-binder keys that address all instances of a component.
bool is_fan_out(const InstanceKey& key, const PolicySpec& spec);

struct AutomatonInstance {
  std::shared_ptr<const PolicySpec> policy;
  InstanceKey key;
  std::string current;
};

/// A fresh instance in the policy's initial state.
AutomatonInstance make_instance(std::shared_ptr<const PolicySpec> policy, InstanceKey key);

struct StepResult {
  AutomatonInstance next;
  std::vector<Event> outputs;
  /// Position of the input event inside `outputs`; nullopt when suppressed.
  std::optional<std::size_t> input_index;
};

/// Advances one instance on one event and instantiates the output template.
/// Synthesized events are marked synthetic and inherit the input's component.
/// Without a matching transition the policy default applies and the state is
/// unchanged.
StepResult step(const AutomatonInstance& instance, const Event& event);

struct ProactiveModule {
  std::shared_ptr<const PolicySpec> policy;
  bool active = true;
  int priority = 0;
  std::map<InstanceKey, AutomatonInstance> instances;

  const std::string& name() const { return policy->name; }
};

enum class EditAction { insert, suppress };

std::string_view to_string(EditAction action);

struct EditRecord {
  std::uint64_t seq = 0;  // seq of the input event being enforced
  std::string module;
  EditAction action = EditAction::insert;
  Event event;  // the inserted or the suppressed event

  friend bool operator==(const EditRecord&, const EditRecord&) = default;
};

struct ModuleCounters {
  std::string module;
  std::size_t inserted = 0;
  std::size_t suppressed = 0;
  std::size_t passed = 0;

  friend bool operator==(const ModuleCounters&, const ModuleCounters&) = default;
};

struct EnforcementReport {
  std::vector<ModuleCounters> modules;  // registry order
  std::vector<EditRecord> edits;

  std::size_t total_inserted() const;
  std::size_t total_suppressed() const;

  friend bool operator==(const EnforcementReport&, const EnforcementReport&) = default;
};

struct EnforcedTrace {
  Trace trace;
  EnforcementReport report;
};

/// The policy enforcer: an ordered pipeline of proactive modules.
///
/// Events flow through active modules in priority order. Events inserted by
/// a module are seen only by modules after it, so each event's output is
/// finite; nesting deeper than insert_depth_limit is an EnforcementError.
///
/// Single owner: stepping mutates instance state and must be serialized.
class ModuleRegistry {
 public:
  static constexpr std::size_t default_insert_depth_limit = 16;

  explicit ModuleRegistry(std::size_t insert_depth_limit = default_insert_depth_limit);

  /// Appends with priority one above the current maximum.
  ProactiveModule& add(PolicySpec spec);
  ProactiveModule& add(PolicySpec spec, int priority);
  ProactiveModule& add(std::shared_ptr<const PolicySpec> spec, int priority);

  /// Throws LookupError for an unknown module. Reactivating an inactive
  /// module resets all of its instances to the initial state.
  ModuleRegistry& set_active(std::string_view module_name, bool active);

  const ProactiveModule& module(std::string_view module_name) const;
  const std::vector<ProactiveModule>& modules() const noexcept { return modules_; }

  std::size_t insert_depth_limit() const noexcept { return depth_limit_; }
  void set_insert_depth_limit(std::size_t limit);

  /// Drops every instance of every module.
  void reset();

  std::vector<Event> enforce_event(const Event& event);
  std::vector<Event> enforce_event(const Event& event, EnforcementReport& report);

  /// Folds enforce_event over the trace and renumbers seq in the output.
  /// Errors are rethrown as EnforcementError carrying the input seq.
  EnforcedTrace enforce_trace(const Trace& trace);

  /// Zeroed counters for every module, in registry order.
  EnforcementReport empty_report() const;

 private:
  struct ModuleEdit;

  ProactiveModule& find(std::string_view module_name);
  ModuleEdit apply(ProactiveModule& module, const Event& event);
  void process(const Event& event, std::size_t from, std::size_t depth, std::vector<std::string>& chain,
               std::uint64_t input_seq, EnforcementReport& report, std::vector<Event>& out);

  std::vector<ProactiveModule> modules_;
  std::size_t depth_limit_;
};

}  // namespace enforcekit
