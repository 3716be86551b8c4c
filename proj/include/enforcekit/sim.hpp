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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "enforcekit/enforcer.hpp"
#include "enforcekit/event.hpp"

namespace enforcekit {

/// Names accepted by builtin_lifecycle.
std::vector<std::string> builtin_lifecycle_names();

/// activity, osgi-bundle or react-component. Throws LookupError otherwise.
///
/// The activity model starts in the pseudo-state `initial`, from which only
/// onCreate is enabled.
LifecycleModel builtin_lifecycle(std::string_view name);

/// Lifecycle states in which a component must not hold exclusive resources.
std::set<std::string> suspended_states(std::string_view lifecycle_name);

/// A library resource tracked by the simulator. When `instance_attr` is set
/// each value of that attribute is a separate resource (one per service,
/// one per timer).
struct ResourceModel {
  std::string name;
  std::string acquire_api;
  std::string release_api;
  std::optional<std::string> instance_attr;
  bool exclusive = true;

  friend bool operator==(const ResourceModel&, const ResourceModel&) = default;
};

/// Camera, Service and Timer.
std::vector<ResourceModel> builtin_resources();

namespace steps {

struct Lifecycle {
  std::string component;
  std::string callback;
  friend bool operator==(const Lifecycle&, const Lifecycle&) = default;
};

struct ApiCall {
  std::string component;
  std::string name;
  Attributes attrs;
  friend bool operator==(const ApiCall&, const ApiCall&) = default;
};

struct Toggle {
  std::string module;
  bool active = true;
  friend bool operator==(const Toggle&, const Toggle&) = default;
};

}  // namespace steps

using ScenarioStep = std::variant<steps::Lifecycle, steps::ApiCall, steps::Toggle>;

/// A scripted lifecycle application. Faults are API misuse only; lifecycle
/// steps must be legal for the lifecycle model.
struct Scenario {
  std::string name;
  std::string lifecycle = "activity";
  std::vector<std::string> components;
  std::vector<ResourceModel> resources = builtin_resources();
  std::vector<ScenarioStep> steps;
};

/// Scenario script:
///
///   scenario <name>
///   lifecycle activity|osgi-bundle|react-component
///   resource <name> <acquire-api> <release-api> [key=<attr>] [shared]
///   component <id>
///   lc <component> <callback>
///   call <component> <api-name> [k=v ...]
///   toggle <module> on|off
///
/// A `resource` line replaces the built-in resource set on first use.
/// Throws ParseError for unknown directives or bad arity and ScenarioError
/// for references to undeclared components.
Scenario parse_scenario(std::string_view text);

struct Leak {
  std::string component;
  std::string resource;  // e.g. "Camera", "Service/S1"
  std::string state;     // lifecycle state the component entered
  std::uint64_t seq = 0;

  friend bool operator==(const Leak&, const Leak&) = default;
};

struct DeniedAcquire {
  std::string component;
  std::string resource;
  std::string holder;
  std::uint64_t seq = 0;

  friend bool operator==(const DeniedAcquire&, const DeniedAcquire&) = default;
};

struct LeakReport {
  std::vector<Leak> leaks;
  std::vector<DeniedAcquire> denied;

  friend bool operator==(const LeakReport&, const LeakReport&) = default;
};

struct SimulationResult {
  Trace trace;
  LeakReport leaks;
  EnforcementReport enforcement;  // empty when run without a registry
};

/// Executes the scenario. With a registry every generated event goes through
/// enforce_event and the resource models observe the enforced stream, so
/// inserted releases really free resources. Toggle steps are ignored when no
/// registry is given.
///
/// Throws ScenarioError when a lifecycle step is not enabled or a toggle
/// names an unknown module, and EnforcementError when enforcement fails.
SimulationResult run_scenario(const Scenario& scenario, ModuleRegistry* registry = nullptr);

}  // namespace enforcekit
