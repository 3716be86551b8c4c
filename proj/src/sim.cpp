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

#include "enforcekit/sim.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "enforcekit/error.hpp"

namespace enforcekit {

std::vector<std::string> builtin_lifecycle_names() { return {"activity", "osgi-bundle", "react-component"}; }

LifecycleModel builtin_lifecycle(std::string_view name) {
  if (name == "activity") {
    return LifecycleModel("activity", {"initial", "created", "resumed", "paused", "destroyed"}, "initial",
                          {{"initial", "onCreate", "created"},
                           {"created", "onResume", "resumed"},
                           {"created", "onDestroy", "destroyed"},
                           {"resumed", "onPause", "paused"},
                           {"paused", "onResume", "resumed"},
                           {"paused", "onDestroy", "destroyed"}});
  }
  if (name == "osgi-bundle") {
    return LifecycleModel("osgi-bundle", {"installed", "started", "stopped"}, "installed",
                          {{"installed", "start", "started"},
                           {"started", "stop", "stopped"},
                           {"stopped", "start", "started"}});
  }
  if (name == "react-component") {
    return LifecycleModel("react-component", {"unmounted", "mounted"}, "unmounted",
                          {{"unmounted", "componentDidMount", "mounted"},
                           {"mounted", "componentWillUnmount", "unmounted"}});
  }
  throw LookupError("unknown lifecycle model " + std::string(name));
}

std::set<std::string> suspended_states(std::string_view lifecycle_name) {
  if (lifecycle_name == "activity") return {"paused", "destroyed"};
  if (lifecycle_name == "osgi-bundle") return {"stopped"};
  if (lifecycle_name == "react-component") return {"unmounted"};
  throw LookupError("unknown lifecycle model " + std::string(lifecycle_name));
}

std::vector<ResourceModel> builtin_resources() {
  return {
      {"Camera", "Camera.open", "Camera.release", std::nullopt, true},
      {"Service", "registerService", "unregisterService", "service", true},
      {"Timer", "setTimer", "clearTimer", "timer", true},
  };
}

namespace {

std::vector<std::string> words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  sc.name = "scenario";
  bool custom_resources = false;
  std::set<std::string> declared;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  auto bad = [&](const std::string& msg) { throw ParseError(line_no, 1, msg); };
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto w = words(line);
    if (w.empty()) continue;
    const auto& kw = w[0];
    if (kw == "scenario") {
      if (w.size() != 2) bad("expected 'scenario <name>'");
      sc.name = w[1];
    } else if (kw == "lifecycle") {
      if (w.size() != 2) bad("expected 'lifecycle <model>'");
      try {
        builtin_lifecycle(w[1]);
      } catch (const LookupError& e) {
        bad(e.what());
      }
      sc.lifecycle = w[1];
    } else if (kw == "resource") {
      if (w.size() < 4 || w.size() > 6) bad("expected 'resource <name> <acquire> <release> [key=<attr>] [shared]'");
      if (!custom_resources) sc.resources.clear();
      custom_resources = true;
      ResourceModel r{w[1], w[2], w[3], std::nullopt, true};
      for (std::size_t i = 4; i < w.size(); ++i) {
        if (w[i] == "shared") {
          r.exclusive = false;
        } else if (w[i].rfind("key=", 0) == 0 && w[i].size() > 4) {
          r.instance_attr = w[i].substr(4);
        } else {
          bad("unknown resource option '" + w[i] + "'");
        }
      }
      sc.resources.push_back(std::move(r));
    } else if (kw == "component") {
      if (w.size() != 2) bad("expected 'component <id>'");
      if (!declared.insert(w[1]).second) bad("duplicate component " + w[1]);
      sc.components.push_back(w[1]);
    } else if (kw == "lc") {
      if (w.size() != 3) bad("expected 'lc <component> <callback>'");
      if (!declared.contains(w[1])) throw ScenarioError(sc.steps.size() + 1, "undeclared component " + w[1]);
      sc.steps.emplace_back(steps::Lifecycle{w[1], w[2]});
    } else if (kw == "call") {
      if (w.size() < 3) bad("expected 'call <component> <api-name> [k=v ...]'");
      if (!declared.contains(w[1])) throw ScenarioError(sc.steps.size() + 1, "undeclared component " + w[1]);
      steps::ApiCall call{w[1], w[2], {}};
      for (std::size_t i = 3; i < w.size(); ++i) {
        auto eq = w[i].find('=');
        if (eq == std::string::npos || eq == 0) bad("expected attribute 'k=v', found '" + w[i] + "'");
        if (!call.attrs.emplace(w[i].substr(0, eq), w[i].substr(eq + 1)).second)
          bad("duplicate attribute in '" + w[i] + "'");
      }
      sc.steps.emplace_back(std::move(call));
    } else if (kw == "toggle") {
      if (w.size() != 3 || (w[2] != "on" && w[2] != "off")) bad("expected 'toggle <module> on|off'");
      sc.steps.emplace_back(steps::Toggle{w[1], w[2] == "on"});
    } else {
      bad("unknown directive '" + kw + "'");
    }
  }
  return sc;
}

namespace {

class Simulator {
 public:
  Simulator(const Scenario& sc, ModuleRegistry* registry)
      : sc_(sc), model_(builtin_lifecycle(sc.lifecycle)), suspended_(suspended_states(sc.lifecycle)),
        registry_(registry) {
    for (const auto& c : sc.components) state_[c] = model_.initial();
    if (registry_ != nullptr) result_.enforcement = registry_->empty_report();
  }

  SimulationResult run() {
    for (std::size_t i = 0; i < sc_.steps.size(); ++i) {
      step_no_ = i + 1;
      std::visit([this](const auto& s) { execute(s); }, sc_.steps[i]);
    }
    renumber(result_.trace);
    return std::move(result_);
  }

 private:
  void require_component(const std::string& c) const {
    if (!state_.contains(c)) throw ScenarioError(step_no_, "undeclared component " + c);
  }

  void execute(const steps::Lifecycle& s) {
    require_component(s.component);
    auto& state = state_[s.component];
    auto next = model_.next(state, s.callback);
    if (!next)
      throw ScenarioError(step_no_, s.callback + " not enabled for " + s.component + " in state " + state);
    state = *next;
    bool checked = false;
    for (const auto& out : dispatch(make_callback(s.callback, s.component))) {
      if (out.kind == EventKind::callback && !out.synthetic && out.component == s.component &&
          out.name == s.callback) {
        check_leaks(s.component, out.seq);
        checked = true;
      }
    }
    if (!checked) check_leaks(s.component, next_seq_);
  }

  void execute(const steps::ApiCall& s) {
    require_component(s.component);
    dispatch(make_api_call(s.name, s.component, s.attrs));
  }

  void execute(const steps::Toggle& s) {
    if (registry_ == nullptr) return;
    try {
      registry_->set_active(s.module, s.active);
    } catch (const LookupError& e) {
      throw ScenarioError(step_no_, e.what());
    }
  }

  // Emits the (possibly enforced) outputs of one generated event and applies
  // their effect on resources.
  std::vector<Event> dispatch(Event ev) {
    ev.seq = next_seq_ + 1;
    std::vector<Event> outputs;
    if (registry_ != nullptr) {
      outputs = registry_->enforce_event(ev, result_.enforcement);
    } else {
      outputs.push_back(std::move(ev));
    }
    for (auto& out : outputs) {
      out.seq = ++next_seq_;
      if (out.kind == EventKind::api_call) apply_resource(out);
      result_.trace.events.push_back(out);
    }
    return outputs;
  }

  void apply_resource(const Event& ev) {
    for (const auto& r : sc_.resources) {
      bool acquire = ev.name == r.acquire_api;
      bool release = ev.name == r.release_api;
      if (!acquire && !release) continue;
      std::string id = r.name;
      if (r.instance_attr) {
        auto it = ev.attrs.find(*r.instance_attr);
        if (it == ev.attrs.end()) continue;
        id += "/" + it->second;
      }
      auto& holders = holders_[id];
      exclusive_[id] = r.exclusive;
      if (release) {
        holders.erase(ev.component);
        continue;
      }
      if (r.exclusive && !holders.empty() && !holders.contains(ev.component)) {
        result_.leaks.denied.push_back({ev.component, id, *holders.begin(), ev.seq});
        continue;
      }
      holders.insert(ev.component);
    }
  }

  void check_leaks(const std::string& component, std::uint64_t seq) {
    const auto& state = state_[component];
    if (!suspended_.contains(state)) return;
    for (const auto& [id, holders] : holders_) {
      if (!exclusive_[id] || !holders.contains(component)) continue;
      if (!reported_.insert({component, id}).second) continue;
      result_.leaks.leaks.push_back({component, id, state, seq});
    }
  }

  const Scenario& sc_;
  LifecycleModel model_;
  std::set<std::string> suspended_;
  ModuleRegistry* registry_;
  std::map<std::string, std::string> state_;
  std::map<std::string, std::set<std::string>> holders_;
  std::map<std::string, bool> exclusive_;
  std::set<std::pair<std::string, std::string>> reported_;
  std::uint64_t next_seq_ = 0;
  std::size_t step_no_ = 0;
  SimulationResult result_;
};

}  // namespace

SimulationResult run_scenario(const Scenario& scenario, ModuleRegistry* registry) {
  return Simulator(scenario, registry).run();
}

}  // namespace enforcekit
