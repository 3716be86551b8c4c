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

#include "enforcekit/enforcer.hpp"

#include <algorithm>

#include "enforcekit/error.hpp"

namespace enforcekit {

std::string InstanceKey::to_string() const {
  if (!binder) return component;
  return component + "/" + *binder;
}

InstanceKey instance_key(const Event& event, const PolicySpec& spec) {
  const EventPattern* matched = nullptr;
  for (const auto& p : spec.alphabet) {
    if (!p.matches(event)) continue;
    // A binder pattern decides the key over a plain one.
    if (matched == nullptr || (!matched->binder() && p.binder())) matched = &p;
  }
  if (matched == nullptr)
    throw DispatchError("event " + format_event(event) + " is outside the alphabet of " + spec.name);

  switch (spec.instantiate.mode) {
    case Instantiation::Mode::singleton:
      return {};
    case Instantiation::Mode::per_component:
      return {event.component, std::nullopt};
    case Instantiation::Mode::per_binder: {
      auto binder = matched->binder();
      if (!binder) return {event.component, std::nullopt};
      auto it = event.attrs.find(binder->first);
      if (it == event.attrs.end())
        throw DispatchError("policy " + spec.name + ": event " + format_event(event) + " lacks binder attribute '" +
                            binder->first + "'");
      return {event.component, it->second};
    }
  }
  return {};
}

bool is_fan_out(const InstanceKey& key, const PolicySpec& spec) {
  return spec.instantiate.mode == Instantiation::Mode::per_binder && !key.binder;
}

AutomatonInstance make_instance(std::shared_ptr<const PolicySpec> policy, InstanceKey key) {
  std::string initial = policy->automaton.initial;
  return AutomatonInstance{std::move(policy), std::move(key), std::move(initial)};
}

StepResult step(const AutomatonInstance& instance, const Event& event) {
  const auto& automaton = instance.policy->automaton;
  StepResult result{instance, {}, std::nullopt};
  auto it = std::find_if(automaton.transitions.begin(), automaton.transitions.end(), [&](const Transition& t) {
    return t.from == instance.current && t.pattern.matches(event);
  });
  if (it == automaton.transitions.end()) {
    if (automaton.default_action == DefaultAction::allow) {
      result.outputs.push_back(event);
      result.input_index = 0;
    }
    return result;
  }
  result.next.current = it->to;
  for (const auto& item : it->output.items) {
    if (std::holds_alternative<InputPlaceholder>(item)) {
      result.input_index = result.outputs.size();
      result.outputs.push_back(event);
      continue;
    }
    const auto& synth = std::get<SynthEvent>(item);
    Event out{synth.kind, synth.name, event.component, event.seq, true, {}};
    for (const auto& [k, v] : synth.attrs) {
      if (!v.is_binder()) {
        out.attrs[k] = v.text;
      } else if (instance.key.binder) {
        out.attrs[k] = *instance.key.binder;
      } else {
        throw DispatchError("policy " + instance.policy->name + ": binder $" + v.text + " is unbound in instance '" +
                            instance.key.to_string() + "'");
      }
    }
    result.outputs.push_back(std::move(out));
  }
  return result;
}

std::string_view to_string(EditAction action) { return action == EditAction::insert ? "insert" : "suppress"; }

std::size_t EnforcementReport::total_inserted() const {
  std::size_t n = 0;
  for (const auto& m : modules) n += m.inserted;
  return n;
}

std::size_t EnforcementReport::total_suppressed() const {
  std::size_t n = 0;
  for (const auto& m : modules) n += m.suppressed;
  return n;
}

struct ModuleRegistry::ModuleEdit {
  bool handled = false;
  std::vector<Event> pre;
  bool keep = true;
  std::vector<Event> post;
};

ModuleRegistry::ModuleRegistry(std::size_t insert_depth_limit) : depth_limit_(insert_depth_limit) {
  if (depth_limit_ == 0) throw ValidationError("insert depth limit must be positive");
}

ProactiveModule& ModuleRegistry::add(PolicySpec spec) {
  int priority = modules_.empty() ? 0 : modules_.back().priority + 1;
  return add(std::make_shared<const PolicySpec>(std::move(spec)), priority);
}

ProactiveModule& ModuleRegistry::add(PolicySpec spec, int priority) {
  return add(std::make_shared<const PolicySpec>(std::move(spec)), priority);
}

ProactiveModule& ModuleRegistry::add(std::shared_ptr<const PolicySpec> spec, int priority) {
  for (const auto& m : modules_) {
    if (m.priority == priority)
      throw ValidationError("priority " + std::to_string(priority) + " already used by " + m.name());
    if (m.name() == spec->name) throw ValidationError("module " + spec->name + " is already registered");
  }
  auto pos = std::find_if(modules_.begin(), modules_.end(),
                          [&](const ProactiveModule& m) { return m.priority > priority; });
  auto it = modules_.insert(pos, ProactiveModule{std::move(spec), true, priority, {}});
  return *it;
}

ProactiveModule& ModuleRegistry::find(std::string_view module_name) {
  auto it = std::find_if(modules_.begin(), modules_.end(),
                         [&](const ProactiveModule& m) { return m.name() == module_name; });
  if (it == modules_.end()) throw LookupError("unknown module " + std::string(module_name));
  return *it;
}

const ProactiveModule& ModuleRegistry::module(std::string_view module_name) const {
  return const_cast<ModuleRegistry*>(this)->find(module_name);
}

ModuleRegistry& ModuleRegistry::set_active(std::string_view module_name, bool active) {
  auto& m = find(module_name);
  if (active && !m.active) {
    for (auto& [key, inst] : m.instances) inst.current = m.policy->automaton.initial;
  }
  m.active = active;
  return *this;
}

void ModuleRegistry::set_insert_depth_limit(std::size_t limit) {
  if (limit == 0) throw ValidationError("insert depth limit must be positive");
  depth_limit_ = limit;
}

void ModuleRegistry::reset() {
  for (auto& m : modules_) m.instances.clear();
}

EnforcementReport ModuleRegistry::empty_report() const {
  EnforcementReport report;
  for (const auto& m : modules_) report.modules.push_back({m.name(), 0, 0, 0});
  return report;
}

ModuleRegistry::ModuleEdit ModuleRegistry::apply(ProactiveModule& module, const Event& event) {
  ModuleEdit edit;
  const auto& spec = *module.policy;
  if (!spec.in_alphabet(event)) return edit;
  edit.handled = true;

  auto key = instance_key(event, spec);
  std::vector<AutomatonInstance*> targets;
  if (is_fan_out(key, spec)) {
    for (auto it = module.instances.lower_bound(InstanceKey{key.component, std::nullopt});
         it != module.instances.end() && it->first.component == key.component; ++it)
      targets.push_back(&it->second);
  } else {
    auto it = module.instances.find(key);
    if (it == module.instances.end()) it = module.instances.emplace(key, make_instance(module.policy, key)).first;
    targets.push_back(&it->second);
  }

  for (auto* inst : targets) {
    auto r = step(*inst, event);
    *inst = std::move(r.next);
    std::size_t split = r.input_index.value_or(r.outputs.size());
    if (!r.input_index) edit.keep = false;
    for (std::size_t i = 0; i < r.outputs.size(); ++i) {
      if (i < split) {
        edit.pre.push_back(std::move(r.outputs[i]));
      } else if (i > split) {
        edit.post.push_back(std::move(r.outputs[i]));
      }
    }
  }
  return edit;
}

void ModuleRegistry::process(const Event& event, std::size_t from, std::size_t depth,
                             std::vector<std::string>& chain, std::uint64_t input_seq, EnforcementReport& report,
                             std::vector<Event>& out) {
  if (depth > depth_limit_) {
    std::string path;
    for (const auto& name : chain) path += (path.empty() ? "" : " -> ") + name;
    throw EnforcementError("insertion depth limit " + std::to_string(depth_limit_) + " exceeded along " + path);
  }
  for (std::size_t j = from; j < modules_.size(); ++j) {
    auto& module = modules_[j];
    if (!module.active) continue;
    auto edit = apply(module, event);
    if (!edit.handled) continue;

    auto& counters = report.modules[j];
    counters.inserted += edit.pre.size() + edit.post.size();
    if (!edit.keep) {
      ++counters.suppressed;
      report.edits.push_back({input_seq, module.name(), EditAction::suppress, event});
    } else if (edit.pre.empty() && edit.post.empty()) {
      ++counters.passed;
    }

    auto emit_synth = [&](const Event& synth) {
      report.edits.push_back({input_seq, module.name(), EditAction::insert, synth});
      chain.push_back(module.name());
      process(synth, j + 1, depth + 1, chain, input_seq, report, out);
      chain.pop_back();
    };
    for (const auto& e : edit.pre) emit_synth(e);
    if (edit.keep) process(event, j + 1, depth, chain, input_seq, report, out);
    for (const auto& e : edit.post) emit_synth(e);
    return;
  }
  out.push_back(event);
}

std::vector<Event> ModuleRegistry::enforce_event(const Event& event) {
  auto report = empty_report();
  return enforce_event(event, report);
}

std::vector<Event> ModuleRegistry::enforce_event(const Event& event, EnforcementReport& report) {
  if (report.modules.size() != modules_.size()) report = empty_report();
  std::vector<Event> out;
  std::vector<std::string> chain;
  process(event, 0, 0, chain, event.seq, report, out);
  return out;
}

EnforcedTrace ModuleRegistry::enforce_trace(const Trace& trace) {
  EnforcedTrace result{{}, empty_report()};
  for (const auto& ev : trace.events) {
    try {
      auto out = enforce_event(ev, result.report);
      for (auto& e : out) result.trace.events.push_back(std::move(e));
    } catch (const EnforcementError& e) {
      throw EnforcementError(e.detail(), ev.seq);
    } catch (const DispatchError& e) {
      throw EnforcementError(e.what(), ev.seq);
    }
  }
  renumber(result.trace);
  return result;
}

}  // namespace enforcekit
