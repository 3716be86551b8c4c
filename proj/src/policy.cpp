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

#include "enforcekit/policy.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "dsl.hpp"
#include "enforcekit/error.hpp"

namespace enforcekit {

std::optional<std::pair<std::string, std::string>> EventPattern::binder() const {
  for (const auto& [k, v] : attrs)
    if (v.is_binder()) return std::pair{k, v.text};
  return std::nullopt;
}

bool EventPattern::matches(const Event& event) const {
  if (event.kind != kind || event.name != name) return false;
  for (const auto& [k, v] : attrs) {
    if (v.is_binder()) continue;
    auto it = event.attrs.find(k);
    if (it == event.attrs.end() || it->second != v.text) return false;
  }
  return true;
}

bool patterns_overlap(const EventPattern& a, const EventPattern& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  for (const auto& [k, va] : a.attrs) {
    auto it = b.attrs.find(k);
    if (it == b.attrs.end()) continue;
    const auto& vb = it->second;
    if (!va.is_binder() && !vb.is_binder() && va.text != vb.text) return false;
  }
  return true;
}

std::string format_pattern(const EventPattern& pattern) {
  std::string out(kind_tag(pattern.kind));
  out += ' ';
  out += pattern.name;
  out += dsl::format_attr_constraints(pattern.attrs);
  return out;
}

std::optional<std::size_t> OutputTemplate::input_index() const {
  for (std::size_t i = 0; i < items.size(); ++i)
    if (std::holds_alternative<InputPlaceholder>(items[i])) return i;
  return std::nullopt;
}

bool EditAutomaton::has_state(std::string_view state) const {
  return std::find(states.begin(), states.end(), state) != states.end();
}

bool PolicySpec::in_alphabet(const Event& event) const {
  return std::any_of(alphabet.begin(), alphabet.end(), [&](const EventPattern& p) { return p.matches(event); });
}

PolicySpec parse_policy(std::string_view text) {
  auto doc = dsl::parse_document(text);
  if (doc.kind != dsl::RawDocument::Kind::policy)
    throw ValidationError("expected a policy, found a monitor (" + doc.name + ")");
  dsl::check_common(doc);

  PolicySpec spec;
  spec.name = doc.name;
  spec.statement = doc.statement.value_or("");
  spec.instantiate = doc.instantiate.value_or(Instantiation{});
  spec.alphabet = doc.alphabet;
  spec.automaton.initial = *doc.initial;
  spec.automaton.default_action = doc.default_action.value_or(DefaultAction::allow);
  for (const auto& st : doc.states) {
    spec.automaton.states.push_back(st.name);
    for (const auto& tr : st.transitions)
      spec.automaton.transitions.push_back(Transition{st.name, tr.pattern, tr.to, *tr.emit});
  }
  return spec;
}

namespace {

std::string format_item(const OutputItem& item) {
  if (std::holds_alternative<InputPlaceholder>(item)) return "$in";
  const auto& s = std::get<SynthEvent>(item);
  std::string out(kind_tag(s.kind));
  out += ' ';
  out += s.name;
  out += dsl::format_attr_constraints(s.attrs);
  return out;
}

}  // namespace

std::string serialize_policy(const PolicySpec& spec) {
  const auto& a = spec.automaton;
  std::string out = "policy " + spec.name + "\n";
  if (!spec.statement.empty()) out += "statement " + dsl::quote(spec.statement) + "\n";
  out += "instantiate " + dsl::format_instantiation(spec.instantiate) + "\n";
  if (!spec.alphabet.empty()) out += "alphabet " + dsl::format_alphabet(spec.alphabet) + "\n";
  out += "initial " + a.initial + "\n";
  for (const auto& st : a.states) {
    out += "state " + st + ":\n";
    for (const auto& tr : a.transitions) {
      if (tr.from != st) continue;
      out += "  on " + format_pattern(tr.pattern) + " -> " + tr.to + " emit [";
      for (std::size_t i = 0; i < tr.output.items.size(); ++i) {
        if (i != 0) out += ", ";
        out += format_item(tr.output.items[i]);
      }
      out += "]\n";
    }
  }
  out += std::string("default ") + (a.default_action == DefaultAction::allow ? "allow" : "suppress") + "\n";
  out += "end\n";
  return out;
}

Diagnostics validate_policy(const PolicySpec& spec) {
  Diagnostics diags;
  const auto& a = spec.automaton;

  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    for (std::size_t j = i + 1; j < a.transitions.size(); ++j) {
      const auto& t1 = a.transitions[i];
      const auto& t2 = a.transitions[j];
      if (t1.from == t2.from && patterns_overlap(t1.pattern, t2.pattern))
        diags.push_back({Severity::error, "nondeterminism",
                         "state " + t1.from + ": transitions on " + format_pattern(t1.pattern) + " and " +
                             format_pattern(t2.pattern) + " can match the same event"});
    }
  }

  std::set<std::string> reached{a.initial};
  std::deque<std::string> work{a.initial};
  while (!work.empty()) {
    auto s = work.front();
    work.pop_front();
    for (const auto& tr : a.transitions)
      if (tr.from == s && reached.insert(tr.to).second) work.push_back(tr.to);
  }
  for (const auto& st : a.states)
    if (!reached.contains(st))
      diags.push_back({Severity::warning, "unreachable-state", "state " + st + " is unreachable from " + a.initial});

  for (const auto& tr : a.transitions) {
    for (const auto& item : tr.output.items) {
      const auto* s = std::get_if<SynthEvent>(&item);
      if (s == nullptr) continue;
      EventPattern as_pattern{s->kind, s->name, s->attrs};
      bool covered = std::any_of(spec.alphabet.begin(), spec.alphabet.end(),
                                 [&](const EventPattern& p) { return patterns_overlap(p, as_pattern); });
      if (!covered)
        diags.push_back({Severity::warning, "off-alphabet-insertion",
                         "state " + tr.from + ": inserted event " + format_item(item) + " is outside the alphabet"});
    }
    if (tr.pattern.kind == EventKind::callback && !tr.output.input_index())
      diags.push_back({Severity::warning, "suppressed-callback",
                       "state " + tr.from + ": callback " + tr.pattern.name +
                           " is suppressed; the application's lifecycle may desynchronize"});
  }
  return diags;
}

}  // namespace enforcekit
