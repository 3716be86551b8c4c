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

#include "enforcekit/oracle.hpp"

#include <deque>
#include <limits>
#include <map>
#include <optional>

#include "dsl.hpp"
#include "enforcekit/enforcer.hpp"
#include "enforcekit/error.hpp"

namespace enforcekit {

MonitorAutomaton parse_monitor(std::string_view text) {
  auto doc = dsl::parse_document(text);
  if (doc.kind != dsl::RawDocument::Kind::monitor)
    throw ValidationError("expected a monitor, found a policy (" + doc.name + ")");
  dsl::check_common(doc);

  MonitorAutomaton m;
  m.name = doc.name;
  m.statement = doc.statement.value_or("");
  m.instantiate = doc.instantiate.value_or(Instantiation{});
  m.alphabet = doc.alphabet;
  m.initial = *doc.initial;
  for (const auto& st : doc.states) {
    m.states.push_back(st.name);
    if (st.error) {
      m.error_states.insert(st.name);
      if (!st.transitions.empty())
        throw ValidationError("line " + std::to_string(st.pos.line) + ": error state " + st.name +
                              " must be absorbing");
    }
    for (const auto& tr : st.transitions) m.transitions.push_back({st.name, tr.pattern, tr.to});
  }
  return m;
}

std::string serialize_monitor(const MonitorAutomaton& m) {
  std::string out = "monitor " + m.name + "\n";
  if (!m.statement.empty()) out += "statement " + dsl::quote(m.statement) + "\n";
  out += "instantiate " + dsl::format_instantiation(m.instantiate) + "\n";
  if (!m.alphabet.empty()) out += "alphabet " + dsl::format_alphabet(m.alphabet) + "\n";
  out += "initial " + m.initial + "\n";
  for (const auto& st : m.states) {
    out += "state " + st + (m.error_states.contains(st) ? " error" : "") + ":\n";
    for (const auto& tr : m.transitions)
      if (tr.from == st) out += "  on " + format_pattern(tr.pattern) + " -> " + tr.to + "\n";
  }
  out += "end\n";
  return out;
}

Diagnostics validate_monitor(const MonitorAutomaton& m) {
  Diagnostics diags;
  for (std::size_t i = 0; i < m.transitions.size(); ++i)
    for (std::size_t j = i + 1; j < m.transitions.size(); ++j)
      if (m.transitions[i].from == m.transitions[j].from &&
          patterns_overlap(m.transitions[i].pattern, m.transitions[j].pattern))
        diags.push_back({Severity::error, "nondeterminism",
                         "state " + m.transitions[i].from + ": transitions on " +
                             format_pattern(m.transitions[i].pattern) + " and " +
                             format_pattern(m.transitions[j].pattern) + " can match the same event"});
  std::set<std::string> reached{m.initial};
  std::deque<std::string> work{m.initial};
  while (!work.empty()) {
    auto s = work.front();
    work.pop_front();
    for (const auto& tr : m.transitions)
      if (tr.from == s && reached.insert(tr.to).second) work.push_back(tr.to);
  }
  for (const auto& st : m.states)
    if (!reached.contains(st))
      diags.push_back({Severity::warning, "unreachable-state", "state " + st + " is unreachable from " + m.initial});
  return diags;
}

namespace {

// Deliberately separate from EventPattern::matches and instance_key: the
// monitor replay is the reference the enforcer is checked against.
bool accepts(const EventPattern& p, const Event& e) {
  if (p.kind != e.kind || p.name != e.name) return false;
  for (const auto& [key, value] : p.attrs) {
    if (value.kind == AttrValue::Kind::binder) {
      if (!e.attrs.contains(key)) return false;
      continue;
    }
    auto it = e.attrs.find(key);
    if (it == e.attrs.end() || it->second != value.text) return false;
  }
  return true;
}

struct MonitorKey {
  std::string component;
  std::optional<std::string> value;
  auto operator<=>(const MonitorKey&) const = default;
};

std::string render(const MonitorKey& k) { return k.value ? k.component + "/" + *k.value : k.component; }

}  // namespace

std::vector<Violation> check(const Trace& trace, const MonitorAutomaton& monitor) {
  std::vector<Violation> violations;
  std::map<MonitorKey, std::string> states;

  bool keyed_by_binder = monitor.instantiate.mode == Instantiation::Mode::per_binder;
  auto advance = [&](const MonitorKey& key, std::string& state, const Event& ev) {
    if (monitor.error_states.contains(state)) return;
    for (const auto& tr : monitor.transitions) {
      if (tr.from != state || !accepts(tr.pattern, ev)) continue;
      state = tr.to;
      if (monitor.error_states.contains(state)) violations.push_back({ev.seq, render(key), state});
      return;
    }
  };

  for (const auto& ev : trace.events) {
    std::optional<std::string> bound;
    bool relevant = false;
    for (const auto& p : monitor.alphabet) {
      if (!accepts(p, ev)) continue;
      relevant = true;
      for (const auto& [key, value] : p.attrs)
        if (value.kind == AttrValue::Kind::binder) bound = ev.attrs.at(key);
    }
    if (!relevant) continue;

    if (keyed_by_binder && !bound) {
      // Component-wide event: every live instance of the component observes it.
      for (auto& [key, state] : states)
        if (key.component == ev.component) advance(key, state, ev);
      continue;
    }
    MonitorKey key;
    if (monitor.instantiate.mode != Instantiation::Mode::singleton) key.component = ev.component;
    if (keyed_by_binder) key.value = bound;
    auto [it, fresh] = states.try_emplace(key, monitor.initial);
    advance(it->first, it->second, ev);
  }
  return violations;
}

std::uint64_t trace_count(std::size_t alphabet_size, std::size_t max_len) {
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  std::uint64_t layer = 1;
  for (std::size_t len = 1; len <= max_len; ++len) {
    if (alphabet_size != 0 && layer > cap / alphabet_size) return cap;
    layer *= alphabet_size;
    if (total > cap - layer) return cap;
    total += layer;
  }
  return total;
}

TraceEnumerator::TraceEnumerator(EventUniverse universe) : universe_(std::move(universe)) {
  if (universe_.alphabet.empty()) throw ValidationError("event universe alphabet is empty");
  if (universe_.max_len == 0) throw ValidationError("event universe max_len must be at least 1");
}

bool TraceEnumerator::next(Trace& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
  } else {
    // Odometer increment; on overflow move to the next length.
    const std::size_t base = universe_.alphabet.size();
    std::size_t i = digits_.size();
    while (i > 0) {
      --i;
      if (++digits_[i] < base) break;
      digits_[i] = 0;
      if (i == 0) {
        if (digits_.size() == universe_.max_len) {
          done_ = true;
          return false;
        }
        digits_.assign(digits_.size() + 1, 0);
        break;
      }
    }
    if (digits_.empty()) {
      digits_.assign(1, 0);
    }
  }
  out.events.resize(digits_.size());
  for (std::size_t k = 0; k < digits_.size(); ++k) {
    out.events[k] = universe_.alphabet[digits_[k]];
    out.events[k].seq = k + 1;
  }
  return true;
}

void for_each_trace(const EventUniverse& universe, const std::function<void(const Trace&)>& fn) {
  TraceEnumerator gen(universe);
  Trace t;
  while (gen.next(t)) fn(t);
}

Verdict brute_force_verify(const PolicySpec& policy, const MonitorAutomaton& monitor, const EventUniverse& universe) {
  Verdict verdict;
  ModuleRegistry registry;
  registry.add(policy);
  for_each_trace(universe, [&](const Trace& input) {
    ++verdict.traces_checked;
    registry.reset();
    bool compliant = check(input, monitor).empty();
    verdict.compliant_inputs += compliant ? 1 : 0;

    std::optional<Trace> output;
    try {
      output = registry.enforce_trace(input).trace;
    } catch (const EnforcementError&) {
    }
    if (!output || !check(*output, monitor).empty()) {
      verdict.sound = false;
      if (verdict.unsound_counterexamples.size() < max_counterexamples)
        verdict.unsound_counterexamples.push_back(input);
    }
    if (compliant && (!output || serialize_trace(*output) != serialize_trace(input))) {
      verdict.transparent = false;
      if (verdict.intransparent_counterexamples.size() < max_counterexamples)
        verdict.intransparent_counterexamples.push_back(input);
    }
  });
  return verdict;
}

}  // namespace enforcekit
