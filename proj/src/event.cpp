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

#include "enforcekit/event.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "enforcekit/error.hpp"

namespace enforcekit {
namespace {

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

struct Field {
  std::string_view text;
  std::size_t column;  // 1-based
};

// Splits on single spaces; an empty field (double space, leading or trailing
// space) is reported at its column.
std::vector<Field> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<Field> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(' ', start);
    auto piece = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (piece.empty()) throw ParseError(line_no, start + 1, "empty field");
    fields.push_back({piece, start + 1});
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

// Parses `[!]kind:name@component` followed by attribute fields.
Event parse_event_fields(const std::vector<Field>& fields, std::size_t first, std::size_t line_no) {
  Event ev;
  auto head = fields[first];
  std::string_view body = head.text;
  std::size_t col = head.column;
  if (!body.empty() && body.front() == '!') {
    ev.synthetic = true;
    body.remove_prefix(1);
    ++col;
  }
  auto colon = body.find(':');
  if (colon == std::string_view::npos) throw ParseError(line_no, col, "expected '<kind>:' prefix");
  auto kind = parse_kind_tag(body.substr(0, colon));
  if (!kind) throw ParseError(line_no, col, "unknown event kind '" + std::string(body.substr(0, colon)) + "'");
  ev.kind = *kind;
  auto rest = body.substr(colon + 1);
  auto at = rest.find('@');
  if (at == std::string_view::npos) throw ParseError(line_no, col + colon + 1, "expected '@<component>'");
  ev.name = std::string(rest.substr(0, at));
  ev.component = std::string(rest.substr(at + 1));
  if (ev.name.empty()) throw ParseError(line_no, col + colon + 1, "empty event name");
  if (ev.component.empty()) throw ParseError(line_no, col + colon + 2 + at, "empty component");
  if (ev.component.find('@') != std::string::npos)
    throw ParseError(line_no, col + colon + 2 + at, "component contains '@'");
  for (std::size_t i = first + 1; i < fields.size(); ++i) {
    auto f = fields[i];
    auto eq = f.text.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw ParseError(line_no, f.column, "expected attribute '<key>=<value>'");
    std::string key(f.text.substr(0, eq));
    if (!ev.attrs.emplace(key, std::string(f.text.substr(eq + 1))).second)
      throw ParseError(line_no, f.column, "duplicate attribute '" + key + "'");
  }
  return ev;
}

}  // namespace

std::string_view kind_tag(EventKind kind) { return kind == EventKind::callback ? "cb" : "api"; }

std::optional<EventKind> parse_kind_tag(std::string_view tag) {
  if (tag == "cb") return EventKind::callback;
  if (tag == "api") return EventKind::api_call;
  return std::nullopt;
}

Event make_callback(std::string name, std::string component, Attributes attrs) {
  return Event{EventKind::callback, std::move(name), std::move(component), 0, false, std::move(attrs)};
}

Event make_api_call(std::string name, std::string component, Attributes attrs) {
  return Event{EventKind::api_call, std::move(name), std::move(component), 0, false, std::move(attrs)};
}

std::string format_event(const Event& event) {
  std::string out;
  if (event.synthetic) out += '!';
  out += kind_tag(event.kind);
  out += ':';
  out += event.name;
  out += '@';
  out += event.component;
  for (const auto& [k, v] : event.attrs) {
    out += ' ';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

Event parse_event(std::string_view text) {
  if (text.empty()) throw ParseError(1, 1, "empty event");
  return parse_event_fields(split_fields(text, 1), 0, 1);
}

void renumber(Trace& trace) {
  std::uint64_t seq = 0;
  for (auto& ev : trace.events) ev.seq = ++seq;
}

Trace parse_trace(std::string_view text) {
  Trace trace;
  std::size_t line_no = 0;
  std::optional<std::uint64_t> last_seq;
  while (!text.empty() || line_no == 0) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') {
      if (text.empty()) break;
      continue;
    }
    auto fields = split_fields(line, line_no);
    if (fields.size() < 2) throw ParseError(line_no, line.size() + 1, "expected '<seq> <event>'");
    std::uint64_t seq = 0;
    auto seq_text = fields[0].text;
    auto [ptr, ec] = std::from_chars(seq_text.data(), seq_text.data() + seq_text.size(), seq);
    if (ec != std::errc{} || ptr != seq_text.data() + seq_text.size())
      throw ParseError(line_no, 1, "invalid seq '" + std::string(seq_text) + "'");
    if (last_seq && seq <= *last_seq)
      throw ValidationError("non-monotone seq at line " + std::to_string(line_no));
    last_seq = seq;
    Event ev = parse_event_fields(fields, 1, line_no);
    ev.seq = seq;
    trace.events.push_back(std::move(ev));
    if (text.empty()) break;
  }
  return trace;
}

std::string serialize_trace(const Trace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    if (i != 0) out += '\n';
    out += std::to_string(trace.events[i].seq);
    out += ' ';
    out += format_event(trace.events[i]);
  }
  return out;
}

LifecycleModel::LifecycleModel(std::string name, std::set<std::string> states, std::string initial,
                               std::set<LifecycleTransition> transitions)
    : name_(std::move(name)),
      states_(std::move(states)),
      initial_(std::move(initial)),
      transitions_(std::move(transitions)) {
  if (!states_.contains(initial_))
    throw ValidationError("lifecycle " + name_ + ": initial state " + initial_ + " is not a state");
  for (const auto& t : transitions_) {
    if (!states_.contains(t.from) || !states_.contains(t.to))
      throw ValidationError("lifecycle " + name_ + ": transition " + t.from + " --" + t.callback + "--> " + t.to +
                            " has an undeclared endpoint");
    if (has_space(t.callback) || t.callback.empty())
      throw ValidationError("lifecycle " + name_ + ": invalid callback name '" + t.callback + "'");
    if (!index_.emplace(std::pair{t.from, t.callback}, t.to).second)
      throw ValidationError("lifecycle " + name_ + ": nondeterministic on " + t.callback + " in state " + t.from);
  }
}

std::optional<std::string> LifecycleModel::next(const std::string& from, const std::string& callback) const {
  auto it = index_.find({from, callback});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Diagnostics validate_lifecycle(const Trace& trace, const LifecycleModel& model, const std::string& component) {
  Diagnostics diags;
  std::string state = model.initial();
  for (const auto& ev : trace.events) {
    if (ev.component != component || ev.kind != EventKind::callback) continue;
    if (auto to = model.next(state, ev.name)) {
      state = *to;
    } else {
      diags.push_back({Severity::error, "lifecycle",
                       ev.name + " not enabled in state " + state + " (seq " + std::to_string(ev.seq) + ")"});
    }
  }
  return diags;
}

}  // namespace enforcekit
