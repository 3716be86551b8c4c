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

#include "dsl.hpp"

#include <cctype>
#include <set>

#include "enforcekit/error.hpp"

namespace enforcekit::dsl {
namespace {

enum class Tok { word, string, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  Position pos;
};

bool is_word_char(char c) {
  if (std::isspace(static_cast<unsigned char>(c)) != 0) return false;
  switch (c) {
    case ',': case '[': case ']': case '{': case '}':
    case '=': case ':': case '"': case '#':
      return false;
    default:
      return true;
  }
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  Position pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.pos = pos;
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      tok.kind = Tok::punct;
      tok.text = "->";
      advance(2);
    } else if (std::string_view(",[]{}=:").find(c) != std::string_view::npos) {
      tok.kind = Tok::punct;
      tok.text = std::string(1, c);
      advance(1);
    } else if (c == '"') {
      tok.kind = Tok::string;
      advance(1);
      bool closed = false;
      while (i < text.size()) {
        char d = text[i];
        if (d == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\' && i + 1 < text.size() && (text[i + 1] == '"' || text[i + 1] == '\\')) {
          tok.text += text[i + 1];
          advance(2);
          continue;
        }
        tok.text += d;
        advance(1);
      }
      if (!closed) throw ParseError(tok.pos.line, tok.pos.column, "unterminated string");
    } else {
      tok.kind = Tok::word;
      while (i < text.size() && is_word_char(text[i]) &&
             !(text[i] == '-' && i + 1 < text.size() && text[i + 1] == '>')) {
        tok.text += text[i];
        advance(1);
      }
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.pos = pos;
  out.push_back(end);
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::end: return "end of input";
    case Tok::string: return "string \"" + t.text + "\"";
    default: return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  RawDocument document() {
    RawDocument doc;
    const Token& head = peek();
    if (is_word("policy")) {
      doc.kind = RawDocument::Kind::policy;
    } else if (is_word("monitor")) {
      doc.kind = RawDocument::Kind::monitor;
    } else {
      fail(head, "expected 'policy' or 'monitor', found " + describe(head));
    }
    take();
    doc.name = identifier("policy name");
    while (!is_word("end")) {
      const Token& kw = peek();
      if (kw.kind != Tok::word) fail(kw, "expected a clause keyword, found " + describe(kw));
      if (kw.text == "statement") {
        take();
        once(doc.statement.has_value(), kw);
        const Token& s = peek();
        if (s.kind != Tok::string) fail(s, "expected quoted statement, found " + describe(s));
        doc.statement = take().text;
      } else if (kw.text == "instantiate") {
        take();
        once(doc.instantiate.has_value(), kw);
        doc.instantiate_pos = kw.pos;
        doc.instantiate = instantiation();
      } else if (kw.text == "alphabet") {
        take();
        once(seen_alphabet_, kw);
        seen_alphabet_ = true;
        do {
          doc.alphabet_pos.push_back(peek().pos);
          doc.alphabet.push_back(pattern());
        } while (accept(","));
      } else if (kw.text == "initial") {
        take();
        once(doc.initial.has_value(), kw);
        doc.initial_pos = peek().pos;
        doc.initial = identifier("initial state");
      } else if (kw.text == "state") {
        take();
        doc.states.push_back(state(doc.kind));
      } else if (kw.text == "default") {
        take();
        if (doc.kind == RawDocument::Kind::monitor) fail(kw, "monitors have no 'default' clause");
        once(doc.default_action.has_value(), kw);
        doc.default_pos = kw.pos;
        const Token& a = peek();
        if (is_word("allow")) {
          doc.default_action = DefaultAction::allow;
        } else if (is_word("suppress")) {
          doc.default_action = DefaultAction::suppress;
        } else {
          fail(a, "expected 'allow' or 'suppress', found " + describe(a));
        }
        take();
      } else if (kw.text == "on") {
        fail(kw, "'on' outside of a state block");
      } else {
        fail(kw, "unknown clause '" + kw.text + "'");
      }
    }
    take();
    if (peek().kind != Tok::end) fail(peek(), "unexpected " + describe(peek()) + " after 'end'");
    return doc;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::end) ++pos_;
    return t;
  }
  bool is_word(std::string_view w) const { return peek().kind == Tok::word && peek().text == w; }
  bool accept(std::string_view punct) {
    if (peek().kind == Tok::punct && peek().text == punct) {
      take();
      return true;
    }
    return false;
  }
  void expect(std::string_view punct) {
    if (!accept(punct)) fail(peek(), "expected '" + std::string(punct) + "', found " + describe(peek()));
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.pos.line, t.pos.column, msg);
  }
  static void once(bool seen, const Token& kw) {
    if (seen) fail(kw, "duplicate '" + kw.text + "' clause");
  }

  std::string identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::word || t.text.empty() || t.text.front() == '$')
      fail(t, std::string("expected ") + what + ", found " + describe(t));
    return take().text;
  }

  Instantiation instantiation() {
    Instantiation inst;
    const Token& t = peek();
    if (is_word("singleton")) {
      inst.mode = Instantiation::Mode::singleton;
    } else if (is_word("per-component")) {
      inst.mode = Instantiation::Mode::per_component;
    } else if (is_word("per-binder")) {
      inst.mode = Instantiation::Mode::per_binder;
      take();
      inst.binder_key = identifier("binder attribute key");
      return inst;
    } else {
      fail(t, "expected singleton, per-component or per-binder, found " + describe(t));
    }
    take();
    return inst;
  }

  EventKind kind_keyword() {
    const Token& t = peek();
    if (is_word("cb")) {
      take();
      return EventKind::callback;
    }
    if (is_word("api")) {
      take();
      return EventKind::api_call;
    }
    fail(t, "expected 'cb' or 'api', found " + describe(t));
  }

  AttrConstraints attr_block() {
    AttrConstraints attrs;
    if (!accept("{")) return attrs;
    do {
      const Token& k = peek();
      std::string key = identifier("attribute key");
      expect("=");
      const Token& v = peek();
      AttrValue value;
      if (v.kind == Tok::string) {
        value = AttrValue::literal(v.text);
      } else if (v.kind == Tok::word && v.text.size() > 1 && v.text.front() == '$') {
        value = AttrValue::binder(v.text.substr(1));
      } else if (v.kind == Tok::word && v.text != "$") {
        value = AttrValue::literal(v.text);
      } else {
        fail(v, "expected attribute value, found " + describe(v));
      }
      take();
      if (!attrs.emplace(key, std::move(value)).second) fail(k, "duplicate attribute '" + key + "'");
    } while (accept(","));
    expect("}");
    return attrs;
  }

  EventPattern pattern() {
    EventPattern p;
    p.kind = kind_keyword();
    p.name = identifier("event name");
    const Token& brace = peek();
    p.attrs = attr_block();
    int binders = 0;
    for (const auto& [k, v] : p.attrs) binders += v.is_binder() ? 1 : 0;
    if (binders > 1) fail(brace, "at most one binder per pattern");
    return p;
  }

  OutputTemplate output_template() {
    OutputTemplate out;
    expect("[");
    if (accept("]")) return out;
    bool seen_input = false;
    do {
      const Token& t = peek();
      if (is_word("$in")) {
        if (seen_input) fail(t, "$in appears more than once");
        seen_input = true;
        take();
        out.items.emplace_back(InputPlaceholder{});
      } else {
        SynthEvent s;
        s.kind = kind_keyword();
        s.name = identifier("event name");
        s.attrs = attr_block();
        out.items.emplace_back(std::move(s));
      }
    } while (accept(","));
    expect("]");
    return out;
  }

  RawState state(RawDocument::Kind kind) {
    RawState st;
    st.pos = peek().pos;
    st.name = identifier("state name");
    if (is_word("error")) {
      if (kind == RawDocument::Kind::policy) fail(peek(), "only monitor states may be flagged 'error'");
      take();
      st.error = true;
    }
    expect(":");
    while (is_word("on")) {
      RawTransition tr;
      tr.pos = take().pos;
      tr.pattern = pattern();
      expect("->");
      tr.to_pos = peek().pos;
      tr.to = identifier("target state");
      if (is_word("emit")) {
        if (kind == RawDocument::Kind::monitor) fail(peek(), "monitor transitions carry no 'emit' clause");
        take();
        tr.emit = output_template();
      } else if (kind == RawDocument::Kind::policy) {
        fail(peek(), "expected 'emit', found " + describe(peek()));
      }
      st.transitions.push_back(std::move(tr));
    }
    return st;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool seen_alphabet_ = false;
};

[[noreturn]] void semantic(const Position& pos, const std::string& msg) {
  throw ValidationError("line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " + msg);
}

bool is_plain_word(std::string_view s) {
  if (s.empty() || s.front() == '$') return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_word_char(s[i])) return false;
    if (s[i] == '-' && i + 1 < s.size() && s[i + 1] == '>') return false;
  }
  return true;
}

}  // namespace

RawDocument parse_document(std::string_view text) { return Parser(tokenize(text)).document(); }

void check_common(const RawDocument& doc) {
  std::set<std::string> names;
  for (const auto& st : doc.states)
    if (!names.insert(st.name).second) semantic(st.pos, "duplicate state " + st.name);
  if (!doc.initial) semantic({1, 1}, "missing 'initial' clause");
  if (!names.contains(*doc.initial)) semantic(doc.initial_pos, "unknown state " + *doc.initial);

  const auto mode = doc.instantiate ? doc.instantiate->mode : Instantiation::Mode::singleton;
  bool any_binder = false;
  std::set<std::string> binder_names;
  for (std::size_t i = 0; i < doc.alphabet.size(); ++i) {
    const auto& p = doc.alphabet[i];
    for (std::size_t j = 0; j < i; ++j)
      if (doc.alphabet[j] == p) semantic(doc.alphabet_pos[i], "duplicate alphabet pattern " + format_pattern(p));
    if (auto b = p.binder()) {
      any_binder = true;
      if (mode != Instantiation::Mode::per_binder)
        semantic(doc.alphabet_pos[i], "binder $" + b->second + " requires per-binder instancing");
      if (b->first != doc.instantiate->binder_key)
        semantic(doc.alphabet_pos[i], "binder on attribute '" + b->first + "' but instances are keyed by '" +
                                          doc.instantiate->binder_key + "'");
      binder_names.insert(b->second);
    }
  }
  if (mode == Instantiation::Mode::per_binder && !any_binder)
    semantic(doc.instantiate_pos, "per-binder instancing requires at least one pattern with a binder");

  auto check_binder_refs = [&](const AttrConstraints& attrs, const Position& pos) {
    for (const auto& [k, v] : attrs)
      if (v.is_binder() && !binder_names.contains(v.text)) semantic(pos, "unknown binder $" + v.text);
  };

  for (const auto& st : doc.states) {
    for (const auto& tr : st.transitions) {
      bool in_alphabet = false;
      for (const auto& p : doc.alphabet) in_alphabet = in_alphabet || p == tr.pattern;
      if (!in_alphabet) semantic(tr.pos, "off-alphabet pattern " + format_pattern(tr.pattern));
      if (!names.contains(tr.to)) semantic(tr.to_pos, "unknown state " + tr.to);
      if (tr.emit) {
        for (const auto& item : tr.emit->items)
          if (const auto* s = std::get_if<SynthEvent>(&item)) check_binder_refs(s->attrs, tr.pos);
      }
    }
  }
}

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_attr_constraints(const AttrConstraints& attrs) {
  if (attrs.empty()) return {};
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : attrs) {
    if (!first) out += ", ";
    first = false;
    out += k;
    out += '=';
    if (v.is_binder()) {
      out += '$';
      out += v.text;
    } else {
      out += is_plain_word(v.text) ? v.text : quote(v.text);
    }
  }
  out += '}';
  return out;
}

std::string format_instantiation(const Instantiation& inst) {
  switch (inst.mode) {
    case Instantiation::Mode::singleton: return "singleton";
    case Instantiation::Mode::per_component: return "per-component";
    case Instantiation::Mode::per_binder: return "per-binder " + inst.binder_key;
  }
  return {};
}

std::string format_alphabet(const std::vector<EventPattern>& alphabet) {
  std::string out;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (i != 0) out += ", ";
    out += format_pattern(alphabet[i]);
  }
  return out;
}

}  // namespace enforcekit::dsl
