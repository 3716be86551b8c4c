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

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "enforcekit/enforcer.hpp"
#include "enforcekit/error.hpp"
#include "enforcekit/oracle.hpp"
#include "enforcekit/policy.hpp"
#include "enforcekit/sim.hpp"

namespace enforcekit::cli {
namespace {

// Enumeration budget for `verify`.
constexpr std::uint64_t max_verify_traces = 1'000'000;

struct ReadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReadError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReadError("cannot write " + path);
  out << text;
}

std::string trace_text(const Trace& t) {
  auto s = serialize_trace(t);
  if (!s.empty()) s += '\n';
  return s;
}

enum class Format { text, structured };

struct RunConfig {
  std::vector<std::string> policy_paths;
  std::string monitor_path;
  std::string input_path;
  std::string out_path;
  std::vector<std::string> deactivate;
  std::optional<std::size_t> depth;
  Format format = Format::text;
  std::string alphabet;
  std::size_t max_len = 0;
};

std::size_t depth_limit(const RunConfig& cfg) {
  if (cfg.depth) {
    if (*cfg.depth == 0) throw UsageError("--depth must be positive");
    return *cfg.depth;
  }
  if (const char* env = std::getenv("ENFORCEKIT_DEPTH"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    auto v = std::strtoull(env, &end, 10);
    if (*end != '\0' || v == 0) throw UsageError(std::string("ENFORCEKIT_DEPTH must be a positive integer, got '") + env + "'");
    return static_cast<std::size_t>(v);
  }
  return ModuleRegistry::default_insert_depth_limit;
}

ModuleRegistry build_registry(const RunConfig& cfg) {
  ModuleRegistry registry(depth_limit(cfg));
  for (const auto& path : cfg.policy_paths) registry.add(parse_policy(read_file(path)));
  for (const auto& name : cfg.deactivate) registry.set_active(name, false);
  return registry;
}

bool is_monitor_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return line.compare(pos, 7, "monitor") == 0;
  }
  return false;
}

std::string record_value(const std::string& v) {
  if (v.find_first_of(" \"=") == std::string::npos && !v.empty()) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void print_report(const EnforcementReport& report, const ModuleRegistry& registry, Format format, std::ostream& out) {
  if (format == Format::structured) {
    for (std::size_t i = 0; i < report.modules.size(); ++i) {
      const auto& m = report.modules[i];
      out << "record=module module=" << m.module << " active=" << (registry.modules()[i].active ? "true" : "false")
          << " inserted=" << m.inserted << " suppressed=" << m.suppressed << " passed=" << m.passed << '\n';
    }
    for (const auto& e : report.edits)
      out << "record=edit seq=" << e.seq << " module=" << e.module << " action=" << to_string(e.action)
          << " event=" << record_value(format_event(e.event)) << '\n';
    out << "record=total inserted=" << report.total_inserted() << " suppressed=" << report.total_suppressed() << '\n';
    return;
  }
  out << std::left << std::setw(24) << "module" << std::setw(10) << "active" << std::setw(10) << "inserted"
      << std::setw(12) << "suppressed" << "passed\n";
  for (std::size_t i = 0; i < report.modules.size(); ++i) {
    const auto& m = report.modules[i];
    out << std::setw(24) << m.module << std::setw(10) << (registry.modules()[i].active ? "yes" : "no")
        << std::setw(10) << m.inserted << std::setw(12) << m.suppressed << m.passed << '\n';
  }
  if (!report.edits.empty()) {
    out << "edits:\n";
    for (const auto& e : report.edits)
      out << "  seq " << std::setw(6) << e.seq << std::setw(24) << e.module << std::setw(10) << to_string(e.action)
          << format_event(e.event) << '\n';
  }
  out << "inserted=" << report.total_inserted() << " suppressed=" << report.total_suppressed() << '\n';
}

int cmd_check(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
  std::size_t errors = 0;
  std::size_t warnings = 0;
  bool unreadable = false;
  for (const auto& path : paths) {
    std::string text;
    try {
      text = read_file(path);
    } catch (const ReadError& e) {
      err << "error: " << e.what() << '\n';
      unreadable = true;
      continue;
    }
    Diagnostics diags;
    try {
      diags = is_monitor_text(text) ? validate_monitor(parse_monitor(text)) : validate_policy(parse_policy(text));
    } catch (const Error& e) {
      out << path << ": error: " << e.what() << '\n';
      ++errors;
      continue;
    }
    for (const auto& d : diags) out << path << ": " << to_string(d.severity) << ": [" << d.code << "] " << d.message << '\n';
    errors += count_severity(diags, Severity::error);
    warnings += count_severity(diags, Severity::warning);
  }
  out << errors << (errors == 1 ? " error, " : " errors, ") << warnings << (warnings == 1 ? " warning" : " warnings")
      << '\n';
  if (unreadable) return exit_usage;
  return errors == 0 ? exit_ok : exit_failure;
}

int cmd_enforce(const RunConfig& cfg, std::ostream& out) {
  auto registry = build_registry(cfg);
  auto trace = parse_trace(read_file(cfg.input_path));
  auto result = registry.enforce_trace(trace);
  if (cfg.out_path.empty()) {
    out << trace_text(result.trace);
  } else {
    write_file(cfg.out_path, trace_text(result.trace));
  }
  print_report(result.report, registry, cfg.format, out);
  return exit_ok;
}

void print_leaks(const char* title, const LeakReport& r, std::ostream& out) {
  if (r.leaks.empty() && r.denied.empty()) return;
  out << title << ":\n";
  for (const auto& l : r.leaks)
    out << "  leak: " << l.component << " entered " << l.state << " holding " << l.resource << " (seq " << l.seq
        << ")\n";
  for (const auto& d : r.denied)
    out << "  denied: " << d.component << " could not acquire " << d.resource << " held by " << d.holder << " (seq "
        << d.seq << ")\n";
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  auto scenario = parse_scenario(read_file(cfg.input_path));
  auto baseline = run_scenario(scenario, nullptr);
  std::optional<ModuleRegistry> registry;
  if (!cfg.policy_paths.empty()) registry.emplace(build_registry(cfg));
  auto enforced = run_scenario(scenario, registry ? &*registry : nullptr);

  const auto& b = baseline.leaks;
  const auto& e = enforced.leaks;
  if (cfg.format == Format::structured) {
    out << "record=scenario name=" << scenario.name << '\n';
    out << "record=run mode=unenforced leaks=" << b.leaks.size() << " denied=" << b.denied.size()
        << " inserted=0 suppressed=0\n";
    out << "record=run mode=enforced leaks=" << e.leaks.size() << " denied=" << e.denied.size()
        << " inserted=" << enforced.enforcement.total_inserted()
        << " suppressed=" << enforced.enforcement.total_suppressed() << '\n';
  } else {
    out << "scenario " << scenario.name << '\n';
    out << std::left << std::setw(20) << "" << std::setw(12) << "unenforced" << "enforced\n";
    out << std::setw(20) << "leaks" << std::setw(12) << b.leaks.size() << e.leaks.size() << '\n';
    out << std::setw(20) << "denied acquires" << std::setw(12) << b.denied.size() << e.denied.size() << '\n';
    out << std::setw(20) << "inserted events" << std::setw(12) << 0 << enforced.enforcement.total_inserted() << '\n';
    out << std::setw(20) << "suppressed events" << std::setw(12) << 0 << enforced.enforcement.total_suppressed()
        << '\n';
    print_leaks("unenforced", b, out);
    print_leaks("enforced", e, out);
  }

  if (cfg.out_path.empty()) {
    out << "--- unenforced trace\n" << trace_text(baseline.trace);
    out << "--- enforced trace\n" << trace_text(enforced.trace);
  } else {
    write_file(cfg.out_path + ".unenforced.trace", trace_text(baseline.trace));
    write_file(cfg.out_path + ".enforced.trace", trace_text(enforced.trace));
  }
  out << "leaks: " << b.leaks.size() << " → " << e.leaks.size() << '\n';
  return e.leaks.empty() ? exit_ok : exit_leaks;
}

std::vector<Event> parse_alphabet(const std::string& spec) {
  std::vector<Event> events;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    auto item = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    auto first = item.find_first_not_of(' ');
    auto last = item.find_last_not_of(' ');
    if (first == std::string::npos) throw UsageError("empty entry in --alphabet");
    events.push_back(parse_event(item.substr(first, last - first + 1)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return events;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto alphabet = parse_alphabet(cfg.alphabet);
  if (cfg.max_len == 0) throw UsageError("--max-len must be at least 1");
  auto total = trace_count(alphabet.size(), cfg.max_len);
  if (total > max_verify_traces) {
    err << "error: " << alphabet.size() << " events with --max-len " << cfg.max_len << " exceeds the enumeration bound of "
        << max_verify_traces << " traces; use a smaller --max-len\n";
    return exit_usage;
  }
  if (cfg.policy_paths.size() != 1) throw UsageError("verify takes exactly one --policy");
  auto policy = parse_policy(read_file(cfg.policy_paths.front()));
  auto monitor = parse_monitor(read_file(cfg.monitor_path));

  auto verdict = brute_force_verify(policy, monitor, EventUniverse{alphabet, cfg.max_len});
  out << "policy " << policy.name << " vs monitor " << monitor.name << '\n';
  out << "traces: " << verdict.traces_checked << " (" << verdict.compliant_inputs << " compliant)\n";
  out << "sound: " << (verdict.sound ? "yes" : "NO") << ", transparent: " << (verdict.transparent ? "yes" : "NO")
      << '\n';
  auto dump = [&](const char* title, const std::vector<Trace>& traces) {
    if (traces.empty()) return;
    out << title << ":\n";
    for (const auto& t : traces) {
      out << "  [";
      for (std::size_t i = 0; i < t.events.size(); ++i) out << (i ? ", " : "") << format_event(t.events[i]);
      out << "]\n";
    }
  };
  dump("unsound counterexamples", verdict.unsound_counterexamples);
  dump("intransparent counterexamples", verdict.intransparent_counterexamples);
  return verdict.sound && verdict.transparent ? exit_ok : exit_failure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Runtime enforcement of lifecycle-based policies", "enforcekit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::vector<std::string> check_paths;
  std::string format = "text";

  auto* check = app.add_subcommand("check", "Parse and validate policy and monitor files");
  check->add_option("files", check_paths, "Policy or monitor files")->required();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-p,--policy", cfg.policy_paths, "Policy file (repeatable; priority follows order)");
    sub->add_option("-o,--out", cfg.out_path, "Output path");
    sub->add_option("--deactivate", cfg.deactivate, "Deactivate the named module (repeatable)");
    sub->add_option("--depth", cfg.depth, "Insertion depth limit (default: $ENFORCEKIT_DEPTH or 16)");
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "structured"}));
  };

  auto* enforce = app.add_subcommand("enforce", "Enforce policies over a trace file");
  enforce->add_option("trace", cfg.input_path, "Input trace")->required();
  add_common(enforce);

  auto* simulate = app.add_subcommand("simulate", "Run a scenario with and without enforcement");
  simulate->add_option("scenario", cfg.input_path, "Scenario file")->required();
  add_common(simulate);

  auto* verify = app.add_subcommand("verify", "Brute-force soundness and transparency check");
  verify->add_option("-p,--policy", cfg.policy_paths, "Policy file")->required();
  verify->add_option("-m,--monitor", cfg.monitor_path, "Monitor file")->required();
  verify->add_option("-a,--alphabet", cfg.alphabet, "Comma-separated concrete events, e.g. api:Camera.open@A1")
      ->required();
  verify->add_option("-n,--max-len", cfg.max_len, "Maximum trace length")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << sub->help();
    } else {
      err << app.help();
    }
    return exit_usage;
  }
  cfg.format = format == "structured" ? Format::structured : Format::text;

  try {
    if (check->parsed()) return cmd_check(check_paths, out, err);
    if (enforce->parsed()) {
      if (cfg.policy_paths.empty()) throw UsageError("enforce requires at least one --policy");
      return cmd_enforce(cfg, out);
    }
    if (simulate->parsed()) return cmd_simulate(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out, err);
  } catch (const ReadError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_usage;
}

}  // namespace enforcekit::cli
