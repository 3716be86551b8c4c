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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "enforcekit/enforcer.hpp"
#include "enforcekit/oracle.hpp"
#include "enforcekit/sim.hpp"
#include "test_util.hpp"

namespace {

using namespace enforcekit;
using testing::catalog;
using testing::scenario;
using testing::slurp;
using testing::source_path;

struct Failure {
  std::string why;
};

void require(bool cond, const std::string& why) {
  if (!cond) throw Failure{why};
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli_run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = cli::run(args, out, err);
  return {code, out.str() + err.str()};
}

std::vector<Event> camera_alphabet() {
  return {make_api_call("Camera.open", "A1"), make_api_call("Camera.release", "A1"), make_callback("onPause", "A1"),
          make_callback("onResume", "A1")};
}

const std::string kAlphabetFlag = "api:Camera.open@A1,api:Camera.release@A1,cb:onPause@A1,cb:onResume@A1";

class Suite {
 public:
  void criterion(const std::string& name, double budget_seconds, const std::function<std::string()>& body) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = body();
    } catch (const Failure& f) {
      ok = false;
      detail = f.why;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && elapsed >= budget_seconds) {
      ok = false;
      detail += " (over budget)";
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3fs / %.0fs", elapsed, budget_seconds);
    std::cout << (ok ? "PASS " : "FAIL ") << name << " [" << timing << "] " << detail << std::endl;
    failures_ += ok ? 0 : 1;
  }

  int exit_code() const { return failures_ == 0 ? 0 : 1; }

 private:
  int failures_ = 0;
};

}  // namespace

int main() {
  namespace fs = std::filesystem;
  auto tmp = fs::temp_directory_path() / ("enforcekit_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(tmp);

  const auto camera_policy = source_path("catalog/camera_release.policy");
  const auto camera_monitor = source_path("catalog/camera.monitor");
  const auto plumeria = source_path("scenarios/plumeria-leak.scn");
  constexpr std::uint64_t kCameraUniverseSize = 87381;  // 1 + 4 + ... + 4^8

  Suite suite;

  suite.criterion("plumeria-repair", 1.0, [&] {
    auto sc = parse_scenario(scenario("plumeria-leak.scn"));
    auto base = run_scenario(sc);
    require(base.leaks.leaks.size() == 1, "unenforced leaks = " + std::to_string(base.leaks.leaks.size()));
    require(!base.leaks.denied.empty(), "no denied acquire without enforcement");

    ModuleRegistry reg;
    reg.add(parse_policy(catalog("camera_release.policy")));
    auto fixed = run_scenario(sc, &reg);
    require(fixed.leaks.leaks.empty(), "enforced leaks = " + std::to_string(fixed.leaks.leaks.size()));
    require(fixed.leaks.denied.empty(), "enforced denied = " + std::to_string(fixed.leaks.denied.size()));
    std::size_t releases = 0;
    for (std::size_t i = 0; i < fixed.trace.size(); ++i) {
      const auto& e = fixed.trace.events[i];
      if (!(e.synthetic && e.name == "Camera.release")) continue;
      ++releases;
      require(e.component == "A1", "synthetic release attributed to " + e.component);
      require(i + 1 < fixed.trace.size() && format_event(fixed.trace.events[i + 1]) == "cb:onPause@A1",
              "synthetic release not immediately before A1 onPause");
    }
    require(releases == 1, "synthetic Camera.release count = " + std::to_string(releases));

    auto cli = cli_run({"simulate", plumeria, "-p", camera_policy, "-o", (tmp / "plumeria").string()});
    require(cli.code == 0, "simulate exit " + std::to_string(cli.code));
    require(cli.out.find("leaks: 1 → 0") != std::string::npos, "missing 'leaks: 1 → 0'");
    return std::string("leaks 1 -> 0, denied ") + std::to_string(base.leaks.denied.size()) + " -> 0, 1 release";
  });

  Verdict camera_verdict;
  suite.criterion("soundness-desk-scale", 30.0, [&] {
    camera_verdict = brute_force_verify(parse_policy(catalog("camera_release.policy")),
                                        parse_monitor(catalog("camera.monitor")), {camera_alphabet(), 8});
    require(camera_verdict.traces_checked == kCameraUniverseSize,
            "traces = " + std::to_string(camera_verdict.traces_checked));
    require(camera_verdict.sound, "unsound");
    require(camera_verdict.unsound_counterexamples.empty(), "counterexamples present");
    auto cli = cli_run({"verify", "-p", camera_policy, "-m", camera_monitor, "-a", kAlphabetFlag, "-n", "8"});
    require(cli.code == 0, "verify exit " + std::to_string(cli.code));
    require(cli.out.find("sound: yes") != std::string::npos, "verify output lacks 'sound: yes'");
    return "sound over " + std::to_string(camera_verdict.traces_checked) + " traces";
  });

  suite.criterion("transparency-desk-scale", 30.0, [&] {
    require(camera_verdict.traces_checked == kCameraUniverseSize, "verification did not run");
    require(camera_verdict.transparent, "intransparent");
    require(camera_verdict.intransparent_counterexamples.empty(), "counterexamples present");
    return "transparent on " + std::to_string(camera_verdict.compliant_inputs) + " compliant inputs";
  });

  suite.criterion("idempotence", 10.0, [&] {
    ModuleRegistry reg;
    reg.add(parse_policy(catalog("camera_release.policy")));
    std::uint64_t n = 0;
    std::string bad;
    for_each_trace({camera_alphabet(), 6}, [&](const Trace& t) {
      ++n;
      reg.reset();
      auto once = reg.enforce_trace(t).trace;
      reg.reset();
      auto twice = reg.enforce_trace(once).trace;
      if (twice != once && bad.empty()) bad = serialize_trace(t);
    });
    require(bad.empty(), "not idempotent on: " + bad);
    return std::to_string(n) + " traces";
  });

  suite.criterion("catalog-health", 5.0, [&] {
    const char* files[] = {"camera_release.policy", "osgi_unregister.policy", "react_cleanup.policy",
                           "camera.monitor",        "osgi.monitor",           "react.monitor"};
    std::vector<std::string> args{"check"};
    for (const char* f : files) {
      args.push_back(source_path(std::string("catalog/") + f));
      auto text = catalog(f);
      if (std::string(f).ends_with(".policy")) {
        auto spec = parse_policy(text);
        require(parse_policy(serialize_policy(spec)) == spec, std::string("round trip differs: ") + f);
      } else {
        auto m = parse_monitor(text);
        require(parse_monitor(serialize_monitor(m)) == m, std::string("round trip differs: ") + f);
      }
    }
    auto cli = cli_run(args);
    require(cli.code == 0, "check exit " + std::to_string(cli.code));
    require(cli.out.find("0 errors, 0 warnings") != std::string::npos, "check output: " + cli.out);
    return "6 files, 0 errors, round trips exact";
  });

  suite.criterion("osgi-fan-out", 1.0, [&] {
    auto sc = parse_scenario(scenario("osgi-stop-leak.scn"));
    auto base = run_scenario(sc);
    ModuleRegistry reg;
    reg.add(parse_policy(catalog("osgi_unregister.policy")));
    auto fixed = run_scenario(sc, &reg);
    require(base.leaks.leaks.size() == 2, "unenforced leaks = " + std::to_string(base.leaks.leaks.size()));
    require(fixed.leaks.leaks.empty(), "enforced leaks = " + std::to_string(fixed.leaks.leaks.size()));
    std::vector<std::string> tail;
    std::size_t unregisters = 0;
    std::size_t stops = 0;
    for (const auto& e : fixed.trace.events) {
      if (e.synthetic && e.name == "unregisterService") {
        ++unregisters;
        tail.push_back(e.attrs.at("service"));
      }
      if (e.name == "stop") {
        ++stops;
        tail.push_back("stop");
      }
    }
    require(unregisters == 2, "synthetic unregisterService = " + std::to_string(unregisters));
    require(stops == 1, "stop emitted " + std::to_string(stops) + " times");
    require(tail == std::vector<std::string>{"S1", "S2", "stop"}, "order is not S1, S2, stop");
    auto n = fixed.trace.size();
    require(fixed.trace.events[n - 1].name == "stop" && fixed.trace.events[n - 3].synthetic,
            "unregisters not immediately before stop");
    return "S1, S2, stop; leaks 2 -> 0";
  });

  suite.criterion("react-cleanup", 1.0, [&] {
    auto sc = parse_scenario(scenario("react-timer-leak.scn"));
    auto base = run_scenario(sc);
    ModuleRegistry reg;
    reg.add(parse_policy(catalog("react_cleanup.policy")));
    auto fixed = run_scenario(sc, &reg);
    require(base.leaks.leaks.size() == 1, "unenforced leaks = " + std::to_string(base.leaks.leaks.size()));
    require(fixed.leaks.leaks.empty(), "enforced leaks = " + std::to_string(fixed.leaks.leaks.size()));
    std::size_t clears = 0;
    for (std::size_t i = 0; i < fixed.trace.size(); ++i) {
      const auto& e = fixed.trace.events[i];
      if (!(e.synthetic && e.name == "clearTimer")) continue;
      ++clears;
      require(i + 1 < fixed.trace.size() && fixed.trace.events[i + 1].name == "componentWillUnmount",
              "clearTimer not immediately before componentWillUnmount");
    }
    require(clears == 1, "synthetic clearTimer = " + std::to_string(clears));
    return "1 clearTimer; leaks 1 -> 0";
  });

  suite.criterion("activation-contract", 1.0, [&] {
    auto prefix = (tmp / "deactivated").string();
    auto cli = cli_run({"simulate", plumeria, "-p", camera_policy, "--deactivate", "CameraRelease", "-o", prefix});
    require(cli.code == 3, "exit " + std::to_string(cli.code));
    auto a = slurp(prefix + ".enforced.trace");
    auto b = slurp(prefix + ".unenforced.trace");
    require(!a.empty() && a == b, "enforced trace differs from unenforced trace");
    return "traces byte-identical, exit 3";
  });

  suite.criterion("report-consistency", 30.0, [&] {
    std::uint64_t runs = 0;
    std::string bad;
    auto consistent = [&](ModuleRegistry& reg, const Trace& t) {
      ++runs;
      reg.reset();
      auto r = reg.enforce_trace(t);
      auto lhs = static_cast<long long>(r.trace.size()) - static_cast<long long>(t.size());
      auto rhs = static_cast<long long>(r.report.total_inserted()) - static_cast<long long>(r.report.total_suppressed());
      if (lhs != rhs && bad.empty()) bad = serialize_trace(t);
    };

    ModuleRegistry camera;
    camera.add(parse_policy(catalog("camera_release.policy")));
    for_each_trace({camera_alphabet(), 8}, [&](const Trace& t) { consistent(camera, t); });

    ModuleRegistry all;
    all.add(parse_policy(catalog("camera_release.policy")));
    all.add(parse_policy(catalog("osgi_unregister.policy")));
    all.add(parse_policy(catalog("react_cleanup.policy")));
    all.add(parse_policy("policy Mute alphabet api Camera.release initial S state S: default suppress end"));
    std::vector<Event> mixed{make_api_call("Camera.open", "A1"), make_callback("onPause", "A1"),
                             make_api_call("registerService", "B1", {{"service", "S1"}}),
                             make_api_call("registerService", "B1", {{"service", "S2"}}), make_callback("stop", "B1"),
                             make_api_call("setTimer", "C1", {{"timer", "T1"}}),
                             make_callback("componentWillUnmount", "C1")};
    for_each_trace({mixed, 6}, [&](const Trace& t) { consistent(all, t); });

    require(bad.empty(), "inconsistent on: " + bad);
    return std::to_string(runs) + " runs";
  });

  fs::remove_all(tmp);
  return suite.exit_code();
}
