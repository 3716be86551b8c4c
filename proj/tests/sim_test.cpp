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

#include <gtest/gtest.h>

#include "enforcekit/error.hpp"
#include "enforcekit/sim.hpp"
#include "test_util.hpp"

namespace enforcekit {
namespace {

using testing::catalog;
using testing::scenario;

ModuleRegistry registry_with(std::initializer_list<const char*> files) {
  ModuleRegistry reg;
  for (const char* f : files) reg.add(parse_policy(catalog(f)));
  return reg;
}

std::size_t synthetic_named(const Trace& t, const std::string& name) {
  return std::count_if(t.events.begin(), t.events.end(),
                       [&](const Event& e) { return e.synthetic && e.name == name; });
}

TEST(BuiltinLifecycle, Activity) {
  auto m = builtin_lifecycle("activity");
  Trace t;
  for (const char* cb : {"onCreate", "onResume", "onPause", "onResume", "onPause", "onDestroy"})
    t.events.push_back(make_callback(cb, "A1"));
  renumber(t);
  EXPECT_TRUE(validate_lifecycle(t, m, "A1").empty());
  EXPECT_FALSE(m.next("created", "onCreate"));
  EXPECT_FALSE(m.next("initial", "onPause"));
}

TEST(BuiltinLifecycle, ReactRejectsUnmountBeforeMount) {
  auto m = builtin_lifecycle("react-component");
  Trace t{{make_callback("componentWillUnmount", "C1")}};
  renumber(t);
  EXPECT_EQ(validate_lifecycle(t, m, "C1").size(), 1u);
}

TEST(BuiltinLifecycle, OsgiBundle) {
  auto m = builtin_lifecycle("osgi-bundle");
  EXPECT_EQ(m.states(), (std::set<std::string>{"installed", "started", "stopped"}));
  EXPECT_EQ(m.next("started", "stop"), "stopped");
  EXPECT_EQ(m.next("stopped", "start"), "started");
}

TEST(BuiltinLifecycle, UnknownName) { EXPECT_THROW(builtin_lifecycle("vulkan"), LookupError); }

TEST(ParseScenario, Plumeria) {
  auto sc = parse_scenario(scenario("plumeria-leak.scn"));
  EXPECT_EQ(sc.name, "plumeria-leak");
  EXPECT_EQ(sc.lifecycle, "activity");
  EXPECT_EQ(sc.components, (std::vector<std::string>{"A1", "A2"}));
  EXPECT_EQ(sc.steps.size(), 9u);
  EXPECT_EQ(std::get<steps::ApiCall>(sc.steps[2]), (steps::ApiCall{"A1", "Camera.open", {}}));
}

TEST(ParseScenario, Errors) {
  EXPECT_THROW(parse_scenario("component A\nlc B onCreate"), ScenarioError);
  EXPECT_THROW(parse_scenario("component A\nfly A"), ParseError);
  EXPECT_THROW(parse_scenario("lifecycle vulkan"), ParseError);
  EXPECT_THROW(parse_scenario("toggle M maybe"), ParseError);
  EXPECT_THROW(parse_scenario("component A\ncall A x k"), ParseError);
  try {
    parse_scenario("component A\n\ncall A x k=1 k=2");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseScenario, CustomResources) {
  auto sc = parse_scenario("resource Mic Mic.start Mic.stop\nresource Sub subscribe unsubscribe key=topic shared");
  ASSERT_EQ(sc.resources.size(), 2u);
  EXPECT_EQ(sc.resources[1], (ResourceModel{"Sub", "subscribe", "unsubscribe", "topic", false}));
}

TEST(RunScenario, PlumeriaWithoutEnforcement) {
  auto r = run_scenario(parse_scenario(scenario("plumeria-leak.scn")));
  ASSERT_EQ(r.leaks.leaks.size(), 1u);
  EXPECT_EQ(r.leaks.leaks[0].component, "A1");
  EXPECT_EQ(r.leaks.leaks[0].resource, "Camera");
  EXPECT_EQ(r.leaks.leaks[0].state, "paused");
  ASSERT_EQ(r.leaks.denied.size(), 1u);
  EXPECT_EQ(r.leaks.denied[0].component, "A2");
  EXPECT_EQ(r.leaks.denied[0].holder, "A1");
  EXPECT_EQ(r.trace.size(), 9u);
}

TEST(RunScenario, PlumeriaRepaired) {
  auto reg = registry_with({"camera_release.policy"});
  auto r = run_scenario(parse_scenario(scenario("plumeria-leak.scn")), &reg);
  EXPECT_TRUE(r.leaks.leaks.empty());
  EXPECT_TRUE(r.leaks.denied.empty());
  EXPECT_EQ(synthetic_named(r.trace, "Camera.release"), 1u);
  EXPECT_EQ(r.trace.size(), 10u);
  EXPECT_EQ(format_event(r.trace.events[3]), "!api:Camera.release@A1");
  EXPECT_EQ(format_event(r.trace.events[4]), "cb:onPause@A1");
  EXPECT_EQ(r.enforcement.total_inserted(), 1u);
}

TEST(RunScenario, CompliantTwinsAreUntouched) {
  const std::pair<const char*, const char*> twins[] = {
      {"plumeria-compliant.scn", "camera_release.policy"},
      {"osgi-stop-compliant.scn", "osgi_unregister.policy"},
      {"react-timer-compliant.scn", "react_cleanup.policy"},
  };
  for (const auto& [scn, pol] : twins) {
    auto sc = parse_scenario(scenario(scn));
    auto reg = registry_with({pol});
    auto plain = run_scenario(sc);
    auto enforced = run_scenario(sc, &reg);
    EXPECT_EQ(plain.trace, enforced.trace) << scn;
    EXPECT_EQ(plain.leaks, LeakReport{}) << scn;
    EXPECT_EQ(enforced.leaks, LeakReport{}) << scn;
  }
}

TEST(RunScenario, FaultyScenariosAreRepaired) {
  const std::tuple<const char*, const char*, std::size_t> cases[] = {
      {"plumeria-leak.scn", "camera_release.policy", 1},
      {"osgi-stop-leak.scn", "osgi_unregister.policy", 2},
      {"react-timer-leak.scn", "react_cleanup.policy", 1},
  };
  for (const auto& [scn, pol, leaks] : cases) {
    auto sc = parse_scenario(scenario(scn));
    auto reg = registry_with({pol});
    EXPECT_EQ(run_scenario(sc).leaks.leaks.size(), leaks) << scn;
    EXPECT_TRUE(run_scenario(sc, &reg).leaks.leaks.empty()) << scn;
  }
}

TEST(RunScenario, AllInactiveMatchesNoRegistry) {
  for (const char* scn : {"plumeria-leak.scn", "osgi-stop-leak.scn", "react-timer-leak.scn"}) {
    auto sc = parse_scenario(scenario(scn));
    auto reg = registry_with({"camera_release.policy", "osgi_unregister.policy", "react_cleanup.policy"});
    for (const char* name : {"CameraRelease", "OsgiUnregister", "ReactTimerCleanup"}) reg.set_active(name, false);
    auto a = run_scenario(sc);
    auto b = run_scenario(sc, &reg);
    EXPECT_EQ(a.trace, b.trace) << scn;
    EXPECT_EQ(a.leaks, b.leaks) << scn;
  }
}

TEST(RunScenario, TracesAreLifecycleLegal) {
  auto reg = registry_with({"camera_release.policy", "osgi_unregister.policy", "react_cleanup.policy"});
  for (const char* scn : {"plumeria-leak.scn", "plumeria-compliant.scn", "osgi-stop-leak.scn",
                          "osgi-stop-compliant.scn", "react-timer-leak.scn", "react-timer-compliant.scn"}) {
    auto sc = parse_scenario(scenario(scn));
    auto model = builtin_lifecycle(sc.lifecycle);
    for (auto* r : {static_cast<ModuleRegistry*>(nullptr), &reg}) {
      reg.reset();
      auto out = run_scenario(sc, r);
      for (const auto& c : sc.components) EXPECT_TRUE(validate_lifecycle(out.trace, model, c).empty()) << scn;
    }
  }
}

TEST(RunScenario, IllegalLifecycleStep) {
  auto sc = parse_scenario("component A1\nlc A1 onCreate\nlc A1 onPause");
  try {
    run_scenario(sc);
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.step(), 2u);
  }
}

TEST(RunScenario, ToggleSteps) {
  auto text = scenario("plumeria-leak.scn");
  auto off = parse_scenario("toggle CameraRelease off\n" + text);
  auto reg = registry_with({"camera_release.policy"});
  EXPECT_EQ(run_scenario(off, &reg).leaks.leaks.size(), 1u);
  EXPECT_EQ(run_scenario(off).leaks.leaks.size(), 1u);

  auto unknown = parse_scenario("toggle Nope on\n" + text);
  auto reg2 = registry_with({"camera_release.policy"});
  EXPECT_THROW(run_scenario(unknown, &reg2), ScenarioError);
  EXPECT_NO_THROW(run_scenario(unknown));
}

TEST(RunScenario, SharedResourcesNeverDenyOrLeak) {
  auto sc = parse_scenario(
      "lifecycle react-component\nresource Sub subscribe unsubscribe key=topic shared\n"
      "component C1\ncomponent C2\nlc C1 componentDidMount\nlc C2 componentDidMount\n"
      "call C1 subscribe topic=t\ncall C2 subscribe topic=t\nlc C1 componentWillUnmount");
  auto r = run_scenario(sc);
  EXPECT_EQ(r.leaks, LeakReport{});
}

TEST(RunScenario, OsgiFanOutOrder) {
  auto reg = registry_with({"osgi_unregister.policy"});
  auto r = run_scenario(parse_scenario(scenario("osgi-stop-leak.scn")), &reg);
  ASSERT_EQ(r.trace.size(), 6u);
  EXPECT_EQ(format_event(r.trace.events[3]), "!api:unregisterService@B1 service=S1");
  EXPECT_EQ(format_event(r.trace.events[4]), "!api:unregisterService@B1 service=S2");
  EXPECT_EQ(format_event(r.trace.events[5]), "cb:stop@B1");
}

}  // namespace
}  // namespace enforcekit
