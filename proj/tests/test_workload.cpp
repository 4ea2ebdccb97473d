/*
 * Copyright 2026 The overbench Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include "overbench/workload.hpp"

namespace ob = overbench;

TEST(WorkloadConfig, Defaults) {
  ob::WorkloadConfig cfg;
  EXPECT_EQ(cfg.recursion_depth(), 10u);
  EXPECT_EQ(cfg.spin_ns(), 0);
  EXPECT_EQ(cfg.signature(), "monitoredMethod");
}

TEST(WorkloadConfig, RejectsInvalidValues) {
  EXPECT_THROW(ob::WorkloadConfig(0, 0), ob::ValidationError);
  EXPECT_THROW(ob::WorkloadConfig(-3, 0), ob::ValidationError);
  EXPECT_THROW(ob::WorkloadConfig(5, -1), ob::ValidationError);
  EXPECT_THROW(ob::WorkloadConfig(5, 0, ""), ob::ValidationError);
  EXPECT_NO_THROW(ob::WorkloadConfig(1, 0));
}

TEST(ExpectedChecksum, TriangularNumbers) {
  EXPECT_EQ(ob::expected_checksum(1), 1u);
  EXPECT_EQ(ob::expected_checksum(10), 55u);
  EXPECT_EQ(ob::expected_checksum(100), 5050u);
}

TEST(MonitoredCall, DepthTenFiresTwentyHooks) {
  ob::NoOpProbe inner;
  ob::CountingProbe<ob::NoOpProbe> probe(inner);
  const auto outcome = ob::execute_monitored_call(ob::WorkloadConfig{}, probe);
  EXPECT_EQ(outcome.checksum, 55u);
  EXPECT_EQ(probe.hook_firings(), 20u);
  EXPECT_EQ(probe.traces(), 1u);
  EXPECT_EQ(probe.levels_seen(), 10u);
  EXPECT_GE(outcome.duration_ns, 0);
}

TEST(MonitoredCall, DepthOneFiresOneEntryAndOneExit) {
  ob::NoOpProbe inner;
  ob::CountingProbe<ob::NoOpProbe> probe(inner);
  const auto outcome = ob::execute_monitored_call(ob::WorkloadConfig(1, 0), probe);
  EXPECT_EQ(outcome.checksum, 1u);
  EXPECT_EQ(probe.entries(), 1u);
  EXPECT_EQ(probe.exits(), 1u);
}

TEST(MonitoredCall, HookCountsScaleWithCalls) {
  ob::NoOpProbe inner;
  ob::CountingProbe<ob::NoOpProbe> probe(inner);
  const ob::WorkloadConfig cfg(7, 0);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(ob::execute_monitored_call(cfg, probe).checksum,
              ob::expected_checksum(7));
  }
  EXPECT_EQ(probe.traces(), 100u);
  EXPECT_EQ(probe.entries(), 700u);
  EXPECT_EQ(probe.exits(), 700u);
}

namespace {

// Records the level order of entry and exit hooks.
struct OrderProbe {
  struct Token {
    std::uint32_t level;
  };
  std::vector<int> events;  // +level+1 on entry, -(level+1) on exit
  void begin_trace() { events.clear(); }
  Token on_entry(std::uint32_t level) {
    events.push_back(static_cast<int>(level) + 1);
    return {level};
  }
  void on_exit(Token t) { events.push_back(-static_cast<int>(t.level) - 1); }
};

}  // namespace

TEST(MonitoredCall, HooksNestInRecursionOrder) {
  OrderProbe probe;
  ob::execute_monitored_call(ob::WorkloadConfig(3, 0), probe);
  EXPECT_EQ(probe.events, (std::vector<int>{1, 2, 3, -3, -2, -1}));
}

TEST(MonitoredCall, SpinIsIncludedInDuration) {
  ob::NoOpProbe probe;
  const auto outcome =
      ob::execute_monitored_call(ob::WorkloadConfig(4, 50'000), probe);
  EXPECT_GE(outcome.duration_ns, 4 * 50'000);
}
