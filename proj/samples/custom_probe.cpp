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

// Measures a user-defined probe with the same workload and statistics the
// harness uses for its built-in probes. The probe here only counts entries
// in a shared atomic, which is enough to show contention cost.

#include <atomic>
#include <cstdio>
#include <vector>

#include "overbench/stats.hpp"
#include "overbench/workload.hpp"

namespace {

std::atomic<std::uint64_t> g_counter{0};

struct AtomicCounterProbe {
  struct Token {};
  void begin_trace() {}
  Token on_entry(std::uint32_t) {
    g_counter.fetch_add(1, std::memory_order_relaxed);
    return {};
  }
  void on_exit(Token) {}
};

template <overbench::Probe P>
std::vector<double> loop_means(const overbench::WorkloadConfig& cfg, int loops,
                               int calls) {
  std::vector<double> means;
  for (int l = 0; l < loops; ++l) {
    P probe;
    std::vector<std::int64_t> durations;
    durations.reserve(calls);
    for (int c = 0; c < calls; ++c) {
      durations.push_back(overbench::execute_monitored_call(cfg, probe).duration_ns);
    }
    means.push_back(overbench::retained_mean(durations, 0.5));
  }
  return means;
}

}  // namespace

int main() {
  const overbench::WorkloadConfig cfg(10, 0);
  constexpr int kLoops = 10;
  constexpr int kCalls = 20'000;

  const auto base = loop_means<overbench::NoOpProbe>(cfg, kLoops, kCalls);
  const auto probe = loop_means<AtomicCounterProbe>(cfg, kLoops, kCalls);

  for (const auto& [name, means] :
       {std::pair{"no-op", &base}, std::pair{"atomic counter", &probe}}) {
    const auto s = overbench::summarize(*means, 0.0,
                                        overbench::SampleBasis::PerLoopMean);
    std::printf("%-15s %9.2f ns/call  sigma %.2f%%  min. detectable change %.2f%%\n",
                name, s.mean_ns, s.rel_stddev * 100.0,
                overbench::minimal_detectable_change(s.rel_stddev) * 100.0);
  }
  const auto d = overbench::detect_change({"same", base}, {"same", probe});
  std::printf("change %+.2f%%, p = %.3g -> %s\n", d.relative_change * 100.0,
              d.p_value, d.changed ? "detected" : "not detected");
  return 0;
}
