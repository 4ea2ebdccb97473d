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

// Minimal detectable change for a set of published relative standard
// deviations (n = 10 loop starts, alpha = beta = 1%), both formulas.

#include <cstdio>

#include "overbench/stats.hpp"

int main() {
  struct Row {
    const char* environment;
    const char* probe;
    double sigma_pct;
  };
  const Row rows[] = {
      {"Jenkins", "Baseline", 4.15},       {"Jenkins", "Binary Writer", 2.52},
      {"GH Actions", "Baseline", 0.11},    {"GH Actions", "Binary Writer", 1.97},
      {"Ryzen 7 5700G", "Baseline", 0.16}, {"Ryzen 7 5700G", "Binary Writer", 0.87},
      {"i7-4770", "Baseline", 0.77},       {"i7-4770", "Binary Writer", 1.55},
      {"Raspberry Pi 4", "Baseline", 1.39}, {"Raspberry Pi 4", "Binary Writer", 4.11},
  };
  overbench::MdeConfig table;
  overbench::MdeConfig power;
  power.mode = overbench::MdeMode::TwoSamplePower;
  std::printf("%-16s %-14s %7s %10s %10s\n", "environment", "probe", "sigma%",
              "delta%", "power%");
  for (const auto& r : rows) {
    std::printf("%-16s %-14s %7.2f %10.2f %10.2f\n", r.environment, r.probe,
                r.sigma_pct,
                overbench::minimal_detectable_change(r.sigma_pct, table),
                overbench::minimal_detectable_change(r.sigma_pct, power));
  }
  return 0;
}
