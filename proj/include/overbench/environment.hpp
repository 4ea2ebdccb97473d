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

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <sys/utsname.h>
#include <unistd.h>

#include "overbench/clock.hpp"
#include "overbench/digest.hpp"

namespace overbench {

// Host description attached to every run. Runs from environments with
// different digests are never pooled or compared.
struct EnvironmentDescriptor {
  std::string hostname = "unknown";
  std::string os_name = "unknown";
  std::string os_version = "unknown";
  std::string cpu_model = "unknown";
  std::uint32_t logical_cpus = 1;
  std::uint64_t memory_bytes = 0;
  std::int64_t clock_resolution_ns = 1;

  // Stable identity of the host. The clock resolution is a measurement and
  // is left out.
  std::string digest() const {
    Fnv1a h;
    h.add(hostname).add(os_name).add(os_version).add(cpu_model);
    h.add(static_cast<std::int64_t>(logical_cpus));
    h.add(static_cast<std::int64_t>(memory_bytes));
    return h.hex();
  }

  friend bool operator==(const EnvironmentDescriptor&,
                         const EnvironmentDescriptor&) = default;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::optional<std::string> read_first_line(const char* path) {
  std::ifstream in(path);
  std::string line;
  if (in && std::getline(in, line)) return trim(line);
  return std::nullopt;
}

inline std::string cpu_model_from_proc() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  std::string fallback;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (value.empty()) continue;
    if (key == "model name") return value;
    // ARM kernels report the board under "Hardware" or "Model".
    if ((key == "Hardware" || key == "Model") && fallback.empty()) {
      fallback = value;
    }
  }
  return fallback.empty() ? "unknown" : fallback;
}

inline std::uint64_t memory_bound_bytes() {
  std::uint64_t physical = 0;
  const long pages = ::sysconf(_SC_PHYS_PAGES);
  const long page_size = ::sysconf(_SC_PAGESIZE);
  if (pages > 0 && page_size > 0) {
    physical = static_cast<std::uint64_t>(pages) *
               static_cast<std::uint64_t>(page_size);
  }
  // A cgroup limit, when tighter, is the bound the benchmark actually sees.
  for (const char* path : {"/sys/fs/cgroup/memory.max",
                           "/sys/fs/cgroup/memory/memory.limit_in_bytes"}) {
    if (auto text = read_first_line(path)) {
      try {
        std::size_t used = 0;
        const auto limit = std::stoull(*text, &used);
        if (used == text->size() && limit > 0 &&
            (physical == 0 || limit < physical)) {
          return limit;
        }
      } catch (const std::exception&) {
        // "max" or garbage: no cgroup limit.
      }
    }
  }
  return physical;
}

}  // namespace detail

/// Median of 1000 back-to-back monotonic clock deltas. Falls back to the
/// smallest positive delta when the median is zero, and never returns < 1.
inline std::int64_t estimate_clock_resolution_ns(int samples = 1000) {
  std::vector<std::int64_t> deltas;
  deltas.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const auto a = now_ns();
    const auto b = now_ns();
    deltas.push_back(b - a);
  }
  std::sort(deltas.begin(), deltas.end());
  std::int64_t median = deltas[deltas.size() / 2];
  if (median <= 0) {
    const auto positive = std::upper_bound(deltas.begin(), deltas.end(), 0);
    median = positive != deltas.end() ? *positive : 1;
  }
  return std::max<std::int64_t>(median, 1);
}

inline EnvironmentDescriptor capture_environment() {
  EnvironmentDescriptor env;
  char host[256] = {};
  if (::gethostname(host, sizeof host - 1) == 0 && host[0] != '\0') {
    env.hostname = host;
  }
  struct utsname uts {};
  if (::uname(&uts) == 0) {
    env.os_name = uts.sysname;
    env.os_version = uts.release;
  }
  env.cpu_model = detail::cpu_model_from_proc();
  const long online = ::sysconf(_SC_NPROCESSORS_ONLN);
  if (online > 0) {
    env.logical_cpus = static_cast<std::uint32_t>(online);
  } else {
    env.logical_cpus = std::max(1u, std::thread::hardware_concurrency());
  }
  env.memory_bytes = detail::memory_bound_bytes();
  env.clock_resolution_ns = estimate_clock_resolution_ns();
  return env;
}

}  // namespace overbench
