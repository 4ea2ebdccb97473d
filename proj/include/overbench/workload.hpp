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

// The measured workload: a method that calls itself recursion_depth times,
// doing nothing but (optionally) spinning. Every recursion level passes
// through the probe's entry and exit hooks, so whatever the probe costs is
// the dominant part of the measured duration.

#include <concepts>
#include <cstdint>
#include <string>
#include <utility>

#include "overbench/clock.hpp"
#include "overbench/error.hpp"

namespace overbench {

// A probe is notified at the start of each top-level call (begin_trace) and
// around every recursion level (on_entry / on_exit). The token returned by
// on_entry is handed back to on_exit of the same level.
template <class P>
concept Probe = requires(P& probe, std::uint32_t level,
                         typename P::Token token) {
  probe.begin_trace();
  { probe.on_entry(level) } -> std::same_as<typename P::Token>;
  probe.on_exit(token);
};

class WorkloadConfig {
 public:
  static constexpr std::uint32_t kDefaultDepth = 10;

  WorkloadConfig() = default;

  WorkloadConfig(std::int64_t recursion_depth, std::int64_t spin_ns,
                 std::string signature = "monitoredMethod")
      : signature_(std::move(signature)) {
    if (recursion_depth < 1) {
      throw ValidationError("recursion_depth must be >= 1, got " +
                            std::to_string(recursion_depth));
    }
    if (recursion_depth > UINT32_MAX) {
      throw ValidationError("recursion_depth too large");
    }
    if (spin_ns < 0) {
      throw ValidationError("spin_ns must be >= 0, got " +
                            std::to_string(spin_ns));
    }
    if (signature_.empty()) {
      throw ValidationError("workload signature must not be empty");
    }
    depth_ = static_cast<std::uint32_t>(recursion_depth);
    spin_ns_ = spin_ns;
  }

  std::uint32_t recursion_depth() const noexcept { return depth_; }
  std::int64_t spin_ns() const noexcept { return spin_ns_; }
  const std::string& signature() const noexcept { return signature_; }

  friend bool operator==(const WorkloadConfig&,
                         const WorkloadConfig&) = default;

 private:
  std::uint32_t depth_ = kDefaultDepth;
  std::int64_t spin_ns_ = 0;
  std::string signature_ = "monitoredMethod";
};

struct CallOutcome {
  std::uint64_t checksum = 0;
  std::int64_t duration_ns = 0;
};

// Sum 1..depth, the value every monitored call must return.
constexpr std::uint64_t expected_checksum(std::uint64_t depth) noexcept {
  return depth * (depth + 1) / 2;
}

/// The probe that does nothing. Used for the baseline configuration.
struct NoOpProbe {
  struct Token {};

  void begin_trace() noexcept {}
  Token on_entry(std::uint32_t) noexcept { return {}; }
  void on_exit(Token) noexcept {}
};

/// Wraps another probe and counts hook firings. Test instrumentation.
template <Probe Inner>
class CountingProbe {
 public:
  using Token = typename Inner::Token;

  explicit CountingProbe(Inner& inner) : inner_(inner) {}

  void begin_trace() {
    ++traces_;
    inner_.begin_trace();
  }
  Token on_entry(std::uint32_t level) {
    ++entries_;
    if (level + 1 > max_level_seen_) max_level_seen_ = level + 1;
    return inner_.on_entry(level);
  }
  void on_exit(Token token) {
    ++exits_;
    inner_.on_exit(token);
  }

  std::uint64_t traces() const noexcept { return traces_; }
  std::uint64_t entries() const noexcept { return entries_; }
  std::uint64_t exits() const noexcept { return exits_; }
  std::uint64_t hook_firings() const noexcept { return entries_ + exits_; }
  std::uint32_t levels_seen() const noexcept { return max_level_seen_; }

 private:
  Inner& inner_;
  std::uint64_t traces_ = 0;
  std::uint64_t entries_ = 0;
  std::uint64_t exits_ = 0;
  std::uint32_t max_level_seen_ = 0;
};

namespace detail {

template <Probe P>
#if defined(__GNUC__) || defined(__clang__)
[[gnu::noinline]]
#endif
std::uint64_t monitored_method(const WorkloadConfig& cfg, P& probe,
                               std::uint32_t level) {
  auto token = probe.on_entry(level);
  spin_for_ns(cfg.spin_ns());
  std::uint64_t sum = level + 1;
  if (level + 1 < cfg.recursion_depth()) {
    sum += monitored_method(cfg, probe, level + 1);
  }
  compiler_barrier();
  probe.on_exit(token);
  return sum;
}

}  // namespace detail

/// Runs one top-level monitored call and times it with the monotonic clock.
/// Trace setup belongs to the probe's cost, so it sits inside the timed
/// region together with the recursion.
template <Probe P>
CallOutcome execute_monitored_call(const WorkloadConfig& cfg, P& probe) {
  const std::int64_t start = now_ns();
  probe.begin_trace();
  const std::uint64_t checksum = detail::monitored_method(cfg, probe, 0);
  const std::int64_t stop = now_ns();
  do_not_optimize(checksum);
  return CallOutcome{checksum, stop - start};
}

}  // namespace overbench
