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

#include <chrono>
#include <cstdint>

namespace overbench {

using MonotonicClock = std::chrono::steady_clock;
static_assert(MonotonicClock::is_steady);

inline std::int64_t now_ns() noexcept {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             MonotonicClock::now().time_since_epoch())
      .count();
}

// Active wait on the monotonic clock. Never sleeps.
inline void spin_for_ns(std::int64_t ns) noexcept {
  if (ns <= 0) return;
  const std::int64_t deadline = now_ns() + ns;
  while (now_ns() < deadline) {
  }
}

// Keeps the optimizer from discarding a value or hoisting memory accesses
// across the barrier.
template <class T>
inline void do_not_optimize(T const& value) noexcept {
#if defined(__GNUC__) || defined(__clang__)
  asm volatile("" : : "r,m"(value) : "memory");
#else
  static volatile T sink;
  sink = value;
#endif
}

inline void compiler_barrier() noexcept {
#if defined(__GNUC__) || defined(__clang__)
  asm volatile("" ::: "memory");
#endif
}

}  // namespace overbench
