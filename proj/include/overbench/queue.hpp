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

// Bounded record channel between the probe (producers) and the writer
// (exactly one consumer).
//
// Two put strategies share the slot array but use different index protocols:
//
//  * Yield: multi-producer safe. Producers claim positions with a CAS on the
//    enqueue cursor and publish through a per-slot sequence number (the
//    classic bounded MPMC ring, used here with a single consumer). A producer
//    that finds the queue full spins 1024 times (not at all on a single-CPU
//    host), yields, and repeats.
//
//  * SingleProducerBlocking: the producer owns the enqueue cursor and bumps it
//    with a plain store. Correct for one producer only. A producer facing a
//    full queue parks with short sleeps until the consumer frees a slot.
//    Constructing it for more than one producer is refused unless
//    unsafe_allow_mismatch is set, which exists so tests can observe the
//    resulting record loss.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <new>
#include <string>
#include <string_view>
#include <thread>

#include <sched.h>

#include "overbench/error.hpp"
#include "overbench/record.hpp"

namespace overbench {

enum class PutStrategyKind { SingleProducerBlocking, Yield };

inline std::string_view to_string(PutStrategyKind kind) noexcept {
  return kind == PutStrategyKind::Yield ? "yield" : "sp";
}

struct PutStrategy {
  PutStrategyKind variant = PutStrategyKind::Yield;
  std::uint32_t declared_producers = 1;

  static PutStrategy yield(std::uint32_t producers = 1) {
    return {PutStrategyKind::Yield, producers};
  }
  static PutStrategy single_producer_blocking(std::uint32_t producers = 1) {
    return {PutStrategyKind::SingleProducerBlocking, producers};
  }

  friend bool operator==(const PutStrategy&, const PutStrategy&) = default;
};

inline constexpr std::size_t kDefaultQueueCapacity = 10'000;
inline constexpr unsigned kYieldSpinAttempts = 1024;

struct QueueCounters {
  std::uint64_t enqueued = 0;
  std::uint64_t drained = 0;
  std::uint64_t yield_waits = 0;
};

namespace detail {

inline void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_ia32_pause();
#elif defined(__aarch64__)
  asm volatile("yield" ::: "memory");
#endif
}

inline constexpr std::size_t kCacheLine = 64;

// Spinning cannot observe progress when no other thread can run in parallel,
// so waits skip straight to yielding on a single usable CPU.
inline bool multiprocessor() noexcept {
  static const bool value = [] {
    cpu_set_t set;
    CPU_ZERO(&set);
    if (::sched_getaffinity(0, sizeof set, &set) == 0) return CPU_COUNT(&set) > 1;
    return std::thread::hardware_concurrency() > 1;
  }();
  return value;
}

inline unsigned yield_spin_attempts() noexcept {
  return multiprocessor() ? kYieldSpinAttempts : 0;
}

}  // namespace detail

class BoundedRecordQueue {
 public:
  class Producer;

  BoundedRecordQueue(std::size_t capacity, PutStrategy strategy,
                     bool unsafe_allow_mismatch = false)
      : capacity_(capacity),
        strategy_(strategy),
        unsafe_allow_mismatch_(unsafe_allow_mismatch) {
    if (capacity == 0) {
      throw ConfigurationError("queue capacity must be positive");
    }
    if (strategy.declared_producers == 0) {
      throw ConfigurationError("declared_producers must be positive");
    }
    if (strategy.variant == PutStrategyKind::SingleProducerBlocking &&
        strategy.declared_producers > 1 && !unsafe_allow_mismatch) {
      throw ConfigurationError(
          "SingleProducerBlocking put strategy supports exactly one producer, "
          "declared " +
          std::to_string(strategy.declared_producers) +
          "; use the yield strategy for multiple producers");
    }
    slots_ = std::make_unique<Slot[]>(capacity);
    for (std::size_t i = 0; i < capacity; ++i) {
      slots_[i].seq.store(2 * i, std::memory_order_relaxed);
    }
  }

  BoundedRecordQueue(const BoundedRecordQueue&) = delete;
  BoundedRecordQueue& operator=(const BoundedRecordQueue&) = delete;

  std::size_t capacity() const noexcept { return capacity_; }
  const PutStrategy& strategy() const noexcept { return strategy_; }
  bool unsafe_allow_mismatch() const noexcept { return unsafe_allow_mismatch_; }

  // Each producing thread registers once. Registrations beyond the declared
  // producer count are refused unless the mismatch override is active.
  Producer register_producer();

  // Consumer side. Must only be called from the single consumer thread.
  bool try_dequeue(MonitoringRecord& out) noexcept {
    return strategy_.variant == PutStrategyKind::Yield ? try_dequeue_mp(out)
                                                       : try_dequeue_sp(out);
  }

  // Shutdown barrier: every producer has finished. Later enqueues are rejected;
  // the consumer drains what is left and stops.
  void close() noexcept { closed_.store(true, std::memory_order_release); }

  // Hard stop after a consumer or worker failure. Waiting producers give up.
  void abort() noexcept {
    aborted_.store(true, std::memory_order_release);
    closed_.store(true, std::memory_order_release);
  }

  bool closed() const noexcept {
    return closed_.load(std::memory_order_acquire);
  }
  bool aborted() const noexcept {
    return aborted_.load(std::memory_order_acquire);
  }

  QueueCounters counters() const noexcept {
    QueueCounters c;
    c.enqueued = enqueued_.load(std::memory_order_acquire);
    c.drained = drained_.load(std::memory_order_acquire);
    c.yield_waits = yield_waits_.load(std::memory_order_acquire);
    return c;
  }

  // enqueued is read before drained so a concurrent snapshot never
  // overstates occupancy.
  std::uint64_t occupancy() const noexcept {
    const auto e = enqueued_.load(std::memory_order_acquire);
    const auto d = drained_.load(std::memory_order_acquire);
    return e >= d ? e - d : 0;
  }

  std::uint32_t registered_producers() const noexcept {
    return registered_.load(std::memory_order_relaxed);
  }

 private:
  // Slot sequence for position pos: 2*pos while free for that position,
  // 2*pos+1 once published. Doubling keeps the two states distinct at
  // capacity 1, where pos+1 is also the next lap's free marker.
  struct Slot {
    std::atomic<std::uint64_t> seq{0};
    MonitoringRecord record;
  };

  void enqueue(const MonitoringRecord& record) {
    if (closed_.load(std::memory_order_relaxed)) {
      throw ClosedChannelError("enqueue on a closed record queue");
    }
    if (strategy_.variant == PutStrategyKind::Yield) {
      enqueue_mp(record);
    } else {
      enqueue_sp(record);
    }
  }

  void throw_if_aborted() const {
    if (aborted_.load(std::memory_order_acquire)) {
      throw ClosedChannelError("record queue aborted while producer waited");
    }
  }

  void note_wait(bool& waited) noexcept {
    if (!waited) {
      waited = true;
      yield_waits_.fetch_add(1, std::memory_order_relaxed);
    }
  }

  void enqueue_mp(const MonitoringRecord& record) {
    std::uint64_t pos = enqueue_pos_.load(std::memory_order_relaxed);
    bool waited = false;
    unsigned spins = 0;
    const unsigned spin_limit = detail::yield_spin_attempts();
    Slot* slot = nullptr;
    for (;;) {
      slot = &slots_[pos % capacity_];
      const std::uint64_t seq = slot->seq.load(std::memory_order_acquire);
      const auto diff =
          static_cast<std::int64_t>(seq) - static_cast<std::int64_t>(2 * pos);
      if (diff == 0) {
        if (enqueue_pos_.compare_exchange_weak(pos, pos + 1,
                                               std::memory_order_relaxed)) {
          break;
        }
        continue;
      }
      if (diff < 0) {
        // Full: the slot still holds the record from one lap ago.
        note_wait(waited);
        throw_if_aborted();
        // Each attempt is a plain re-read of the slot; the yield comes after
        // yield_spin_attempts() of them.
        if (++spins >= spin_limit) {
          spins = 0;
          std::this_thread::yield();
        }
      }
      pos = enqueue_pos_.load(std::memory_order_relaxed);
    }
    slot->record = record;
    slot->seq.store(2 * pos + 1, std::memory_order_release);
    enqueued_.fetch_add(1, std::memory_order_acq_rel);
  }

  void enqueue_sp(const MonitoringRecord& record) {
    const std::uint64_t tail = enqueue_pos_.load(std::memory_order_relaxed);
    const auto cap = static_cast<std::int64_t>(capacity_);
    auto in_flight = [&] {
      return static_cast<std::int64_t>(
          tail - dequeue_pos_.load(std::memory_order_acquire));
    };
    if (in_flight() >= cap) {
      bool waited = false;
      unsigned rounds = 0;
      while (in_flight() >= cap) {
        // Another producer moved the cursor backwards; waiting on it cannot
        // succeed. Only reachable with unsafe_allow_mismatch.
        if (static_cast<std::int64_t>(
                enqueue_pos_.load(std::memory_order_relaxed) - tail) < 0) {
          break;
        }
        note_wait(waited);
        throw_if_aborted();
        park(rounds++);
      }
    }
    slots_[tail % capacity_].record = record;
    enqueue_pos_.store(tail + 1, std::memory_order_release);
    enqueued_.fetch_add(1, std::memory_order_acq_rel);
  }

  static void park(unsigned round) {
    if (round < 64) {
      detail::cpu_relax();
      return;
    }
    const auto us = std::min<unsigned>(1u << std::min(round - 64, 7u), 100u);
    std::this_thread::sleep_for(std::chrono::microseconds(us));
  }

  bool try_dequeue_mp(MonitoringRecord& out) noexcept {
    const std::uint64_t pos = dequeue_pos_.load(std::memory_order_relaxed);
    Slot& slot = slots_[pos % capacity_];
    if (slot.seq.load(std::memory_order_acquire) != 2 * pos + 1) return false;
    out = slot.record;
    drained_.fetch_add(1, std::memory_order_acq_rel);
    slot.seq.store(2 * (pos + capacity_), std::memory_order_release);
    dequeue_pos_.store(pos + 1, std::memory_order_release);
    return true;
  }

  bool try_dequeue_sp(MonitoringRecord& out) noexcept {
    const std::uint64_t head = dequeue_pos_.load(std::memory_order_relaxed);
    const std::uint64_t tail = enqueue_pos_.load(std::memory_order_acquire);
    if (static_cast<std::int64_t>(tail - head) <= 0) return false;
    out = slots_[head % capacity_].record;
    drained_.fetch_add(1, std::memory_order_acq_rel);
    dequeue_pos_.store(head + 1, std::memory_order_release);
    return true;
  }

  std::size_t capacity_;
  PutStrategy strategy_;
  bool unsafe_allow_mismatch_;
  std::unique_ptr<Slot[]> slots_;

  alignas(detail::kCacheLine) std::atomic<std::uint64_t> enqueue_pos_{0};
  alignas(detail::kCacheLine) std::atomic<std::uint64_t> dequeue_pos_{0};
  alignas(detail::kCacheLine) std::atomic<std::uint64_t> enqueued_{0};
  alignas(detail::kCacheLine) std::atomic<std::uint64_t> drained_{0};
  std::atomic<std::uint64_t> yield_waits_{0};
  std::atomic<std::uint32_t> registered_{0};
  std::atomic<bool> closed_{false};
  std::atomic<bool> aborted_{false};
};

// Handle held by one producing thread.
class BoundedRecordQueue::Producer {
 public:
  void enqueue(const MonitoringRecord& record) { queue_->enqueue(record); }

  BoundedRecordQueue& queue() const noexcept { return *queue_; }

 private:
  friend class BoundedRecordQueue;
  explicit Producer(BoundedRecordQueue& queue) : queue_(&queue) {}

  BoundedRecordQueue* queue_;
};

inline BoundedRecordQueue::Producer BoundedRecordQueue::register_producer() {
  const auto n = registered_.fetch_add(1, std::memory_order_relaxed) + 1;
  if (n > strategy_.declared_producers && !unsafe_allow_mismatch_) {
    registered_.fetch_sub(1, std::memory_order_relaxed);
    throw ConfigurationError("queue declared for " +
                             std::to_string(strategy_.declared_producers) +
                             " producer(s); registration " + std::to_string(n) +
                             " refused");
  }
  return Producer(*this);
}

}  // namespace overbench
