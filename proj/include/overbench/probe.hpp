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

// The observability pipeline under test: a probe that turns every monitored
// activation into a MonitoringRecord and pushes it into the bounded queue,
// and the writer loop that drains the queue into a binary trace file.

#include <cstdint>
#include <thread>

#include "overbench/clock.hpp"
#include "overbench/queue.hpp"
#include "overbench/record.hpp"
#include "overbench/trace_format.hpp"

namespace overbench {

// Record-emitting probe. One instance per producing thread. Trace ids are
// prefixed with the worker index so they stay unique across workers without
// shared state.
class RecordingProbe {
 public:
  struct Token {
    std::int32_t order_index;
    std::int64_t tin_ns;
  };

  static constexpr int kTraceIdWorkerShift = 40;

  RecordingProbe(BoundedRecordQueue::Producer producer,
                 std::int32_t signature_id, std::uint32_t worker_index)
      : producer_(producer),
        signature_id_(signature_id),
        trace_base_(static_cast<std::int64_t>(worker_index + 1)
                    << kTraceIdWorkerShift) {}

  void begin_trace() noexcept { current_trace_ = trace_base_ + next_seq_++; }

  Token on_entry(std::uint32_t level) noexcept {
    return Token{static_cast<std::int32_t>(level), now_ns()};
  }

  void on_exit(Token token) {
    producer_.enqueue(MonitoringRecord{signature_id_, current_trace_,
                                       token.order_index, token.tin_ns,
                                       now_ns()});
    ++records_emitted_;
  }

  std::uint64_t records_emitted() const noexcept { return records_emitted_; }
  std::int64_t current_trace() const noexcept { return current_trace_; }

 private:
  BoundedRecordQueue::Producer producer_;
  std::int32_t signature_id_;
  std::int64_t trace_base_;
  std::int64_t next_seq_ = 0;
  std::int64_t current_trace_ = 0;
  std::uint64_t records_emitted_ = 0;
};

struct DrainReport {
  std::uint64_t records = 0;
  // Header, registry and record frames. The terminator is not counted, so an
  // empty drain with an empty registry reports exactly the header size.
  std::uint64_t bytes = 0;

  friend bool operator==(const DrainReport&, const DrainReport&) = default;
};

/// Consumer loop. Runs until the queue is closed and empty, then writes the
/// terminator. On a sink failure the queue is aborted (so producers stop
/// waiting) and the IoError propagates; the file is left without terminator.
inline DrainReport drain_loop(BoundedRecordQueue& queue, BinarySink& sink) {
  DrainReport report;
  MonitoringRecord record;
  unsigned idle = 0;
  try {
    for (;;) {
      if (queue.try_dequeue(record)) {
        sink.write_record(record);
        ++report.records;
        idle = 0;
        continue;
      }
      if (queue.closed()) {
        // Producers are done; anything still published is drained above on
        // the next iterations.
        if (queue.try_dequeue(record)) {
          sink.write_record(record);
          ++report.records;
          continue;
        }
        break;
      }
      if (detail::multiprocessor() && ++idle < 64) {
        detail::cpu_relax();
      } else {
        std::this_thread::yield();
      }
    }
    report.bytes = sink.bytes_emitted();
    sink.finish();
  } catch (...) {
    queue.abort();
    throw;
  }
  return report;
}

}  // namespace overbench
