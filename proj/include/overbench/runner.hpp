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

// Benchmark orchestration. A run is n loop starts; every loop start gets
// fresh probe state (new queue, new trace file, zeroed counters), which is
// the in-process analog of restarting the benchmark process. SpawnLauncher
// goes further and executes each loop start in a new process.

#include <exception>
#include <filesystem>
#include <functional>
#include <latch>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include <spawn.h>
#include <sys/wait.h>

#include "overbench/clock.hpp"
#include "overbench/error.hpp"
#include "overbench/probe.hpp"
#include "overbench/queue.hpp"
#include "overbench/run_io.hpp"
#include "overbench/run_types.hpp"
#include "overbench/trace_format.hpp"
#include "overbench/workload.hpp"

extern char** environ;

namespace overbench {

namespace detail {

// Runs calls_per_loop monitored calls on `workers` threads, each with its own
// probe from make_probe(worker_index). Durations land interleaved by call
// index. Returns the fold of all checksums.
template <class MakeProbe>
std::uint64_t run_workers(const RunConfig& cfg, std::vector<std::int64_t>& out,
                          MakeProbe&& make_probe) {
  const auto workers = static_cast<std::size_t>(cfg.workers);
  const auto calls = static_cast<std::size_t>(cfg.calls_per_loop);
  out.assign(calls * workers, 0);
  std::vector<std::uint64_t> folds(workers, 0);
  std::vector<std::exception_ptr> errors(workers);
  std::latch start(static_cast<std::ptrdiff_t>(workers));
  const std::uint64_t expected = expected_checksum(cfg.workload.recursion_depth());
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        bool arrived = false;
        try {
          auto probe = make_probe(static_cast<std::uint32_t>(w));
          arrived = true;
          start.arrive_and_wait();
          std::uint64_t fold = 0;
          for (std::size_t call = 0; call < calls; ++call) {
            const CallOutcome outcome =
                execute_monitored_call(cfg.workload, probe);
            out[call * workers + w] = outcome.duration_ns;
            fold += outcome.checksum;
            if (outcome.checksum != expected) {
              throw IntegrityError("monitored call returned checksum " +
                                   std::to_string(outcome.checksum) +
                                   ", expected " + std::to_string(expected));
            }
          }
          folds[w] = fold;
        } catch (...) {
          errors[w] = std::current_exception();
          if (!arrived) start.count_down();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::uint64_t fold = 0;
  for (auto f : folds) fold += f;
  return fold;
}

}  // namespace detail

inline std::filesystem::path trace_path_for(const RunConfig& cfg,
                                            const std::string& stamp,
                                            int loop_index) {
  return cfg.output_dir /
         ("trace-" + stamp + "-w" + std::to_string(cfg.workers) + "-loop" +
          std::to_string(loop_index) + ".bin");
}

/// One loop start in the current process.
inline LoopStartResult run_loop_start(const RunConfig& cfg, int loop_index,
                                      const std::string& stamp) {
  LoopStartResult result;
  result.loop_index = loop_index;

  if (cfg.probe == ProbeKind::Baseline) {
    result.checksum_fold = detail::run_workers(
        cfg, result.durations_ns, [](std::uint32_t) { return NoOpProbe{}; });
    return result;
  }

  StringRegistry registry;
  const std::int32_t signature_id =
      registry.register_signature(cfg.workload.signature());
  BoundedRecordQueue queue(
      cfg.queue.capacity,
      PutStrategy{cfg.queue.put_strategy,
                  static_cast<std::uint32_t>(cfg.workers)},
      cfg.queue.unsafe_allow_mismatch);
  const auto trace_file = trace_path_for(cfg, stamp, loop_index);
  BinarySink sink(trace_file, registry);

  DrainReport drain;
  std::exception_ptr consumer_error;
  std::jthread consumer([&] {
    try {
      drain = drain_loop(queue, sink);
    } catch (...) {
      consumer_error = std::current_exception();
    }
  });

  std::exception_ptr worker_error;
  try {
    result.checksum_fold =
        detail::run_workers(cfg, result.durations_ns, [&](std::uint32_t w) {
          return RecordingProbe(queue.register_producer(), signature_id, w);
        });
    queue.close();
  } catch (...) {
    worker_error = std::current_exception();
    queue.abort();
  }
  consumer.join();
  if (consumer_error) std::rethrow_exception(consumer_error);
  if (worker_error) std::rethrow_exception(worker_error);

  const std::uint64_t expected_records =
      static_cast<std::uint64_t>(cfg.samples_per_loop()) *
      cfg.workload.recursion_depth();
  VerifyOptions options;
  options.expected_depth = cfg.workload.recursion_depth();
  options.expected_records = expected_records;
  options.max_listed = 5;
  const VerificationReport report = verify_trace_file(trace_file, options);
  if (!report.ok()) {
    std::string detail = std::to_string(report.violation_count) +
                         " violation(s) in " + trace_file.string();
    if (!report.violations.empty()) {
      detail += ", first: " + std::string(to_string(report.violations[0].kind)) +
                " " + report.violations[0].detail;
    }
    throw IntegrityError("trace verification failed: " + detail);
  }
  if (drain.records != expected_records) {
    throw IntegrityError("writer drained " + std::to_string(drain.records) +
                         " records, expected " +
                         std::to_string(expected_records));
  }

  result.drain = drain;
  result.counters = queue.counters();
  if (cfg.keep_traces) {
    result.trace_file = trace_file;
  } else {
    std::error_code ec;
    std::filesystem::remove(trace_file, ec);
  }
  return result;
}

using LoopLauncher = std::function<LoopStartResult(
    const RunConfig&, int loop_index, const std::string& stamp)>;

/// Executes each loop start as `<executable> _loop --config <file> --index i
/// --stamp s --out <file>` and reads the loop result the child wrote.
class SpawnLauncher {
 public:
  explicit SpawnLauncher(std::filesystem::path executable)
      : executable_(std::move(executable)) {}

  LoopStartResult operator()(const RunConfig& cfg, int loop_index,
                             const std::string& stamp) const {
    const auto base = cfg.output_dir / (".loop-" + stamp + "-" +
                                        std::to_string(loop_index));
    auto config_file = base;
    config_file += ".config.json";
    auto result_file = base;
    result_file += ".result.json";
    write_file_atomically(config_file, config_to_json(cfg).dump());

    std::vector<std::string> args = {executable_.string(),
                                     "_loop",
                                     "--config",
                                     config_file.string(),
                                     "--index",
                                     std::to_string(loop_index),
                                     "--stamp",
                                     stamp,
                                     "--out",
                                     result_file.string()};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    pid_t pid = 0;
    const int rc = ::posix_spawn(&pid, executable_.c_str(), nullptr, nullptr,
                                 argv.data(), environ);
    if (rc != 0) {
      std::filesystem::remove(config_file);
      throw IoError("cannot spawn loop process " + executable_.string() +
                    ": " + std::generic_category().message(rc));
    }
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    std::error_code ec;
    std::filesystem::remove(config_file, ec);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      std::filesystem::remove(result_file, ec);
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      if (code == 2) {
        throw ValidationError("loop process rejected its configuration");
      }
      throw IntegrityError("loop process " + std::to_string(loop_index) +
                           " failed with status " + std::to_string(code));
    }
    auto loop = loop_from_json(read_json_file(result_file));
    std::filesystem::remove(result_file, ec);
    return loop;
  }

 private:
  std::filesystem::path executable_;
};

/// n loop starts under one configuration. Any failure aborts the run and
/// discards partial results; on success the raw-run file is written to
/// cfg.output_dir.
inline BenchmarkRun run_benchmark(const RunConfig& cfg,
                                  const LoopLauncher& launcher = run_loop_start) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + cfg.output_dir.string() +
                  ": " + ec.message());
  }

  BenchmarkRun run;
  run.config = cfg;
  run.environment = capture_environment();
  const auto now = std::chrono::system_clock::now();
  run.started_at = utc_timestamp(now);
  const std::string stamp = file_stamp(now);

  for (int i = 0; i < cfg.loop_starts; ++i) {
    LoopStartResult loop = launcher(cfg, i, stamp);
    if (static_cast<std::int64_t>(loop.durations_ns.size()) !=
        cfg.samples_per_loop()) {
      throw IntegrityError("loop start " + std::to_string(i) + " produced " +
                           std::to_string(loop.durations_ns.size()) +
                           " durations, expected " +
                           std::to_string(cfg.samples_per_loop()));
    }
    run.checksum_fold += loop.checksum_fold;
    run.loops.push_back(std::move(loop));
  }
  run.raw_file = write_raw_run(run, cfg.output_dir, stamp);
  return run;
}

/// One run per worker count, otherwise identical configuration. Completed
/// runs are already on disk when a later one fails; on_complete sees each
/// run as soon as it finishes so callers can persist derived data too.
inline std::vector<BenchmarkRun> run_thread_sweep(
    const RunConfig& base, const std::vector<int>& worker_counts,
    const std::function<void(const BenchmarkRun&)>& on_complete = {},
    const LoopLauncher& launcher = run_loop_start) {
  if (worker_counts.empty()) {
    throw ValidationError("thread sweep needs at least one worker count");
  }
  std::vector<RunConfig> configs;
  for (int k : worker_counts) {
    if (k < 1) {
      throw ValidationError("worker counts must be >= 1, got " +
                            std::to_string(k));
    }
    RunConfig cfg = base;
    cfg.workers = k;
    cfg.validate();
    configs.push_back(std::move(cfg));
  }
  std::vector<BenchmarkRun> runs;
  for (const auto& cfg : configs) {
    runs.push_back(run_benchmark(cfg, launcher));
    if (on_complete) on_complete(runs.back());
  }
  return runs;
}

}  // namespace overbench
