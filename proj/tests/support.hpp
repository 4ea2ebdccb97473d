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

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "overbench/probe.hpp"
#include "overbench/queue.hpp"
#include "overbench/run_types.hpp"
#include "overbench/trace_format.hpp"
#include "overbench/workload.hpp"

namespace overbench::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            ("overbench-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a shell command, capturing stdout and stderr separately.
inline CommandResult run_command(const std::string& command,
                                 const std::filesystem::path& scratch) {
  const auto out_file = scratch / ".stdout";
  const auto err_file = scratch / ".stderr";
  const std::string full = command + " >'" + out_file.string() + "' 2>'" +
                           err_file.string() + "'";
  const int status = std::system(full.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out_file);
  r.err = read_text(err_file);
  return r;
}

// A synthetic run whose loop starts hold the given durations.
inline BenchmarkRun synthetic_run(
    const std::vector<std::vector<std::int64_t>>& loops,
    ProbeKind probe = ProbeKind::Baseline, double warmup = 0.0,
    const std::string& started_at = "2026-01-01T00:00:00.000000Z") {
  BenchmarkRun run;
  run.config.loop_starts = static_cast<int>(loops.size());
  run.config.calls_per_loop =
      loops.empty() ? 1 : static_cast<std::int64_t>(loops.front().size());
  run.config.warmup_fraction = warmup;
  run.config.probe = probe;
  run.environment.hostname = "test-host";
  run.environment.cpu_model = "test-cpu";
  run.environment.os_name = "Linux";
  run.environment.logical_cpus = 4;
  run.environment.memory_bytes = 2ull << 30;
  run.started_at = started_at;
  int i = 0;
  for (const auto& d : loops) {
    LoopStartResult loop;
    loop.loop_index = i++;
    loop.durations_ns = d;
    run.loops.push_back(std::move(loop));
  }
  return run;
}

// n loop starts of `calls` durations each; every loop start has a constant
// level drawn from Normal(mean, mean * rel_sigma).
inline BenchmarkRun noisy_run(std::mt19937_64& rng, int n, int calls,
                              double mean, double rel_sigma,
                              ProbeKind probe = ProbeKind::Baseline,
                              const std::string& started_at =
                                  "2026-01-01T00:00:00.000000Z") {
  std::normal_distribution<double> noise(mean, mean * rel_sigma);
  std::vector<std::vector<std::int64_t>> loops;
  for (int l = 0; l < n; ++l) {
    const auto level = static_cast<std::int64_t>(std::llround(noise(rng)));
    loops.emplace_back(calls, level);
  }
  return synthetic_run(loops, probe, 0.0, started_at);
}

struct PipelineResult {
  DrainReport drain;
  QueueCounters counters;
  VerificationReport report;
};

// producers threads each run `calls` monitored calls of the given depth with
// a RecordingProbe and spin_ns of work per level; one writer thread drains
// into `file`. The trace is then verified against depth and
// producers * calls * depth records.
inline PipelineResult run_pipeline(const std::filesystem::path& file,
                                   std::size_t capacity, PutStrategyKind kind,
                                   std::uint32_t producers, int calls,
                                   std::uint32_t depth = 10,
                                   bool unsafe = false,
                                   std::int64_t spin_ns = 0) {
  StringRegistry registry;
  const auto sig = registry.register_signature("monitoredMethod");
  BoundedRecordQueue queue(capacity, PutStrategy{kind, producers}, unsafe);
  BinarySink sink(file, registry);
  PipelineResult result;
  std::thread writer([&] { result.drain = drain_loop(queue, sink); });
  {
    std::vector<std::jthread> threads;
    for (std::uint32_t w = 0; w < producers; ++w) {
      threads.emplace_back([&, w] {
        RecordingProbe probe(queue.register_producer(), sig, w);
        const WorkloadConfig cfg(depth, spin_ns);
        for (int i = 0; i < calls; ++i) execute_monitored_call(cfg, probe);
      });
    }
  }
  queue.close();
  writer.join();
  result.counters = queue.counters();
  VerifyOptions opts;
  opts.expected_depth = depth;
  opts.expected_records =
      static_cast<std::uint64_t>(producers) * calls * depth;
  result.report = verify_trace_file(file, opts);
  return result;
}

}  // namespace overbench::testing
