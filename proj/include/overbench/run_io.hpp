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

// JSON form of runs. A raw-run file looks like
//
//   {
//     "format": "overbench-run", "version": 1,
//     "started_at": "2026-10-19T12:00:00.123456Z",
//     "checksum_fold": 550000,
//     "config": { "loop_starts": 10, "calls_per_loop": 100000, ...,
//                 "digest": "..." },
//     "environment": { "hostname": ..., "digest": "..." },
//     "loops": [ { "index": 0, "durations_ns": [ ... ],
//                  "drain": {"records": .., "bytes": ..} | null,
//                  "counters": {...} | null, "trace_file": "..." | null,
//                  "checksum_fold": .. } ]
//   }

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "overbench/error.hpp"
#include "overbench/run_types.hpp"

namespace overbench {

using json = nlohmann::json;

inline constexpr int kRawRunVersion = 1;

namespace detail {

// "%Y-%m-%dT%H:%M:%S" + ".uuuuuuZ", or the compact file-name variant
// "%Y%m%dT%H%M%S" + ".uuuuuuZ".
inline std::string format_utc(std::chrono::system_clock::time_point tp,
                              bool compact) {
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                      tp.time_since_epoch())
                      .count();
  const std::time_t secs = static_cast<std::time_t>(us / 1'000'000);
  const long frac = static_cast<long>(us % 1'000'000);
  std::tm tm{};
  ::gmtime_r(&secs, &tm);
  char base[32];
  std::strftime(base, sizeof base, compact ? "%Y%m%dT%H%M%S" : "%Y-%m-%dT%H:%M:%S",
                &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%06ldZ", base, frac);
  return out;
}

}  // namespace detail

inline std::string utc_timestamp(
    std::chrono::system_clock::time_point tp = std::chrono::system_clock::now()) {
  return detail::format_utc(tp, false);
}

inline std::string file_stamp(
    std::chrono::system_clock::time_point tp = std::chrono::system_clock::now()) {
  return detail::format_utc(tp, true);
}

// Picks "<dir>/<prefix><stamp><suffix>", adding -1, -2, ... if taken, so
// outputs are never overwritten.
inline std::filesystem::path unique_output_path(const std::filesystem::path& dir,
                                                const std::string& prefix,
                                                const std::string& stamp,
                                                const std::string& suffix) {
  auto candidate = dir / (prefix + stamp + suffix);
  for (int i = 1; std::filesystem::exists(candidate); ++i) {
    candidate = dir / (prefix + stamp + "-" + std::to_string(i) + suffix);
  }
  return candidate;
}

inline json environment_to_json(const EnvironmentDescriptor& env) {
  return json{{"hostname", env.hostname},
              {"os_name", env.os_name},
              {"os_version", env.os_version},
              {"cpu_model", env.cpu_model},
              {"logical_cpus", env.logical_cpus},
              {"memory_bytes", env.memory_bytes},
              {"clock_resolution_ns", env.clock_resolution_ns},
              {"digest", env.digest()}};
}

inline EnvironmentDescriptor environment_from_json(const json& j) {
  EnvironmentDescriptor env;
  env.hostname = j.at("hostname").get<std::string>();
  env.os_name = j.at("os_name").get<std::string>();
  env.os_version = j.at("os_version").get<std::string>();
  env.cpu_model = j.at("cpu_model").get<std::string>();
  env.logical_cpus = j.at("logical_cpus").get<std::uint32_t>();
  env.memory_bytes = j.at("memory_bytes").get<std::uint64_t>();
  env.clock_resolution_ns = j.at("clock_resolution_ns").get<std::int64_t>();
  return env;
}

inline json config_to_json(const RunConfig& cfg) {
  return json{
      {"loop_starts", cfg.loop_starts},
      {"calls_per_loop", cfg.calls_per_loop},
      {"warmup_fraction", cfg.warmup_fraction},
      {"workers", cfg.workers},
      {"probe", to_string(cfg.probe)},
      {"workload",
       {{"recursion_depth", cfg.workload.recursion_depth()},
        {"spin_ns", cfg.workload.spin_ns()},
        {"signature", cfg.workload.signature()}}},
      {"queue",
       {{"capacity", cfg.queue.capacity},
        {"put_strategy", to_string(cfg.queue.put_strategy)},
        {"unsafe_allow_mismatch", cfg.queue.unsafe_allow_mismatch}}},
      {"output_dir", cfg.output_dir.string()},
      {"keep_traces", cfg.keep_traces},
      {"digest", cfg.digest()}};
}

inline RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  cfg.loop_starts = j.at("loop_starts").get<int>();
  cfg.calls_per_loop = j.at("calls_per_loop").get<std::int64_t>();
  cfg.warmup_fraction = j.at("warmup_fraction").get<double>();
  cfg.workers = j.at("workers").get<int>();
  cfg.probe = parse_probe_kind(j.at("probe").get<std::string>());
  const auto& w = j.at("workload");
  cfg.workload = WorkloadConfig(w.at("recursion_depth").get<std::int64_t>(),
                                w.at("spin_ns").get<std::int64_t>(),
                                w.at("signature").get<std::string>());
  const auto& q = j.at("queue");
  cfg.queue.capacity = q.at("capacity").get<std::size_t>();
  cfg.queue.put_strategy =
      parse_put_strategy(q.at("put_strategy").get<std::string>());
  cfg.queue.unsafe_allow_mismatch = q.value("unsafe_allow_mismatch", false);
  cfg.output_dir = j.value("output_dir", std::string("overbench-out"));
  cfg.keep_traces = j.value("keep_traces", true);
  return cfg;
}

inline json loop_to_json(const LoopStartResult& loop) {
  json j{{"index", loop.loop_index},
         {"durations_ns", loop.durations_ns},
         {"checksum_fold", loop.checksum_fold}};
  j["drain"] = loop.drain ? json{{"records", loop.drain->records},
                                 {"bytes", loop.drain->bytes}}
                          : json(nullptr);
  j["counters"] = loop.counters
                      ? json{{"enqueued", loop.counters->enqueued},
                             {"drained", loop.counters->drained},
                             {"yield_waits", loop.counters->yield_waits}}
                      : json(nullptr);
  j["trace_file"] =
      loop.trace_file ? json(loop.trace_file->string()) : json(nullptr);
  return j;
}

inline LoopStartResult loop_from_json(const json& j) {
  LoopStartResult loop;
  loop.loop_index = j.at("index").get<int>();
  loop.durations_ns = j.at("durations_ns").get<std::vector<std::int64_t>>();
  loop.checksum_fold = j.value("checksum_fold", std::uint64_t{0});
  if (j.contains("drain") && !j["drain"].is_null()) {
    loop.drain = DrainReport{j["drain"].at("records").get<std::uint64_t>(),
                             j["drain"].at("bytes").get<std::uint64_t>()};
  }
  if (j.contains("counters") && !j["counters"].is_null()) {
    const auto& c = j["counters"];
    loop.counters = QueueCounters{c.at("enqueued").get<std::uint64_t>(),
                                  c.at("drained").get<std::uint64_t>(),
                                  c.at("yield_waits").get<std::uint64_t>()};
  }
  if (j.contains("trace_file") && !j["trace_file"].is_null()) {
    loop.trace_file = j["trace_file"].get<std::string>();
  }
  return loop;
}

inline json run_to_json(const BenchmarkRun& run) {
  json loops = json::array();
  for (const auto& loop : run.loops) loops.push_back(loop_to_json(loop));
  return json{{"format", "overbench-run"},
              {"version", kRawRunVersion},
              {"started_at", run.started_at},
              {"checksum_fold", run.checksum_fold},
              {"config", config_to_json(run.config)},
              {"environment", environment_to_json(run.environment)},
              {"loops", std::move(loops)}};
}

inline BenchmarkRun run_from_json(const json& j) {
  if (j.value("format", std::string()) != "overbench-run") {
    throw FormatError("not an overbench raw-run document");
  }
  if (j.value("version", 0) != kRawRunVersion) {
    throw SchemaMismatchError("unsupported raw-run version " +
                              j.value("version", json(0)).dump());
  }
  BenchmarkRun run;
  run.started_at = j.at("started_at").get<std::string>();
  run.checksum_fold = j.value("checksum_fold", std::uint64_t{0});
  run.config = config_from_json(j.at("config"));
  run.environment = environment_from_json(j.at("environment"));
  for (const auto& loop : j.at("loops")) run.loops.push_back(loop_from_json(loop));
  return run;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

// Writes text to path via a temporary sibling and rename, so readers never
// observe a partial file.
inline void write_file_atomically(const std::filesystem::path& path,
                                  const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename " + tmp.string() + " -> " + path.string() +
                  ": " + ec.message());
  }
}

inline BenchmarkRun read_raw_run(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    auto run = run_from_json(j);
    run.raw_file = path;
    return run;
  } catch (const json::exception& e) {
    throw FormatError("raw-run file " + path.string() +
                      " is missing fields: " + e.what());
  }
}

/// Writes run-<stamp>.json into dir without overwriting existing files.
inline std::filesystem::path write_raw_run(const BenchmarkRun& run,
                                           const std::filesystem::path& dir,
                                           const std::string& stamp) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto path = unique_output_path(dir, "run-", stamp, ".json");
  write_file_atomically(path, run_to_json(run).dump());
  return path;
}

}  // namespace overbench
