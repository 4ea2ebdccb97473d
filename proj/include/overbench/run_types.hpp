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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "overbench/digest.hpp"
#include "overbench/environment.hpp"
#include "overbench/error.hpp"
#include "overbench/probe.hpp"
#include "overbench/queue.hpp"
#include "overbench/stats.hpp"
#include "overbench/workload.hpp"

namespace overbench {

enum class ProbeKind { Baseline, BinaryWriter };

inline std::string_view to_string(ProbeKind kind) noexcept {
  return kind == ProbeKind::Baseline ? "baseline" : "binary-writer";
}

// Human-readable benchmark name used in tables and exported results.
inline std::string_view display_name(ProbeKind kind) noexcept {
  return kind == ProbeKind::Baseline ? "Baseline" : "Binary Writer";
}

inline ProbeKind parse_probe_kind(std::string_view text) {
  if (text == "baseline") return ProbeKind::Baseline;
  if (text == "binary-writer") return ProbeKind::BinaryWriter;
  throw ValidationError("unknown probe kind '" + std::string(text) +
                        "' (expected baseline or binary-writer)");
}

inline PutStrategyKind parse_put_strategy(std::string_view text) {
  if (text == "yield") return PutStrategyKind::Yield;
  if (text == "sp") return PutStrategyKind::SingleProducerBlocking;
  throw ValidationError("unknown put strategy '" + std::string(text) +
                        "' (expected sp or yield)");
}

struct QueueConfig {
  std::size_t capacity = kDefaultQueueCapacity;
  PutStrategyKind put_strategy = PutStrategyKind::Yield;
  bool unsafe_allow_mismatch = false;

  friend bool operator==(const QueueConfig&, const QueueConfig&) = default;
};

struct RunConfig {
  int loop_starts = 10;
  std::int64_t calls_per_loop = 100'000;
  double warmup_fraction = 0.5;
  int workers = 1;
  ProbeKind probe = ProbeKind::Baseline;
  WorkloadConfig workload;
  QueueConfig queue;
  std::filesystem::path output_dir = "overbench-out";
  // Trace files of BinaryWriter loop starts are verified either way; this
  // only decides whether they stay on disk afterwards.
  bool keep_traces = true;

  std::int64_t samples_per_loop() const noexcept {
    return calls_per_loop * workers;
  }

  void validate() const {
    if (loop_starts < 2) {
      throw ValidationError("loop starts n must be >= 2, got " +
                            std::to_string(loop_starts));
    }
    if (calls_per_loop < 1) {
      throw ValidationError("calls per loop must be >= 1");
    }
    if (workers < 1) {
      throw ValidationError("workers must be >= 1");
    }
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
      throw ValidationError("warmup fraction must be in [0, 1)");
    }
    if (queue.capacity < 1) {
      throw ValidationError("queue capacity must be >= 1");
    }
    if (workers >= 2 &&
        queue.put_strategy == PutStrategyKind::SingleProducerBlocking &&
        !queue.unsafe_allow_mismatch) {
      throw ConfigurationError(
          "the sp put strategy supports a single producer; use --put-strategy "
          "yield with " +
          std::to_string(workers) + " workers");
    }
    const auto total = samples_per_loop();
    const auto skip = static_cast<std::int64_t>(
        std::floor(warmup_fraction * static_cast<double>(total)));
    if (total - skip < 1) {
      throw ValidationError("warmup removal leaves no samples per loop start");
    }
  }

  // Identity of everything that shapes the measurement. Output location and
  // trace retention are excluded.
  std::string digest() const {
    Fnv1a h;
    h.add(static_cast<std::int64_t>(loop_starts));
    h.add(calls_per_loop);
    h.add(std::to_string(warmup_fraction));
    h.add(static_cast<std::int64_t>(workers));
    h.add(to_string(probe));
    h.add(static_cast<std::int64_t>(workload.recursion_depth()));
    h.add(workload.spin_ns());
    h.add(workload.signature());
    h.add(static_cast<std::int64_t>(queue.capacity));
    h.add(to_string(queue.put_strategy));
    h.add(static_cast<std::int64_t>(queue.unsafe_allow_mismatch));
    return h.hex();
  }
};

struct LoopStartResult {
  int loop_index = 0;
  // calls_per_loop * workers samples, interleaved by call index: entry
  // call * workers + w is worker w's call-th call. Dropping a leading
  // fraction therefore removes the first calls of every worker.
  std::vector<std::int64_t> durations_ns;
  std::optional<DrainReport> drain;
  std::optional<QueueCounters> counters;
  std::optional<std::filesystem::path> trace_file;
  std::uint64_t checksum_fold = 0;
};

struct BenchmarkRun {
  RunConfig config;
  std::vector<LoopStartResult> loops;
  EnvironmentDescriptor environment;
  std::string started_at;  // ISO-8601 UTC
  std::uint64_t checksum_fold = 0;
  std::filesystem::path raw_file;
};

// Statistics of one run on both sample bases.
struct RunSummary {
  std::string name;
  StatsSummary per_call;
  StatsSummary per_loop_mean;
  std::vector<double> loop_means;
  double mde_table = 0.0;  // fraction
  double mde_power = 0.0;  // fraction
};

inline std::string benchmark_name(const RunConfig& cfg) {
  std::string name(display_name(cfg.probe));
  if (cfg.workers > 1) name += " [workers=" + std::to_string(cfg.workers) + "]";
  return name;
}

/// Warmup removal is applied per loop start. The per-loop-mean basis has one
/// value per loop start and carries the MDE; the per-call basis pools every
/// retained call and is diagnostic.
inline RunSummary summarize_run(const BenchmarkRun& run, double alpha = 0.01,
                                double beta = 0.01) {
  RunSummary s;
  s.name = benchmark_name(run.config);
  std::vector<std::int64_t> pooled;
  for (const auto& loop : run.loops) {
    const auto skip =
        warmup_cutoff(loop.durations_ns.size(), run.config.warmup_fraction);
    pooled.insert(pooled.end(), loop.durations_ns.begin() + skip,
                  loop.durations_ns.end());
    s.loop_means.push_back(
        retained_mean(loop.durations_ns, run.config.warmup_fraction));
  }
  s.per_call = summarize(pooled, 0.0, SampleBasis::PerCall);
  s.per_loop_mean = summarize(s.loop_means, 0.0, SampleBasis::PerLoopMean);
  const int n = static_cast<int>(run.loops.size());
  s.mde_table = minimal_detectable_change(
      s.per_loop_mean.rel_stddev,
      MdeConfig{n, alpha, beta, MdeMode::TableConsistent});
  s.mde_power = minimal_detectable_change(
      s.per_loop_mean.rel_stddev,
      MdeConfig{n, alpha, beta, MdeMode::TwoSamplePower});
  return s;
}

inline LoopMeans loop_means_of(const BenchmarkRun& run) {
  LoopMeans m;
  m.config_digest = run.config.digest();
  for (const auto& loop : run.loops) {
    m.means.push_back(
        retained_mean(loop.durations_ns, run.config.warmup_fraction));
  }
  return m;
}

}  // namespace overbench
