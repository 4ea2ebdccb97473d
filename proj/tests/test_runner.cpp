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

#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "overbench/runner.hpp"
#include "support.hpp"

namespace ob = overbench;
namespace fs = std::filesystem;
using ob::testing::TempDir;

namespace {

ob::RunConfig small_config(const fs::path& out, ob::ProbeKind probe) {
  ob::RunConfig cfg;
  cfg.loop_starts = 2;
  cfg.calls_per_loop = 100;
  cfg.warmup_fraction = 0.0;
  cfg.probe = probe;
  cfg.output_dir = out;
  return cfg;
}

}  // namespace

TEST(RunConfigValidation, Rules) {
  ob::RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.loop_starts = 1;
  EXPECT_THROW(cfg.validate(), ob::ValidationError);
  cfg = {};
  cfg.workers = 2;
  cfg.queue.put_strategy = ob::PutStrategyKind::SingleProducerBlocking;
  EXPECT_THROW(cfg.validate(), ob::ConfigurationError);
  cfg.queue.unsafe_allow_mismatch = true;
  EXPECT_NO_THROW(cfg.validate());
  cfg = {};
  cfg.warmup_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), ob::ValidationError);
  cfg = {};
  cfg.calls_per_loop = 0;
  EXPECT_THROW(cfg.validate(), ob::ValidationError);
  cfg = {};
  cfg.queue.capacity = 0;
  EXPECT_THROW(cfg.validate(), ob::ValidationError);
}

TEST(RunConfigDigest, IgnoresOutputLocation) {
  ob::RunConfig a, b;
  b.output_dir = "elsewhere";
  b.keep_traces = false;
  EXPECT_EQ(a.digest(), b.digest());
  b.workers = 3;
  EXPECT_NE(a.digest(), b.digest());
}

TEST(Environment, CaptureIsPopulatedAndStable) {
  const auto a = ob::capture_environment();
  const auto b = ob::capture_environment();
  EXPECT_GE(a.logical_cpus, 1u);
  EXPECT_GT(a.clock_resolution_ns, 0);
  EXPECT_FALSE(a.cpu_model.empty());
  EXPECT_EQ(a.cpu_model, b.cpu_model);
  EXPECT_EQ(a.digest(), b.digest());
}

TEST(RunBenchmark, BaselineCountsAndNoTraces) {
  TempDir dir;
  const auto run =
      ob::run_benchmark(small_config(dir.path(), ob::ProbeKind::Baseline));
  ASSERT_EQ(run.loops.size(), 2u);
  for (const auto& loop : run.loops) {
    EXPECT_EQ(loop.durations_ns.size(), 100u);
    EXPECT_FALSE(loop.trace_file);
    EXPECT_FALSE(loop.drain);
    for (auto d : loop.durations_ns) EXPECT_GE(d, 0);
  }
  EXPECT_EQ(run.checksum_fold, 2u * 100u * 55u);
  EXPECT_TRUE(fs::exists(run.raw_file));
}

TEST(RunBenchmark, BinaryWriterTraceHoldsOneRecordPerActivation) {
  TempDir dir;
  const auto run =
      ob::run_benchmark(small_config(dir.path(), ob::ProbeKind::BinaryWriter));
  std::set<fs::path> files;
  for (const auto& loop : run.loops) {
    ASSERT_TRUE(loop.trace_file);
    ASSERT_TRUE(loop.drain);
    ASSERT_TRUE(loop.counters);
    files.insert(*loop.trace_file);
    EXPECT_EQ(loop.drain->records, 1000u);
    // Each loop start gets a fresh queue.
    EXPECT_EQ(loop.counters->enqueued, 1000u);
    EXPECT_EQ(loop.counters->drained, 1000u);
    const auto report = ob::verify_trace_file(*loop.trace_file);
    EXPECT_TRUE(report.ok());
    EXPECT_EQ(report.records, 1000u);
  }
  EXPECT_EQ(files.size(), 2u);
}

TEST(RunBenchmark, DiscardedTracesAreRemoved) {
  TempDir dir;
  auto cfg = small_config(dir.path(), ob::ProbeKind::BinaryWriter);
  cfg.keep_traces = false;
  const auto run = ob::run_benchmark(cfg);
  for (const auto& loop : run.loops) EXPECT_FALSE(loop.trace_file);
  for (const auto& entry : fs::directory_iterator(dir.path())) {
    EXPECT_NE(entry.path().extension(), ".bin");
  }
}

TEST(RunBenchmark, ParallelWorkersPoolDurations) {
  TempDir dir;
  auto cfg = small_config(dir.path(), ob::ProbeKind::BinaryWriter);
  cfg.workers = 3;
  cfg.queue.capacity = 16;
  const auto run = ob::run_benchmark(cfg);
  for (const auto& loop : run.loops) {
    EXPECT_EQ(loop.durations_ns.size(), 300u);
    EXPECT_EQ(loop.drain->records, 3000u);
  }
  EXPECT_EQ(run.checksum_fold, 2u * 300u * 55u);
}

TEST(RunBenchmark, SingleProducerStrategyWithTwoWorkersIsRejected) {
  TempDir dir;
  auto cfg = small_config(dir.path(), ob::ProbeKind::BinaryWriter);
  cfg.workers = 2;
  cfg.queue.put_strategy = ob::PutStrategyKind::SingleProducerBlocking;
  EXPECT_THROW(ob::run_benchmark(cfg), ob::ConfigurationError);
  EXPECT_TRUE(fs::is_empty(dir.path()));
}

TEST(RunBenchmark, FailedLoopLeavesNoRawRun) {
  TempDir dir;
  const auto cfg = small_config(dir.path(), ob::ProbeKind::Baseline);
  const ob::LoopLauncher failing = [](const ob::RunConfig& c, int i,
                                      const std::string& stamp) {
    if (i == 1) throw ob::IntegrityError("injected");
    return ob::run_loop_start(c, i, stamp);
  };
  EXPECT_THROW(ob::run_benchmark(cfg, failing), ob::IntegrityError);
  EXPECT_TRUE(fs::is_empty(dir.path()));
}

TEST(RunBenchmark, ShortLoopResultIsIntegrityError) {
  TempDir dir;
  const auto cfg = small_config(dir.path(), ob::ProbeKind::Baseline);
  const ob::LoopLauncher short_loop = [](const ob::RunConfig& c, int i,
                                         const std::string& stamp) {
    auto r = ob::run_loop_start(c, i, stamp);
    r.durations_ns.pop_back();
    return r;
  };
  EXPECT_THROW(ob::run_benchmark(cfg, short_loop), ob::IntegrityError);
}

TEST(RunBenchmark, RawRunRoundTrips) {
  TempDir dir;
  const auto run =
      ob::run_benchmark(small_config(dir.path(), ob::ProbeKind::BinaryWriter));
  const auto back = ob::read_raw_run(run.raw_file);
  EXPECT_EQ(back.config.digest(), run.config.digest());
  EXPECT_EQ(back.environment.digest(), run.environment.digest());
  EXPECT_EQ(back.started_at, run.started_at);
  EXPECT_EQ(back.checksum_fold, run.checksum_fold);
  ASSERT_EQ(back.loops.size(), run.loops.size());
  for (std::size_t i = 0; i < run.loops.size(); ++i) {
    EXPECT_EQ(back.loops[i].durations_ns, run.loops[i].durations_ns);
    EXPECT_EQ(back.loops[i].drain, run.loops[i].drain);
    EXPECT_EQ(back.loops[i].trace_file, run.loops[i].trace_file);
  }
}

TEST(RunBenchmark, RawRunsAreNeverOverwritten) {
  TempDir dir;
  const auto run =
      ob::run_benchmark(small_config(dir.path(), ob::ProbeKind::Baseline));
  const auto p1 = ob::write_raw_run(run, dir.path(), "same");
  const auto p2 = ob::write_raw_run(run, dir.path(), "same");
  EXPECT_NE(p1, p2);
  EXPECT_TRUE(fs::exists(p1));
  EXPECT_TRUE(fs::exists(p2));
}

TEST(RunBenchmark, ReadingMalformedRawRun) {
  TempDir dir;
  ob::testing::write_text(dir / "bad.json", "{not json");
  EXPECT_THROW(ob::read_raw_run(dir / "bad.json"), ob::FormatError);
  ob::testing::write_text(dir / "other.json", R"({"format":"x"})");
  EXPECT_THROW(ob::read_raw_run(dir / "other.json"), ob::FormatError);
  ob::testing::write_text(dir / "v2.json",
                          R"({"format":"overbench-run","version":2})");
  EXPECT_THROW(ob::read_raw_run(dir / "v2.json"), ob::SchemaMismatchError);
}

TEST(Summaries, PerLoopMeanBasisCarriesTheMde) {
  const auto run = ob::testing::synthetic_run(
      {{90, 110}, {100, 100}, {95, 105}}, ob::ProbeKind::BinaryWriter);
  const auto s = ob::summarize_run(run);
  EXPECT_EQ(s.name, "Binary Writer");
  EXPECT_EQ(s.per_loop_mean.count, 3u);
  EXPECT_EQ(s.per_call.count, 6u);
  EXPECT_DOUBLE_EQ(s.per_loop_mean.rel_stddev, 0.0);
  EXPECT_GT(s.per_call.rel_stddev, 0.0);
  EXPECT_DOUBLE_EQ(s.mde_table, 0.0);
}

TEST(Summaries, WorkerCountAppearsInName) {
  ob::RunConfig cfg;
  EXPECT_EQ(ob::benchmark_name(cfg), "Baseline");
  cfg.workers = 4;
  cfg.probe = ob::ProbeKind::BinaryWriter;
  EXPECT_EQ(ob::benchmark_name(cfg), "Binary Writer [workers=4]");
}

TEST(ThreadSweep, OneRunPerWorkerCount) {
  TempDir dir;
  auto base = small_config(dir.path(), ob::ProbeKind::Baseline);
  std::vector<int> seen;
  const auto runs = ob::run_thread_sweep(
      base, {1, 2, 4}, [&](const ob::BenchmarkRun& r) {
        seen.push_back(r.config.workers);
      });
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 4}));
  for (const auto& run : runs) {
    for (const auto& loop : run.loops) {
      EXPECT_EQ(loop.durations_ns.size(),
                static_cast<std::size_t>(100 * run.config.workers));
    }
  }
}

TEST(ThreadSweep, RejectsBadCountsBeforeRunning) {
  TempDir dir;
  auto base = small_config(dir.path(), ob::ProbeKind::Baseline);
  EXPECT_THROW(ob::run_thread_sweep(base, {}), ob::ValidationError);
  EXPECT_THROW(ob::run_thread_sweep(base, {1, 0}), ob::ValidationError);
  base.queue.put_strategy = ob::PutStrategyKind::SingleProducerBlocking;
  EXPECT_THROW(ob::run_thread_sweep(base, {1, 2}), ob::ConfigurationError);
  EXPECT_TRUE(fs::is_empty(dir.path()));
}

TEST(ThreadSweep, CompletedRunsSurviveALaterFailure) {
  TempDir dir;
  auto base = small_config(dir.path(), ob::ProbeKind::Baseline);
  int completed = 0;
  const ob::LoopLauncher launcher = [](const ob::RunConfig& c, int i,
                                       const std::string& stamp) {
    if (c.workers == 4) throw ob::IntegrityError("injected");
    return ob::run_loop_start(c, i, stamp);
  };
  EXPECT_THROW(ob::run_thread_sweep(
                   base, {1, 2, 4},
                   [&](const ob::BenchmarkRun&) { ++completed; }, launcher),
               ob::IntegrityError);
  EXPECT_EQ(completed, 2);
  int raw_files = 0;
  for (const auto& e : fs::directory_iterator(dir.path())) {
    raw_files += e.path().extension() == ".json";
  }
  EXPECT_EQ(raw_files, 2);
}

TEST(SpawnLauncher, RunsEachLoopInAChildProcess) {
  TempDir dir;
  auto cfg = small_config(dir.path(), ob::ProbeKind::BinaryWriter);
  const auto run = ob::run_benchmark(cfg, ob::SpawnLauncher(OVERBENCH_CLI_PATH));
  ASSERT_EQ(run.loops.size(), 2u);
  for (const auto& loop : run.loops) {
    EXPECT_EQ(loop.durations_ns.size(), 100u);
    ASSERT_TRUE(loop.drain);
    EXPECT_EQ(loop.drain->records, 1000u);
  }
  EXPECT_EQ(run.checksum_fold, 2u * 100u * 55u);
}

TEST(SpawnLauncher, MissingExecutableIsIoError) {
  TempDir dir;
  const auto cfg = small_config(dir.path(), ob::ProbeKind::Baseline);
  EXPECT_THROW(ob::run_benchmark(cfg, ob::SpawnLauncher("/nonexistent/exe")),
               ob::IoError);
}
