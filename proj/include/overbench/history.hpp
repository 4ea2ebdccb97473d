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

// Run history for CI. Each entry is one benchmark invocation (a commit on a
// host) holding one result per benchmark in the github-action-benchmark
// "customSmallerIsBetter" shape:
//
//   {"name": "Baseline", "unit": "ns/call", "value": 90.68,
//    "range": "±0.11%", "extra": "cfg=...;n=10;mde=0.24;loop_means=..."}
//
// The history file is {"schema_version": 1, "entries": [...]}. It only ever
// grows: appends rewrite the file through a temporary and an atomic rename,
// serialized by an advisory lock file next to it.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include <json.hpp>

#include "overbench/error.hpp"
#include "overbench/run_io.hpp"
#include "overbench/run_types.hpp"
#include "overbench/stats.hpp"

namespace overbench {

inline constexpr int kHistorySchemaVersion = 1;
inline constexpr std::string_view kGabUnit = "ns/call";

struct GabBenchmark {
  std::string name;
  std::string unit{kGabUnit};
  double value = 0.0;
  std::string range;
  std::string extra;

  friend bool operator==(const GabBenchmark&, const GabBenchmark&) = default;
};

struct HistoryEntry {
  std::string commit_id = "unknown";
  std::string timestamp;  // ISO-8601 UTC
  EnvironmentDescriptor environment;
  std::vector<GabBenchmark> benchmarks;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct HistoryFile {
  int schema_version = kHistorySchemaVersion;
  std::vector<HistoryEntry> entries;
};

// ---------------------------------------------------------------------------
// range and extra encodings

inline std::string format_range(double rel_stddev) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "\xC2\xB1%.2f%%", rel_stddev * 100.0);
  return buf;
}

/// Parses "±0.11%" back to a percentage (0.11).
inline double parse_range_percent(std::string_view range) {
  constexpr std::string_view kPlusMinus = "\xC2\xB1";
  if (range.starts_with(kPlusMinus)) range.remove_prefix(kPlusMinus.size());
  else if (range.starts_with("+-")) range.remove_prefix(2);
  if (!range.ends_with('%')) {
    throw FormatError("range must end with '%': " + std::string(range));
  }
  range.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(range.data(), range.data() + range.size(), value);
  if (ec != std::errc() || ptr != range.data() + range.size() || value < 0.0) {
    throw FormatError("range is not a non-negative percentage: " +
                      std::string(range));
  }
  return value;
}

inline std::string shortest(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

struct ExtraFields {
  std::string config_digest;
  int n = 0;
  std::optional<double> mde_percent;
  std::vector<double> loop_means;
};

inline std::string encode_extra(const ExtraFields& fields) {
  std::string out = "cfg=" + fields.config_digest +
                    ";n=" + std::to_string(fields.n);
  if (fields.mde_percent) out += ";mde=" + shortest(*fields.mde_percent);
  if (!fields.loop_means.empty()) {
    out += ";loop_means=";
    for (std::size_t i = 0; i < fields.loop_means.size(); ++i) {
      if (i) out += ',';
      out += shortest(fields.loop_means[i]);
    }
  }
  return out;
}

// Unknown keys are ignored so hand-written extras do not break ingestion.
inline ExtraFields decode_extra(std::string_view extra) {
  ExtraFields fields;
  auto parse_double = [](std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw FormatError("bad number in extra: " + std::string(text));
    }
    return v;
  };
  while (!extra.empty()) {
    const auto semi = extra.find(';');
    std::string_view item = extra.substr(0, semi);
    extra = semi == std::string_view::npos ? std::string_view{}
                                           : extra.substr(semi + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = item.substr(0, eq);
    auto value = item.substr(eq + 1);
    if (key == "cfg") {
      fields.config_digest = std::string(value);
    } else if (key == "n") {
      fields.n = static_cast<int>(parse_double(value));
    } else if (key == "mde") {
      fields.mde_percent = parse_double(value);
    } else if (key == "loop_means") {
      while (!value.empty()) {
        const auto comma = value.find(',');
        fields.loop_means.push_back(parse_double(value.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
      }
    }
  }
  return fields;
}

// ---------------------------------------------------------------------------
// export / ingest

/// value is the mean ns per call after warmup removal, range the relative
/// standard deviation of the loop-start means, extra the config digest, the
/// table-consistent MDE and the loop-start means.
inline GabBenchmark to_gab_benchmark(const BenchmarkRun& run) {
  const RunSummary s = summarize_run(run);
  GabBenchmark b;
  b.name = s.name;
  b.value = s.per_call.mean_ns;
  b.range = format_range(s.per_loop_mean.rel_stddev);
  b.extra = encode_extra(ExtraFields{run.config.digest(),
                                     static_cast<int>(s.loop_means.size()),
                                     s.mde_table * 100.0, s.loop_means});
  return b;
}

inline json gab_to_json(const GabBenchmark& b) {
  return json{{"name", b.name},
              {"unit", b.unit},
              {"value", b.value},
              {"range", b.range},
              {"extra", b.extra}};
}

inline json export_gab_json(std::span<const GabBenchmark> benchmarks) {
  json out = json::array();
  for (const auto& b : benchmarks) out.push_back(gab_to_json(b));
  return out;
}

inline json export_gab_json(std::span<const BenchmarkRun> runs) {
  std::vector<GabBenchmark> benchmarks;
  for (const auto& run : runs) benchmarks.push_back(to_gab_benchmark(run));
  return export_gab_json(std::span<const GabBenchmark>(benchmarks));
}

inline json export_gab_json(const BenchmarkRun& run) {
  return export_gab_json(std::span<const BenchmarkRun>(&run, 1));
}

inline GabBenchmark gab_from_json(const json& j) {
  try {
    GabBenchmark b;
    b.name = j.at("name").get<std::string>();
    b.unit = j.at("unit").get<std::string>();
    b.value = j.at("value").get<double>();
    b.range = j.value("range", std::string());
    b.extra = j.value("extra", std::string());
    if (!b.range.empty()) parse_range_percent(b.range);
    return b;
  } catch (const json::exception& e) {
    throw FormatError(std::string("benchmark result missing fields: ") +
                      e.what());
  }
}

inline std::vector<GabBenchmark> ingest_gab_json(const json& doc) {
  if (!doc.is_array()) {
    throw FormatError("benchmark export must be a JSON array");
  }
  std::vector<GabBenchmark> out;
  for (const auto& item : doc) out.push_back(gab_from_json(item));
  return out;
}

// ---------------------------------------------------------------------------
// history file

inline json entry_to_json(const HistoryEntry& e) {
  json benchmarks = json::array();
  for (const auto& b : e.benchmarks) benchmarks.push_back(gab_to_json(b));
  return json{{"commit_id", e.commit_id},
              {"timestamp", e.timestamp},
              {"environment", environment_to_json(e.environment)},
              {"benchmarks", std::move(benchmarks)}};
}

inline HistoryEntry entry_from_json(const json& j) {
  HistoryEntry e;
  e.commit_id = j.at("commit_id").get<std::string>();
  e.timestamp = j.at("timestamp").get<std::string>();
  e.environment = environment_from_json(j.at("environment"));
  for (const auto& b : j.at("benchmarks")) e.benchmarks.push_back(gab_from_json(b));
  return e;
}

inline void validate_entry(const HistoryEntry& e) {
  std::set<std::string> names;
  for (const auto& b : e.benchmarks) {
    if (!names.insert(b.name).second) {
      throw ValidationError("duplicate benchmark name in history entry: " +
                            b.name);
    }
    if (!(b.value > 0.0) || !std::isfinite(b.value)) {
      throw ValidationError("benchmark value must be positive: " + b.name);
    }
    parse_range_percent(b.range);
  }
}

inline std::string to_json_text(const HistoryFile& file) {
  json entries = json::array();
  for (const auto& e : file.entries) entries.push_back(entry_to_json(e));
  return json{{"schema_version", file.schema_version},
              {"entries", std::move(entries)}}
      .dump(1);
}

/// A missing file reads as an empty history.
inline HistoryFile read_history(const std::filesystem::path& path) {
  HistoryFile file;
  if (!std::filesystem::exists(path)) return file;
  const json doc = read_json_file(path);
  const int version = doc.value("schema_version", -1);
  if (version != kHistorySchemaVersion) {
    throw SchemaMismatchError(
        "history schema version " + std::to_string(version) + " in " +
        path.string() + " needs migration to " +
        std::to_string(kHistorySchemaVersion));
  }
  try {
    for (const auto& e : doc.at("entries")) {
      file.entries.push_back(entry_from_json(e));
    }
  } catch (const json::exception& e) {
    throw FormatError("history " + path.string() + " is malformed: " + e.what());
  }
  return file;
}

// Exclusive advisory lock: <history>.lock created with O_EXCL. A second
// writer fails fast with LockConflictError.
class HistoryLock {
 public:
  explicit HistoryLock(std::filesystem::path history)
      : path_(std::move(history)) {
    path_ += ".lock";
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST) {
        throw LockConflictError("history is locked by another writer: " +
                                path_.string());
      }
      throw IoError("cannot create lock " + path_.string());
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  ~HistoryLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  HistoryLock(const HistoryLock&) = delete;
  HistoryLock& operator=(const HistoryLock&) = delete;

 private:
  std::filesystem::path path_;
};

inline HistoryEntry make_history_entry(std::span<const BenchmarkRun> runs,
                                       std::string commit_id) {
  if (runs.empty()) throw ValidationError("history entry needs >= 1 run");
  HistoryEntry e;
  e.commit_id = commit_id.empty() ? "unknown" : std::move(commit_id);
  e.environment = runs.front().environment;
  e.timestamp = runs.front().started_at;
  for (const auto& run : runs) {
    if (run.environment.digest() != e.environment.digest()) {
      throw ValidationError(
          "runs from different environments cannot share a history entry");
    }
    if (run.started_at > e.timestamp) e.timestamp = run.started_at;
    e.benchmarks.push_back(to_gab_benchmark(run));
  }
  return e;
}

inline HistoryFile append_entry(const std::filesystem::path& path,
                                HistoryEntry entry) {
  validate_entry(entry);
  HistoryLock lock(path);
  HistoryFile file = read_history(path);
  if (!file.entries.empty() && entry.timestamp < file.entries.back().timestamp) {
    throw ValidationError("history timestamps must be non-decreasing: " +
                          entry.timestamp + " < " +
                          file.entries.back().timestamp);
  }
  file.entries.push_back(std::move(entry));
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  write_file_atomically(path, to_json_text(file));
  return file;
}

/// Appends one entry built from the runs of one invocation.
inline HistoryFile append_run(const std::filesystem::path& path,
                              std::span<const BenchmarkRun> runs,
                              std::string commit_id = "unknown") {
  return append_entry(path, make_history_entry(runs, std::move(commit_id)));
}

inline HistoryFile append_run(const std::filesystem::path& path,
                              const BenchmarkRun& run,
                              std::string commit_id = "unknown") {
  return append_run(path, std::span<const BenchmarkRun>(&run, 1),
                    std::move(commit_id));
}

// ---------------------------------------------------------------------------
// regression checks

struct RegressionPolicy {
  enum class Mode { Ratio, Statistical };
  Mode mode = Mode::Ratio;
  double threshold = 2.0;  // Ratio: alert when latest / previous > threshold
  double alpha = 0.01;     // Statistical

  static RegressionPolicy ratio(double threshold = 2.0) {
    return {Mode::Ratio, threshold, 0.01};
  }
  static RegressionPolicy statistical(double alpha = 0.01) {
    return {Mode::Statistical, 2.0, alpha};
  }
};

struct Alert {
  std::string benchmark;
  RegressionPolicy::Mode mode = RegressionPolicy::Mode::Ratio;
  std::string previous_commit;
  std::string latest_commit;
  double previous_value = 0.0;
  double latest_value = 0.0;
  double ratio = 0.0;
  // Statistical mode only.
  std::optional<double> p_value;
  std::optional<double> relative_change;
  std::optional<bool> exceeds_mde;
};

struct RegressionReport {
  std::vector<Alert> alerts;
  std::vector<std::string> warnings;

  bool regressed() const noexcept { return !alerts.empty(); }
};

/// Compares every benchmark of the latest entry with its most recent
/// predecessor recorded on the same environment. Entries from other
/// environments are never compared.
inline RegressionReport check_regression(const HistoryFile& history,
                                         const RegressionPolicy& policy) {
  RegressionReport report;
  if (history.entries.size() < 2) {
    report.warnings.push_back("history has fewer than 2 entries; nothing to compare");
    return report;
  }
  const HistoryEntry& latest = history.entries.back();
  const std::string env = latest.environment.digest();

  for (const auto& bench : latest.benchmarks) {
    const GabBenchmark* previous = nullptr;
    const HistoryEntry* previous_entry = nullptr;
    for (auto it = history.entries.rbegin() + 1; it != history.entries.rend();
         ++it) {
      if (it->environment.digest() != env) continue;
      for (const auto& b : it->benchmarks) {
        if (b.name == bench.name) {
          previous = &b;
          previous_entry = &*it;
          break;
        }
      }
      if (previous) break;
    }
    if (!previous) {
      report.warnings.push_back("no earlier entry for '" + bench.name +
                                "' on this environment");
      continue;
    }

    Alert alert;
    alert.benchmark = bench.name;
    alert.previous_commit = previous_entry->commit_id;
    alert.latest_commit = latest.commit_id;
    alert.previous_value = previous->value;
    alert.latest_value = bench.value;
    alert.ratio = bench.value / previous->value;

    auto ratio_check = [&] {
      alert.mode = RegressionPolicy::Mode::Ratio;
      if (alert.ratio > policy.threshold) report.alerts.push_back(alert);
    };

    if (policy.mode == RegressionPolicy::Mode::Ratio) {
      ratio_check();
      continue;
    }

    const ExtraFields prev_extra = decode_extra(previous->extra);
    const ExtraFields last_extra = decode_extra(bench.extra);
    if (prev_extra.loop_means.size() < 2 || last_extra.loop_means.size() < 2) {
      report.warnings.push_back("'" + bench.name +
                                "' lacks per-loop means; falling back to ratio "
                                "check with threshold " +
                                shortest(policy.threshold));
      ratio_check();
      continue;
    }
    try {
      const ChangeDecision d = detect_change(
          LoopMeans{prev_extra.config_digest, prev_extra.loop_means},
          LoopMeans{last_extra.config_digest, last_extra.loop_means},
          policy.alpha);
      alert.mode = RegressionPolicy::Mode::Statistical;
      alert.p_value = d.p_value;
      alert.relative_change = d.relative_change;
      if (prev_extra.mde_percent) {
        alert.exceeds_mde = d.relative_change * 100.0 > *prev_extra.mde_percent;
      }
      if (d.changed && d.relative_change > 0.0) report.alerts.push_back(alert);
    } catch (const ComparabilityError& e) {
      report.warnings.push_back("'" + bench.name + "' not compared: " + e.what());
    }
  }
  return report;
}

}  // namespace overbench
