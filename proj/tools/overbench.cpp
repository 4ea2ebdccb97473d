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

// overbench command-line tool.
//
// Exit codes: 0 success / no change, 1 regression or change detected,
// 2 usage or validation error, 3 integrity or I/O error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "overbench/overbench.hpp"

namespace fs = std::filesystem;
using namespace overbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitChanged = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIntegrity = 3;

int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::Validation ? kExitUsage : kExitIntegrity;
}

// Options shared by `run` and `sweep`.
struct RunOptions {
  std::string probe = "baseline";
  int workers = 1;
  int loops = 10;
  std::int64_t calls = 100'000;
  std::int64_t depth = WorkloadConfig::kDefaultDepth;
  std::int64_t spin_ns = 0;
  double warmup = 0.5;
  std::string put_strategy = "yield";
  std::size_t capacity = kDefaultQueueCapacity;
  std::string output_dir = "overbench-out";
  bool spawn = false;
  bool unsafe_allow_mismatch = false;
  bool discard_traces = false;
  std::string history;
  std::string commit;
  double alpha = 0.01;
  double beta = 0.01;
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool with_workers) {
  cmd->add_option("--probe", o.probe,
                  "baseline, binary-writer, or all (both, one row each)")
      ->capture_default_str();
  if (with_workers) {
    cmd->add_option("--workers", o.workers, "worker threads")
        ->capture_default_str();
  }
  cmd->add_option("--loops", o.loops, "loop starts n")->capture_default_str();
  cmd->add_option("--calls", o.calls, "monitored calls per worker per loop")
      ->capture_default_str();
  cmd->add_option("--depth", o.depth, "recursion depth")->capture_default_str();
  cmd->add_option("--spin-ns", o.spin_ns, "busy-wait per recursion level")
      ->capture_default_str();
  cmd->add_option("--warmup", o.warmup, "fraction of each loop discarded")
      ->capture_default_str();
  cmd->add_option("--put-strategy", o.put_strategy, "sp or yield")
      ->capture_default_str();
  cmd->add_option("--capacity", o.capacity, "record queue capacity")
      ->capture_default_str();
  cmd->add_option("--output-dir", o.output_dir,
                  "directory for raw runs and traces (env OVERBENCH_OUT)")
      ->capture_default_str();
  cmd->add_flag("--spawn", o.spawn, "run every loop start in a fresh process");
  cmd->add_flag("--unsafe-allow-mismatch", o.unsafe_allow_mismatch,
                "allow the sp strategy with several producers (corrupts data)");
  cmd->add_flag("--discard-traces", o.discard_traces,
                "delete trace files after verification");
  cmd->add_option("--history", o.history, "append results to this history file");
  cmd->add_option("--commit", o.commit,
                  "commit id for the history entry (default $GITHUB_SHA or "
                  "'unknown')");
  cmd->add_option("--alpha", o.alpha, "type-I error budget")
      ->capture_default_str();
  cmd->add_option("--beta", o.beta, "type-II error budget")
      ->capture_default_str();
}

std::vector<ProbeKind> probes_from(const std::string& text) {
  if (text == "all") return {ProbeKind::Baseline, ProbeKind::BinaryWriter};
  return {parse_probe_kind(text)};
}

RunConfig config_from(const RunOptions& o, ProbeKind probe) {
  RunConfig cfg;
  cfg.loop_starts = o.loops;
  cfg.calls_per_loop = o.calls;
  cfg.warmup_fraction = o.warmup;
  cfg.workers = o.workers;
  cfg.probe = probe;
  cfg.workload = WorkloadConfig(o.depth, o.spin_ns);
  cfg.queue.capacity = o.capacity;
  cfg.queue.put_strategy = parse_put_strategy(o.put_strategy);
  cfg.queue.unsafe_allow_mismatch = o.unsafe_allow_mismatch;
  cfg.output_dir = o.output_dir;
  cfg.keep_traces = !o.discard_traces;
  return cfg;
}

LoopLauncher launcher_for(const RunOptions& o) {
  if (!o.spawn) return run_loop_start;
  return SpawnLauncher(fs::read_symlink("/proc/self/exe"));
}

std::string commit_id(const RunOptions& o) {
  if (!o.commit.empty()) return o.commit;
  if (const char* sha = std::getenv("GITHUB_SHA"); sha && *sha) return sha;
  return "unknown";
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json summary_json(const RunSummary& s) {
  auto stats = [](const StatsSummary& st) {
    return json{{"basis", to_string(st.basis)},
                {"mean_ns", st.mean_ns},
                {"stddev_ns", st.stddev_ns},
                {"rel_stddev", st.rel_stddev},
                {"count", st.count}};
  };
  return json{{"name", s.name},
              {"per_call", stats(s.per_call)},
              {"per_loop_mean", stats(s.per_loop_mean)},
              {"loop_means", s.loop_means},
              {"mde_table_pct", s.mde_table * 100.0},
              {"mde_power_pct", s.mde_power * 100.0}};
}

void print_summary_table(std::ostream& out,
                         const std::vector<std::pair<RunSummary, fs::path>>& rows) {
  out << "benchmark                      mean_ns/call   sigma%   delta%(table)  "
         "delta%(power)  loops\n";
  for (const auto& [s, path] : rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-30s %12.2f %8.2f %15.2f %14.2f %6zu\n",
                  s.name.c_str(), s.per_call.mean_ns,
                  s.per_loop_mean.rel_stddev * 100.0, s.mde_table * 100.0,
                  s.mde_power * 100.0, s.loop_means.size());
    out << line;
  }
}

// ---------------------------------------------------------------------------

int cmd_run(const RunOptions& o, bool as_json) {
  const auto launcher = launcher_for(o);
  std::vector<BenchmarkRun> runs;
  std::vector<RunConfig> configs;
  for (ProbeKind probe : probes_from(o.probe)) {
    configs.push_back(config_from(o, probe));
    configs.back().validate();
  }
  for (const auto& cfg : configs) {
    std::cerr << "running " << benchmark_name(cfg) << ": " << cfg.loop_starts
              << " loop starts x " << cfg.calls_per_loop << " calls x "
              << cfg.workers << " worker(s)\n";
    runs.push_back(run_benchmark(cfg, launcher));
  }

  std::vector<std::pair<RunSummary, fs::path>> rows;
  for (const auto& run : runs) {
    rows.emplace_back(summarize_run(run, o.alpha, o.beta), run.raw_file);
  }

  std::optional<fs::path> history;
  if (!o.history.empty()) {
    history = o.history;
    append_run(*history, std::span<const BenchmarkRun>(runs), commit_id(o));
  }

  if (as_json) {
    json doc{{"runs", json::array()}};
    for (std::size_t i = 0; i < runs.size(); ++i) {
      json r = summary_json(rows[i].first);
      r["raw_file"] = runs[i].raw_file.string();
      r["checksum_fold"] = runs[i].checksum_fold;
      json traces = json::array();
      for (const auto& loop : runs[i].loops) {
        if (loop.trace_file) traces.push_back(loop.trace_file->string());
      }
      r["trace_files"] = std::move(traces);
      doc["runs"].push_back(std::move(r));
    }
    doc["history"] = history ? json(history->string()) : json(nullptr);
    std::cout << doc.dump(2) << "\n";
  } else {
    print_summary_table(std::cout, rows);
    for (const auto& run : runs) {
      std::cout << "raw run: " << run.raw_file.string()
                << "  (checksum fold " << run.checksum_fold << ")\n";
    }
    if (history) std::cout << "history: appended to " << history->string() << "\n";
  }
  return kExitOk;
}

std::vector<int> parse_worker_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int k = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(k);
    } catch (const std::exception&) {
      throw ValidationError("bad worker count '" + item + "' in --workers-list");
    }
  }
  return out;
}

int cmd_sweep(const RunOptions& o, const std::string& workers_list,
              const std::string& csv_path, bool as_json) {
  const auto counts = parse_worker_list(workers_list);
  if (counts.empty()) throw ValidationError("--workers-list is empty");
  const auto launcher = launcher_for(o);
  const auto probes = probes_from(o.probe);

  // Validate every configuration before anything runs.
  std::vector<RunConfig> bases;
  for (ProbeKind probe : probes) {
    RunConfig base = config_from(o, probe);
    for (int k : counts) {
      RunConfig cfg = base;
      cfg.workers = k;
      if (k < 1) throw ValidationError("worker counts must be >= 1");
      cfg.validate();
    }
    bases.push_back(std::move(base));
  }

  fs::create_directories(o.output_dir);
  const fs::path csv = csv_path.empty()
                           ? unique_output_path(o.output_dir, "sweep-",
                                                file_stamp(), ".csv")
                           : fs::path(csv_path);
  std::ofstream out(csv, std::ios::trunc);
  if (!out) throw IoError("cannot write " + csv.string());
  out << "workers,probe,mean_ns,stddev_ns,rel_stddev\n";
  out.flush();

  json rows = json::array();
  auto persist = [&](const BenchmarkRun& run) {
    const RunSummary s = summarize_run(run, o.alpha, o.beta);
    const auto& st = s.per_loop_mean;
    out << run.config.workers << ',' << to_string(run.config.probe) << ','
        << shortest(st.mean_ns) << ',' << shortest(st.stddev_ns) << ','
        << shortest(st.rel_stddev) << '\n';
    out.flush();
    if (!out) throw IoError("write failed: " + csv.string());
    rows.push_back(json{{"workers", run.config.workers},
                        {"probe", to_string(run.config.probe)},
                        {"mean_ns", st.mean_ns},
                        {"stddev_ns", st.stddev_ns},
                        {"rel_stddev", st.rel_stddev},
                        {"samples", run.loops.size() * run.config.samples_per_loop()},
                        {"raw_file", run.raw_file.string()}});
    std::cerr << "sweep: " << benchmark_name(run.config) << " done\n";
  };

  try {
    for (const auto& base : bases) {
      run_thread_sweep(base, counts, persist, launcher);
    }
  } catch (const Error&) {
    std::cerr << "sweep aborted; completed rows are in " << csv.string() << "\n";
    throw;
  }

  if (as_json) {
    std::cout << json{{"csv", csv.string()}, {"rows", rows}}.dump(2) << "\n";
  } else {
    std::cout << "sweep data: " << csv.string() << "\n";
  }
  return kExitOk;
}

int cmd_analyze(const std::vector<std::string>& files, const std::string& history,
                const std::string& policy, double threshold, double alpha,
                bool as_json) {
  if (files.empty() && history.empty()) {
    throw ValidationError("analyze needs raw-run files and/or --history");
  }
  json doc{{"runs", json::array()}};
  std::vector<std::pair<RunSummary, fs::path>> rows;
  for (const auto& f : files) {
    const BenchmarkRun run = read_raw_run(f);
    const RunSummary s = summarize_run(run, alpha);
    json r = summary_json(s);
    r["raw_file"] = f;
    r["environment_digest"] = run.environment.digest();
    r["config_digest"] = run.config.digest();
    doc["runs"].push_back(std::move(r));
    rows.emplace_back(s, f);
  }

  int code = kExitOk;
  if (!history.empty()) {
    RegressionPolicy p;
    if (policy == "ratio") {
      p = RegressionPolicy::ratio(threshold);
    } else if (policy == "statistical") {
      p = RegressionPolicy::statistical(alpha);
      p.threshold = threshold;
    } else {
      throw ValidationError("--policy must be ratio or statistical");
    }
    const HistoryFile file = read_history(history);
    const RegressionReport report = check_regression(file, p);
    json alerts = json::array();
    for (const auto& a : report.alerts) {
      json j{{"benchmark", a.benchmark},
             {"mode", a.mode == RegressionPolicy::Mode::Ratio ? "ratio"
                                                               : "statistical"},
             {"previous_commit", a.previous_commit},
             {"latest_commit", a.latest_commit},
             {"previous_value", a.previous_value},
             {"latest_value", a.latest_value},
             {"ratio", a.ratio}};
      if (a.p_value) j["p_value"] = *a.p_value;
      if (a.relative_change) j["relative_change"] = *a.relative_change;
      if (a.exceeds_mde) j["exceeds_mde"] = *a.exceeds_mde;
      alerts.push_back(std::move(j));
    }
    doc["history"] = json{{"file", history},
                          {"entries", file.entries.size()},
                          {"alerts", alerts},
                          {"warnings", report.warnings}};
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    if (report.regressed()) code = kExitChanged;
  }

  if (as_json) {
    std::cout << doc.dump(2) << "\n";
    return code;
  }
  if (!rows.empty()) {
    print_summary_table(std::cout, rows);
    std::cout << "\nmean over all retained calls vs. mean of loop-start means:\n";
    for (const auto& [s, path] : rows) {
      std::cout << "  " << s.name << ": per-call " << fixed(s.per_call.mean_ns)
                << " ns (sigma " << fixed(s.per_call.rel_stddev * 100.0)
                << "%, " << s.per_call.count << " calls), per-loop-mean "
                << fixed(s.per_loop_mean.mean_ns) << " ns (sigma "
                << fixed(s.per_loop_mean.rel_stddev * 100.0) << "%, "
                << s.per_loop_mean.count << " loops)\n";
    }
  }
  if (doc.contains("history")) {
    const auto& h = doc["history"];
    std::cout << "history " << h["file"].get<std::string>() << ": "
              << h["entries"].get<std::size_t>() << " entries, "
              << h["alerts"].size() << " alert(s)\n";
    for (const auto& a : h["alerts"]) {
      std::cout << "  REGRESSION " << a["benchmark"].get<std::string>() << ": "
                << fixed(a["previous_value"].get<double>()) << " -> "
                << fixed(a["latest_value"].get<double>()) << " ns/call (x"
                << fixed(a["ratio"].get<double>(), 3) << ")\n";
    }
  }
  return code;
}

int cmd_compare(const std::string& a_file, const std::string& b_file,
                double alpha, bool as_json) {
  const BenchmarkRun a = read_raw_run(a_file);
  const BenchmarkRun b = read_raw_run(b_file);
  if (a.environment.digest() != b.environment.digest()) {
    std::cerr << "warning: runs were recorded on different environments\n";
  }
  const ChangeDecision d = detect_change(loop_means_of(a), loop_means_of(b), alpha);
  if (as_json) {
    std::cout << json{{"changed", d.changed},
                      {"relative_change", d.relative_change},
                      {"p_value", d.p_value},
                      {"t_statistic", d.t_statistic},
                      {"degrees_of_freedom", d.degrees_of_freedom},
                      {"alpha", alpha}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << (d.changed ? "CHANGED" : "no change") << ": relative change "
              << fixed(d.relative_change * 100.0) << "%, p = " << d.p_value
              << " (alpha " << alpha << ")\n";
  }
  return d.changed ? kExitChanged : kExitOk;
}

int cmd_mde(const std::vector<double>& sigmas, int n, double alpha, double beta,
            const std::string& mode, bool as_json) {
  MdeConfig cfg{n, alpha, beta, MdeMode::TableConsistent};
  if (mode == "power") {
    cfg.mode = MdeMode::TwoSamplePower;
  } else if (mode != "table") {
    throw ValidationError("--mode must be table or power");
  }
  json rows = json::array();
  for (double sigma : sigmas) {
    const double delta = minimal_detectable_change(sigma, cfg);
    if (as_json) {
      rows.push_back(json{{"sigma_pct", sigma},
                          {"n", n},
                          {"alpha", alpha},
                          {"beta", beta},
                          {"mode", to_string(cfg.mode)},
                          {"delta_pct", delta}});
    } else {
      std::cout << fixed(delta) << "\n";
    }
  }
  if (as_json) std::cout << (rows.size() == 1 ? rows[0] : rows).dump(2) << "\n";
  return kExitOk;
}

int cmd_export(const std::vector<std::string>& files, const std::string& out_path) {
  std::vector<BenchmarkRun> runs;
  for (const auto& f : files) runs.push_back(read_raw_run(f));
  const std::string text =
      export_gab_json(std::span<const BenchmarkRun>(runs)).dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file_atomically(out_path, text);
  }
  return kExitOk;
}

int cmd_verify(const std::string& file, std::optional<std::uint32_t> depth,
               std::optional<std::uint64_t> expected, bool as_json) {
  VerifyOptions opts;
  opts.expected_depth = depth;
  opts.expected_records = expected;
  const VerificationReport r = verify_trace_file(file, opts);
  if (as_json) {
    json violations = json::array();
    for (const auto& v : r.violations) {
      violations.push_back(json{{"kind", to_string(v.kind)},
                                {"trace_id", v.trace_id},
                                {"detail", v.detail}});
    }
    std::cout << json{{"file", file},
                      {"ok", r.ok()},
                      {"records", r.records},
                      {"traces", r.traces},
                      {"registry_entries", r.registry_entries},
                      {"unknown_signature_records", r.unknown_signature_records},
                      {"violation_count", r.violation_count},
                      {"violations", violations}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << file << ": " << r.records << " records in " << r.traces
              << " traces, " << r.registry_entries << " registry entries, "
              << r.violation_count << " violation(s)\n";
    for (const auto& v : r.violations) {
      std::cout << "  " << to_string(v.kind) << " trace " << v.trace_id << ": "
                << v.detail << "\n";
    }
  }
  return r.ok() ? kExitOk : kExitIntegrity;
}

// Child side of --spawn: one loop start, result written as JSON.
int cmd_loop(const std::string& config_file, int index, const std::string& stamp,
             const std::string& out_file) {
  const RunConfig cfg = config_from_json(read_json_file(config_file));
  cfg.validate();
  const LoopStartResult loop = run_loop_start(cfg, index, stamp);
  write_file_atomically(out_file, loop_to_json(loop).dump());
  return kExitOk;
}

bool flag_given(int argc, char** argv, std::string_view flag) {
  for (int i = 1; i < argc; ++i) {
    std::string_view arg = argv[i];
    if (arg == flag || (arg.starts_with(flag) && arg.size() > flag.size() &&
                        arg[flag.size()] == '=')) {
      return true;
    }
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overbench: observability-overhead microbenchmark harness"};
  app.require_subcommand(1);
  app.set_config("--config", "overbench.toml",
                 "defaults file (TOML; one [section] per subcommand)");
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output on stdout");

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "measure one or both probes");
  add_run_options(run, run_opts, true);

  RunOptions sweep_opts;
  sweep_opts.probe = "all";
  std::string workers_list = "1,2,4,8,12";
  std::string csv_path;
  auto* sweep = app.add_subcommand("sweep", "thread-count sweep, CSV output");
  add_run_options(sweep, sweep_opts, false);
  sweep->add_option("--workers-list", workers_list, "comma-separated counts")
      ->capture_default_str();
  sweep->add_option("--csv", csv_path, "CSV path (default <output-dir>/sweep-*.csv)");

  std::vector<std::string> analyze_files;
  std::string analyze_history;
  std::string analyze_policy = "ratio";
  double analyze_threshold = 2.0;
  double analyze_alpha = 0.01;
  auto* analyze = app.add_subcommand("analyze", "summarize runs, check history");
  analyze->add_option("files", analyze_files, "raw-run files");
  analyze->add_option("--history", analyze_history, "history file to check");
  analyze->add_option("--policy", analyze_policy, "ratio or statistical")
      ->capture_default_str();
  analyze->add_option("--threshold", analyze_threshold, "ratio threshold")
      ->capture_default_str();
  analyze->add_option("--alpha", analyze_alpha, "type-I error budget")
      ->capture_default_str();

  std::string compare_a, compare_b;
  double compare_alpha = 0.01;
  auto* compare = app.add_subcommand("compare", "Welch test on two raw runs");
  compare->add_option("baseline", compare_a, "earlier raw-run file")->required();
  compare->add_option("candidate", compare_b, "later raw-run file")->required();
  compare->add_option("--alpha", compare_alpha, "type-I error budget")
      ->capture_default_str();

  std::vector<double> mde_sigmas;
  int mde_n = 10;
  double mde_alpha = 0.01, mde_beta = 0.01;
  std::string mde_mode = "table";
  auto* mde = app.add_subcommand("mde", "minimal detectable relative change");
  mde->add_option("--sigma", mde_sigmas, "relative standard deviation in %")
      ->required();
  mde->add_option("--n", mde_n, "loop starts")->capture_default_str();
  mde->add_option("--alpha", mde_alpha, "type-I error")->capture_default_str();
  mde->add_option("--beta", mde_beta, "type-II error")->capture_default_str();
  mde->add_option("--mode", mde_mode, "table or power")->capture_default_str();

  std::vector<std::string> export_files;
  std::string export_out;
  auto* exp = app.add_subcommand("export", "github-action-benchmark JSON");
  exp->add_option("files", export_files, "raw-run files")->required();
  exp->add_option("--out", export_out, "write to file instead of stdout");

  std::string verify_file;
  std::optional<std::uint32_t> verify_depth;
  std::optional<std::uint64_t> verify_records;
  auto* verify = app.add_subcommand("verify", "check a binary trace file");
  verify->add_option("file", verify_file, "trace file")->required();
  verify->add_option("--depth", verify_depth, "expected recursion depth");
  verify->add_option("--expect-records", verify_records, "expected record count");

  std::string loop_config, loop_stamp, loop_out;
  int loop_index = 0;
  auto* loop = app.add_subcommand("_loop", "");
  loop->group("");  // internal, used by --spawn
  loop->add_option("--config", loop_config)->required();
  loop->add_option("--index", loop_index)->required();
  loop->add_option("--stamp", loop_stamp)->required();
  loop->add_option("--out", loop_out)->required();

  for (auto* sub : {run, sweep, analyze, compare, mde, exp, verify, loop}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (const char* env_out = std::getenv("OVERBENCH_OUT");
      env_out && *env_out && !flag_given(argc, argv, "--output-dir")) {
    run_opts.output_dir = env_out;
    sweep_opts.output_dir = env_out;
  }

  try {
    if (*run) return cmd_run(run_opts, as_json);
    if (*sweep) return cmd_sweep(sweep_opts, workers_list, csv_path, as_json);
    if (*analyze) {
      return cmd_analyze(analyze_files, analyze_history, analyze_policy,
                         analyze_threshold, analyze_alpha, as_json);
    }
    if (*compare) return cmd_compare(compare_a, compare_b, compare_alpha, as_json);
    if (*mde) {
      return cmd_mde(mde_sigmas, mde_n, mde_alpha, mde_beta, mde_mode, as_json);
    }
    if (*exp) return cmd_export(export_files, export_out);
    if (*verify) return cmd_verify(verify_file, verify_depth, verify_records, as_json);
    if (*loop) return cmd_loop(loop_config, loop_index, loop_stamp, loop_out);
  } catch (const Error& e) {
    std::cerr << "overbench: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "overbench: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const std::exception& e) {
    std::cerr << "overbench: " << e.what() << "\n";
    return kExitIntegrity;
  }
  return kExitUsage;
}
