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

// Binary trace file, little-endian throughout:
//
//   header      "OBMB" (4 bytes) | version u32 = 1
//   frame       tag i32
//     tag = -1  registry entry: id i32 | len u32 | UTF-8 bytes
//     tag =  1  record: signature_id i32 | trace_id i64 | order_index i32 |
//                       tin_ns i64 | tout_ns i64
//     tag =  0  terminator; a file without one is truncated

#include <array>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "overbench/error.hpp"
#include "overbench/record.hpp"

namespace overbench {

namespace trace_format {

inline constexpr std::array<char, 4> kMagic = {'O', 'B', 'M', 'B'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::int32_t kTagRegistry = -1;
inline constexpr std::int32_t kTagTerminator = 0;
inline constexpr std::int32_t kTagRecord = 1;

inline constexpr std::size_t kHeaderSize = 8;
inline constexpr std::size_t kTerminatorSize = 4;
inline constexpr std::size_t kRecordFrameSize = 4 + 4 + 8 + 4 + 8 + 8;

inline std::size_t registry_frame_size(std::size_t text_len) {
  return 4 + 4 + 4 + text_len;
}

template <class T>
  requires std::is_integral_v<T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto bits = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(bits & 0xFFu));
    bits = static_cast<U>(bits >> 8);
  }
}

template <class T>
  requires std::is_integral_v<T>
T get_le(const std::uint8_t* in) {
  using U = std::make_unsigned_t<T>;
  U bits = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) {
    bits = static_cast<U>((bits << 8) | in[i]);
  }
  return static_cast<T>(bits);
}

inline void encode_header(std::vector<std::uint8_t>& out) {
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(out, kVersion);
}

inline void encode_registry_entry(std::vector<std::uint8_t>& out,
                                  std::int32_t id, std::string_view text) {
  put_le<std::int32_t>(out, kTagRegistry);
  put_le<std::int32_t>(out, id);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
}

inline void encode_record(std::vector<std::uint8_t>& out,
                          const MonitoringRecord& r) {
  put_le<std::int32_t>(out, kTagRecord);
  put_le<std::int32_t>(out, r.signature_id);
  put_le<std::int64_t>(out, r.trace_id);
  put_le<std::int32_t>(out, r.order_index);
  put_le<std::int64_t>(out, r.tin_ns);
  put_le<std::int64_t>(out, r.tout_ns);
}

inline void encode_terminator(std::vector<std::uint8_t>& out) {
  put_le<std::int32_t>(out, kTagTerminator);
}

}  // namespace trace_format

// Buffered writer for the trace format. The file starts with the header and
// the registry entries; records follow; finish() appends the terminator. A
// sink destroyed without finish() leaves a file that fails verification.
class BinarySink {
 public:
  static constexpr std::size_t kBufferBytes = 1 << 16;

  BinarySink(const std::filesystem::path& path, const StringRegistry& registry)
      : path_(path), file_(std::fopen(path.c_str(), "wb")) {
    if (!file_) {
      throw IoError("cannot open trace file for writing: " + path.string());
    }
    buffer_.reserve(kBufferBytes + 256);
    trace_format::encode_header(buffer_);
    const auto& names = registry.names();
    for (std::size_t id = 0; id < names.size(); ++id) {
      trace_format::encode_registry_entry(
          buffer_, static_cast<std::int32_t>(id), names[id]);
    }
  }

  BinarySink(const BinarySink&) = delete;
  BinarySink& operator=(const BinarySink&) = delete;

  void write_record(const MonitoringRecord& record) {
    trace_format::encode_record(buffer_, record);
    if (buffer_.size() >= kBufferBytes) flush();
  }

  // Writes the terminator and flushes everything to disk.
  void finish() {
    trace_format::encode_terminator(buffer_);
    flush();
    if (std::fflush(file_.get()) != 0) fail("flush");
    finished_ = true;
  }

  void flush() {
    if (buffer_.empty()) return;
    const std::size_t n =
        std::fwrite(buffer_.data(), 1, buffer_.size(), file_.get());
    if (n != buffer_.size()) fail("write");
    bytes_written_ += n;
    buffer_.clear();
  }

  // Bytes emitted so far, including buffered ones.
  std::uint64_t bytes_emitted() const noexcept {
    return bytes_written_ + buffer_.size();
  }

  bool finished() const noexcept { return finished_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
  };

  [[noreturn]] void fail(const char* what) {
    buffer_.clear();
    throw IoError(std::string("trace sink ") + what +
                  " failed: " + path_.string() + " (" +
                  std::strerror(errno) + ")");
  }

  std::filesystem::path path_;
  std::unique_ptr<std::FILE, FileCloser> file_;
  std::vector<std::uint8_t> buffer_;
  std::uint64_t bytes_written_ = 0;
  bool finished_ = false;
};

struct RegistryEntry {
  std::int32_t id = 0;
  std::string text;
};

struct EndOfTrace {};

using TraceFrame = std::variant<RegistryEntry, MonitoringRecord, EndOfTrace>;

// Streaming reader. next() yields frames until the terminator; any structural
// problem (bad magic, unknown tag, missing terminator) raises FormatError.
class TraceReader {
 public:
  explicit TraceReader(const std::filesystem::path& path)
      : path_(path), file_(std::fopen(path.c_str(), "rb")) {
    if (!file_) throw IoError("cannot open trace file: " + path.string());
    std::setvbuf(file_.get(), nullptr, _IOFBF, 1 << 20);
    std::uint8_t header[trace_format::kHeaderSize];
    if (!read_exact(header, sizeof header)) {
      throw FormatError("trace file too short for header: " + path.string());
    }
    if (std::memcmp(header, trace_format::kMagic.data(), 4) != 0) {
      throw FormatError("bad magic in trace file: " + path.string());
    }
    const auto version = trace_format::get_le<std::uint32_t>(header + 4);
    if (version != trace_format::kVersion) {
      throw FormatError("unsupported trace version " + std::to_string(version) +
                        " in " + path.string());
    }
  }

  TraceFrame next() {
    if (ended_) return EndOfTrace{};
    const auto tag = read_value<std::int32_t>("frame tag");
    switch (tag) {
      case trace_format::kTagTerminator: {
        ended_ = true;
        std::uint8_t extra;
        if (read_exact(&extra, 1)) {
          throw FormatError("trailing bytes after terminator in " +
                            path_.string());
        }
        return EndOfTrace{};
      }
      case trace_format::kTagRegistry: {
        RegistryEntry entry;
        entry.id = read_value<std::int32_t>("registry id");
        const auto len = read_value<std::uint32_t>("registry length");
        if (len > (1u << 20)) {
          throw FormatError("registry entry too long in " + path_.string());
        }
        entry.text.resize(len);
        if (len > 0 &&
            !read_exact(reinterpret_cast<std::uint8_t*>(entry.text.data()),
                        len)) {
          truncated("registry text");
        }
        return entry;
      }
      case trace_format::kTagRecord: {
        std::uint8_t body[trace_format::kRecordFrameSize - 4];
        if (!read_exact(body, sizeof body)) truncated("record");
        MonitoringRecord r;
        r.signature_id = trace_format::get_le<std::int32_t>(body);
        r.trace_id = trace_format::get_le<std::int64_t>(body + 4);
        r.order_index = trace_format::get_le<std::int32_t>(body + 12);
        r.tin_ns = trace_format::get_le<std::int64_t>(body + 16);
        r.tout_ns = trace_format::get_le<std::int64_t>(body + 24);
        return r;
      }
      default:
        throw FormatError("unknown frame tag " + std::to_string(tag) + " in " +
                          path_.string());
    }
  }

 private:
  struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
  };

  bool read_exact(std::uint8_t* out, std::size_t n) {
    return std::fread(out, 1, n, file_.get()) == n;
  }

  template <class T>
  T read_value(const char* what) {
    std::uint8_t raw[sizeof(T)];
    if (!read_exact(raw, sizeof raw)) truncated(what);
    return trace_format::get_le<T>(raw);
  }

  [[noreturn]] void truncated(const char* what) {
    throw FormatError(std::string("truncated trace file (") + what +
                      "): " + path_.string());
  }

  std::filesystem::path path_;
  std::unique_ptr<std::FILE, FileCloser> file_;
  bool ended_ = false;
};

enum class ViolationKind {
  Gap,               // an order index below the trace's extent is missing
  Duplicate,         // (trace_id, order_index) seen twice
  DepthMismatch,     // order index outside the expected depth
  UnknownSignature,  // signature id without a registry entry
  TimeOrder,         // tout < tin
  RecordCount,       // total record count differs from the expectation
};

inline std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::Gap: return "gap";
    case ViolationKind::Duplicate: return "duplicate";
    case ViolationKind::DepthMismatch: return "depth-mismatch";
    case ViolationKind::UnknownSignature: return "unknown-signature";
    case ViolationKind::TimeOrder: return "time-order";
    case ViolationKind::RecordCount: return "record-count";
  }
  return "?";
}

struct TraceViolation {
  ViolationKind kind;
  std::int64_t trace_id = 0;
  std::string detail;
};

struct VerifyOptions {
  // When set, every trace must hold exactly order indices 0..depth-1.
  std::optional<std::uint32_t> expected_depth;
  std::optional<std::uint64_t> expected_records;
  // Only the first max_listed violations are kept in the report; all of them
  // are counted.
  std::size_t max_listed = 1000;
};

struct VerificationReport {
  std::uint64_t records = 0;
  std::uint64_t traces = 0;
  std::uint64_t registry_entries = 0;
  std::uint64_t unknown_signature_records = 0;
  std::uint64_t violation_count = 0;
  std::vector<TraceViolation> violations;

  bool ok() const noexcept { return violation_count == 0; }
};

/// Parses a trace file and checks per-trace order-index completeness,
/// signature resolution and timestamp order. Structural damage raises
/// FormatError; content problems are reported as violations.
inline VerificationReport verify_trace_file(const std::filesystem::path& path,
                                            const VerifyOptions& options = {}) {
  TraceReader reader(path);
  VerificationReport report;
  std::unordered_set<std::int32_t> registry_ids;

  struct TraceState {
    std::vector<bool> seen;
    std::uint32_t count = 0;
  };
  std::unordered_map<std::int64_t, TraceState> traces;
  // Indices beyond this are treated as corrupt rather than allocated for.
  constexpr std::int32_t kMaxIndex = 1 << 20;

  auto add = [&](ViolationKind kind, std::int64_t trace_id,
                 std::string detail) {
    ++report.violation_count;
    if (report.violations.size() < options.max_listed) {
      report.violations.push_back({kind, trace_id, std::move(detail)});
    }
  };

  for (;;) {
    TraceFrame frame = reader.next();
    if (std::holds_alternative<EndOfTrace>(frame)) break;
    if (auto* entry = std::get_if<RegistryEntry>(&frame)) {
      if (!registry_ids.insert(entry->id).second) {
        throw FormatError("duplicate registry id " + std::to_string(entry->id) +
                          " in " + path.string());
      }
      ++report.registry_entries;
      continue;
    }
    const auto& r = std::get<MonitoringRecord>(frame);
    ++report.records;
    if (!registry_ids.contains(r.signature_id)) {
      ++report.unknown_signature_records;
      add(ViolationKind::UnknownSignature, r.trace_id,
          "signature id " + std::to_string(r.signature_id));
    }
    if (r.tout_ns < r.tin_ns) {
      add(ViolationKind::TimeOrder, r.trace_id,
          "order index " + std::to_string(r.order_index));
    }
    auto& state = traces[r.trace_id];
    if (r.order_index < 0 || r.order_index >= kMaxIndex ||
        (options.expected_depth &&
         static_cast<std::uint32_t>(r.order_index) >= *options.expected_depth)) {
      add(ViolationKind::DepthMismatch, r.trace_id,
          "order index " + std::to_string(r.order_index));
      continue;
    }
    const auto idx = static_cast<std::size_t>(r.order_index);
    if (state.seen.size() <= idx) state.seen.resize(idx + 1, false);
    if (state.seen[idx]) {
      add(ViolationKind::Duplicate, r.trace_id,
          "order index " + std::to_string(r.order_index));
      continue;
    }
    state.seen[idx] = true;
    ++state.count;
  }

  report.traces = traces.size();
  for (const auto& [trace_id, state] : traces) {
    const std::size_t extent =
        options.expected_depth ? *options.expected_depth : state.seen.size();
    if (state.count == extent) continue;
    std::size_t missing = 0;
    std::size_t first_missing = extent;
    for (std::size_t i = 0; i < extent; ++i) {
      if (i >= state.seen.size() || !state.seen[i]) {
        if (missing++ == 0) first_missing = i;
      }
    }
    if (missing > 0) {
      add(ViolationKind::Gap, trace_id,
          std::to_string(missing) + " missing order index(es), first " +
              std::to_string(first_missing));
    }
  }

  if (options.expected_records && report.records != *options.expected_records) {
    add(ViolationKind::RecordCount, 0,
        "expected " + std::to_string(*options.expected_records) +
            " records, found " + std::to_string(report.records));
  }
  return report;
}

}  // namespace overbench
