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

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "overbench/error.hpp"

namespace overbench {

// One record per monitored method activation.
struct MonitoringRecord {
  std::int32_t signature_id = 0;
  std::int64_t trace_id = 0;
  std::int32_t order_index = 0;
  std::int64_t tin_ns = 0;
  std::int64_t tout_ns = 0;

  friend bool operator==(const MonitoringRecord&,
                         const MonitoringRecord&) = default;
};

// Maps signature text to dense ids starting at 0. Populated before producers
// start; read-only afterwards.
class StringRegistry {
 public:
  std::int32_t register_signature(std::string_view signature) {
    if (signature.empty()) {
      throw ValidationError("signature must not be empty");
    }
    std::string key(signature);
    if (auto it = ids_.find(key); it != ids_.end()) return it->second;
    const auto id = static_cast<std::int32_t>(names_.size());
    ids_.emplace(key, id);
    names_.push_back(std::move(key));
    return id;
  }

  bool contains(std::int32_t id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < names_.size();
  }

  const std::string& name(std::int32_t id) const { return names_.at(id); }

  std::size_t size() const noexcept { return names_.size(); }

  // Entries ordered by id.
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::unordered_map<std::string, std::int32_t> ids_;
  std::vector<std::string> names_;
};

}  // namespace overbench
