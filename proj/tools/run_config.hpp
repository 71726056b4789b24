// Copyright 2026 The srforge Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace srforge::cli {

/// Flat key=value settings. Keys are declared up front; values from a file
/// or from flags may only name declared keys. Dashes in keys read as
/// underscores, so `n-raw` and `n_raw` are the same key.
class RunConfig {
 public:
  struct Entry {
    std::string key;
    std::string value;
    std::string help;
    bool flag = false;
  };

  void declare(std::string_view key, std::string value, std::string help, bool flag = false);
  bool has(std::string_view key) const;
  /// Throws ConfigError for an undeclared key.
  void set(std::string_view key, std::string value);

  /// Lines of `key = value`; blank lines and lines starting with '#' are
  /// skipped. `source` names the origin in error messages.
  void merge_text(std::string_view text, std::string_view source);
  void merge_file(const std::filesystem::path& path);

  const std::string& get(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  double get_double(std::string_view key) const;
  bool get_bool(std::string_view key) const;

  const std::vector<Entry>& entries() const { return entries_; }
  /// Every key with its resolved value, one `key = value` per line.
  std::string dump() const;

 private:
  Entry* find(std::string_view key);
  const Entry* find(std::string_view key) const;

  std::vector<Entry> entries_;
};

std::string normalize_key(std::string_view key);

}  // namespace srforge::cli
