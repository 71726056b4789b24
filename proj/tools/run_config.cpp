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

#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "srforge/model_config.hpp"

namespace srforge::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_integer(std::string_view key, const std::string& text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + text + "'");
  }
  return v;
}

}  // namespace

std::string normalize_key(std::string_view key) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

RunConfig::Entry* RunConfig::find(std::string_view key) {
  const std::string k = normalize_key(key);
  for (auto& e : entries_) {
    if (e.key == k) return &e;
  }
  return nullptr;
}

const RunConfig::Entry* RunConfig::find(std::string_view key) const {
  return const_cast<RunConfig*>(this)->find(key);
}

void RunConfig::declare(std::string_view key, std::string value, std::string help, bool flag) {
  if (find(key)) throw std::logic_error("key declared twice: " + std::string(key));
  entries_.push_back({normalize_key(key), std::move(value), std::move(help), flag});
}

bool RunConfig::has(std::string_view key) const { return find(key) != nullptr; }

void RunConfig::set(std::string_view key, std::string value) {
  Entry* e = find(key);
  if (!e) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  e->value = std::move(value);
}

void RunConfig::merge_text(std::string_view text, std::string_view source) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(number);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string_view key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!has(key)) throw ConfigError(where + ": unknown configuration key '" + std::string(key) + "'");
    set(key, std::string(trim(t.substr(eq + 1))));
  }
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  merge_text(ss.str(), path.string());
}

const std::string& RunConfig::get(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw std::logic_error("undeclared key: " + std::string(key));
  return e->value;
}

std::int64_t RunConfig::get_int(std::string_view key) const { return parse_integer<std::int64_t>(key, get(key)); }

std::uint64_t RunConfig::get_u64(std::string_view key) const { return parse_integer<std::uint64_t>(key, get(key)); }

double RunConfig::get_double(std::string_view key) const {
  const std::string& text = get(key);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + text + "'");
  }
  return v;
}

bool RunConfig::get_bool(std::string_view key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off" || v.empty()) return false;
  throw ConfigError("'" + std::string(key) + "' expects true or false, got '" + v + "'");
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& e : entries_) out += e.key + " = " + e.value + "\n";
  return out;
}

}  // namespace srforge::cli
