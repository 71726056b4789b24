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

#include <filesystem>
#include <stdexcept>

#include "srforge/datagen.hpp"

namespace srforge {

class CorpusFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCorpusFormatVersion = 1;

/// Writes `dir`/skeletons.txt, `dir`/data.bin and `dir`/split.json.
///
/// data.bin (little-endian): "SRFORGE1", u32 version, u64 record count, then
/// per record u32 skeleton id, u64 seed, 50x7 f32 row-major, u8 length,
/// u8 token ids. Datasets must have exactly 50 rows.
void write_corpus(const CorpusSplit& corpus, const std::filesystem::path& dir);

/// Throws CorpusFormatError on bad magic, version or truncation and
/// std::runtime_error on I/O failure.
CorpusSplit read_corpus(const std::filesystem::path& dir);

}  // namespace srforge
