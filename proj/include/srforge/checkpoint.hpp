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
#include <memory>
#include <stdexcept>

#include "srforge/model.hpp"

namespace srforge {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

inline namespace SRFORGE_PRECISION {

/// Little-endian: magic "SRNN0001", u32 version, config block, u32 flags
/// (bit 0: Adam state follows), u32 parameter count, then per parameter
/// u16 name length, name, u8 rank, u32 dims, f32 values. With bit 0 set:
/// u64 optimizer step, then every m payload, then every v payload.
void save_checkpoint(const std::filesystem::path& path, const Model& model, bool with_moments);

/// Rebuilds the model from its stored config and restores all values, plus
/// Adam moments and the step counter when present.
std::unique_ptr<Model> load_checkpoint(const std::filesystem::path& path);

/// Config block only, without allocating the model.
ModelConfig read_checkpoint_config(const std::filesystem::path& path);

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
