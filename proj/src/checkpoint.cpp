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

#include "srforge/checkpoint.hpp"

#include "byte_io.hpp"

namespace srforge {
inline namespace SRFORGE_PRECISION {
namespace {

using Reader = detail::ByteReader<CheckpointError>;

constexpr char kMagic[8] = {'S', 'R', 'N', 'N', '0', '0', '0', '1'};
constexpr std::uint32_t kFlagMoments = 1;

void write_config(detail::ByteWriter& w, const ModelConfig& c) {
  for (std::size_t v : {c.d_model, c.n_enc, c.n_dec, c.heads, c.vocab, c.max_len, c.n_rows, c.d_cols}) {
    w.u32(static_cast<std::uint32_t>(v));
  }
  w.f64(c.p_drop);
  w.u8(static_cast<std::uint8_t>(c.encoder));
}

ModelConfig read_header(Reader& r) {
  char magic[sizeof(kMagic)];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw CheckpointError("not a checkpoint (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  ModelConfig c;
  for (std::size_t* v : {&c.d_model, &c.n_enc, &c.n_dec, &c.heads, &c.vocab, &c.max_len, &c.n_rows, &c.d_cols}) {
    *v = r.u32();
  }
  c.p_drop = r.f64();
  const std::uint8_t kind = r.u8();
  if (kind > static_cast<std::uint8_t>(EncoderKind::kMix)) throw CheckpointError("unknown encoder kind");
  c.encoder = static_cast<EncoderKind>(kind);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("invalid stored config: ") + e.what());
  }
  return c;
}

void write_payload(detail::ByteWriter& w, const Tensor& t) {
  for (real x : t.data()) w.f32(static_cast<float>(x));
}

void read_payload(Reader& r, Tensor& t) {
  for (real& x : t.data()) x = static_cast<real>(r.f32());
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model, bool with_moments) {
  detail::ByteWriter w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kCheckpointVersion);
  write_config(w, model.config());
  w.u32(with_moments ? kFlagMoments : 0);
  const auto& params = model.params().parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    if (p.name.size() > UINT16_MAX) throw CheckpointError("parameter name too long: " + p.name);
    w.u16(static_cast<std::uint16_t>(p.name.size()));
    w.raw(p.name.data(), p.name.size());
    w.u8(static_cast<std::uint8_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) w.u32(static_cast<std::uint32_t>(d));
    write_payload(w, p.value);
  }
  if (with_moments) {
    w.u64(model.params().step);
    for (const auto& p : params) write_payload(w, p.m);
    for (const auto& p : params) write_payload(w, p.v);
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  detail::spill(tmp, w.bytes());
  std::filesystem::rename(tmp, path);
}

ModelConfig read_checkpoint_config(const std::filesystem::path& path) {
  Reader r(path.string(), detail::slurp<CheckpointError>(path));
  return read_header(r);
}

std::unique_ptr<Model> load_checkpoint(const std::filesystem::path& path) {
  Reader r(path.string(), detail::slurp<CheckpointError>(path));
  const ModelConfig cfg = read_header(r);
  const std::uint32_t flags = r.u32();
  if (flags & ~kFlagMoments) throw CheckpointError("unknown checkpoint flags");
  auto model = std::make_unique<Model>(cfg, 0);
  auto& params = model->params().parameters();
  if (r.u32() != params.size()) throw CheckpointError("parameter count does not match the stored config");
  for (auto& p : params) {
    const std::uint16_t len = r.u16();
    std::string name(len, '\0');
    r.raw(name.data(), len);
    if (name != p.name) throw CheckpointError("expected parameter " + p.name + ", found " + name);
    const std::uint8_t rank = r.u8();
    Shape shape(rank);
    for (auto& d : shape) d = r.u32();
    if (shape != p.value.shape()) throw CheckpointError("shape mismatch for parameter " + name);
    read_payload(r, p.value);
  }
  if (flags & kFlagMoments) {
    model->params().step = r.u64();
    for (auto& p : params) read_payload(r, p.m);
    for (auto& p : params) read_payload(r, p.v);
  }
  if (!r.done()) throw CheckpointError("trailing bytes in checkpoint");
  return model;
}

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
