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

#include "srforge/corpus_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "byte_io.hpp"
#include "json.hpp"

namespace srforge {
namespace {

using detail::ByteReader;
using detail::ByteWriter;
using detail::slurp;
using detail::spill;

constexpr char kMagic[8] = {'S', 'R', 'F', 'O', 'R', 'G', 'E', '1'};

}  // namespace

void write_corpus(const CorpusSplit& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::string skeletons;
  for (const auto& s : corpus.skeletons) {
    skeletons += std::to_string(s.id) + ' ' + to_text(s.tokens) + '\n';
  }
  spill(dir / "skeletons.txt", skeletons);

  ByteWriter w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kCorpusFormatVersion);
  w.u64(corpus.datasets.size());
  for (const auto& d : corpus.datasets) {
    if (d.n_rows != kDefaultRows || d.values.size() != kDefaultRows * kTableCols) {
      throw std::invalid_argument("corpus records must hold 50x7 tables");
    }
    if (d.ground_truth.size() > 255) throw std::invalid_argument("ground truth too long to persist");
    w.u32(d.skeleton_id);
    w.u64(d.seed);
    for (float v : d.values) w.f32(v);
    w.u8(static_cast<std::uint8_t>(d.ground_truth.size()));
    for (Token t : d.ground_truth) w.u8(static_cast<std::uint8_t>(token_id(t)));
  }
  spill(dir / "data.bin", w.bytes());

  nlohmann::json split = {
      {"train", corpus.train}, {"validation", corpus.validation}, {"test", corpus.test}};
  spill(dir / "split.json", split.dump() + "\n");
}

CorpusSplit read_corpus(const std::filesystem::path& dir) {
  CorpusSplit corpus;

  std::istringstream sk(slurp<CorpusFormatError>(dir / "skeletons.txt"));
  std::string line;
  while (std::getline(sk, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Skeleton s;
    if (!(ls >> s.id)) throw CorpusFormatError("malformed skeletons.txt line: " + line);
    std::string rest;
    std::getline(ls, rest);
    s.tokens = sequence_from_text(rest);
    s.tree = preorder_parse(s.tokens);
    corpus.skeletons.push_back(std::move(s));
  }

  ByteReader<CorpusFormatError> r("data.bin", slurp<CorpusFormatError>(dir / "data.bin"));
  char magic[sizeof(kMagic)];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw CorpusFormatError("bad magic in data.bin");
  const std::uint32_t version = r.u32();
  if (version != kCorpusFormatVersion) {
    throw CorpusFormatError("unsupported corpus format version " + std::to_string(version));
  }
  const std::uint64_t count = r.u64();
  corpus.datasets.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    TabularDataset d;
    d.skeleton_id = r.u32();
    d.seed = r.u64();
    d.n_rows = kDefaultRows;
    d.values.resize(kDefaultRows * kTableCols);
    for (float& v : d.values) v = r.f32();
    const std::uint8_t len = r.u8();
    d.ground_truth.reserve(len);
    for (std::uint8_t k = 0; k < len; ++k) {
      const int id = r.u8();
      if (id >= kVocabSize) throw CorpusFormatError("token id out of range in data.bin");
      d.ground_truth.push_back(static_cast<Token>(id));
    }
    corpus.datasets.push_back(std::move(d));
  }
  if (!r.done()) throw CorpusFormatError("trailing bytes in data.bin");

  const auto split = nlohmann::json::parse(slurp<CorpusFormatError>(dir / "split.json"));
  corpus.train = split.at("train").get<std::vector<std::size_t>>();
  corpus.validation = split.at("validation").get<std::vector<std::size_t>>();
  corpus.test = split.at("test").get<std::vector<std::size_t>>();
  corpus.stats.realized = corpus.datasets.size();
  return corpus;
}

}  // namespace srforge
