// Copyright 2026 The kgsub Authors. All Rights Reserved.
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
#include "kgsub/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace kgsub {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'K', 'G', 'S', 'U', 'B', 'M', 'A', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_le(std::ofstream& out, std::uint64_t v, int bytes) {
  std::array<char, 8> b{};
  for (int i = 0; i < bytes; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), bytes);
}

std::uint64_t get_le(std::ifstream& in, int bytes, const fs::path& path) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), bytes)) throw ArtifactMismatch("truncated matrix file " + path.string());
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

}  // namespace

void write_matrix(const fs::path& path, const RowMatrix<double>& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put_le(out, kVersion, 4);
  put_le(out, 0, 4);
  put_le(out, static_cast<std::uint64_t>(m.rows()), 8);
  put_le(out, static_cast<std::uint64_t>(m.cols()), 8);
  for (Eigen::Index i = 0; i < m.size(); ++i) put_le(out, std::bit_cast<std::uint64_t>(m.data()[i]), 8);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

RowMatrix<double> read_matrix(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactMismatch("cannot open matrix file " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw ArtifactMismatch(path.string() + " is not a matrix file");
  if (get_le(in, 4, path) != kVersion) throw ArtifactMismatch("unsupported matrix version in " + path.string());
  get_le(in, 4, path);
  const auto rows = get_le(in, 8, path), cols = get_le(in, 8, path);
  RowMatrix<double> m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std::bit_cast<double>(get_le(in, 8, path));
  return m;
}

void write_matrix_tsv(const fs::path& path, const RowMatrix<double>& m, const Vocabulary& names) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  char buf[40];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << names.name(static_cast<std::int32_t>(i));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "\t%.17g", m(i, j));
      out << buf;
    }
    out << '\n';
  }
}

nlohmann::json to_json(const CheckpointManifest& m) {
  return {{"format", "kgsub-checkpoint-1"},
          {"model", to_string(m.model.kind)},
          {"transe_norm", m.model.transe_norm},
          {"dimension", m.dimension},
          {"num_entities", m.num_entities},
          {"num_relations", m.num_relations},
          {"entity_vocab_hash", m.entity_vocab_hash},
          {"relation_vocab_hash", m.relation_vocab_hash},
          {"config", m.config},
          {"has_training_state", m.has_training_state},
          {"files", {{"entities", "entities.bin"}, {"relations", "relations.bin"}}}};
}

CheckpointManifest manifest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "kgsub-checkpoint-1") throw ArtifactMismatch("unknown checkpoint format");
    CheckpointManifest m;
    m.model.kind = parse_model_kind(j.at("model").get<std::string>());
    m.model.transe_norm = j.at("transe_norm").get<int>();
    m.dimension = j.at("dimension").get<int>();
    m.num_entities = j.at("num_entities").get<std::size_t>();
    m.num_relations = j.at("num_relations").get<std::size_t>();
    m.entity_vocab_hash = j.at("entity_vocab_hash").get<std::uint64_t>();
    m.relation_vocab_hash = j.at("relation_vocab_hash").get<std::uint64_t>();
    m.config = j.value("config", nlohmann::json::object());
    m.has_training_state = j.value("has_training_state", false);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactMismatch(std::string("corrupt checkpoint manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ArtifactMismatch(std::string("corrupt checkpoint manifest: ") + e.what());
  }
}

void save_model(const fs::path& dir, const CheckpointManifest& manifest, const EmbeddingStore<double>& store) {
  fs::create_directories(dir);
  write_matrix(dir / "entities.bin", store.entities);
  write_matrix(dir / "relations.bin", store.relations);
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  out << to_json(manifest).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + (dir / "manifest.json").string());
}

CheckpointManifest read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ArtifactMismatch("missing manifest.json in " + dir.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactMismatch(std::string("corrupt checkpoint manifest: ") + e.what());
  }
  return manifest_from_json(j);
}

EmbeddingStore<double> load_model(const fs::path& dir, const CheckpointManifest& manifest) {
  EmbeddingStore<double> store{read_matrix(dir / "entities.bin"), read_matrix(dir / "relations.bin")};
  if (store.entities.rows() != static_cast<Eigen::Index>(manifest.num_entities) ||
      store.entities.cols() != manifest.dimension ||
      store.relations.rows() != static_cast<Eigen::Index>(manifest.num_relations) ||
      store.relations.cols() != relation_width(manifest.model.kind, manifest.dimension))
    throw ArtifactMismatch("embedding shapes disagree with manifest in " + dir.string());
  return store;
}

void verify_vocab(const CheckpointManifest& manifest, const Dataset& dataset) {
  if (manifest.num_entities != dataset.num_entities() || manifest.entity_vocab_hash != dataset.entities.hash())
    throw ArtifactMismatch("checkpoint entity vocabulary does not match the dataset");
  if (manifest.num_relations != dataset.num_relations() ||
      manifest.relation_vocab_hash != dataset.relations.hash())
    throw ArtifactMismatch("checkpoint relation vocabulary does not match the dataset");
}

}  // namespace kgsub
