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
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "kgsub/data.hpp"
#include "kgsub/models.hpp"

namespace kgsub {

// Raised when an artifact does not belong to the data or config it is used with.
class ArtifactMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix file layout (all integers and floats little-endian):
//   bytes 0..7    magic "KGSUBMAT"
//   bytes 8..11   u32 format version (1)
//   bytes 12..15  u32 reserved, 0
//   bytes 16..23  u64 rows
//   bytes 24..31  u64 cols
//   then rows*cols IEEE-754 binary64 values, row-major
void write_matrix(const std::filesystem::path& path, const RowMatrix<double>& m);
RowMatrix<double> read_matrix(const std::filesystem::path& path);

// "name<TAB>v0<TAB>v1..." per row, 17 significant digits.
void write_matrix_tsv(const std::filesystem::path& path, const RowMatrix<double>& m, const Vocabulary& names);

struct CheckpointManifest {
  ModelSpec model;
  int dimension = 0;
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  std::uint64_t entity_vocab_hash = 0;
  std::uint64_t relation_vocab_hash = 0;
  nlohmann::json config;  // echo of the experiment config
  bool has_training_state = false;
};

nlohmann::json to_json(const CheckpointManifest& m);
CheckpointManifest manifest_from_json(const nlohmann::json& j);

// Checkpoint directory:
//   manifest.json
//   entities.bin, relations.bin   model parameters (matrix layout above)
//   state/                        optional trainer state, see trainer.hpp
void save_model(const std::filesystem::path& dir, const CheckpointManifest& manifest,
                const EmbeddingStore<double>& store);
CheckpointManifest read_manifest(const std::filesystem::path& dir);
EmbeddingStore<double> load_model(const std::filesystem::path& dir, const CheckpointManifest& manifest);

// Throws ArtifactMismatch when vocabulary sizes or hashes differ.
void verify_vocab(const CheckpointManifest& manifest, const Dataset& dataset);

}  // namespace kgsub
