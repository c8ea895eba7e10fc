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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgsub {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

enum class Direction : std::uint8_t { TailQuery, HeadQuery };

std::string_view to_string(Direction d);

// A query with one slot left open: (anchor, relation, ?) for TailQuery and
// (?, relation, anchor) for HeadQuery.
struct QueryPart {
  Direction direction = Direction::TailQuery;
  EntityId anchor = 0;
  RelationId relation = 0;

  friend bool operator==(const QueryPart&, const QueryPart&) = default;
};

inline std::array<QueryPart, 2> query_parts(const Triple& t) {
  return {QueryPart{Direction::TailQuery, t.head, t.relation},
          QueryPart{Direction::HeadQuery, t.tail, t.relation}};
}

inline EntityId answer_of(const Triple& t, Direction d) {
  return d == Direction::TailQuery ? t.tail : t.head;
}

// Fills the open slot of q with candidate.
inline Triple complete(const QueryPart& q, EntityId candidate) {
  return q.direction == Direction::TailQuery
             ? Triple{q.anchor, q.relation, candidate}
             : Triple{candidate, q.relation, q.anchor};
}

// One directed training example (x, y): x is the query, y the answer.
struct Example {
  QueryPart query;
  EntityId answer = 0;
  std::size_t triple_index = 0;
};

// Train triple i expands to example 2i (tail query) and 2i+1 (head query).
std::vector<Example> expand_examples(std::span<const Triple> triples);

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bidirectional name <-> id map. Ids are dense and assigned in insertion order.
class Vocabulary {
 public:
  std::int32_t add(std::string_view name);
  // Inserts name under an explicit id; ids must arrive densely (0, 1, ...).
  void add_with_id(std::int32_t id, std::string_view name);
  std::optional<std::int32_t> find(std::string_view name) const;
  const std::string& name(std::int32_t id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  // FNV-1a over the names in id order; stable across platforms.
  std::uint64_t hash() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

enum class Split { Train, Valid, Test };
Split parse_split(std::string_view s);
std::string_view to_string(Split s);

struct Dataset {
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  Vocabulary entities;
  Vocabulary relations;

  std::size_t num_entities() const { return entities.size(); }
  std::size_t num_relations() const { return relations.size(); }
  const std::vector<Triple>& split(Split s) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class DuplicatePolicy { Error, Dedupe };

struct LoadOptions {
  DuplicatePolicy duplicates = DuplicatePolicy::Error;
  // Optional "id<TAB>name" dictionaries. When given, ids come from them and
  // every name in the triple files must be listed.
  std::optional<std::filesystem::path> entity_dict;
  std::optional<std::filesystem::path> relation_dict;
};

// Reads head<TAB>relation<TAB>tail files. An empty valid/test path means the
// split is absent. Without dictionaries, ids follow first appearance across
// train, valid, test in that order.
Dataset load_dataset(const std::filesystem::path& train,
                     const std::filesystem::path& valid,
                     const std::filesystem::path& test,
                     const LoadOptions& options = {});

// Loads <dir>/{train,valid,test}.txt, picking up entities.dict and
// relations.dict when present.
Dataset load_dataset_dir(const std::filesystem::path& dir, LoadOptions options = {});

// Writes the layout read by load_dataset_dir.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t file_checksum(const std::filesystem::path& path);

// Counts #(e, r) and #(r, e) over the train split.
class FrequencyTable {
 public:
  using Counts = std::unordered_map<std::uint64_t, std::int64_t>;

  void add(const Triple& t);

  std::optional<std::int64_t> head_rel(EntityId e, RelationId r) const;
  std::optional<std::int64_t> rel_tail(RelationId r, EntityId e) const;

  const Counts& head_rel_counts() const { return head_rel_; }
  const Counts& rel_tail_counts() const { return rel_tail_; }

  static std::uint64_t key(std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

 private:
  Counts head_rel_;
  Counts rel_tail_;
};

FrequencyTable count_frequencies(const Dataset& dataset);

// #(x, y) ~ #(e_i, r_k) + #(r_k, e_j). Throws DataError on unseen keys.
std::int64_t triple_freq(const FrequencyTable& table, const Triple& t);

// #x: #(e, r) for a tail query, #(r, e) for a head query.
std::int64_t query_freq(const FrequencyTable& table, const QueryPart& q);

// Index of known answers per query, used for false-negative filtering.
class KnownAnswers {
 public:
  KnownAnswers() = default;
  explicit KnownAnswers(std::initializer_list<std::span<const Triple>> splits);

  void add(const Triple& t);
  // Sorted answers; empty span when the query is unknown.
  std::span<const EntityId> answers(const QueryPart& q) const;
  bool contains(const QueryPart& q, EntityId candidate) const;

 private:
  static std::uint64_t key(const QueryPart& q);

  std::unordered_map<std::uint64_t, std::vector<EntityId>> answers_;
};

}  // namespace kgsub
