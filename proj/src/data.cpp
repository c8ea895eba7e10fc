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
#include "kgsub/data.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace kgsub {

namespace fs = std::filesystem;

std::string_view to_string(Direction d) {
  return d == Direction::TailQuery ? "tail" : "head";
}

std::vector<Example> expand_examples(std::span<const Triple> triples) {
  std::vector<Example> out;
  out.reserve(triples.size() * 2);
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    for (const auto& q : query_parts(t)) out.push_back({q, answer_of(t, q.direction), i});
  }
  return out;
}

std::int32_t Vocabulary::add(std::string_view name) {
  auto [it, inserted] = ids_.try_emplace(std::string(name), static_cast<std::int32_t>(names_.size()));
  if (inserted) names_.emplace_back(name);
  return it->second;
}

void Vocabulary::add_with_id(std::int32_t id, std::string_view name) {
  if (id != static_cast<std::int32_t>(names_.size()))
    throw DataError("dictionary ids must be dense and ordered; expected " +
                    std::to_string(names_.size()) + ", got " + std::to_string(id));
  if (!ids_.try_emplace(std::string(name), id).second)
    throw DataError("duplicate dictionary name '" + std::string(name) + "'");
  names_.emplace_back(name);
}

std::optional<std::int32_t> Vocabulary::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = fnv1a("");
  for (const auto& n : names_) {
    h = fnv1a(n, h);
    h = fnv1a("\n", h);
  }
  return h;
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "valid") return Split::Valid;
  if (s == "test") return Split::Test;
  throw DataError("unknown split '" + std::string(s) + "' (expected train, valid or test)");
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Valid: return "valid";
    case Split::Test: return "test";
  }
  return "?";
}

const std::vector<Triple>& Dataset::split(Split s) const {
  switch (s) {
    case Split::Train: return train;
    case Split::Valid: return valid;
    case Split::Test: break;
  }
  return test;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a(ss.str());
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string_view chomp(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

void read_dict(const fs::path& path, Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dictionary " + path.string());
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = chomp(raw);
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 2 || f[0].empty() || f[1].empty())
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed dictionary line");
    std::int32_t id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(std::string(f[0]), &used);
      if (used != f[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad id '" + std::string(f[0]) + "'");
    }
    vocab.add_with_id(id, f[1]);
  }
}

class SplitReader {
 public:
  SplitReader(Dataset& ds, bool fixed_vocab) : ds_(ds), fixed_vocab_(fixed_vocab) {}

  std::vector<Triple> read(const fs::path& path) {
    std::vector<Triple> out;
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      auto line = chomp(raw);
      if (line.empty()) continue;
      auto f = split_tabs(line);
      if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty())
        throw DataError(path.string() + ":" + std::to_string(lineno) +
                        ": malformed line, expected head<TAB>relation<TAB>tail");
      Triple t;
      t.head = id(ds_.entities, f[0], path, lineno);
      t.relation = id(ds_.relations, f[1], path, lineno);
      t.tail = id(ds_.entities, f[2], path, lineno);
      out.push_back(t);
    }
    return out;
  }

 private:
  std::int32_t id(Vocabulary& v, std::string_view name, const fs::path& path, std::size_t lineno) {
    if (!fixed_vocab_) return v.add(name);
    auto found = v.find(name);
    if (!found)
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": '" + std::string(name) +
                      "' missing from dictionary");
    return *found;
  }

  Dataset& ds_;
  bool fixed_vocab_;
};

}  // namespace

Dataset load_dataset(const fs::path& train, const fs::path& valid, const fs::path& test,
                     const LoadOptions& options) {
  Dataset ds;
  if (options.entity_dict.has_value() != options.relation_dict.has_value())
    throw DataError("entity and relation dictionaries must be given together");
  bool fixed = options.entity_dict.has_value();
  if (fixed) {
    read_dict(*options.entity_dict, ds.entities);
    read_dict(*options.relation_dict, ds.relations);
  }
  SplitReader reader(ds, fixed);
  auto raw_train = reader.read(train);
  if (raw_train.empty()) throw DataError("empty training split");

  std::set<Triple> seen;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < raw_train.size(); ++i) {
    if (!seen.insert(raw_train[i]).second) {
      if (options.duplicates == DuplicatePolicy::Error)
        throw DataError(train.string() + ": duplicate train triple (triple #" + std::to_string(i + 1) + ")");
      ++dropped;
      continue;
    }
    ds.train.push_back(raw_train[i]);
  }
  if (dropped > 0)
    std::cerr << "warning: dropped " << dropped << " duplicate train triple(s) from " << train.string() << "\n";

  if (!valid.empty()) ds.valid = reader.read(valid);
  if (!test.empty()) ds.test = reader.read(test);
  return ds;
}

Dataset load_dataset_dir(const fs::path& dir, LoadOptions options) {
  auto opt = [&](const char* name) { return fs::exists(dir / name) ? dir / name : fs::path(); };
  if (!options.entity_dict && fs::exists(dir / "entities.dict") && fs::exists(dir / "relations.dict")) {
    options.entity_dict = dir / "entities.dict";
    options.relation_dict = dir / "relations.dict";
  }
  return load_dataset(dir / "train.txt", opt("valid.txt"), opt("test.txt"), options);
}

void save_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir);
  auto write_split = [&](const std::vector<Triple>& split, const char* name) {
    std::ofstream out(dir / name);
    for (const auto& t : split)
      out << ds.entities.name(t.head) << '\t' << ds.relations.name(t.relation) << '\t'
          << ds.entities.name(t.tail) << '\n';
    if (!out) throw DataError("failed writing " + (dir / name).string());
  };
  auto write_dict = [&](const Vocabulary& v, const char* name) {
    std::ofstream out(dir / name);
    for (std::size_t i = 0; i < v.size(); ++i) out << i << '\t' << v.names()[i] << '\n';
    if (!out) throw DataError("failed writing " + (dir / name).string());
  };
  write_split(ds.train, "train.txt");
  write_split(ds.valid, "valid.txt");
  write_split(ds.test, "test.txt");
  write_dict(ds.entities, "entities.dict");
  write_dict(ds.relations, "relations.dict");
}

void FrequencyTable::add(const Triple& t) {
  ++head_rel_[key(t.head, t.relation)];
  ++rel_tail_[key(t.relation, t.tail)];
}

std::optional<std::int64_t> FrequencyTable::head_rel(EntityId e, RelationId r) const {
  auto it = head_rel_.find(key(e, r));
  if (it == head_rel_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int64_t> FrequencyTable::rel_tail(RelationId r, EntityId e) const {
  auto it = rel_tail_.find(key(r, e));
  if (it == rel_tail_.end()) return std::nullopt;
  return it->second;
}

FrequencyTable count_frequencies(const Dataset& dataset) {
  FrequencyTable table;
  for (const auto& t : dataset.train) table.add(t);
  return table;
}

std::int64_t query_freq(const FrequencyTable& table, const QueryPart& q) {
  auto c = q.direction == Direction::TailQuery ? table.head_rel(q.anchor, q.relation)
                                               : table.rel_tail(q.relation, q.anchor);
  if (!c)
    throw DataError("query (" + std::string(to_string(q.direction)) + ", entity " +
                    std::to_string(q.anchor) + ", relation " + std::to_string(q.relation) +
                    ") does not occur in the training split");
  return *c;
}

std::int64_t triple_freq(const FrequencyTable& table, const Triple& t) {
  auto qs = query_parts(t);
  return query_freq(table, qs[0]) + query_freq(table, qs[1]);
}

KnownAnswers::KnownAnswers(std::initializer_list<std::span<const Triple>> splits) {
  for (auto s : splits)
    for (const auto& t : s) add(t);
}

std::uint64_t KnownAnswers::key(const QueryPart& q) {
  // direction in the top bit, then 31 bits relation, 32 bits anchor
  return (static_cast<std::uint64_t>(q.direction == Direction::HeadQuery) << 63) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(q.relation) & 0x7fffffffu) << 32) |
         static_cast<std::uint32_t>(q.anchor);
}

void KnownAnswers::add(const Triple& t) {
  for (const auto& q : query_parts(t)) {
    auto& v = answers_[key(q)];
    EntityId a = answer_of(t, q.direction);
    auto it = std::lower_bound(v.begin(), v.end(), a);
    if (it == v.end() || *it != a) v.insert(it, a);
  }
}

std::span<const EntityId> KnownAnswers::answers(const QueryPart& q) const {
  auto it = answers_.find(key(q));
  if (it == answers_.end()) return {};
  return it->second;
}

bool KnownAnswers::contains(const QueryPart& q, EntityId candidate) const {
  auto a = answers(q);
  return std::binary_search(a.begin(), a.end(), candidate);
}

}  // namespace kgsub
