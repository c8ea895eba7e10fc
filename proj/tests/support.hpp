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

// Shared fixtures for the unit and acceptance suites.

#include <cstdint>
#include <random>
#include <set>
#include <string>

#include "kgsub/data.hpp"
#include "kgsub/models.hpp"

namespace kgsub::testing {

// Random duplicate-free KG with entity/relation names "e<i>" / "r<j>".
// Popular tails follow a skewed distribution so frequencies vary.
inline Dataset random_dataset(std::uint64_t seed, int num_entities, int num_relations, int num_triples) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ent(0, num_entities - 1), rel(0, num_relations - 1);
  std::geometric_distribution<int> skew(0.15);
  Dataset ds;
  for (int i = 0; i < num_entities; ++i) ds.entities.add("e" + std::to_string(i));
  for (int j = 0; j < num_relations; ++j) ds.relations.add("r" + std::to_string(j));
  std::set<Triple> seen;
  int attempts = 0;
  while (static_cast<int>(ds.train.size()) < num_triples && attempts++ < num_triples * 50) {
    Triple t{ent(rng), rel(rng), std::min(skew(rng), num_entities - 1)};
    if (seen.insert(t).second) ds.train.push_back(t);
  }
  return ds;
}

inline Dataset from_names(std::initializer_list<std::array<const char*, 3>> train) {
  Dataset ds;
  for (const auto& t : train)
    ds.train.push_back({ds.entities.add(t[0]), ds.relations.add(t[1]), ds.entities.add(t[2])});
  return ds;
}

// Random store with entries N(0, scale^2); RotatE phases uniform.
inline EmbeddingStore<double> random_store(const ModelSpec& spec, int num_entities, int num_relations,
                                           int dimension, std::uint64_t seed, double scale = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  EmbeddingStore<double> s;
  s.entities.resize(num_entities, dimension);
  s.relations.resize(num_relations, relation_width(spec.kind, dimension));
  for (Eigen::Index i = 0; i < s.entities.size(); ++i) s.entities.data()[i] = n(rng);
  std::uniform_real_distribution<double> phase(-3.14159, 3.14159);
  for (Eigen::Index i = 0; i < s.relations.size(); ++i)
    s.relations.data()[i] = spec.kind == ModelKind::RotatE ? phase(rng) : n(rng);
  return s;
}

}  // namespace kgsub::testing
