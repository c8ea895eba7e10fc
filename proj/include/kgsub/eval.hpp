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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgsub/data.hpp"
#include "kgsub/models.hpp"

namespace kgsub {

inline constexpr std::array<int, 3> kHitsAt = {1, 3, 10};

struct RankStats {
  double mrr = 0.0;
  std::array<double, kHitsAt.size()> hits{};  // aligned with kHitsAt
  std::size_t queries = 0;

  double hits_at(int k) const;
};

struct RankingReport {
  RankStats both;
  RankStats head;  // (?, r, t) queries
  RankStats tail;  // (h, r, ?) queries
};

// Rank of scores[answer] among candidates not in filtered (a sorted id list;
// the answer itself is never filtered). Ties count half:
//   1 + #{better} + #{tied} / 2
double rank_from_scores(std::span<const double> scores, EntityId answer,
                        std::span<const EntityId> filtered);

// Filtered rank of the true answer to q against every entity.
double filtered_rank(const EmbeddingStore<double>& store, const ModelSpec& spec, const QueryPart& q,
                     EntityId answer, const KnownAnswers& known);

RankStats stats_from_ranks(std::span<const double> ranks);

// Ranks both directions of every triple in split. known should hold all
// train/valid/test triples. max_triples > 0 evaluates only a prefix.
RankingReport evaluate(const EmbeddingStore<double>& store, const ModelSpec& spec, const Dataset& dataset,
                       Split split, const KnownAnswers& known, int workers = 1,
                       std::size_t max_triples = 0);

// Builds the filter from all three splits.
RankingReport evaluate(const EmbeddingStore<double>& store, const ModelSpec& spec, const Dataset& dataset,
                       Split split, int workers = 1);

nlohmann::json to_json(const RankStats& s);
nlohmann::json to_json(const RankingReport& r);

struct TableRow {
  std::string model;
  std::string label;
  RankStats stats;
};

// Aligned text table with columns Model, Sub., MRR, Hits@1, Hits@3, Hits@10
// (metric values in percent).
std::string format_table(std::span<const TableRow> rows);

}  // namespace kgsub
