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
#include "kgsub/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace kgsub {

double RankStats::hits_at(int k) const {
  for (std::size_t i = 0; i < kHitsAt.size(); ++i)
    if (kHitsAt[i] == k) return hits[i];
  throw std::out_of_range("hits@" + std::to_string(k) + " is not tracked");
}

double rank_from_scores(std::span<const double> scores, EntityId answer,
                        std::span<const EntityId> filtered) {
  const double target = scores[static_cast<std::size_t>(answer)];
  std::size_t better = 0, tied = 0;
  auto skip = filtered.begin();
  for (std::size_t c = 0; c < scores.size(); ++c) {
    const auto id = static_cast<EntityId>(c);
    while (skip != filtered.end() && *skip < id) ++skip;
    if (id == answer) continue;
    if (skip != filtered.end() && *skip == id) continue;
    if (scores[c] > target) ++better;
    else if (scores[c] == target) ++tied;
  }
  return 1.0 + static_cast<double>(better) + 0.5 * static_cast<double>(tied);
}

double filtered_rank(const EmbeddingStore<double>& store, const ModelSpec& spec, const QueryPart& q,
                     EntityId answer, const KnownAnswers& known) {
  Vector<double> scores = score_all_candidates(store, spec, q);
  return rank_from_scores({scores.data(), static_cast<std::size_t>(scores.size())}, answer, known.answers(q));
}

RankStats stats_from_ranks(std::span<const double> ranks) {
  RankStats s;
  s.queries = ranks.size();
  if (ranks.empty()) return s;
  double rr = 0;
  std::array<std::size_t, kHitsAt.size()> hit{};
  for (double r : ranks) {
    rr += 1.0 / r;
    for (std::size_t i = 0; i < kHitsAt.size(); ++i)
      if (r <= kHitsAt[i]) ++hit[i];
  }
  const double n = static_cast<double>(ranks.size());
  s.mrr = rr / n;
  for (std::size_t i = 0; i < kHitsAt.size(); ++i) s.hits[i] = static_cast<double>(hit[i]) / n;
  return s;
}

RankingReport evaluate(const EmbeddingStore<double>& store, const ModelSpec& spec, const Dataset& dataset,
                       Split split, const KnownAnswers& known, int workers, std::size_t max_triples) {
  const auto& triples = dataset.split(split);
  std::size_t n = triples.size();
  if (max_triples > 0) n = std::min(n, max_triples);
  if (n == 0) throw std::invalid_argument("cannot evaluate an empty " + std::string(to_string(split)) + " split");

  // ranks[2i] tail query of triple i, ranks[2i+1] head query
  std::vector<double> ranks(2 * n);
  const std::size_t nw = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, n);
  auto run = [&](std::size_t w) {
    for (std::size_t i = n * w / nw; i < n * (w + 1) / nw; ++i) {
      const auto qs = query_parts(triples[i]);
      for (std::size_t d = 0; d < 2; ++d)
        ranks[2 * i + d] = filtered_rank(store, spec, qs[d], answer_of(triples[i], qs[d].direction), known);
    }
  };
  if (nw == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(run, w);
  }

  std::vector<double> tail_ranks, head_ranks;
  tail_ranks.reserve(n);
  head_ranks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    tail_ranks.push_back(ranks[2 * i]);
    head_ranks.push_back(ranks[2 * i + 1]);
  }
  return {stats_from_ranks(ranks), stats_from_ranks(head_ranks), stats_from_ranks(tail_ranks)};
}

RankingReport evaluate(const EmbeddingStore<double>& store, const ModelSpec& spec, const Dataset& dataset,
                       Split split, int workers) {
  KnownAnswers known{dataset.train, dataset.valid, dataset.test};
  return evaluate(store, spec, dataset, split, known, workers);
}

nlohmann::json to_json(const RankStats& s) {
  nlohmann::json j{{"mrr", s.mrr}, {"queries", s.queries}};
  for (std::size_t i = 0; i < kHitsAt.size(); ++i) j["hits@" + std::to_string(kHitsAt[i])] = s.hits[i];
  return j;
}

nlohmann::json to_json(const RankingReport& r) {
  return {{"both", to_json(r.both)}, {"head", to_json(r.head)}, {"tail", to_json(r.tail)}};
}

std::string format_table(std::span<const TableRow> rows) {
  std::size_t mw = 5, lw = 4;
  for (const auto& r : rows) {
    mw = std::max(mw, r.model.size());
    lw = std::max(lw, r.label.size());
  }
  std::ostringstream out;
  char buf[128];
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  out << pad("Model", mw) << "  " << pad("Sub.", lw);
  std::snprintf(buf, sizeof buf, "  %7s  %7s  %7s  %7s\n", "MRR", "Hits@1", "Hits@3", "Hits@10");
  out << buf;
  for (const auto& r : rows) {
    out << pad(r.model, mw) << "  " << pad(r.label, lw);
    std::snprintf(buf, sizeof buf, "  %7.2f  %7.2f  %7.2f  %7.2f\n", 100 * r.stats.mrr, 100 * r.stats.hits[0],
                  100 * r.stats.hits[1], 100 * r.stats.hits[2]);
    out << buf;
  }
  return out.str();
}

}  // namespace kgsub
