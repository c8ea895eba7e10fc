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
#include "kgsub/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kgsub {

NegativeBatch draw_negatives(Rng& rng, const NoiseConfig& config, const QueryPart& q,
                             std::size_t num_entities, const KnownAnswers& train_answers) {
  if (config.nu < 1) throw std::invalid_argument("nu must be at least 1");
  if (num_entities < 2) throw std::invalid_argument("negative sampling needs at least two entities");
  std::span<const EntityId> known;
  if (config.filter_false_negatives) {
    known = train_answers.answers(q);
    if (known.size() >= num_entities)
      throw std::runtime_error("cannot filter negatives: every entity answers query (" +
                               std::string(to_string(q.direction)) + ", " + std::to_string(q.anchor) +
                               ", " + std::to_string(q.relation) + ")");
  }
  std::uniform_int_distribution<EntityId> pick(0, static_cast<EntityId>(num_entities - 1));
  NegativeBatch batch;
  batch.candidates.reserve(static_cast<std::size_t>(config.nu));
  for (int i = 0; i < config.nu; ++i) {
    EntityId c = pick(rng);
    while (!known.empty() && std::binary_search(known.begin(), known.end(), c)) c = pick(rng);
    batch.candidates.push_back(c);
  }
  return batch;
}

std::vector<double> sans_weights(std::span<const double> scores, double alpha) {
  std::vector<double> w(scores.size());
  if (scores.empty()) return w;
  if (alpha == 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(scores.size()));
    return w;
  }
  double top = alpha * *std::max_element(scores.begin(), scores.end());
  if (alpha < 0) top = alpha * *std::min_element(scores.begin(), scores.end());
  double total = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp(alpha * scores[i] - top);
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace kgsub
