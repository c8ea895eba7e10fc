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

#include <span>
#include <vector>

#include "kgsub/data.hpp"
#include "kgsub/rng.hpp"

namespace kgsub {

struct NoiseConfig {
  int nu = 1;               // negatives per positive
  double sans_alpha = 0.0;  // 0 gives plain 1/nu averaging
  bool filter_false_negatives = false;
};

struct NegativeBatch {
  std::vector<EntityId> candidates;
  std::vector<double> weights;  // empty until sans_weights fills it
};

// nu candidates i.i.d. uniform over entities. With filtering on, any
// candidate that is a known train answer of q is redrawn.
NegativeBatch draw_negatives(Rng& rng, const NoiseConfig& config, const QueryPart& q,
                             std::size_t num_entities, const KnownAnswers& train_answers);

// softmax(alpha * scores). Treated as constants by the loss gradient.
std::vector<double> sans_weights(std::span<const double> scores, double alpha);

}  // namespace kgsub
