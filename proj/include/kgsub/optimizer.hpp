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
#include <string_view>
#include <vector>

#include "kgsub/loss.hpp"
#include "kgsub/models.hpp"

namespace kgsub {

enum class OptimizerKind { SGD, Adam };

OptimizerKind parse_optimizer_kind(std::string_view s);
std::string_view to_string(OptimizerKind k);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Per-row moment buffers for one embedding table.
struct RowMoments {
  RowMatrix<double> first;
  RowMatrix<double> second;
  std::vector<std::int64_t> last_step;  // 0 = never touched
};

// Sparse optimizer: only rows present in the gradient set move.
//
// Adam keeps moments per row and applies the decay of skipped steps lazily.
// At step t, for a row last touched at step t0 with gradient g:
//   m <- beta1^(t - t0) m + (1 - beta1) g
//   v <- beta2^(t - t0) v + (1 - beta2) g^2
//   theta <- theta - lr * (m / (1 - beta1^t)) / (sqrt(v / (1 - beta2^t)) + eps)
// The moments therefore equal those of dense Adam fed zero gradients on the
// skipped steps; only the parameter drift of those steps is omitted.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(const OptimizerConfig& config, const EmbeddingStore<double>& shape);

  void step(EmbeddingStore<double>& store, const GradientSet& grads, double learning_rate);

  const OptimizerConfig& config() const { return config_; }
  std::int64_t steps() const { return steps_; }

  RowMoments& entity_moments() { return entities_; }
  RowMoments& relation_moments() { return relations_; }
  const RowMoments& entity_moments() const { return entities_; }
  const RowMoments& relation_moments() const { return relations_; }
  void set_steps(std::int64_t s) { steps_ = s; }

 private:
  void apply(RowMatrix<double>& params, RowMoments& moments, const RowGradients& grads, double lr);

  OptimizerConfig config_;
  std::int64_t steps_ = 0;
  RowMoments entities_;
  RowMoments relations_;
};

}  // namespace kgsub
