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
#include "kgsub/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kgsub {

OptimizerKind parse_optimizer_kind(std::string_view s) {
  if (s == "sgd" || s == "SGD") return OptimizerKind::SGD;
  if (s == "adam" || s == "Adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer '" + std::string(s) + "' (expected sgd or adam)");
}

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::SGD ? "sgd" : "adam"; }

namespace {

RowMoments zero_moments(const RowMatrix<double>& like, bool adam) {
  RowMoments m;
  if (!adam) return m;
  m.first = RowMatrix<double>::Zero(like.rows(), like.cols());
  m.second = RowMatrix<double>::Zero(like.rows(), like.cols());
  m.last_step.assign(static_cast<std::size_t>(like.rows()), 0);
  return m;
}

}  // namespace

Optimizer::Optimizer(const OptimizerConfig& config, const EmbeddingStore<double>& shape)
    : config_(config),
      entities_(zero_moments(shape.entities, config.kind == OptimizerKind::Adam)),
      relations_(zero_moments(shape.relations, config.kind == OptimizerKind::Adam)) {}

void Optimizer::step(EmbeddingStore<double>& store, const GradientSet& grads, double learning_rate) {
  ++steps_;
  apply(store.entities, entities_, grads.entities, learning_rate);
  apply(store.relations, relations_, grads.relations, learning_rate);
}

void Optimizer::apply(RowMatrix<double>& params, RowMoments& moments, const RowGradients& grads, double lr) {
  if (config_.kind == OptimizerKind::SGD) {
    for (std::size_t s = 0; s < grads.size(); ++s) params.row(grads.ids()[s]) -= lr * grads.row_at(s);
    return;
  }
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t s = 0; s < grads.size(); ++s) {
    const auto id = grads.ids()[s];
    const auto g = grads.row_at(s);
    auto& last = moments.last_step[static_cast<std::size_t>(id)];
    const double gap = static_cast<double>(steps_ - last);
    last = steps_;
    auto m = moments.first.row(id);
    auto v = moments.second.row(id);
    m = std::pow(b1, gap) * m + (1.0 - b1) * g;
    v = std::pow(b2, gap) * v + (1.0 - b2) * g.cwiseAbs2();
    params.row(id).array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.epsilon);
  }
}

}  // namespace kgsub
