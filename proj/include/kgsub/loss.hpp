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

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "kgsub/data.hpp"
#include "kgsub/models.hpp"
#include "kgsub/sampler.hpp"
#include "kgsub/subsampling.hpp"

namespace kgsub {

struct LossConfig {
  double gamma = 0.0;  // margin inside the sigmoid
  SubsamplingScheme subsampling;
  NoiseConfig noise;
};

// log(1 + e^z) without overflow; -log sigmoid(z) == softplus(-z).
template <typename Scalar>
Scalar softplus(Scalar z) {
  using std::exp;
  using std::log1p;
  return z > Scalar(0) ? z + log1p(exp(-z)) : log1p(exp(z));
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

// -log sigmoid(score + gamma)
template <typename Scalar>
Scalar positive_term(Scalar score, Scalar gamma) {
  return softplus(-(score + gamma));
}

// sum_i w_i * -log sigmoid(-score_i - gamma); weights must sum to 1.
template <typename Scalar>
Scalar negative_term(std::span<const Scalar> scores, Scalar gamma, std::span<const Scalar> weights) {
  if (scores.size() != weights.size()) throw std::invalid_argument("scores and weights differ in length");
  Scalar wsum(0), acc(0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    wsum += weights[i];
    acc += weights[i] * softplus(scores[i] + gamma);
  }
  using std::abs;
  if (scores.empty() || abs(wsum - Scalar(1)) > Scalar(1e-9))
    throw std::invalid_argument("negative weights must sum to 1");
  return acc;
}

// Sparse per-row gradient buffer. Rows are created on first touch and kept in
// insertion order.
class RowGradients {
 public:
  explicit RowGradients(int width = 0) : width_(width) {}

  int width() const { return width_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::int32_t>& ids() const { return ids_; }

  Eigen::Map<RowVector<double>> row_at(std::size_t slot) {
    return {data_.data() + slot * static_cast<std::size_t>(width_), width_};
  }
  Eigen::Map<const RowVector<double>> row_at(std::size_t slot) const {
    return {data_.data() + slot * static_cast<std::size_t>(width_), width_};
  }

  template <typename Derived>
  void add(std::int32_t id, const Eigen::MatrixBase<Derived>& g, double scale) {
    row_at(slot(id)) += scale * g;
  }

  void merge(const RowGradients& other, double scale = 1.0);
  void scale(double factor);
  void clear();
  // Row for id, or nullptr when untouched.
  const double* find(std::int32_t id) const;

 private:
  std::size_t slot(std::int32_t id);

  int width_;
  std::unordered_map<std::int32_t, std::size_t> slots_;
  std::vector<std::int32_t> ids_;
  std::vector<double> data_;
};

struct GradientSet {
  RowGradients entities;
  RowGradients relations;

  GradientSet() = default;
  GradientSet(int entity_width, int relation_width) : entities(entity_width), relations(relation_width) {}
  explicit GradientSet(const EmbeddingStore<double>& store)
      : GradientSet(static_cast<int>(store.entities.cols()), static_cast<int>(store.relations.cols())) {}
};

// Weighted negative-sampling loss of one directed example:
//   A * -log s(s(x,y) + g) + B * sum_i w_i * -log s(-s(x,y_i) - g)
// where w is 1/nu, or SANS weights when sans_alpha > 0. When grads is set,
// scale * dLoss/dTheta is accumulated into it.
double example_loss(const EmbeddingStore<double>& store, const ModelSpec& spec, const Example& example,
                    double positive_weight, double negative_weight, const LossConfig& config,
                    const NegativeBatch& negatives, GradientSet* grads = nullptr, double scale = 1.0);

// The unweighted loss, evaluated directly (no gradient).
double unweighted_example_loss(const EmbeddingStore<double>& store, const ModelSpec& spec,
                               const Example& example, const LossConfig& config,
                               const NegativeBatch& negatives);

struct BatchContext {
  std::span<const Example> examples;  // all directed training examples
  const SubsamplingWeights* weights = nullptr;
  const KnownAnswers* train_answers = nullptr;
  std::size_t num_entities = 0;
  int workers = 1;
};

struct BatchLoss {
  double loss = 0.0;
  GradientSet grads;
};

// Negatives for example id are drawn from stream derive_seed(batch_seed, id),
// so the result does not depend on the order of batch.
NegativeBatch negatives_for(const BatchContext& ctx, const LossConfig& config, std::size_t example_id,
                            std::uint64_t batch_seed);

// Mean example_loss over batch (example ids); gradients are the mean too.
BatchLoss batch_loss(const EmbeddingStore<double>& store, const ModelSpec& spec,
                     std::span<const std::size_t> batch, const BatchContext& ctx, const LossConfig& config,
                     std::uint64_t batch_seed);

// Mean unweighted_example_loss over the batch with the same negatives.
double unweighted_batch_loss(const EmbeddingStore<double>& store, const ModelSpec& spec,
                             std::span<const std::size_t> batch, const BatchContext& ctx,
                             const LossConfig& config, std::uint64_t batch_seed);

}  // namespace kgsub
