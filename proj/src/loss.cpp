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
#include "kgsub/loss.hpp"

#include <algorithm>
#include <thread>

namespace kgsub {

std::size_t RowGradients::slot(std::int32_t id) {
  auto [it, inserted] = slots_.try_emplace(id, ids_.size());
  if (inserted) {
    ids_.push_back(id);
    data_.resize(data_.size() + static_cast<std::size_t>(width_), 0.0);
  }
  return it->second;
}

void RowGradients::merge(const RowGradients& other, double scale) {
  for (std::size_t s = 0; s < other.ids_.size(); ++s) add(other.ids_[s], other.row_at(s), scale);
}

void RowGradients::scale(double factor) {
  for (auto& v : data_) v *= factor;
}

void RowGradients::clear() {
  slots_.clear();
  ids_.clear();
  data_.clear();
}

const double* RowGradients::find(std::int32_t id) const {
  auto it = slots_.find(id);
  if (it == slots_.end()) return nullptr;
  return data_.data() + it->second * static_cast<std::size_t>(width_);
}

namespace {

void accumulate(GradientSet& grads, const ModelSpec& spec, const EmbeddingStore<double>& store,
                const Triple& t, double coeff) {
  auto g = score_gradient(store, spec, t);
  grads.entities.add(t.head, g.head, coeff);
  grads.relations.add(t.relation, g.relation, coeff);
  grads.entities.add(t.tail, g.tail, coeff);
}

std::vector<double> negative_scores(const EmbeddingStore<double>& store, const ModelSpec& spec,
                                    const QueryPart& q, const NegativeBatch& negatives) {
  std::vector<double> s(negatives.candidates.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = score(store, spec, complete(q, negatives.candidates[i]));
  return s;
}

std::vector<double> inner_weights(const std::vector<double>& scores, const LossConfig& config,
                                   const NegativeBatch& negatives) {
  if (!negatives.weights.empty()) return negatives.weights;
  return sans_weights(scores, config.noise.sans_alpha);
}

}  // namespace

double example_loss(const EmbeddingStore<double>& store, const ModelSpec& spec, const Example& example,
                    double positive_weight, double negative_weight, const LossConfig& config,
                    const NegativeBatch& negatives, GradientSet* grads, double scale) {
  const Triple positive = complete(example.query, example.answer);
  const double pos_score = score(store, spec, positive);
  const auto neg_scores = negative_scores(store, spec, example.query, negatives);
  const auto w = inner_weights(neg_scores, config, negatives);

  const double loss = positive_weight * positive_term(pos_score, config.gamma) +
                      negative_weight * negative_term<double>(neg_scores, config.gamma, w);

  if (grads) {
    // d softplus(-(s + g)) / ds = -sigmoid(-(s + g)); d softplus(s + g) / ds = sigmoid(s + g)
    accumulate(*grads, spec, store, positive,
               -scale * positive_weight * sigmoid(-(pos_score + config.gamma)));
    for (std::size_t i = 0; i < neg_scores.size(); ++i)
      accumulate(*grads, spec, store, complete(example.query, negatives.candidates[i]),
                 scale * negative_weight * w[i] * sigmoid(neg_scores[i] + config.gamma));
  }
  return loss;
}

double unweighted_example_loss(const EmbeddingStore<double>& store, const ModelSpec& spec,
                               const Example& example, const LossConfig& config,
                               const NegativeBatch& negatives) {
  const double pos_score = score(store, spec, complete(example.query, example.answer));
  const auto neg_scores = negative_scores(store, spec, example.query, negatives);
  const auto w = inner_weights(neg_scores, config, negatives);
  return positive_term(pos_score, config.gamma) + negative_term<double>(neg_scores, config.gamma, w);
}

NegativeBatch negatives_for(const BatchContext& ctx, const LossConfig& config, std::size_t example_id,
                            std::uint64_t batch_seed) {
  Rng rng(derive_seed(batch_seed, example_id));
  return draw_negatives(rng, config.noise, ctx.examples[example_id].query, ctx.num_entities,
                        *ctx.train_answers);
}

BatchLoss batch_loss(const EmbeddingStore<double>& store, const ModelSpec& spec,
                     std::span<const std::size_t> batch, const BatchContext& ctx, const LossConfig& config,
                     std::uint64_t batch_seed) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const std::size_t n = batch.size();
  const double inv = 1.0 / static_cast<double>(n);
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(ctx.workers, 1)), 1, n);

  std::vector<double> losses(n);
  std::vector<GradientSet> partial(workers, GradientSet(store));
  auto run = [&](std::size_t w) {
    const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t id = batch[i];
      auto negatives = negatives_for(ctx, config, id, batch_seed);
      losses[i] = example_loss(store, spec, ctx.examples[id], ctx.weights->positive[id],
                               ctx.weights->negative[id], config, negatives, &partial[w], inv);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  BatchLoss out{0.0, std::move(partial[0])};
  for (std::size_t w = 1; w < workers; ++w) {
    out.grads.entities.merge(partial[w].entities);
    out.grads.relations.merge(partial[w].relations);
  }
  for (double l : losses) out.loss += l;
  out.loss *= inv;
  return out;
}

double unweighted_batch_loss(const EmbeddingStore<double>& store, const ModelSpec& spec,
                             std::span<const std::size_t> batch, const BatchContext& ctx,
                             const LossConfig& config, std::uint64_t batch_seed) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t id : batch)
    total += unweighted_example_loss(store, spec, ctx.examples[id], config,
                                     negatives_for(ctx, config, id, batch_seed));
  return total * inv;
}

}  // namespace kgsub
