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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgsub/checkpoint.hpp"
#include "kgsub/data.hpp"
#include "kgsub/loss.hpp"
#include "kgsub/models.hpp"
#include "kgsub/optimizer.hpp"
#include "kgsub/subsampling.hpp"

namespace kgsub {

// lr(step) = base * factor^floor((step - 1) / every); every = 0 keeps it constant.
struct LrSchedule {
  std::int64_t decay_every = 0;
  double decay_factor = 0.1;

  double at(double base, std::int64_t step) const;
};

struct TrainConfig {
  OptimizerConfig optimizer;
  double learning_rate = 1e-3;
  LrSchedule schedule;
  std::size_t batch_size = 128;
  std::int64_t max_steps = 1000;
  std::int64_t eval_every = 0;  // 0 disables validation
  int patience = 0;             // evals without improvement before stopping; 0 never stops
  std::size_t eval_max_triples = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::int64_t log_every = 1;
};

struct ExperimentConfig {
  ModelSpec model;
  int dimension = 100;
  std::optional<double> init_range;  // default (gamma + 2) / dimension
  LossConfig loss;
  TrainConfig trainer;

  double effective_init_range() const {
    return init_range ? *init_range : default_init_range(loss.gamma, dimension);
  }
};

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_from_json(const nlohmann::json& j);

struct LogRecord {
  std::int64_t step = 0;
  double loss = 0.0;
  double learning_rate = 0.0;
  std::optional<double> valid_mrr;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

nlohmann::json to_json(const LogRecord& r);
LogRecord log_record_from_json(const nlohmann::json& j);
std::string to_jsonl(const std::vector<LogRecord>& log);

// Everything needed to continue a run exactly where it stopped.
struct TrainState {
  std::int64_t step = 0;
  EmbeddingStore<double> current;
  Optimizer optimizer;
  std::optional<double> best_valid_mrr;
  std::int64_t best_step = 0;
  int evals_since_best = 0;
  bool stopped_early = false;
  EmbeddingStore<double> best;
  std::vector<LogRecord> log;
};

class TrainingAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TrainState start_training(const Dataset& dataset, const ExperimentConfig& config);

// Runs steps state.step + 1 .. max_steps, or until early stopping.
void continue_training(TrainState& state, const Dataset& dataset, const ExperimentConfig& config);

struct TrainResult {
  EmbeddingStore<double> model;  // best validation checkpoint, or the last one without validation
  std::vector<LogRecord> log;
  TrainState state;
};

TrainResult train(const Dataset& dataset, const ExperimentConfig& config);

CheckpointManifest make_manifest(const Dataset& dataset, const ExperimentConfig& config, bool with_state);

// Writes the returned model plus state/ for resume.
void save_checkpoint(const std::filesystem::path& dir, const Dataset& dataset, const ExperimentConfig& config,
                     const TrainState& state);

TrainState load_training_state(const std::filesystem::path& dir, const CheckpointManifest& manifest);

// Continues a checkpointed run up to config.trainer.max_steps. Every setting
// except max_steps must match the checkpoint, and the vocabularies must match
// the dataset; otherwise ArtifactMismatch.
TrainResult resume(const std::filesystem::path& dir, const Dataset& dataset, const ExperimentConfig& config);

}  // namespace kgsub
