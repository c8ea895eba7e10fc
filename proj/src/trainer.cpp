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
#include "kgsub/trainer.hpp"

#include "kgsub/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace kgsub {

namespace fs = std::filesystem;
using nlohmann::json;

double LrSchedule::at(double base, std::int64_t step) const {
  if (decay_every <= 0 || step <= 0) return base;
  return base * std::pow(decay_factor, static_cast<double>((step - 1) / decay_every));
}

json to_json(const ExperimentConfig& c) {
  const auto& t = c.trainer;
  return {
      {"model", {{"kind", to_string(c.model.kind)}, {"transe_norm", c.model.transe_norm},
                 {"dimension", c.dimension}, {"init_range", c.effective_init_range()}}},
      {"loss", {{"gamma", c.loss.gamma}, {"nu", c.loss.noise.nu}, {"sans_alpha", c.loss.noise.sans_alpha},
                {"filter_false_negatives", c.loss.noise.filter_false_negatives}}},
      {"subsampling", {{"kind", to_string(c.loss.subsampling.kind)}, {"exponent", c.loss.subsampling.exponent}}},
      {"trainer", {{"optimizer", to_string(t.optimizer.kind)}, {"beta1", t.optimizer.beta1},
                   {"beta2", t.optimizer.beta2}, {"epsilon", t.optimizer.epsilon},
                   {"learning_rate", t.learning_rate}, {"lr_decay_every", t.schedule.decay_every},
                   {"lr_decay_factor", t.schedule.decay_factor}, {"batch_size", t.batch_size},
                   {"max_steps", t.max_steps}, {"eval_every", t.eval_every}, {"patience", t.patience},
                   {"eval_max_triples", t.eval_max_triples}, {"seed", t.seed}, {"workers", t.workers},
                   {"log_every", t.log_every}}}};
}

ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig c;
  const auto& m = j.at("model");
  c.model.kind = parse_model_kind(m.at("kind").get<std::string>());
  c.model.transe_norm = m.at("transe_norm").get<int>();
  c.dimension = m.at("dimension").get<int>();
  c.init_range = m.at("init_range").get<double>();
  const auto& l = j.at("loss");
  c.loss.gamma = l.at("gamma").get<double>();
  c.loss.noise.nu = l.at("nu").get<int>();
  c.loss.noise.sans_alpha = l.at("sans_alpha").get<double>();
  c.loss.noise.filter_false_negatives = l.at("filter_false_negatives").get<bool>();
  const auto& s = j.at("subsampling");
  c.loss.subsampling.kind = parse_scheme_kind(s.at("kind").get<std::string>());
  c.loss.subsampling.exponent = s.at("exponent").get<double>();
  const auto& t = j.at("trainer");
  c.trainer.optimizer.kind = parse_optimizer_kind(t.at("optimizer").get<std::string>());
  c.trainer.optimizer.beta1 = t.at("beta1").get<double>();
  c.trainer.optimizer.beta2 = t.at("beta2").get<double>();
  c.trainer.optimizer.epsilon = t.at("epsilon").get<double>();
  c.trainer.learning_rate = t.at("learning_rate").get<double>();
  c.trainer.schedule.decay_every = t.at("lr_decay_every").get<std::int64_t>();
  c.trainer.schedule.decay_factor = t.at("lr_decay_factor").get<double>();
  c.trainer.batch_size = t.at("batch_size").get<std::size_t>();
  c.trainer.max_steps = t.at("max_steps").get<std::int64_t>();
  c.trainer.eval_every = t.at("eval_every").get<std::int64_t>();
  c.trainer.patience = t.at("patience").get<int>();
  c.trainer.eval_max_triples = t.at("eval_max_triples").get<std::size_t>();
  c.trainer.seed = t.at("seed").get<std::uint64_t>();
  c.trainer.workers = t.at("workers").get<int>();
  c.trainer.log_every = t.at("log_every").get<std::int64_t>();
  return c;
}

json to_json(const LogRecord& r) {
  json j{{"step", r.step}, {"loss", r.loss}, {"lr", r.learning_rate}};
  if (r.valid_mrr) j["valid_mrr"] = *r.valid_mrr;
  return j;
}

LogRecord log_record_from_json(const json& j) {
  LogRecord r;
  r.step = j.at("step").get<std::int64_t>();
  r.loss = j.at("loss").get<double>();
  r.learning_rate = j.at("lr").get<double>();
  if (j.contains("valid_mrr")) r.valid_mrr = j.at("valid_mrr").get<double>();
  return r;
}

std::string to_jsonl(const std::vector<LogRecord>& log) {
  std::string out;
  for (const auto& r : log) out += to_json(r).dump() + "\n";
  return out;
}

namespace {

void validate(const ExperimentConfig& c) {
  validate_dimension(c.model.kind, c.dimension);
  const auto& t = c.trainer;
  if (!(t.learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be non-negative");
  if (t.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (t.max_steps <= 0) throw std::invalid_argument("max steps must be positive");
  if (t.log_every <= 0) throw std::invalid_argument("log_every must be positive");
  if (c.model.kind == ModelKind::TransE && c.model.transe_norm != 1 && c.model.transe_norm != 2)
    throw std::invalid_argument("TransE norm must be 1 or 2");
  if (!std::isfinite(c.loss.gamma)) throw std::invalid_argument("gamma must be finite");
  if (c.loss.noise.nu < 1) throw std::invalid_argument("nu must be at least 1");
}

double evaluate_mrr(const EmbeddingStore<double>& store, const ModelSpec& spec, const Dataset& dataset,
                    const KnownAnswers& known, const TrainConfig& tc) {
  return evaluate(store, spec, dataset, Split::Valid, known, tc.workers, tc.eval_max_triples).both.mrr;
}

// Epoch-wise shuffled stream of example ids; position p lives in epoch
// p / n at permutation slot p % n.
class ExampleStream {
 public:
  ExampleStream(std::size_t n, std::uint64_t seed) : n_(n), seed_(seed) {}

  std::vector<std::size_t> batch(std::int64_t step, std::size_t batch_size) {
    std::vector<std::size_t> out(batch_size);
    const auto start = static_cast<std::uint64_t>(step - 1) * batch_size;
    for (std::size_t i = 0; i < batch_size; ++i) {
      const auto p = start + i;
      out[i] = permutation(p / n_)[p % n_];
    }
    return out;
  }

 private:
  const std::vector<std::size_t>& permutation(std::uint64_t epoch) {
    if (epoch != epoch_ || perm_.empty()) {
      perm_.resize(n_);
      std::iota(perm_.begin(), perm_.end(), std::size_t{0});
      Rng rng(derive_seed(seed_, 0x5eed, epoch));
      std::shuffle(perm_.begin(), perm_.end(), rng);
      epoch_ = epoch;
    }
    return perm_;
  }

  std::size_t n_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
  std::vector<std::size_t> perm_;
};

}  // namespace

TrainState start_training(const Dataset& dataset, const ExperimentConfig& config) {
  validate(config);
  TrainState s;
  s.current = init_model<double>(config.model, dataset.num_entities(), dataset.num_relations(),
                                 config.dimension, config.trainer.seed, config.effective_init_range());
  s.optimizer = Optimizer(config.trainer.optimizer, s.current);
  s.best = s.current;
  return s;
}

void continue_training(TrainState& state, const Dataset& dataset, const ExperimentConfig& config) {
  validate(config);
  const auto& tc = config.trainer;
  const auto examples = expand_examples(dataset.train);
  const auto table = count_frequencies(dataset);
  const auto weights = compute_weights(config.loss.subsampling, dataset, table);
  const KnownAnswers train_answers{dataset.train};
  const bool validating = tc.eval_every > 0 && !dataset.valid.empty();
  KnownAnswers all_answers;
  if (validating) all_answers = KnownAnswers{dataset.train, dataset.valid, dataset.test};

  BatchContext ctx{examples, &weights, &train_answers, dataset.num_entities(), tc.workers};
  ExampleStream stream(examples.size(), tc.seed);

  while (!state.stopped_early && state.step < tc.max_steps) {
    const std::int64_t step = state.step + 1;
    const double lr = tc.schedule.at(tc.learning_rate, step);
    const auto batch = stream.batch(step, tc.batch_size);
    auto result = batch_loss(state.current, config.model, batch, ctx, config.loss,
                             derive_seed(tc.seed, 0xba7c4, static_cast<std::uint64_t>(step)));
    if (!std::isfinite(result.loss)) {
      std::ostringstream msg;
      msg << "non-finite loss at step " << step << " (learning rate " << lr << "); batch example ids:";
      for (std::size_t i = 0; i < std::min<std::size_t>(batch.size(), 16); ++i) msg << ' ' << batch[i];
      if (batch.size() > 16) msg << " ...";
      throw TrainingAborted(msg.str());
    }
    state.optimizer.step(state.current, result.grads, lr);
    state.step = step;

    LogRecord rec{step, result.loss, lr, std::nullopt};
    bool log_it = step % tc.log_every == 0;
    if (validating && step % tc.eval_every == 0) {
      const double mrr = evaluate_mrr(state.current, config.model, dataset, all_answers, tc);
      rec.valid_mrr = mrr;
      log_it = true;
      if (!state.best_valid_mrr || mrr > *state.best_valid_mrr) {
        state.best_valid_mrr = mrr;
        state.best_step = step;
        state.best = state.current;
        state.evals_since_best = 0;
      } else if (tc.patience > 0 && ++state.evals_since_best >= tc.patience) {
        state.stopped_early = true;
      }
    }
    if (log_it) state.log.push_back(rec);
  }
  if (!state.best_valid_mrr) state.best = state.current;
}

TrainResult train(const Dataset& dataset, const ExperimentConfig& config) {
  auto state = start_training(dataset, config);
  continue_training(state, dataset, config);
  TrainResult r{state.best, state.log, std::move(state)};
  return r;
}

CheckpointManifest make_manifest(const Dataset& dataset, const ExperimentConfig& config, bool with_state) {
  CheckpointManifest m;
  m.model = config.model;
  m.dimension = config.dimension;
  m.num_entities = dataset.num_entities();
  m.num_relations = dataset.num_relations();
  m.entity_vocab_hash = dataset.entities.hash();
  m.relation_vocab_hash = dataset.relations.hash();
  m.config = to_json(config);
  m.has_training_state = with_state;
  return m;
}

void save_checkpoint(const fs::path& dir, const Dataset& dataset, const ExperimentConfig& config,
                     const TrainState& state) {
  save_model(dir, make_manifest(dataset, config, true), state.best);
  const auto sdir = dir / "state";
  fs::create_directories(sdir);
  write_matrix(sdir / "current_entities.bin", state.current.entities);
  write_matrix(sdir / "current_relations.bin", state.current.relations);
  const auto& opt = state.optimizer;
  const bool adam = opt.config().kind == OptimizerKind::Adam;
  auto last_steps = [](const std::vector<std::int64_t>& v) {
    RowMatrix<double> m(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = static_cast<double>(v[i]);
    return m;
  };
  if (adam) {
    write_matrix(sdir / "adam_entity_m.bin", opt.entity_moments().first);
    write_matrix(sdir / "adam_entity_v.bin", opt.entity_moments().second);
    write_matrix(sdir / "adam_entity_last.bin", last_steps(opt.entity_moments().last_step));
    write_matrix(sdir / "adam_relation_m.bin", opt.relation_moments().first);
    write_matrix(sdir / "adam_relation_v.bin", opt.relation_moments().second);
    write_matrix(sdir / "adam_relation_last.bin", last_steps(opt.relation_moments().last_step));
  }
  json j{{"step", state.step},
         {"optimizer_steps", opt.steps()},
         {"best_step", state.best_step},
         {"evals_since_best", state.evals_since_best},
         {"stopped_early", state.stopped_early}};
  if (state.best_valid_mrr) j["best_valid_mrr"] = *state.best_valid_mrr;
  std::ofstream out(sdir / "state.json", std::ios::trunc);
  out << j.dump(2) << '\n';
  std::ofstream log(sdir / "train_log.jsonl", std::ios::trunc);
  log << to_jsonl(state.log);
  if (!out || !log) throw std::runtime_error("failed writing training state to " + sdir.string());
}

TrainState load_training_state(const fs::path& dir, const CheckpointManifest& manifest) {
  if (!manifest.has_training_state) throw ArtifactMismatch("checkpoint " + dir.string() + " has no training state");
  const auto sdir = dir / "state";
  ExperimentConfig cfg;
  try {
    cfg = experiment_from_json(manifest.config);
  } catch (const std::exception& e) {
    throw ArtifactMismatch(std::string("corrupt config echo in manifest: ") + e.what());
  }
  TrainState s;
  s.best = load_model(dir, manifest);
  s.current = {read_matrix(sdir / "current_entities.bin"), read_matrix(sdir / "current_relations.bin")};
  s.optimizer = Optimizer(cfg.trainer.optimizer, s.current);
  std::ifstream in(sdir / "state.json");
  if (!in) throw ArtifactMismatch("missing state.json in " + sdir.string());
  try {
    const auto j = json::parse(in);
    s.step = j.at("step").get<std::int64_t>();
    s.optimizer.set_steps(j.at("optimizer_steps").get<std::int64_t>());
    s.best_step = j.at("best_step").get<std::int64_t>();
    s.evals_since_best = j.at("evals_since_best").get<int>();
    s.stopped_early = j.at("stopped_early").get<bool>();
    if (j.contains("best_valid_mrr")) s.best_valid_mrr = j.at("best_valid_mrr").get<double>();
  } catch (const json::exception& e) {
    throw ArtifactMismatch(std::string("corrupt state.json: ") + e.what());
  }
  if (cfg.trainer.optimizer.kind == OptimizerKind::Adam) {
    auto last_steps = [](const RowMatrix<double>& m) {
      std::vector<std::int64_t> v(static_cast<std::size_t>(m.rows()));
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::int64_t>(m(static_cast<Eigen::Index>(i), 0));
      return v;
    };
    auto& em = s.optimizer.entity_moments();
    em.first = read_matrix(sdir / "adam_entity_m.bin");
    em.second = read_matrix(sdir / "adam_entity_v.bin");
    em.last_step = last_steps(read_matrix(sdir / "adam_entity_last.bin"));
    auto& rm = s.optimizer.relation_moments();
    rm.first = read_matrix(sdir / "adam_relation_m.bin");
    rm.second = read_matrix(sdir / "adam_relation_v.bin");
    rm.last_step = last_steps(read_matrix(sdir / "adam_relation_last.bin"));
  }
  std::ifstream log(sdir / "train_log.jsonl");
  std::string line;
  try {
    while (std::getline(log, line))
      if (!line.empty()) s.log.push_back(log_record_from_json(json::parse(line)));
  } catch (const json::exception& e) {
    throw ArtifactMismatch(std::string("corrupt training log: ") + e.what());
  }
  return s;
}

TrainResult resume(const fs::path& dir, const Dataset& dataset, const ExperimentConfig& config) {
  const auto manifest = read_manifest(dir);
  verify_vocab(manifest, dataset);
  auto saved = manifest.config;
  auto wanted = to_json(config);
  if (saved.contains("trainer")) saved["trainer"].erase("max_steps");
  wanted["trainer"].erase("max_steps");
  if (saved != wanted) {
    std::string diff;
    for (const auto& [section, body] : wanted.items()) {
      if (!saved.contains(section)) { diff += " " + section; continue; }
      for (const auto& [key, value] : body.items())
        if (!saved[section].contains(key) || saved[section][key] != value) diff += " " + section + "." + key;
    }
    throw ArtifactMismatch("config differs from checkpoint in:" + diff);
  }
  auto state = load_training_state(dir, manifest);
  continue_training(state, dataset, config);
  TrainResult r{state.best, state.log, std::move(state)};
  return r;
}

}  // namespace kgsub
