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
#include "kgsub/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace kgsub {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

const std::vector<std::string>& valid_config_keys() {
  static const std::vector<std::string> keys = {
      "data.dir", "data.train", "data.valid", "data.test", "data.entities", "data.relations", "data.duplicates",
      "model.kind", "model.dimension", "model.transe_norm", "model.init_range",
      "loss.gamma", "loss.nu", "loss.sans_alpha", "loss.filter_false_negatives",
      "subsampling.kind", "subsampling.exponent",
      "trainer.optimizer", "trainer.learning_rate", "trainer.beta1", "trainer.beta2", "trainer.epsilon",
      "trainer.lr_decay_every", "trainer.lr_decay_factor", "trainer.batch_size", "trainer.max_steps",
      "trainer.eval_every", "trainer.patience", "trainer.eval_max_triples", "trainer.seed", "trainer.workers",
      "trainer.log_every"};
  return keys;
}

namespace {

std::string key_list() {
  std::string out;
  for (const auto& k : valid_config_keys()) out += "\n  " + k;
  return out;
}

bool is_valid_key(const std::string& k) {
  const auto& keys = valid_config_keys();
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  T value{};
  const char* begin = raw.data();
  const char* end = raw.data() + raw.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad value '" + raw + "' for " + key);
  return value;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw ConfigError("bad boolean '" + raw + "' for " + key);
}

fs::path resolve(const fs::path& base, const std::string& raw) {
  fs::path p(raw);
  return p.is_absolute() ? p : base / p;
}

void apply(RunConfig& c, const std::string& key, const std::string& v, const fs::path& base) {
  auto& e = c.experiment;
  auto& t = e.trainer;
  try {
    if (key == "data.dir") c.data.dir = resolve(base, v);
    else if (key == "data.train") c.data.train = resolve(base, v);
    else if (key == "data.valid") c.data.valid = resolve(base, v);
    else if (key == "data.test") c.data.test = resolve(base, v);
    else if (key == "data.entities") c.data.entities = resolve(base, v);
    else if (key == "data.relations") c.data.relations = resolve(base, v);
    else if (key == "data.duplicates") {
      if (v == "error") c.data.duplicates = DuplicatePolicy::Error;
      else if (v == "dedupe") c.data.duplicates = DuplicatePolicy::Dedupe;
      else throw ConfigError("data.duplicates must be error or dedupe");
    }
    else if (key == "model.kind") e.model.kind = parse_model_kind(v);
    else if (key == "model.dimension") e.dimension = parse_number<int>(key, v);
    else if (key == "model.transe_norm") e.model.transe_norm = parse_number<int>(key, v);
    else if (key == "model.init_range") e.init_range = parse_number<double>(key, v);
    else if (key == "loss.gamma") e.loss.gamma = parse_number<double>(key, v);
    else if (key == "loss.nu") e.loss.noise.nu = parse_number<int>(key, v);
    else if (key == "loss.sans_alpha") e.loss.noise.sans_alpha = parse_number<double>(key, v);
    else if (key == "loss.filter_false_negatives") e.loss.noise.filter_false_negatives = parse_bool(key, v);
    else if (key == "subsampling.kind") e.loss.subsampling.kind = parse_scheme_kind(v);
    else if (key == "subsampling.exponent") e.loss.subsampling.exponent = parse_number<double>(key, v);
    else if (key == "trainer.optimizer") t.optimizer.kind = parse_optimizer_kind(v);
    else if (key == "trainer.learning_rate") t.learning_rate = parse_number<double>(key, v);
    else if (key == "trainer.beta1") t.optimizer.beta1 = parse_number<double>(key, v);
    else if (key == "trainer.beta2") t.optimizer.beta2 = parse_number<double>(key, v);
    else if (key == "trainer.epsilon") t.optimizer.epsilon = parse_number<double>(key, v);
    else if (key == "trainer.lr_decay_every") t.schedule.decay_every = parse_number<std::int64_t>(key, v);
    else if (key == "trainer.lr_decay_factor") t.schedule.decay_factor = parse_number<double>(key, v);
    else if (key == "trainer.batch_size") t.batch_size = parse_number<std::size_t>(key, v);
    else if (key == "trainer.max_steps") t.max_steps = parse_number<std::int64_t>(key, v);
    else if (key == "trainer.eval_every") t.eval_every = parse_number<std::int64_t>(key, v);
    else if (key == "trainer.patience") t.patience = parse_number<int>(key, v);
    else if (key == "trainer.eval_max_triples") t.eval_max_triples = parse_number<std::size_t>(key, v);
    else if (key == "trainer.seed") t.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "trainer.workers") t.workers = parse_number<int>(key, v);
    else if (key == "trainer.log_every") t.log_every = parse_number<std::int64_t>(key, v);
    else throw ConfigError("unknown config key '" + key + "'; valid keys are:" + key_list());
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(key + ": " + ex.what());
  }
}

}  // namespace

Overrides parse_overrides(const std::vector<std::string>& tokens) {
  Overrides out;
  for (auto tok : tokens) {
    if (tok.rfind("--", 0) == 0) tok.erase(0, 2);
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override '" + tok + "' must look like section.key=value");
    out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return out;
}

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir, const Overrides& overrides) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside a section; valid keys are:" + key_list());
    for (const auto& [name, value] : body) {
      const auto key = section + "." + name;
      if (!is_valid_key(key)) throw ConfigError("unknown config key '" + key + "'; valid keys are:" + key_list());
      apply(c, key, value.data(), base_dir);
    }
  }
  for (const auto& [key, value] : overrides) {
    if (!is_valid_key(key)) throw ConfigError("unknown config key '" + key + "'; valid keys are:" + key_list());
    apply(c, key, value, fs::current_path());
  }
  if (!c.data.dir.empty()) {
    if (c.data.train.empty()) c.data.train = c.data.dir / "train.txt";
    if (c.data.valid.empty() && fs::exists(c.data.dir / "valid.txt")) c.data.valid = c.data.dir / "valid.txt";
    if (c.data.test.empty() && fs::exists(c.data.dir / "test.txt")) c.data.test = c.data.dir / "test.txt";
  }
  if (c.data.train.empty()) throw ConfigError("config must set data.train or data.dir");
  return c;
}

RunConfig load_run_config(const fs::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path(), overrides);
}

Dataset load_dataset(const DataConfig& data) {
  LoadOptions opt;
  opt.duplicates = data.duplicates;
  if (!data.entities.empty()) opt.entity_dict = data.entities;
  if (!data.relations.empty()) opt.relation_dict = data.relations;
  return load_dataset(data.train, data.valid, data.test, opt);
}

nlohmann::json to_json(const DataConfig& d) {
  return {{"train", d.train.string()}, {"valid", d.valid.string()}, {"test", d.test.string()},
          {"entities", d.entities.string()}, {"relations", d.relations.string()},
          {"duplicates", d.duplicates == DuplicatePolicy::Error ? "error" : "dedupe"}};
}

}  // namespace kgsub
