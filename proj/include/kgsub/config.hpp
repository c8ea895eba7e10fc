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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgsub/data.hpp"
#include "kgsub/trainer.hpp"

namespace kgsub {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataConfig {
  std::filesystem::path dir;  // optional; train/valid/test default to dir/{train,valid,test}.txt
  std::filesystem::path train;
  std::filesystem::path valid;
  std::filesystem::path test;
  std::filesystem::path entities;   // optional id<TAB>name dictionaries
  std::filesystem::path relations;
  DuplicatePolicy duplicates = DuplicatePolicy::Error;
};

struct RunConfig {
  DataConfig data;
  ExperimentConfig experiment;
};

// "section.key" -> value
using Overrides = std::vector<std::pair<std::string, std::string>>;

// Parses "--section.key=value" / "section.key=value" tokens.
Overrides parse_overrides(const std::vector<std::string>& tokens);

// Every accepted "section.key".
const std::vector<std::string>& valid_config_keys();

// Reads an INI file with sections data, model, loss, subsampling, trainer.
// Unknown sections or keys raise ConfigError naming the valid keys. Relative
// data paths resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides = {});

// Same, from INI text; relative paths resolve against base_dir.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const Overrides& overrides = {});

Dataset load_dataset(const DataConfig& data);

nlohmann::json to_json(const DataConfig& d);

}  // namespace kgsub
