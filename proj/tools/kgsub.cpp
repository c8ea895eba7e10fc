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
// kgsub: train / eval / compare knowledge-graph embeddings with subsampled
// negative-sampling losses, and inspect the pieces (freq, weights,
// theory-check).
//
// Exit codes: 0 success, 1 internal error, 2 usage or config error,
// 3 artifact mismatch.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kgsub/checkpoint.hpp"
#include "kgsub/config.hpp"
#include "kgsub/data.hpp"
#include "kgsub/eval.hpp"
#include "kgsub/subsampling.hpp"
#include "kgsub/theory.hpp"
#include "kgsub/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kgsub;

namespace {

constexpr const char* kVersion = "0.3.0";

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kMismatch = 3 };

fs::path default_output_dir() {
  if (const char* env = std::getenv("KGSUB_OUTPUT_DIR"); env && *env) return env;
  return "kgsub-out";
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << v;
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json dataset_checksums(const DataConfig& d) {
  json j = json::object();
  for (const auto& [name, p] : {std::pair{"train", d.train}, {"valid", d.valid}, {"test", d.test},
                                {"entities", d.entities}, {"relations", d.relations}})
    if (!p.empty()) j[name] = hex(file_checksum(p));
  return j;
}

json run_manifest(const std::string& command, const RunConfig& cfg, const std::string& started) {
  return {{"command", command},
          {"kgsub_version", kVersion},
          {"config", to_json(cfg.experiment)},
          {"data", to_json(cfg.data)},
          {"dataset_checksums", dataset_checksums(cfg.data)},
          {"seed", cfg.experiment.trainer.seed},
          {"started_at", started},
          {"finished_at", utc_now()}};
}

// Loads the dataset for eval/freq/weights from --config or --data.
Dataset dataset_from(const std::string& config_path, const std::string& data_dir, const Overrides& ov,
                     RunConfig* out_cfg = nullptr) {
  if (!config_path.empty()) {
    auto cfg = load_run_config(config_path, ov);
    if (out_cfg) *out_cfg = cfg;
    return load_dataset(cfg.data);
  }
  if (!data_dir.empty()) return load_dataset_dir(data_dir);
  throw ConfigError("either --config or --data is required");
}

int cmd_train(const std::string& config_path, const std::string& out_dir, const std::string& resume_from,
              const Overrides& ov) {
  const auto started = utc_now();
  auto cfg = load_run_config(config_path, ov);
  auto dataset = load_dataset(cfg.data);
  const fs::path out = out_dir.empty() ? default_output_dir() : fs::path(out_dir);
  fs::create_directories(out);

  std::cerr << "train: " << dataset.train.size() << " triples, " << dataset.num_entities() << " entities, "
            << dataset.num_relations() << " relations; " << to_string(cfg.experiment.model.kind) << " dim "
            << cfg.experiment.dimension << ", subsampling " << to_string(cfg.experiment.loss.subsampling.kind)
            << "\n";

  TrainResult result = resume_from.empty() ? train(dataset, cfg.experiment)
                                           : resume(resume_from, dataset, cfg.experiment);
  save_checkpoint(out / "checkpoint", dataset, cfg.experiment, result.state);
  write_text(out / "train_log.jsonl", to_jsonl(result.log));
  auto manifest = run_manifest("train", cfg, started);
  if (!resume_from.empty()) manifest["resumed_from"] = resume_from;
  manifest["steps"] = result.state.step;
  if (result.state.best_valid_mrr) {
    manifest["best_valid_mrr"] = *result.state.best_valid_mrr;
    manifest["best_step"] = result.state.best_step;
  }
  write_text(out / "run_manifest.json", manifest.dump(2) + "\n");
  std::cout << "trained " << result.state.step << " steps";
  if (result.state.best_valid_mrr)
    std::cout << "; best valid MRR " << *result.state.best_valid_mrr << " at step " << result.state.best_step;
  std::cout << "\ncheckpoint: " << (out / "checkpoint").string() << "\n";
  return kOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& config_path, const std::string& data_dir,
             const std::string& split_name, const std::string& out_dir, int workers, const Overrides& ov) {
  const auto split = parse_split(split_name);
  auto dataset = dataset_from(config_path, data_dir, ov);
  const auto manifest = read_manifest(checkpoint);
  verify_vocab(manifest, dataset);
  const auto store = load_model(checkpoint, manifest);
  const auto report = evaluate(store, manifest.model, dataset, split, workers);

  const std::string model = std::string(to_string(manifest.model.kind));
  std::string sub = "-";
  if (manifest.config.contains("subsampling")) sub = manifest.config["subsampling"].value("kind", "-");
  std::vector<TableRow> rows{{model, sub, report.both}, {model, sub + " (head)", report.head},
                             {model, sub + " (tail)", report.tail}};
  const auto table = format_table(rows);
  json j = to_json(report);
  j["split"] = to_string(split);
  j["checkpoint"] = checkpoint;
  const fs::path out = out_dir.empty() ? default_output_dir() : fs::path(out_dir);
  write_text(out / "report.json", j.dump(2) + "\n");
  write_text(out / "report.txt", table);
  std::cout << table;
  return kOk;
}

int cmd_freq(const std::string& config_path, const std::string& data_dir, const std::string& out_path,
             const Overrides& ov) {
  auto dataset = dataset_from(config_path, data_dir, ov);
  const auto table = count_frequencies(dataset);
  std::ostringstream s;
  s << "kind\tentity\trelation\tcount\n";
  auto dump = [&](const FrequencyTable::Counts& counts, bool head_rel) {
    std::vector<std::pair<std::uint64_t, std::int64_t>> rows(counts.begin(), counts.end());
    std::sort(rows.begin(), rows.end());
    for (auto [key, count] : rows) {
      const auto a = static_cast<std::int32_t>(key >> 32), b = static_cast<std::int32_t>(key & 0xffffffffu);
      const auto e = head_rel ? a : b, r = head_rel ? b : a;
      s << (head_rel ? "head_rel" : "rel_tail") << '\t' << dataset.entities.name(e) << '\t'
        << dataset.relations.name(r) << '\t' << count << '\n';
    }
  };
  dump(table.head_rel_counts(), true);
  dump(table.rel_tail_counts(), false);
  if (out_path.empty()) std::cout << s.str();
  else write_text(out_path, s.str());
  return kOk;
}

int cmd_weights(const std::string& config_path, const std::string& data_dir, const std::string& scheme_name,
                double exponent, const std::string& out_path, const Overrides& ov) {
  RunConfig cfg;
  auto dataset = dataset_from(config_path, data_dir, ov, &cfg);
  SubsamplingScheme scheme = cfg.experiment.loss.subsampling;
  if (!scheme_name.empty()) scheme.kind = parse_scheme_kind(scheme_name);
  if (exponent > 0) scheme.exponent = exponent;
  const auto weights = compute_weights(scheme, dataset, count_frequencies(dataset));
  const auto examples = expand_examples(dataset.train);
  std::ostringstream s;
  s.precision(17);
  s << "example_id\tdirection\tA\tB\n";
  for (std::size_t i = 0; i < examples.size(); ++i)
    s << i << '\t' << to_string(examples[i].query.direction) << '\t' << weights.positive[i] << '\t'
      << weights.negative[i] << '\n';
  if (out_path.empty()) std::cout << s.str();
  else write_text(out_path, s.str());
  const auto sum = weight_summary(weights);
  std::cerr << "scheme " << to_string(scheme.kind) << ": A mean " << sum.positive.mean << " [" << sum.positive.min
            << ", " << sum.positive.max << "], B mean " << sum.negative.mean << " [" << sum.negative.min << ", "
            << sum.negative.max << "]\n";
  return kOk;
}

int cmd_theory(std::uint64_t seed, int nx, int ny, int trials, int nu, double gamma, const std::string& out_path) {
  if (nx < 1 || ny < 1 || nx > 32 || ny > 32) throw ConfigError("support sizes must lie in [1, 32]");
  Rng rng(seed);
  const auto dist = theory::random_distribution(rng, nx, ny);
  std::normal_distribution<double> normal(0.0, 2.0);
  theory::Table scores(nx, ny);
  for (Eigen::Index i = 0; i < scores.size(); ++i) scores.data()[i] = normal(rng);

  const auto recovery = theory::weight_recovery_check(dist, scores, gamma);
  const std::vector<std::int64_t> schedule{100, 1000, 10000, 100000};
  theory::ConvergenceOptions opt{trials, nu, derive_seed(seed, 1)};
  const auto outer = theory::convergence_report(dist, scores, gamma, recovery.weights, schedule, opt);
  const auto inner = theory::inner_convergence_report(dist, scores, gamma, 0, schedule, opt);

  std::ostringstream s;
  s.precision(10);
  s << "check\tn\tmean_abs_error\n";
  for (const auto& r : outer.rows) s << "outer\t" << r.n << '\t' << r.mean_abs_error << '\n';
  for (const auto& r : inner.rows) s << "inner\t" << r.n << '\t' << r.mean_abs_error << '\n';
  if (out_path.empty()) std::cout << s.str();
  else write_text(out_path, s.str());

  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  std::cout << verdict(recovery.passed()) << " weight recovery |diff| = " << recovery.abs_diff << "\n";
  std::cout << verdict(outer.passed()) << " outer Monte-Carlo slope = " << outer.slope.value_or(0.0) << "\n";
  std::cout << verdict(inner.passed()) << " inner Monte-Carlo slope = " << inner.slope.value_or(0.0) << "\n";
  return recovery.passed() && outer.passed() && inner.passed() ? kOk : kInternal;
}

int cmd_compare(const std::string& config_path, const std::string& schemes_csv, const std::string& split_name,
                const std::string& out_dir, const Overrides& ov) {
  const auto started = utc_now();
  auto cfg = load_run_config(config_path, ov);
  auto dataset = load_dataset(cfg.data);
  const auto split = parse_split(split_name);
  std::vector<SchemeKind> schemes;
  std::stringstream ss(schemes_csv);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) schemes.push_back(parse_scheme_kind(item));
  if (schemes.empty()) throw ConfigError("--schemes is empty");

  const fs::path out = out_dir.empty() ? default_output_dir() : fs::path(out_dir);
  const KnownAnswers known{dataset.train, dataset.valid, dataset.test};
  std::vector<TableRow> rows;
  json runs = json::array();
  for (auto kind : schemes) {
    auto exp = cfg.experiment;
    exp.loss.subsampling.kind = kind;
    std::cerr << "compare: training with subsampling " << to_string(kind) << "\n";
    auto result = train(dataset, exp);
    const auto report = evaluate(result.model, exp.model, dataset, split, known, exp.trainer.workers);
    const auto name = std::string(to_string(kind));
    save_checkpoint(out / name / "checkpoint", dataset, exp, result.state);
    write_text(out / name / "train_log.jsonl", to_jsonl(result.log));
    rows.push_back({std::string(to_string(exp.model.kind)), name, report.both});
    json run{{"scheme", name}, {"seed", exp.trainer.seed}, {"report", to_json(report)}};
    if (result.state.best_valid_mrr) run["best_valid_mrr"] = *result.state.best_valid_mrr;
    runs.push_back(run);
  }
  const auto table = format_table(rows);
  auto manifest = run_manifest("compare", cfg, started);
  manifest["split"] = to_string(split);
  manifest["runs"] = runs;
  write_text(out / "compare.json", manifest.dump(2) + "\n");
  write_text(out / "compare.txt", table);
  std::cout << table;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgsub: knowledge graph embeddings with subsampled negative sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config, out, resume_from, checkpoint, data, split = "test", scheme, schemes = "none,base,freq,uniq";
  int workers = 1;
  double exponent = 0.0;

  auto* train_cmd = app.add_subcommand("train", "train a model from a config file");
  train_cmd->add_option("-c,--config", config, "INI config file")->required();
  train_cmd->add_option("-o,--out", out, "output directory (default $KGSUB_OUTPUT_DIR or ./kgsub-out)");
  train_cmd->add_option("--resume", resume_from, "checkpoint directory to continue from");
  train_cmd->allow_extras();

  auto* eval_cmd = app.add_subcommand("eval", "filtered MRR / Hits@k of a checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint directory")->required();
  eval_cmd->add_option("-c,--config", config, "INI config naming the dataset");
  eval_cmd->add_option("--data", data, "dataset directory (train.txt, valid.txt, test.txt)");
  eval_cmd->add_option("--split", split, "valid or test")->capture_default_str();
  eval_cmd->add_option("-o,--out", out, "output directory");
  eval_cmd->add_option("--workers", workers, "evaluation threads")->capture_default_str();
  eval_cmd->allow_extras();

  std::string tsv_out;
  auto* freq_cmd = app.add_subcommand("freq", "dump #(e,r) and #(r,e) counts as TSV");
  freq_cmd->add_option("-c,--config", config, "INI config naming the dataset");
  freq_cmd->add_option("--data", data, "dataset directory");
  freq_cmd->add_option("-o,--out", tsv_out, "output file (default stdout)");
  freq_cmd->allow_extras();

  auto* weights_cmd = app.add_subcommand("weights", "dump per-example subsampling weights as TSV");
  weights_cmd->add_option("-c,--config", config, "INI config naming the dataset");
  weights_cmd->add_option("--data", data, "dataset directory");
  weights_cmd->add_option("--scheme", scheme, "none, base, freq or uniq (overrides the config)");
  weights_cmd->add_option("--exponent", exponent, "count exponent (overrides the config)");
  weights_cmd->add_option("-o,--out", tsv_out, "output file (default stdout)");
  weights_cmd->allow_extras();

  std::uint64_t seed = 7;
  int nx = 8, ny = 8, trials = 40, nu = 4;
  double gamma = 1.0;
  auto* theory_cmd = app.add_subcommand("theory-check", "Monte-Carlo and weight-substitution checks");
  theory_cmd->add_option("--seed", seed)->capture_default_str();
  theory_cmd->add_option("--nx", nx, "|X|")->capture_default_str();
  theory_cmd->add_option("--ny", ny, "|Y|")->capture_default_str();
  theory_cmd->add_option("--trials", trials)->capture_default_str();
  theory_cmd->add_option("--nu", nu)->capture_default_str();
  theory_cmd->add_option("--gamma", gamma)->capture_default_str();
  theory_cmd->add_option("-o,--out", tsv_out, "TSV output file (default stdout)");

  auto* compare_cmd = app.add_subcommand("compare", "train and evaluate once per subsampling scheme");
  compare_cmd->add_option("-c,--config", config, "INI config file")->required();
  compare_cmd->add_option("--schemes", schemes, "comma-separated schemes")->capture_default_str();
  compare_cmd->add_option("--split", split, "valid or test")->capture_default_str();
  compare_cmd->add_option("-o,--out", out, "output directory");
  compare_cmd->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  auto* active = app.get_subcommands().front();
  try {
    const auto ov = parse_overrides(active->remaining());
    if (active == train_cmd) return cmd_train(config, out, resume_from, ov);
    if (active == eval_cmd) return cmd_eval(checkpoint, config, data, split, out, workers, ov);
    if (active == freq_cmd) return cmd_freq(config, data, tsv_out, ov);
    if (active == weights_cmd) return cmd_weights(config, data, scheme, exponent, tsv_out, ov);
    if (active == theory_cmd) return cmd_theory(seed, nx, ny, trials, nu, gamma, tsv_out);
    if (active == compare_cmd) return cmd_compare(config, schemes, split, out, ov);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kUsage;
  } catch (const ArtifactMismatch& e) {
    std::cerr << "artifact mismatch: " << e.what() << "\n";
    return kMismatch;
  } catch (const TrainingAborted& e) {
    std::cerr << "training aborted: " << e.what() << "\n";
    return kInternal;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
