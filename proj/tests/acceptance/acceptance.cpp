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
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//   acceptance [--only P1,P5] [--exclude P8]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

#include "fd_oracle.hpp"
#include "kgsub/config.hpp"
#include "kgsub/eval.hpp"
#include "kgsub/loss.hpp"
#include "kgsub/subsampling.hpp"
#include "kgsub/theory.hpp"
#include "kgsub/trainer.hpp"
#include "support.hpp"

using namespace kgsub;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome gradients() {
  double worst = 0;
  int checked = 0;
  for (auto kind : {ModelKind::TransE, ModelKind::DistMult, ModelKind::ComplEx, ModelKind::RotatE}) {
    for (int i = 0; i < 100; ++i) {
      // TransE alternates L1 / L2
      const ModelSpec spec{kind, kind == ModelKind::TransE ? 1 + i % 2 : 1};
      auto s = testing::random_store(spec, 6, 3, 16, 9000 + 100 * static_cast<int>(kind) + i);
      const Triple t{i % 6, i % 3, (i + 1 + i / 6) % 6 == i % 6 ? (i + 2) % 6 : (i + 1 + i / 6) % 6};
      const auto g = score_gradient(s, spec, t);
      auto f = [&](const EmbeddingStore<double>& st) { return score(st, spec, t); };
      worst = std::max({worst, testing::relative_error(g.head, testing::fd_row(s, true, t.head, f)),
                        testing::relative_error(g.relation, testing::fd_row(s, false, t.relation, f)),
                        testing::relative_error(g.tail, testing::fd_row(s, true, t.tail, f))});
      ++checked;
    }
  }
  return {worst <= 1e-4, std::to_string(checked) + " instances, max rel err " + fmt("%.3g", worst) + " (tol 1e-4)"};
}

Outcome normalization() {
  double worst = 0;
  bool identical = true;
  for (int k = 0; k < 50; ++k) {
    auto ds = testing::random_dataset(500 + k, 20 + k, 1 + k % 6, 40 + 7 * k);
    const auto table = count_frequencies(ds);
    for (auto kind : {SchemeKind::None, SchemeKind::Base, SchemeKind::Freq, SchemeKind::Uniq}) {
      const auto w = compute_weights({kind, 0.25 + 0.25 * (k % 4)}, ds, table);
      const auto n = static_cast<double>(w.positive.size());
      const double ma = std::accumulate(w.positive.begin(), w.positive.end(), 0.0) / n;
      const double mb = std::accumulate(w.negative.begin(), w.negative.end(), 0.0) / n;
      worst = std::max({worst, std::abs(ma - 1), std::abs(mb - 1)});
      if (kind == SchemeKind::Base || kind == SchemeKind::Uniq) identical = identical && w.positive == w.negative;
    }
  }
  return {worst <= 1e-9 && identical, "max |mean - 1| " + fmt("%.3g", worst) +
                                          (identical ? ", A == B for base/uniq" : ", A != B for base/uniq")};
}

Outcome collapse() {
  auto ds = testing::random_dataset(77, 50, 5, 400);
  const auto examples = expand_examples(ds.train);
  const auto weights = compute_weights({SchemeKind::None}, ds, count_frequencies(ds));
  const KnownAnswers known{std::span<const Triple>(ds.train)};
  double worst = 0;
  int batches = 0;
  for (auto kind : {ModelKind::TransE, ModelKind::DistMult, ModelKind::ComplEx, ModelKind::RotatE}) {
    const ModelSpec spec{kind};
    auto store = testing::random_store(spec, 50, 5, 16, 3);
    for (int workers : {1, 3}) {
      BatchContext ctx{examples, &weights, &known, ds.num_entities(), workers};
      for (double alpha : {0.0, 1.0}) {
        const LossConfig cfg{2.0, {SchemeKind::None}, {8, alpha}};
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          std::vector<std::size_t> batch(64);
          std::iota(batch.begin(), batch.end(), seed * 64);
          const double a = batch_loss(store, spec, batch, ctx, cfg, seed).loss;
          const double b = unweighted_batch_loss(store, spec, batch, ctx, cfg, seed);
          worst = std::max(worst, std::abs(a - b));
          ++batches;
        }
      }
    }
  }
  return {worst == 0.0, std::to_string(batches) + " batches, max |diff| " + fmt("%.17g", worst)};
}

Outcome recovery() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(404, seed));
    auto d = theory::random_distribution(rng, 2 + seed % 6, 2 + seed % 9);
    std::normal_distribution<double> n(0.0, 2.0);
    theory::Table s(d.size_x(), d.size_y());
    for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = n(rng);
    worst = std::max(worst, theory::weight_recovery_check(d, s, 1.0).abs_diff);
  }
  return {worst <= 1e-12, "100 distributions, max |diff| " + fmt("%.3g", worst) + " (tol 1e-12)"};
}

Outcome convergence() {
  Rng rng(2718);
  auto d = theory::random_distribution(rng, 8, 8);
  theory::Table s(8, 8);
  std::normal_distribution<double> n(0.0, 2.0);
  for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = n(rng);
  const std::vector<std::int64_t> schedule{100, 1000, 10000, 100000};
  const auto outer = theory::convergence_report(d, s, 1.0, theory::unit_weights(8, 8), schedule, {40, 4, 11});
  const auto inner = theory::inner_convergence_report(d, s, 1.0, 3, schedule, {40, 1, 12});
  auto show = [](const theory::ConvergenceReport& r) { return r.slope ? fmt("%.3f", *r.slope) : std::string("n/a"); };
  return {outer.passed() && inner.passed(),
          "slope outer " + show(outer) + ", inner " + show(inner) + " (want [-0.65, -0.35])"};
}

Outcome ranking() {
  const auto s = stats_from_ranks(std::vector<double>{1, 2, 4});
  bool ok = std::abs(s.mrr - 0.58333333333333333) <= 1e-12 && s.hits_at(1) == 1.0 / 3 &&
            s.hits_at(3) == 2.0 / 3 && s.hits_at(10) == 1.0;

  constexpr int kCandidates = 100, kQueries = 10000;
  double h = 0, h2 = 0;
  for (int k = 1; k <= kCandidates; ++k) h += 1.0 / k, h2 += 1.0 / (double(k) * k);
  const double mean = h / kCandidates;
  const double sigma = std::sqrt((h2 / kCandidates - mean * mean) / kQueries);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u;
  std::vector<double> scores(kCandidates), ranks;
  for (int q = 0; q < kQueries; ++q) {
    for (auto& v : scores) v = u(rng);
    ranks.push_back(rank_from_scores(scores, q % kCandidates, {}));
  }
  const double mrr = stats_from_ranks(ranks).mrr;
  ok = ok && std::abs(mrr - mean) <= 3 * sigma;
  return {ok, "MRR{1,2,4} " + fmt("%.14f", s.mrr) + ", random MRR " + fmt("%.5f", mrr) + " vs " +
                  fmt("%.5f", mean) + " +/- " + fmt("%.5f", 3 * sigma)};
}

Outcome frequency() {
  auto ds = testing::from_names({{"e1", "r1", "e2"}, {"e1", "r1", "e3"}, {"e2", "r1", "e3"}});
  const auto table = count_frequencies(ds);
  const auto f = triple_freq(table, ds.train[0]);
  return {f == 3, "triple_freq((e1,r1,e2)) = " + std::to_string(f)};
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("kgsub_accept_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::optional<fs::path> wn18rr_dir() {
  if (const char* env = std::getenv("KGSUB_WN18RR_DIR"); env && *env) return fs::path(env);
  const fs::path bundled = fs::path(KGSUB_TEST_DATA) / "wn18rr";
  if (fs::exists(bundled / "train.txt")) return bundled;
  return std::nullopt;
}

Outcome directional() {
  const auto dir = wn18rr_dir();
  if (!dir || !fs::exists(*dir / "train.txt"))
    return {false, "WN18RR not found (set KGSUB_WN18RR_DIR or add tests/data/wn18rr); experiment not run"};

  auto run = load_run_config(fs::path(KGSUB_SOURCE_DIR) / "configs/wn18rr_complex.ini");
  run.data.dir = *dir;
  run.data.train = *dir / "train.txt";
  run.data.valid = *dir / "valid.txt";
  run.data.test = *dir / "test.txt";
  const auto ds = load_dataset(run.data);
  const KnownAnswers known{ds.train, ds.valid, ds.test};

  const std::uint64_t seeds[] = {1, 2, 3};
  const SchemeKind schemes[] = {SchemeKind::None, SchemeKind::Base, SchemeKind::Freq, SchemeKind::Uniq};
  std::map<SchemeKind, std::vector<double>> mrr;
  double slowest = 0;
  for (auto seed : seeds) {
    for (auto kind : schemes) {
      auto cfg = run.experiment;
      cfg.loss.subsampling.kind = kind;
      cfg.trainer.seed = seed;
      const auto t0 = std::chrono::steady_clock::now();
      const auto result = train(ds, cfg);
      const double value = result.state.best_valid_mrr
                               ? *result.state.best_valid_mrr
                               : evaluate(result.model, cfg.model, ds, Split::Valid, known, cfg.trainer.workers).both.mrr;
      slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      mrr[kind].push_back(value);
      std::printf("  P8 seed %llu %-4s valid MRR %.4f\n", static_cast<unsigned long long>(seed),
                  std::string(to_string(kind)).c_str(), value);
      std::fflush(stdout);
    }
  }
  bool ok = slowest <= 3600.0;
  std::string detail;
  for (auto kind : {SchemeKind::Base, SchemeKind::Freq, SchemeKind::Uniq}) {
    int wins = 0;
    for (std::size_t i = 0; i < std::size(seeds); ++i) wins += mrr[kind][i] > mrr[SchemeKind::None][i];
    ok = ok && wins >= 2;
    detail += std::string(to_string(kind)) + " beats none on " + std::to_string(wins) + "/3 seeds; ";
  }
  return {ok, detail + "slowest run " + fmt("%.0f", slowest) + " s (budget 3600 s)"};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return files;
}

Outcome determinism() {
  const auto run = load_run_config(fs::path(KGSUB_SOURCE_DIR) / "configs/toy.ini");
  const auto ds = load_dataset(run.data);
  std::vector<std::map<std::string, std::string>> outputs;
  for (int rep = 0; rep < 2; ++rep) {
    const auto dir = scratch("det" + std::to_string(rep));
    const auto result = train(ds, run.experiment);
    save_checkpoint(dir / "checkpoint", ds, run.experiment, result.state);
    std::ofstream(dir / "train_log.jsonl", std::ios::binary) << to_jsonl(result.log);
    outputs.push_back(read_tree(dir));
    fs::remove_all(dir);
  }
  return {outputs[0] == outputs[1] && !outputs[0].empty(),
          std::to_string(outputs[0].size()) + " files compared, " +
              (outputs[0] == outputs[1] ? "byte-identical" : "differ")};
}

std::set<std::string> split_list(const std::string& s) {
  std::set<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.insert(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only, exclude;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if ((a == "--only" || a == "--exclude") && i + 1 < argc) (a == "--only" ? only : exclude) = split_list(argv[++i]);
    else {
      std::fprintf(stderr, "usage: acceptance [--only P1,P2] [--exclude P8]\n");
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"P1", gradients},   {"P2", normalization}, {"P3", collapse},    {"P4", recovery},    {"P5", convergence},
      {"P6", ranking},     {"P7", frequency},     {"P8", directional}, {"P9", determinism}};

  int failed = 0;
  for (const auto& [id, check] : criteria) {
    if ((!only.empty() && !only.count(id)) || exclude.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s  %s [%.1fs]\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
