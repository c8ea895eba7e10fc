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
#include "kgsub/subsampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kgsub {

SchemeKind parse_scheme_kind(std::string_view s) {
  if (s == "none" || s == "None") return SchemeKind::None;
  if (s == "base" || s == "Base") return SchemeKind::Base;
  if (s == "freq" || s == "Freq") return SchemeKind::Freq;
  if (s == "uniq" || s == "Uniq") return SchemeKind::Uniq;
  throw std::invalid_argument("unknown subsampling kind '" + std::string(s) +
                              "' (expected none, base, freq or uniq)");
}

std::string_view to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::None: return "None";
    case SchemeKind::Base: return "Base";
    case SchemeKind::Freq: return "Freq";
    case SchemeKind::Uniq: return "Uniq";
  }
  return "?";
}

std::vector<double> normalized_inverse_power(std::span<const std::int64_t> counts, double exponent) {
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    w[i] = std::pow(static_cast<double>(counts[i]), -exponent);
  // |D| / sum: mean becomes 1.
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  double scale = static_cast<double>(w.size()) / total;
  for (auto& v : w) v *= scale;
  return w;
}

SubsamplingWeights compute_weights(const SubsamplingScheme& scheme, const Dataset& dataset,
                                   const FrequencyTable& table) {
  if (dataset.train.empty()) throw std::invalid_argument("cannot compute weights for an empty dataset");
  if (!(scheme.exponent > 0.0 && scheme.exponent <= 1.0))
    throw std::invalid_argument("subsampling exponent must lie in (0, 1]");

  auto examples = expand_examples(dataset.train);
  const std::size_t n = examples.size();
  SubsamplingWeights out;

  if (scheme.kind == SchemeKind::None) {
    out.positive.assign(n, 1.0);
    out.negative.assign(n, 1.0);
    return out;
  }

  std::vector<std::int64_t> pair_counts(n), query_counts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pair_counts[i] = triple_freq(table, dataset.train[examples[i].triple_index]);
    query_counts[i] = query_freq(table, examples[i].query);
  }

  switch (scheme.kind) {
    case SchemeKind::Base:
      out.positive = normalized_inverse_power(pair_counts, scheme.exponent);
      out.negative = out.positive;
      break;
    case SchemeKind::Freq:
      out.positive = normalized_inverse_power(pair_counts, scheme.exponent);
      out.negative = normalized_inverse_power(query_counts, scheme.exponent);
      break;
    case SchemeKind::Uniq:
      out.positive = normalized_inverse_power(query_counts, scheme.exponent);
      out.negative = out.positive;
      break;
    case SchemeKind::None:
      break;
  }
  return out;
}

WeightStats describe(std::span<const double> values) {
  WeightStats s;
  if (values.empty()) return s;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  return s;
}

WeightSummary weight_summary(const SubsamplingWeights& weights) {
  return {describe(weights.positive), describe(weights.negative)};
}

}  // namespace kgsub
