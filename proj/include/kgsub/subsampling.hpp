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

#include <span>
#include <string_view>
#include <vector>

#include "kgsub/data.hpp"

namespace kgsub {

enum class SchemeKind { None, Base, Freq, Uniq };

SchemeKind parse_scheme_kind(std::string_view s);
std::string_view to_string(SchemeKind k);

struct SubsamplingScheme {
  SchemeKind kind = SchemeKind::None;
  // Generalizes the square root: raw weight is count^-exponent. Must lie in (0, 1].
  double exponent = 0.5;
};

// Per-example weights, indexed like expand_examples(dataset.train).
//   positive[i] multiplies the positive term of example i (A)
//   negative[i] multiplies its negative term (B)
// Both have mean exactly 1 (up to rounding) over all examples.
struct SubsamplingWeights {
  std::vector<double> positive;
  std::vector<double> negative;

  std::size_t size() const { return positive.size(); }
};

// None: A = B = 1.
// Base: A = B from #(x,y) (word2vec style, B depends on y).
// Freq: A from #(x,y), B from #x, each normalized over the example multiset.
// Uniq: A = B from #x.
SubsamplingWeights compute_weights(const SubsamplingScheme& scheme, const Dataset& dataset,
                                   const FrequencyTable& table);

// Normalizes count^-exponent so the values average to 1 over the list.
std::vector<double> normalized_inverse_power(std::span<const std::int64_t> counts, double exponent);

struct WeightStats {
  double min = 0, max = 0, mean = 0, stddev = 0;
};

struct WeightSummary {
  WeightStats positive;
  WeightStats negative;
};

WeightStats describe(std::span<const double> values);
WeightSummary weight_summary(const SubsamplingWeights& weights);

}  // namespace kgsub
