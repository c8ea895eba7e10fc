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
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "kgsub/sampler.hpp"

using namespace kgsub;

TEST_CASE("two entities with filtering always yields the other one") {
  KnownAnswers known;
  known.add({0, 0, 1});
  Rng rng(3);
  const QueryPart q{Direction::TailQuery, 0, 0};
  for (int rep = 0; rep < 50; ++rep) {
    auto b = draw_negatives(rng, {8, 0.0, true}, q, 2, known);
    REQUIRE(b.candidates.size() == 8);
    for (auto c : b.candidates) CHECK(c == 0);
  }
}

TEST_CASE("draws are reproducible from the seed") {
  KnownAnswers known;
  const QueryPart q{Direction::HeadQuery, 4, 1};
  Rng a(11), b(11), c(12);
  auto x = draw_negatives(a, {64}, q, 1000, known);
  auto y = draw_negatives(b, {64}, q, 1000, known);
  auto z = draw_negatives(c, {64}, q, 1000, known);
  CHECK(x.candidates == y.candidates);
  CHECK(x.candidates != z.candidates);
}

TEST_CASE("unfiltered draws are uniform over entities") {
  constexpr int kEntities = 10;
  constexpr int kDraws = 1'000'000;
  KnownAnswers known;
  Rng rng(2024);
  std::vector<long> hist(kEntities, 0);
  const QueryPart q{Direction::TailQuery, 0, 0};
  for (int i = 0; i < kDraws / 100; ++i)
    for (auto c : draw_negatives(rng, {100}, q, kEntities, known).candidates) ++hist[static_cast<std::size_t>(c)];

  const double expect = static_cast<double>(kDraws) / kEntities;
  const double sigma = std::sqrt(kDraws * (1.0 / kEntities) * (1 - 1.0 / kEntities));
  double chi2 = 0;
  for (long h : hist) {
    CHECK(std::abs(static_cast<double>(h) - expect) <= 3 * sigma);
    chi2 += (h - expect) * (h - expect) / expect;
  }
  // 9 degrees of freedom: P(chi2 > 27.88) = 0.001
  CHECK(chi2 < 27.88);
}

TEST_CASE("filtered draws never return known answers") {
  KnownAnswers known;
  for (EntityId t : {1, 3, 5, 7}) known.add({2, 0, t});
  Rng rng(5);
  const QueryPart q{Direction::TailQuery, 2, 0};
  for (int rep = 0; rep < 200; ++rep)
    for (auto c : draw_negatives(rng, {16, 0.0, true}, q, 9, known).candidates) CHECK(c % 2 == 0);
}

TEST_CASE("invalid draws") {
  KnownAnswers known;
  Rng rng(0);
  const QueryPart q{Direction::TailQuery, 0, 0};
  CHECK_THROWS_AS(draw_negatives(rng, {0}, q, 5, known), std::invalid_argument);
  CHECK_THROWS_AS(draw_negatives(rng, {1}, q, 1, known), std::invalid_argument);
  known.add({0, 0, 0});
  known.add({0, 0, 1});
  CHECK_THROWS_AS(draw_negatives(rng, {1, 0.0, true}, q, 2, known), std::runtime_error);
}

TEST_CASE("sans weights") {
  const std::vector<double> flat{0.3, -1.0, 2.0, 5.0};
  for (double w : sans_weights(flat, 0.0)) CHECK(w == 0.25);

  std::vector<double> spike(8, 0.0);
  spike[3] = 100.0;
  auto w = sans_weights(spike, 1.0);
  CHECK(w[3] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w[0] < 1e-40);

  CHECK(sans_weights(std::vector<double>{-7.0}, 2.0)[0] == 1.0);

  // shift invariance and naive softmax agreement
  std::vector<double> s{0.1, -0.4, 1.3, 0.7, -2.2}, shifted = s;
  for (auto& v : shifted) v += 500.0;
  auto a = sans_weights(s, 0.8), b = sans_weights(shifted, 0.8);
  double z = 0;
  for (double v : s) z += std::exp(0.8 * v);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= 1e-12);
    CHECK(std::abs(a[i] - std::exp(0.8 * s[i]) / z) <= 1e-12);
  }
  CHECK(std::accumulate(a.begin(), a.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));

  // huge scores must not overflow
  auto big = sans_weights(std::vector<double>{1e4, 1e4}, 1.0);
  CHECK(big[0] == 0.5);
  CHECK(sans_weights(std::vector<double>{}, 1.0).empty());
}
