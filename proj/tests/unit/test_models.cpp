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

#include <complex>
#include <numbers>

#include "fd_oracle.hpp"
#include "kgsub/models.hpp"
#include "support.hpp"

using namespace kgsub;
using cd = std::complex<double>;

namespace {

constexpr ModelKind kKinds[] = {ModelKind::TransE, ModelKind::DistMult, ModelKind::ComplEx, ModelKind::RotatE};

std::vector<cd> as_complex(const RowVector<double>& v) {
  const auto k = v.size() / 2;
  std::vector<cd> out;
  for (Eigen::Index j = 0; j < k; ++j) out.emplace_back(v[j], v[j + k]);
  return out;
}

// Naive complex-arithmetic versions of the two complex models.
double complex_oracle(const RowVector<double>& h, const RowVector<double>& r, const RowVector<double>& t) {
  auto H = as_complex(h), R = as_complex(r), T = as_complex(t);
  cd s = 0;
  for (std::size_t j = 0; j < H.size(); ++j) s += H[j] * R[j] * std::conj(T[j]);
  return s.real();
}

double rotate_oracle(const RowVector<double>& h, const RowVector<double>& phases, const RowVector<double>& t) {
  auto H = as_complex(h), T = as_complex(t);
  double s = 0;
  for (std::size_t j = 0; j < H.size(); ++j) s -= std::abs(H[j] * std::polar(1.0, phases[static_cast<Eigen::Index>(j)]) - T[j]);
  return s;
}

}  // namespace

TEST_CASE("init_model is deterministic and validates dimensions") {
  ModelSpec spec{ModelKind::ComplEx};
  auto a = init_model<double>(spec, 10, 3, 8, 42, 0.5);
  auto b = init_model<double>(spec, 10, 3, 8, 42, 0.5);
  CHECK(a == b);
  CHECK(a.entities.cwiseAbs().maxCoeff() <= 0.5);
  CHECK_FALSE(a == init_model<double>(spec, 10, 3, 8, 43, 0.5));
  CHECK_THROWS_AS(init_model<double>(spec, 10, 3, 0, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(init_model<double>({ModelKind::RotatE}, 10, 3, 7, 1, 0.5), std::invalid_argument);
  auto rot = init_model<double>({ModelKind::RotatE}, 4, 2, 6, 1, 0.5);
  CHECK(rot.relations.cols() == 3);
  CHECK(rot.relations.cwiseAbs().maxCoeff() <= std::numbers::pi);
  CHECK(default_init_range(6.0, 8) == doctest::Approx(1.0));
}

TEST_CASE("score examples") {
  EmbeddingStore<double> s{RowMatrix<double>::Zero(2, 4), RowMatrix<double>::Zero(1, 4)};
  CHECK(score(s, {ModelKind::TransE, 1}, {0, 0, 1}) == 0.0);
  CHECK(score(s, {ModelKind::TransE, 2}, {0, 0, 1}) == 0.0);

  s.entities(0, 0) = 1;
  s.entities(1, 0) = 1;
  s.relations(0, 0) = 1;
  CHECK(score(s, {ModelKind::DistMult}, {0, 0, 1}) == 1.0);
}

TEST_CASE("ComplEx with identity rotation and t = h scores |h|^2") {
  auto s = testing::random_store({ModelKind::ComplEx}, 3, 1, 10, 5);
  s.relations.row(0).setZero();
  s.relations.row(0).head(5).setOnes();
  const double expect = s.entities.row(1).squaredNorm();
  CHECK(score(s, {ModelKind::ComplEx}, {1, 0, 1}) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(complex_oracle(s.entities.row(1), s.relations.row(0), s.entities.row(1)) ==
        doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("complex models agree with naive complex arithmetic") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto c = testing::random_store({ModelKind::ComplEx}, 4, 2, 12, seed);
    auto r = testing::random_store({ModelKind::RotatE}, 4, 2, 12, seed);
    Triple t{static_cast<EntityId>(seed % 4), static_cast<RelationId>(seed % 2), static_cast<EntityId>((seed + 1) % 4)};
    CHECK(score(c, {ModelKind::ComplEx}, t) ==
          doctest::Approx(complex_oracle(c.entities.row(t.head), c.relations.row(t.relation), c.entities.row(t.tail)))
              .epsilon(1e-12));
    CHECK(score(r, {ModelKind::RotatE}, t) ==
          doctest::Approx(rotate_oracle(r.entities.row(t.head), r.relations.row(t.relation), r.entities.row(t.tail)))
              .epsilon(1e-12));
  }
}

TEST_CASE("RotatE rotations are unit modulus whatever the raw phase") {
  auto s = testing::random_store({ModelKind::RotatE}, 3, 1, 8, 9);
  const Triple t{0, 0, 1};
  const double before = score(s, {ModelKind::RotatE}, t);
  s.relations.array() += 2 * std::numbers::pi;
  CHECK(score(s, {ModelKind::RotatE}, t) == doctest::Approx(before).epsilon(1e-12));
  // rotating h leaves its modulus: h rotated onto t gives score 0
  s.relations(0, 0) = 0.3;
  s.entities.row(1) = s.entities.row(0);
  const double c = std::cos(0.3), sn = std::sin(0.3);
  s.entities(1, 0) = s.entities(0, 0) * c - s.entities(0, 4) * sn;
  s.entities(1, 4) = s.entities(0, 0) * sn + s.entities(0, 4) * c;
  s.relations.row(0).tail(3).setZero();
  CHECK(score(s, {ModelKind::RotatE}, t) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("DistMult head gradient is r * t") {
  auto s = testing::random_store({ModelKind::DistMult}, 3, 1, 6, 2);
  auto g = score_gradient(s, {ModelKind::DistMult}, {0, 0, 2});
  RowVector<double> expect = s.relations.row(0).cwiseProduct(s.entities.row(2));
  CHECK((g.head - expect).norm() == 0.0);
}

TEST_CASE("TransE gradients at the minimum and on kinks") {
  EmbeddingStore<double> s{RowMatrix<double>::Zero(2, 3), RowMatrix<double>::Zero(1, 3)};
  s.entities.row(0) << 1, 2, 3;
  s.relations.row(0) << 0.5, -1, 0;
  s.entities.row(1) = s.entities.row(0) + s.relations.row(0);
  auto g2 = score_gradient(s, {ModelKind::TransE, 2}, {0, 0, 1});
  CHECK(g2.head.norm() == 0.0);
  CHECK(g2.tail.norm() == 0.0);
  auto g1 = score_gradient(s, {ModelKind::TransE, 1}, {0, 0, 1});
  CHECK(g1.head.norm() == 0.0);
  s.entities(1, 0) += 1.0;  // only coordinate 0 off the kink
  g1 = score_gradient(s, {ModelKind::TransE, 1}, {0, 0, 1});
  CHECK(g1.head[0] == 1.0);
  CHECK(g1.head[1] == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  for (auto kind : kKinds) {
    for (int norm : {1, 2}) {
      if (kind != ModelKind::TransE && norm == 2) continue;
      const ModelSpec spec{kind, norm};
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto s = testing::random_store(spec, 5, 3, 8, 1000 + seed);
        Triple t{static_cast<EntityId>(seed % 5), static_cast<RelationId>(seed % 3), static_cast<EntityId>((seed * 7 + 1) % 5)};
        if (t.head == t.tail) t.tail = (t.tail + 1) % 5;
        auto g = score_gradient(s, spec, t);
        auto f = [&](const EmbeddingStore<double>& st) { return score(st, spec, t); };
        CHECK(testing::relative_error(g.head, testing::fd_row(s, true, t.head, f)) <= 1e-4);
        CHECK(testing::relative_error(g.relation, testing::fd_row(s, false, t.relation, f)) <= 1e-4);
        CHECK(testing::relative_error(g.tail, testing::fd_row(s, true, t.tail, f)) <= 1e-4);
      }
    }
  }
}

TEST_CASE("score_all_candidates matches the scalar path") {
  for (auto kind : kKinds) {
    for (int norm : {1, 2}) {
      const ModelSpec spec{kind, norm};
      auto s = testing::random_store(spec, 17, 3, 10, 77);
      for (auto dir : {Direction::TailQuery, Direction::HeadQuery}) {
        QueryPart q{dir, 4, 2};
        auto all = score_all_candidates(s, spec, q);
        REQUIRE(all.size() == 17);
        Eigen::Index best_vec = 0, best_scalar = 0;
        double best = -1e300;
        for (EntityId c = 0; c < 17; ++c) {
          const double v = score(s, spec, complete(q, c));
          CHECK(std::abs(all[c] - v) <= 1e-9);
          if (v > best) best = v, best_scalar = c;
        }
        all.maxCoeff(&best_vec);
        CHECK(best_vec == best_scalar);
      }
    }
  }
}

TEST_CASE("score_all_candidates edge cases") {
  auto one = testing::random_store({ModelKind::DistMult}, 1, 1, 4, 3);
  auto v = score_all_candidates(one, {ModelKind::DistMult}, {Direction::TailQuery, 0, 0});
  REQUIRE(v.size() == 1);
  CHECK(v[0] == doctest::Approx(score(one, {ModelKind::DistMult}, {0, 0, 0})));

  EmbeddingStore<double> zero{RowMatrix<double>::Zero(6, 4), RowMatrix<double>::Zero(1, 4)};
  auto z = score_all_candidates(zero, {ModelKind::TransE, 1}, {Direction::HeadQuery, 2, 0});
  CHECK((z.array() == z[0]).all());
}

TEST_CASE("score is generic over the scalar type") {
  auto s = testing::random_store({ModelKind::ComplEx}, 3, 1, 8, 4);
  EmbeddingStore<float> f{s.entities.cast<float>(), s.relations.cast<float>()};
  EmbeddingStore<long double> l{s.entities.cast<long double>(), s.relations.cast<long double>()};
  const Triple t{0, 0, 2};
  const double ref = score(s, {ModelKind::ComplEx}, t);
  CHECK(static_cast<double>(score(f, {ModelKind::ComplEx}, t)) == doctest::Approx(ref).epsilon(1e-5));
  CHECK(static_cast<double>(score(l, {ModelKind::ComplEx}, t)) == doctest::Approx(ref).epsilon(1e-14));
}
