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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string_view>

#include <Eigen/Core>

#include "kgsub/data.hpp"

namespace kgsub {

enum class ModelKind { TransE, DistMult, ComplEx, RotatE };

ModelKind parse_model_kind(std::string_view s);
std::string_view to_string(ModelKind k);

struct ModelSpec {
  ModelKind kind = ModelKind::TransE;
  int transe_norm = 1;  // 1 or 2
};

inline bool is_complex(ModelKind k) { return k == ModelKind::ComplEx || k == ModelKind::RotatE; }

// Width of a relation row given the entity row width. RotatE keeps one phase
// per complex coordinate.
inline int relation_width(ModelKind k, int dimension) {
  return k == ModelKind::RotatE ? dimension / 2 : dimension;
}

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Complex-valued rows are stored as [real parts | imaginary parts].
template <typename Scalar = double>
struct EmbeddingStore {
  RowMatrix<Scalar> entities;
  RowMatrix<Scalar> relations;

  int dimension() const { return static_cast<int>(entities.cols()); }
  std::size_t num_entities() const { return static_cast<std::size_t>(entities.rows()); }
  std::size_t num_relations() const { return static_cast<std::size_t>(relations.rows()); }

  bool operator==(const EmbeddingStore& o) const {
    return entities.rows() == o.entities.rows() && entities.cols() == o.entities.cols() &&
           relations.rows() == o.relations.rows() && relations.cols() == o.relations.cols() &&
           entities == o.entities && relations == o.relations;
  }
};

// Uniform half-width (gamma + 2) / dimension.
inline double default_init_range(double gamma, int dimension) {
  return (gamma + 2.0) / static_cast<double>(dimension);
}

inline void validate_dimension(ModelKind kind, int dimension) {
  if (dimension <= 0) throw std::invalid_argument("embedding dimension must be positive");
  if (is_complex(kind) && dimension % 2 != 0)
    throw std::invalid_argument(std::string(to_string(kind)) + " needs an even dimension, got " +
                                std::to_string(dimension));
}

// Entities (and non-RotatE relations) are uniform in +-init_range; RotatE
// phases are uniform in [-pi, pi].
template <typename Scalar = double>
EmbeddingStore<Scalar> init_model(const ModelSpec& spec, std::size_t num_entities,
                                  std::size_t num_relations, int dimension, std::uint64_t seed,
                                  double init_range) {
  validate_dimension(spec.kind, dimension);
  if (!(init_range > 0.0)) throw std::invalid_argument("init range must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ent(-init_range, init_range);
  EmbeddingStore<Scalar> store;
  store.entities.resize(static_cast<Eigen::Index>(num_entities), dimension);
  store.relations.resize(static_cast<Eigen::Index>(num_relations), relation_width(spec.kind, dimension));
  for (Eigen::Index i = 0; i < store.entities.size(); ++i) store.entities.data()[i] = Scalar(ent(rng));
  if (spec.kind == ModelKind::RotatE) {
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    for (Eigen::Index i = 0; i < store.relations.size(); ++i) store.relations.data()[i] = Scalar(phase(rng));
  } else {
    for (Eigen::Index i = 0; i < store.relations.size(); ++i) store.relations.data()[i] = Scalar(ent(rng));
  }
  return store;
}

template <typename Scalar = double>
struct ScoreGradient {
  RowVector<Scalar> head;
  RowVector<Scalar> relation;
  RowVector<Scalar> tail;
};

namespace detail {

template <typename Scalar>
using ConstRow = Eigen::Ref<const RowVector<Scalar>>;

template <typename Scalar>
Scalar sign(Scalar v) {
  return Scalar((v > Scalar(0)) - (v < Scalar(0)));
}

template <typename Scalar>
Scalar score_rows(const ModelSpec& spec, ConstRow<Scalar> h, ConstRow<Scalar> r, ConstRow<Scalar> t) {
  using std::sqrt;
  const Eigen::Index d = h.size();
  switch (spec.kind) {
    case ModelKind::TransE: {
      RowVector<Scalar> v = h + r - t;
      return spec.transe_norm == 1 ? -v.template lpNorm<1>() : -v.norm();
    }
    case ModelKind::DistMult:
      return (h.array() * r.array() * t.array()).sum();
    case ModelKind::ComplEx: {
      const Eigen::Index k = d / 2;
      auto hr = h.head(k).array(), hi = h.tail(k).array();
      auto rr = r.head(k).array(), ri = r.tail(k).array();
      auto tr = t.head(k).array(), ti = t.tail(k).array();
      return (hr * rr * tr + hi * rr * ti + hr * ri * ti - hi * ri * tr).sum();
    }
    case ModelKind::RotatE: {
      const Eigen::Index k = d / 2;
      Scalar s(0);
      for (Eigen::Index j = 0; j < k; ++j) {
        using std::cos;
        using std::sin;
        Scalar c = cos(r[j]), sn = sin(r[j]);
        Scalar ur = h[j] * c - h[j + k] * sn - t[j];
        Scalar ui = h[j] * sn + h[j + k] * c - t[j + k];
        s -= sqrt(ur * ur + ui * ui);
      }
      return s;
    }
  }
  return Scalar(0);
}

template <typename Scalar>
ScoreGradient<Scalar> gradient_rows(const ModelSpec& spec, ConstRow<Scalar> h, ConstRow<Scalar> r,
                                    ConstRow<Scalar> t) {
  using std::sqrt;
  const Eigen::Index d = h.size();
  ScoreGradient<Scalar> g;
  switch (spec.kind) {
    case ModelKind::TransE: {
      RowVector<Scalar> v = h + r - t;
      RowVector<Scalar> dir(d);
      if (spec.transe_norm == 1) {
        // subgradient 0 where a coordinate sits exactly on the kink
        for (Eigen::Index j = 0; j < d; ++j) dir[j] = sign(v[j]);
      } else {
        Scalar n = v.norm();
        dir = n > Scalar(0) ? RowVector<Scalar>(v / n) : RowVector<Scalar>::Zero(d);
      }
      g.head = -dir;
      g.relation = -dir;
      g.tail = dir;
      break;
    }
    case ModelKind::DistMult:
      g.head = r.cwiseProduct(t);
      g.relation = h.cwiseProduct(t);
      g.tail = h.cwiseProduct(r);
      break;
    case ModelKind::ComplEx: {
      const Eigen::Index k = d / 2;
      auto hr = h.head(k).array(), hi = h.tail(k).array();
      auto rr = r.head(k).array(), ri = r.tail(k).array();
      auto tr = t.head(k).array(), ti = t.tail(k).array();
      g.head.resize(d);
      g.relation.resize(d);
      g.tail.resize(d);
      g.head.head(k) = (rr * tr + ri * ti).matrix();
      g.head.tail(k) = (rr * ti - ri * tr).matrix();
      g.relation.head(k) = (hr * tr + hi * ti).matrix();
      g.relation.tail(k) = (hr * ti - hi * tr).matrix();
      g.tail.head(k) = (hr * rr - hi * ri).matrix();
      g.tail.tail(k) = (hi * rr + hr * ri).matrix();
      break;
    }
    case ModelKind::RotatE: {
      using std::cos;
      using std::sin;
      const Eigen::Index k = d / 2;
      g.head = RowVector<Scalar>::Zero(d);
      g.relation = RowVector<Scalar>::Zero(k);
      g.tail = RowVector<Scalar>::Zero(d);
      for (Eigen::Index j = 0; j < k; ++j) {
        Scalar c = cos(r[j]), sn = sin(r[j]);
        Scalar ur = h[j] * c - h[j + k] * sn - t[j];
        Scalar ui = h[j] * sn + h[j + k] * c - t[j + k];
        Scalar m = sqrt(ur * ur + ui * ui);
        if (!(m > Scalar(0))) continue;
        ur /= m;
        ui /= m;
        g.head[j] = -(ur * c + ui * sn);
        g.head[j + k] = -(-ur * sn + ui * c);
        g.tail[j] = ur;
        g.tail[j + k] = ui;
        g.relation[j] = -(ur * (-h[j] * sn - h[j + k] * c) + ui * (h[j] * c - h[j + k] * sn));
      }
      break;
    }
  }
  return g;
}

}  // namespace detail

// s(h, r, t); higher means more plausible.
//   TransE   -||h + r - t||_p
//   DistMult <h, r, t>
//   ComplEx  Re<h, r, conj(t)>
//   RotatE   -sum_k |h_k e^{i phase_k} - t_k|
template <typename Scalar>
Scalar score(const EmbeddingStore<Scalar>& store, const ModelSpec& spec, const Triple& t) {
  return detail::score_rows<Scalar>(spec, store.entities.row(t.head), store.relations.row(t.relation),
                                    store.entities.row(t.tail));
}

template <typename Scalar>
ScoreGradient<Scalar> score_gradient(const EmbeddingStore<Scalar>& store, const ModelSpec& spec,
                                     const Triple& t) {
  return detail::gradient_rows<Scalar>(spec, store.entities.row(t.head), store.relations.row(t.relation),
                                       store.entities.row(t.tail));
}

// Scores every entity as the open slot of q; element c equals
// score(complete(q, c)).
template <typename Scalar>
Vector<Scalar> score_all_candidates(const EmbeddingStore<Scalar>& store, const ModelSpec& spec,
                                    const QueryPart& q) {
  const auto& E = store.entities;
  const Eigen::Index d = E.cols();
  const bool tail = q.direction == Direction::TailQuery;
  RowVector<Scalar> a = E.row(q.anchor);
  RowVector<Scalar> r = store.relations.row(q.relation);

  switch (spec.kind) {
    case ModelKind::TransE: {
      // tail: -||(h + r) - c||, head: -||c - (t - r)||
      RowVector<Scalar> target = tail ? RowVector<Scalar>(a + r) : RowVector<Scalar>(a - r);
      auto diff = E.rowwise() - target;
      if (spec.transe_norm == 1) return -diff.cwiseAbs().rowwise().sum();
      return -diff.rowwise().norm();
    }
    case ModelKind::DistMult:
      return E * a.cwiseProduct(r).transpose();
    case ModelKind::ComplEx: {
      const Eigen::Index k = d / 2;
      auto ar = a.head(k).array(), ai = a.tail(k).array();
      auto rr = r.head(k).array(), ri = r.tail(k).array();
      RowVector<Scalar> w(d);
      if (tail) {
        w.head(k) = (ar * rr - ai * ri).matrix();
        w.tail(k) = (ar * ri + ai * rr).matrix();
      } else {
        w.head(k) = (rr * ar + ri * ai).matrix();
        w.tail(k) = (rr * ai - ri * ar).matrix();
      }
      return E * w.transpose();
    }
    case ModelKind::RotatE: {
      const Eigen::Index k = d / 2;
      // tail: |h rot - c|; head: |c rot - t| = |c - t conj(rot)| since |rot| = 1
      Eigen::Array<Scalar, 1, Eigen::Dynamic> c = r.array().cos(), s = r.array().sin();
      if (!tail) s = -s;
      auto ar = a.head(k).array(), ai = a.tail(k).array();
      RowVector<Scalar> target_re = (ar * c - ai * s).matrix();
      RowVector<Scalar> target_im = (ar * s + ai * c).matrix();
      auto dre = (E.leftCols(k).rowwise() - target_re).array();
      auto dim = (E.rightCols(k).rowwise() - target_im).array();
      return -(dre.square() + dim.square()).sqrt().rowwise().sum().matrix();
    }
  }
  return Vector<Scalar>::Zero(E.rows());
}

}  // namespace kgsub
