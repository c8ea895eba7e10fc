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

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kgsub/rng.hpp"

namespace kgsub::theory {

using Table = Eigen::MatrixXd;   // rows x in X, columns y in Y
using Column = Eigen::VectorXd;  // indexed by x

// Small discrete world where every expectation can be summed exactly.
struct SyntheticDistribution {
  Table true_joint;      // p'_d(x, y)
  Table observed_joint;  // p_d(x, y), normalized observed frequencies
  Table noise;           // p_n(y | x), each row sums to 1

  Eigen::Index size_x() const { return true_joint.rows(); }
  Eigen::Index size_y() const { return true_joint.cols(); }
  Column true_marginal() const { return true_joint.rowwise().sum(); }
  Column observed_marginal() const { return observed_joint.rowwise().sum(); }
};

// Throws std::invalid_argument unless the tables are non-negative, shaped
// alike, and normalized within 1e-12.
void validate(const SyntheticDistribution& d);

// Strictly positive tables: random true joint and noise rows, observed joint
// from random integer counts in [1, max_count].
SyntheticDistribution random_distribution(Rng& rng, Eigen::Index nx, Eigen::Index ny, int max_count = 9);

// Observed joint = true joint = one cell, noise a point mass on column y_noise.
SyntheticDistribution point_mass(Eigen::Index nx, Eigen::Index ny, Eigen::Index x, Eigen::Index y,
                                 Eigen::Index y_noise);

// KG-style data: each listed (x, y) cell is observed exactly once. The true
// conditional is uniform over the observed answers of x and the true
// marginal is proportional to #x^(1 - exponent), the world in which the
// unique-based weights are the exact density ratios.
SyntheticDistribution kg_style_distribution(std::span<const std::pair<Eigen::Index, Eigen::Index>> cells,
                                            Eigen::Index nx, Eigen::Index ny, double exponent = 0.5);

struct WeightTables {
  Table positive;   // A(x, y)
  Column negative;  // B(x)
};

WeightTables unit_weights(Eigen::Index nx, Eigen::Index ny);

// sum_{x,y} [ A(x,y) p(x,y) sp(-(s+g)) + B(x) p(x) p_n(y|x) sp(s+g) ]
// with sp = softplus and p(x) the row marginal of joint.
double exact_expected_loss(const Table& joint, const Table& noise, const Table& scores, double gamma,
                           const WeightTables& weights);

// Same under the observed distribution p_d.
double exact_expected_loss(const SyntheticDistribution& d, const Table& scores, double gamma,
                           const WeightTables& weights);

// Empirical weighted loss: n pairs (x, y) ~ p_d, nu negatives per pair from
// p_n(.|x), each contributing A sp(-(s+g)) + B (1/nu) sum_i sp(s_i+g).
double sampled_loss(const SyntheticDistribution& d, const Table& scores, double gamma,
                    const WeightTables& weights, std::int64_t n_samples, int nu, Rng& rng);

// Empirical inner average (1/nu) sum_i sp(s(x, y_i) + g), y_i ~ p_n(.|x).
double sampled_inner(const SyntheticDistribution& d, const Table& scores, double gamma, Eigen::Index x,
                     std::int64_t nu, Rng& rng);

// sum_y p_n(y|x) sp(s(x, y) + g)
double exact_inner(const SyntheticDistribution& d, const Table& scores, double gamma, Eigen::Index x);

struct ConvergenceRow {
  std::int64_t n = 0;
  double mean_abs_error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::optional<double> slope;  // least-squares slope of log error vs log n; unset when some error is 0
  bool all_exact = false;       // every error exactly 0

  // slope inside [lo, hi], or exact everywhere
  bool passed(double lo = -0.65, double hi = -0.35) const;
};

struct ConvergenceOptions {
  int trials = 40;
  int nu = 4;  // negatives per pair for the outer check
  std::uint64_t seed = 0;
};

// Mean |sampled_loss - exact_expected_loss| over trials for each n.
// Trial t at size n draws from stream derive_seed(seed, t, n).
ConvergenceReport convergence_report(const SyntheticDistribution& d, const Table& scores, double gamma,
                                     const WeightTables& weights, std::span<const std::int64_t> schedule,
                                     const ConvergenceOptions& options = {});

// Same for the inner negative average of query x, with nu taken from schedule.
ConvergenceReport inner_convergence_report(const SyntheticDistribution& d, const Table& scores, double gamma,
                                           Eigen::Index x, std::span<const std::int64_t> schedule,
                                           const ConvergenceOptions& options = {});

struct RecoveryReport {
  WeightTables weights;  // A = p'_d(x,y) / p_d(x,y), B = p'_d(x) / p_d(x)
  double weighted_observed = 0.0;  // exact loss under p_d with those weights
  double unweighted_true = 0.0;    // exact loss under p'_d with unit weights
  double abs_diff = 0.0;

  bool passed(double tol = 1e-12) const { return abs_diff <= tol; }
};

// Density-ratio weights turn the observed-data loss into the true-data loss.
// Throws std::domain_error("weights undefined") when p_d is 0 where p'_d is not.
RecoveryReport weight_recovery_check(const SyntheticDistribution& d, const Table& scores, double gamma);

}  // namespace kgsub::theory
