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
#include "kgsub/theory.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "kgsub/loss.hpp"

namespace kgsub::theory {

void validate(const SyntheticDistribution& d) {
  const auto nx = d.size_x(), ny = d.size_y();
  if (nx == 0 || ny == 0) throw std::invalid_argument("empty support");
  if (d.observed_joint.rows() != nx || d.observed_joint.cols() != ny || d.noise.rows() != nx ||
      d.noise.cols() != ny)
    throw std::invalid_argument("distribution tables differ in shape");
  auto non_negative = [](const Table& t) { return (t.array() >= 0.0).all() && t.allFinite(); };
  if (!non_negative(d.true_joint) || !non_negative(d.observed_joint) || !non_negative(d.noise))
    throw std::invalid_argument("probabilities must be finite and non-negative");
  if (std::abs(d.true_joint.sum() - 1.0) > 1e-12 || std::abs(d.observed_joint.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("joint tables must sum to 1");
  for (Eigen::Index x = 0; x < nx; ++x)
    if (std::abs(d.noise.row(x).sum() - 1.0) > 1e-12) throw std::invalid_argument("noise rows must sum to 1");
}

SyntheticDistribution random_distribution(Rng& rng, Eigen::Index nx, Eigen::Index ny, int max_count) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::uniform_int_distribution<int> count(1, max_count);
  SyntheticDistribution d;
  d.true_joint.resize(nx, ny);
  d.observed_joint.resize(nx, ny);
  d.noise.resize(nx, ny);
  for (Eigen::Index x = 0; x < nx; ++x)
    for (Eigen::Index y = 0; y < ny; ++y) {
      d.true_joint(x, y) = u(rng);
      d.observed_joint(x, y) = count(rng);
      d.noise(x, y) = u(rng);
    }
  d.true_joint /= d.true_joint.sum();
  d.observed_joint /= d.observed_joint.sum();
  for (Eigen::Index x = 0; x < nx; ++x) d.noise.row(x) /= d.noise.row(x).sum();
  return d;
}

SyntheticDistribution point_mass(Eigen::Index nx, Eigen::Index ny, Eigen::Index x, Eigen::Index y,
                                 Eigen::Index y_noise) {
  SyntheticDistribution d;
  d.true_joint = Table::Zero(nx, ny);
  d.true_joint(x, y) = 1.0;
  d.observed_joint = d.true_joint;
  d.noise = Table::Zero(nx, ny);
  d.noise.col(y_noise).setOnes();
  return d;
}

SyntheticDistribution kg_style_distribution(std::span<const std::pair<Eigen::Index, Eigen::Index>> cells,
                                            Eigen::Index nx, Eigen::Index ny, double exponent) {
  if (cells.empty()) throw std::invalid_argument("no observed cells");
  Table counts = Table::Zero(nx, ny);
  for (auto [x, y] : cells) {
    if (counts(x, y) != 0.0) throw std::invalid_argument("KG-style cells must be distinct");
    counts(x, y) = 1.0;
  }
  SyntheticDistribution d;
  d.observed_joint = counts / static_cast<double>(cells.size());
  Column per_x = counts.rowwise().sum();
  Column mass = Column::Zero(nx);
  for (Eigen::Index x = 0; x < nx; ++x)
    if (per_x[x] > 0) mass[x] = std::pow(per_x[x], 1.0 - exponent);
  mass /= mass.sum();
  d.true_joint = Table::Zero(nx, ny);
  for (Eigen::Index x = 0; x < nx; ++x)
    if (per_x[x] > 0) d.true_joint.row(x) = counts.row(x) * (mass[x] / per_x[x]);
  d.noise = Table::Constant(nx, ny, 1.0 / static_cast<double>(ny));
  return d;
}

WeightTables unit_weights(Eigen::Index nx, Eigen::Index ny) {
  return {Table::Ones(nx, ny), Column::Ones(nx)};
}

double exact_expected_loss(const Table& joint, const Table& noise, const Table& scores, double gamma,
                           const WeightTables& weights) {
  const Column marginal = joint.rowwise().sum();
  double total = 0.0;
  for (Eigen::Index x = 0; x < joint.rows(); ++x)
    for (Eigen::Index y = 0; y < joint.cols(); ++y) {
      const double z = scores(x, y) + gamma;
      total += weights.positive(x, y) * joint(x, y) * softplus(-z) +
               weights.negative[x] * marginal[x] * noise(x, y) * softplus(z);
    }
  return total;
}

double exact_expected_loss(const SyntheticDistribution& d, const Table& scores, double gamma,
                           const WeightTables& weights) {
  return exact_expected_loss(d.observed_joint, d.noise, scores, gamma, weights);
}

namespace {

std::discrete_distribution<Eigen::Index> row_sampler(const Table& t, Eigen::Index x) {
  std::vector<double> w(static_cast<std::size_t>(t.cols()));
  for (Eigen::Index y = 0; y < t.cols(); ++y) w[static_cast<std::size_t>(y)] = t(x, y);
  return {w.begin(), w.end()};
}

double fit_slope(const std::vector<ConvergenceRow>& rows) {
  double mx = 0, my = 0;
  for (const auto& r : rows) {
    mx += std::log(static_cast<double>(r.n));
    my += std::log(r.mean_abs_error);
  }
  mx /= static_cast<double>(rows.size());
  my /= static_cast<double>(rows.size());
  double sxy = 0, sxx = 0;
  for (const auto& r : rows) {
    const double dx = std::log(static_cast<double>(r.n)) - mx;
    sxy += dx * (std::log(r.mean_abs_error) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

template <typename ErrorFn>
ConvergenceReport run_schedule(std::span<const std::int64_t> schedule, const ConvergenceOptions& options,
                               ErrorFn&& error_of) {
  if (schedule.size() < 3) throw std::invalid_argument("convergence schedule needs at least 3 points");
  if (options.trials < 1) throw std::invalid_argument("need at least one trial");
  ConvergenceReport report;
  bool any_zero = false;
  report.all_exact = true;
  for (auto n : schedule) {
    if (n < 1) throw std::invalid_argument("schedule sizes must be positive");
    double total = 0;
    for (int t = 0; t < options.trials; ++t) {
      Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(n)));
      total += error_of(n, rng);
    }
    const double err = total / options.trials;
    report.rows.push_back({n, err});
    any_zero = any_zero || err == 0.0;
    report.all_exact = report.all_exact && err == 0.0;
  }
  if (!any_zero) report.slope = fit_slope(report.rows);
  return report;
}

}  // namespace

double sampled_loss(const SyntheticDistribution& d, const Table& scores, double gamma,
                    const WeightTables& weights, std::int64_t n_samples, int nu, Rng& rng) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  if (nu < 1) throw std::invalid_argument("nu must be at least 1");
  const auto nx = d.size_x(), ny = d.size_y();
  std::vector<double> flat(static_cast<std::size_t>(nx * ny));
  for (Eigen::Index x = 0; x < nx; ++x)
    for (Eigen::Index y = 0; y < ny; ++y) flat[static_cast<std::size_t>(x * ny + y)] = d.observed_joint(x, y);
  std::discrete_distribution<Eigen::Index> cell(flat.begin(), flat.end());
  std::vector<std::discrete_distribution<Eigen::Index>> noise;
  noise.reserve(static_cast<std::size_t>(nx));
  for (Eigen::Index x = 0; x < nx; ++x) noise.push_back(row_sampler(d.noise, x));

  // running means, so a constant integrand reproduces the exact value bit for bit
  double mean = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const Eigen::Index c = cell(rng), x = c / ny, y = c % ny;
    double inner = 0.0;
    for (int k = 0; k < nu; ++k) {
      const Eigen::Index yn = noise[static_cast<std::size_t>(x)](rng);
      inner += (softplus(scores(x, yn) + gamma) - inner) / static_cast<double>(k + 1);
    }
    const double v = weights.positive(x, y) * softplus(-(scores(x, y) + gamma)) + weights.negative[x] * inner;
    mean += (v - mean) / static_cast<double>(i + 1);
  }
  return mean;
}

double sampled_inner(const SyntheticDistribution& d, const Table& scores, double gamma, Eigen::Index x,
                     std::int64_t nu, Rng& rng) {
  if (nu < 1) throw std::invalid_argument("nu must be at least 1");
  auto noise = row_sampler(d.noise, x);
  double mean = 0.0;
  for (std::int64_t k = 0; k < nu; ++k) mean += (softplus(scores(x, noise(rng)) + gamma) - mean) / static_cast<double>(k + 1);
  return mean;
}

double exact_inner(const SyntheticDistribution& d, const Table& scores, double gamma, Eigen::Index x) {
  double total = 0.0;
  for (Eigen::Index y = 0; y < d.size_y(); ++y) total += d.noise(x, y) * softplus(scores(x, y) + gamma);
  return total;
}

bool ConvergenceReport::passed(double lo, double hi) const {
  if (all_exact) return true;
  return slope && *slope >= lo && *slope <= hi;
}

ConvergenceReport convergence_report(const SyntheticDistribution& d, const Table& scores, double gamma,
                                     const WeightTables& weights, std::span<const std::int64_t> schedule,
                                     const ConvergenceOptions& options) {
  const double exact = exact_expected_loss(d, scores, gamma, weights);
  return run_schedule(schedule, options, [&](std::int64_t n, Rng& rng) {
    return std::abs(sampled_loss(d, scores, gamma, weights, n, options.nu, rng) - exact);
  });
}

ConvergenceReport inner_convergence_report(const SyntheticDistribution& d, const Table& scores, double gamma,
                                           Eigen::Index x, std::span<const std::int64_t> schedule,
                                           const ConvergenceOptions& options) {
  const double exact = exact_inner(d, scores, gamma, x);
  return run_schedule(schedule, options, [&](std::int64_t nu, Rng& rng) {
    return std::abs(sampled_inner(d, scores, gamma, x, nu, rng) - exact);
  });
}

RecoveryReport weight_recovery_check(const SyntheticDistribution& d, const Table& scores, double gamma) {
  validate(d);
  const auto nx = d.size_x(), ny = d.size_y();
  const Column p_true = d.true_marginal(), p_obs = d.observed_marginal();
  RecoveryReport r;
  r.weights.positive = Table::Zero(nx, ny);
  r.weights.negative = Column::Zero(nx);
  for (Eigen::Index x = 0; x < nx; ++x) {
    if (p_obs[x] > 0) r.weights.negative[x] = p_true[x] / p_obs[x];
    else if (p_true[x] > 0) throw std::domain_error("weights undefined");
    for (Eigen::Index y = 0; y < ny; ++y) {
      if (d.observed_joint(x, y) > 0) r.weights.positive(x, y) = d.true_joint(x, y) / d.observed_joint(x, y);
      else if (d.true_joint(x, y) > 0) throw std::domain_error("weights undefined");
    }
  }
  r.weighted_observed = exact_expected_loss(d.observed_joint, d.noise, scores, gamma, r.weights);
  r.unweighted_true = exact_expected_loss(d.true_joint, d.noise, scores, gamma, unit_weights(nx, ny));
  r.abs_diff = std::abs(r.weighted_observed - r.unweighted_true);
  return r;
}

}  // namespace kgsub::theory
