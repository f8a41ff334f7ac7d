// Copyright 2026 The tnqas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Inner-loop parameter optimization for a fixed circuit structure.
 *
 * Exact backend: a closed-form single-coordinate minimization (Rotosolve)
 * over the freshly added angles, then Adam on exact gradients with a
 * plateau stop. Sampled or noisy backends: SPSA.
 *
 * For a half-angle rotation the energy is a + b cos(t) + c sin(t) in each
 * angle, so three evaluations fix the coordinate minimum.
 */

#pragma once

#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "tnqas/env/backend.hpp"

namespace tnqas {

struct InnerOptimizerConfig {
  std::size_t max_iters = 1000;
  double learning_rate = 0.01;
  double tol = 1e-10;          // minimum improvement of the best energy ...
  std::size_t patience = 50;   // ... within this many iterations
  double grad_tol = 1e-9;
  bool rotosolve = true;
  double spsa_a = 0.2;
  double spsa_c = 0.1;

  void validate() const {
    if (max_iters == 0) throw std::invalid_argument("InnerOptimizerConfig: max_iters must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("InnerOptimizerConfig: learning_rate must be positive");
    if (patience == 0) throw std::invalid_argument("InnerOptimizerConfig: patience must be >= 1");
  }
};

struct OptimizeResult {
  std::vector<double> theta;
  double energy = 0.0;
  std::size_t nfev = 0;
};

namespace detail {

inline void rotosolve_coordinate(const Circuit& c, std::vector<double>& theta, double& energy, std::size_t k,
                                 EnergyEvaluator& eval) {
  const double t0 = theta[k];
  theta[k] = t0 + kPi / 2;
  const double ep = eval.energy(c, theta);
  theta[k] = t0 - kPi / 2;
  const double em = eval.energy(c, theta);
  const double a = 0.5 * (ep + em), s = 0.5 * (ep - em), b = energy - a;
  const double r = std::hypot(b, s);
  if (a - r < energy) {
    theta[k] = wrap_angle(t0 + std::atan2(s, b) + kPi);
    energy = a - r;
  } else {
    theta[k] = t0;
  }
}

inline OptimizeResult optimize_exact(const Circuit& c, std::vector<double> theta, std::span<const std::size_t> fresh,
                                     EnergyEvaluator& eval, const InnerOptimizerConfig& cfg) {
  const std::size_t start = eval.nfev();
  double energy = eval.energy(c, theta);
  if (theta.empty()) return {std::move(theta), energy, eval.nfev() - start};
  if (cfg.rotosolve)
    for (const std::size_t k : fresh) rotosolve_coordinate(c, theta, energy, k, eval);

  std::vector<double> best = theta, m(theta.size(), 0.0), v(theta.size(), 0.0);
  double best_e = energy, anchor = energy;
  std::size_t since = 0;
  const double b1 = 0.9, b2 = 0.999;
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const auto g = eval.energy_and_gradient(c, theta);
    if (g.energy < best_e) {
      best_e = g.energy;
      best = theta;
    }
    if (best_e < anchor - cfg.tol) {
      anchor = best_e;
      since = 0;
    } else if (++since >= cfg.patience) {
      break;
    }
    double gn = 0.0;
    for (const double x : g.gradient) gn += x * x;
    if (std::sqrt(gn) < cfg.grad_tol) break;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(it)), c2 = 1.0 - std::pow(b2, static_cast<double>(it));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g.gradient[i];
      v[i] = b2 * v[i] + (1 - b2) * g.gradient[i] * g.gradient[i];
      theta[i] -= cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + 1e-8);
    }
  }
  return {std::move(best), best_e, eval.nfev() - start};
}

inline OptimizeResult optimize_spsa(const Circuit& c, std::vector<double> theta, std::span<const std::size_t> fresh,
                                    EnergyEvaluator& eval, const InnerOptimizerConfig& cfg) {
  const std::size_t start = eval.nfev();
  const double e0 = eval.energy(c, theta);
  if (theta.empty()) return {std::move(theta), e0, eval.nfev() - start};
  const std::vector<double> init = theta;
  double energy = e0;
  if (cfg.rotosolve)
    for (const std::size_t k : fresh) rotosolve_coordinate(c, theta, energy, k, eval);

  std::bernoulli_distribution coin(0.5);
  std::vector<double> delta(theta.size()), probe(theta.size());
  const double big_a = 0.1 * static_cast<double>(cfg.max_iters);
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    const double ak = cfg.spsa_a / std::pow(static_cast<double>(k) + 1 + big_a, 0.602);
    const double ck = cfg.spsa_c / std::pow(static_cast<double>(k) + 1, 0.101);
    for (auto& d : delta) d = coin(eval.rng()) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < theta.size(); ++i) probe[i] = theta[i] + ck * delta[i];
    const double ep = eval.energy(c, probe);
    for (std::size_t i = 0; i < theta.size(); ++i) probe[i] = theta[i] - ck * delta[i];
    const double em = eval.energy(c, probe);
    const double slope = (ep - em) / (2 * ck);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= ak * slope * delta[i];
  }
  const double final_e = eval.energy(c, theta);
  if (final_e > e0) return {init, e0, eval.nfev() - start};
  return {std::move(theta), final_e, eval.nfev() - start};
}

}  // namespace detail

/// Minimizes the energy of `c` over its rotation angles starting from
/// `theta`. `fresh` lists angles to solve coordinate-wise first (typically
/// the ones just added); nfev counts every energy evaluation spent here.
/// Never returns an energy above the starting one.
inline OptimizeResult optimize_parameters(const Circuit& c, std::vector<double> theta, EnergyEvaluator& eval,
                                          const InnerOptimizerConfig& cfg, std::span<const std::size_t> fresh) {
  cfg.validate();
  if (theta.size() != c.parameter_count())
    throw std::invalid_argument("optimize_parameters: expected " + std::to_string(c.parameter_count()) +
                                " angles, got " + std::to_string(theta.size()));
  for (const std::size_t k : fresh)
    if (k >= theta.size()) throw std::out_of_range("optimize_parameters: fresh index out of range");
  return eval.exact() ? detail::optimize_exact(c, std::move(theta), fresh, eval, cfg)
                      : detail::optimize_spsa(c, std::move(theta), fresh, eval, cfg);
}

/// Treats every angle as fresh.
inline OptimizeResult optimize_parameters(const Circuit& c, std::vector<double> theta, EnergyEvaluator& eval,
                                          const InnerOptimizerConfig& cfg) {
  std::vector<std::size_t> all(theta.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return optimize_parameters(c, std::move(theta), eval, cfg, all);
}

}  // namespace tnqas
