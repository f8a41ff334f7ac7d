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
 * Step reward, the moving success threshold, and random episode halting.
 *
 * Thresholds live in the fake-minimum frame: an energy C counts as a
 * success when C - mu < xi, mu = -sum |c_i|.
 */

#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "tnqas/core/rng.hpp"

namespace tnqas {

inline constexpr double kSuccessReward = 5.0;
inline constexpr double kFailureReward = -5.0;

/// `error` is C_t minus the reference energy the threshold is measured
/// against; the caller picks the frame.
inline double compute_reward(double c_t, double c_prev, double error, double xi, std::size_t t, std::size_t cap,
                             double c_min) {
  if (error < xi) return kSuccessReward;
  if (t >= cap) return kFailureReward;
  const double denom = c_prev - c_min;
  if (std::abs(denom) < 1e-12) return 0.0;
  return std::max((c_prev - c_t) / denom, -1.0);
}

struct CurriculumConfig {
  double delta = 1e-4;
  double kappa = 10.0;
  std::size_t shift_period = 500;      // G
  std::size_t stagnation_limit = 500;
  std::size_t success_period = 50;

  void validate() const {
    if (!(delta > 0.0) || !(kappa > 0.0)) throw std::invalid_argument("CurriculumConfig: delta and kappa must be positive");
    if (shift_period == 0 || stagnation_limit == 0 || success_period == 0)
      throw std::invalid_argument("CurriculumConfig: periods must be positive");
  }
};

struct CurriculumState {
  double xi = 0.0;       // threshold on C - mu
  double best = std::numeric_limits<double>::infinity();  // xi_2
  double mu = 0.0;
  double floor = 0.0;    // xi never drops below this
  std::size_t successes = 0;
  std::size_t stagnant = 0;
  std::size_t episodes = 0;

  static CurriculumState start(double mu, double xi_init, double floor) {
    CurriculumState cs;
    cs.mu = mu;
    cs.xi = std::max(xi_init, floor);
    cs.floor = floor;
    return cs;
  }

  /// |mu - xi_2| + delta.
  double xi_new(const CurriculumConfig& cfg) const { return std::abs(mu - best) + cfg.delta; }
};

struct EpisodeOutcome {
  bool success = false;
  double best_energy = std::numeric_limits<double>::infinity();
};

/// Applies, in order: stagnation reset, periodic greedy shift, success
/// decrement, best-energy update. Rules that need xi_2 are skipped until an
/// energy has been recorded.
inline CurriculumState curriculum_update(CurriculumState cs, const EpisodeOutcome& out, const CurriculumConfig& cfg) {
  ++cs.episodes;
  const bool improved = out.best_energy < cs.best;
  cs.stagnant = improved ? 0 : cs.stagnant + 1;
  const bool have_best = std::isfinite(cs.best);

  if (have_best && cs.stagnant >= cfg.stagnation_limit) {
    cs.xi = cs.xi_new(cfg) + cfg.delta;
    cs.stagnant = 0;
  }
  if (have_best && cs.episodes % cfg.shift_period == 0) cs.xi = std::abs(cs.mu - cs.best);
  if (out.success) {
    ++cs.successes;
    if (cs.successes % cfg.success_period == 0) cs.xi -= cfg.delta / cfg.kappa;
  }
  if (improved) {
    cs.best = out.best_energy;
    cs.xi = cs.xi_new(cfg);
  }
  cs.xi = std::max(cs.xi, std::max(cs.floor, cfg.delta));
  return cs;
}

/// Normalised pmf of the failure count n_fail in [0, n_act - 1]:
/// C(n_act-1, k) p^k (1-p)^(n_act-k), divided by its total (1 - p).
inline std::vector<double> halting_pmf(std::size_t n_act, double p) {
  if (n_act == 0) throw std::invalid_argument("halting_pmf: n_act must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("halting_pmf: p must lie in (0, 1)");
  std::vector<double> pmf(n_act);
  const double m = static_cast<double>(n_act - 1);
  for (std::size_t k = 0; k < n_act; ++k) {
    const double kk = static_cast<double>(k);
    const double log_binom = std::lgamma(m + 1) - std::lgamma(kk + 1) - std::lgamma(m - kk + 1);
    pmf[k] = std::exp(log_binom + kk * std::log(p) + (m - kk) * std::log1p(-p));
  }
  return pmf;
}

/// Episode cap n_act - n_fail in [1, n_act]; halting off (p <= 0) gives n_act.
inline std::size_t sample_episode_length(std::size_t n_act, double p, Rng& rng) {
  if (n_act == 0) throw std::invalid_argument("sample_episode_length: n_act must be >= 1");
  if (p <= 0.0) return n_act;
  const auto pmf = halting_pmf(n_act, p);
  std::discrete_distribution<std::size_t> dist(pmf.begin(), pmf.end());
  return n_act - dist(rng);
}

}  // namespace tnqas
