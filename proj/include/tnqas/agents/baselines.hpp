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
 * Baselines: the uniform random agent and simulated-annealing search over a
 * fixed-length slot array.
 */

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "tnqas/env/environment.hpp"

namespace tnqas {

/// Uniform over legal actions.
inline std::size_t random_legal_action(const std::vector<std::uint8_t>& mask, Rng& rng) {
  std::vector<std::size_t> legal;
  for (std::size_t a = 0; a < mask.size(); ++a)
    if (mask[a]) legal.push_back(a);
  if (legal.empty()) throw std::invalid_argument("random_legal_action: every action is masked");
  return legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)];
}

/// Plays one episode from a freshly reset environment.
inline EpisodeStats random_agent_episode(Environment& env, Rng& rng) {
  env.reset();
  while (!env.done()) env.step(random_legal_action(env.legal_mask(), rng));
  return env.episode();
}

struct SaConfig {
  double t0 = 1.0;
  double alpha = 0.995;  // T_k = t0 alpha^k
  std::size_t max_iters = 2000;
  std::size_t slots = 20;
  std::size_t stable_window = 200;
  double stable_tol = 1e-8;
  std::optional<double> stop_below;  // stop once the best energy drops below
  InnerOptimizerConfig optimizer;
  BackendConfig backend;

  void validate() const {
    if (!(t0 > 0.0)) throw std::invalid_argument("SaConfig: t0 must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("SaConfig: alpha must lie in (0, 1)");
    if (max_iters == 0 || slots == 0 || stable_window == 0)
      throw std::invalid_argument("SaConfig: max_iters, slots and stable_window must be >= 1");
    optimizer.validate();
    backend.validate();
  }
};

/// Metropolis rule: always accept improvements, otherwise with e^{-dL/T}.
inline bool sa_accept(double delta_loss, double temperature, Rng& rng) {
  if (delta_loss < 0.0) return true;
  if (temperature <= 0.0) return false;
  return uniform01(rng) < std::exp(-delta_loss / temperature);
}

struct SaIteration {
  double current = 0.0;  // loss of the accepted configuration
  double best = 0.0;
  double candidate = 0.0;
  bool accepted = false;
  std::size_t nfev = 0;
  Circuit circuit;  // candidate with optimized angles
};

struct SaResult {
  Circuit best_circuit;
  double best_energy = std::numeric_limits<double>::infinity();
  std::vector<SaIteration> trace;
  std::size_t nfev = 0;
};

namespace detail {

// Slot content: -1 is identity, otherwise an action index.
inline Circuit realize(const std::vector<long>& slots, const ActionSpace& space) {
  Circuit c(space.n_qubits());
  for (const long s : slots)
    if (s >= 0) c.add(space.decode(static_cast<std::size_t>(s)).gate());
  return c;
}

}  // namespace detail

inline SaResult sa_search(const PauliSum& h, const SaConfig& cfg, Rng& rng) {
  cfg.validate();
  const ActionSpace space(h.n_qubits());
  EnergyEvaluator eval(h, StateVector::zero_state(h.n_qubits()), cfg.backend, Rng(rng()));
  auto loss_of = [&](const std::vector<long>& slots, Circuit& c, std::vector<double>& theta) {
    c = detail::realize(slots, space);
    const auto r = optimize_parameters(c, std::vector<double>(c.parameter_count(), 0.0), eval, cfg.optimizer);
    theta = r.theta;
    return r.energy;
  };

  std::vector<long> slots(cfg.slots, -1);
  Circuit circ;
  std::vector<double> theta;
  double current = loss_of(slots, circ, theta);
  SaResult out;
  out.best_energy = current;
  out.best_circuit = circ.with_parameters(theta);

  double temperature = cfg.t0;
  std::size_t stable = 0;
  std::uniform_int_distribution<std::size_t> pick_slot(0, cfg.slots - 1);
  std::uniform_int_distribution<long> pick_gate(-1, static_cast<long>(space.size()) - 1);
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    const std::size_t before = eval.nfev();
    auto proposal = slots;
    const std::size_t s = pick_slot(rng);
    long g;
    do g = pick_gate(rng);
    while (g == proposal[s]);
    proposal[s] = g;
    Circuit cand;
    std::vector<double> cand_theta;
    const double cand_loss = loss_of(proposal, cand, cand_theta);
    const double delta = cand_loss - current;
    SaIteration it;
    it.candidate = cand_loss;
    it.circuit = cand.with_parameters(cand_theta);
    it.accepted = sa_accept(delta, temperature, rng);
    const double previous = current;
    if (it.accepted) {
      slots = std::move(proposal);
      current = cand_loss;
      if (cand_loss < out.best_energy) {
        out.best_energy = cand_loss;
        out.best_circuit = cand.with_parameters(cand_theta);
      }
    }
    it.current = current;
    it.best = out.best_energy;
    it.nfev = eval.nfev() - before;
    out.trace.push_back(it);
    temperature *= cfg.alpha;
    if (cfg.stop_below && out.best_energy < *cfg.stop_below) break;
    stable = std::abs(current - previous) < cfg.stable_tol ? stable + 1 : 0;
    if (stable >= cfg.stable_window) break;
  }
  out.nfev = eval.nfev();
  return out;
}

}  // namespace tnqas
