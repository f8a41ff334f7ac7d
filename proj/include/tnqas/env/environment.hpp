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
 * Architecture-search environment. Variants:
 *   fixed      agent circuit acts on the warm-start state; only agent angles train
 *   trainable  warm-start gates precede the agent's and all angles train
 *   structure  as trainable, with warm-start angles zeroed at reset
 *   vanilla    agent circuit on |0...0>
 */

#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnqas/env/actions.hpp"
#include "tnqas/env/observation.hpp"
#include "tnqas/env/optimizer.hpp"
#include "tnqas/env/reward.hpp"

namespace tnqas {

enum class Variant { trainable, fixed, structure, vanilla };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::trainable: return "trainable";
    case Variant::fixed: return "fixed";
    case Variant::structure: return "structure";
    case Variant::vanilla: return "vanilla";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "trainable") return Variant::trainable;
  if (s == "fixed") return Variant::fixed;
  if (s == "structure") return Variant::structure;
  if (s == "vanilla") return Variant::vanilla;
  throw std::invalid_argument("unknown variant '" + s + "' (expected trainable, fixed, structure or vanilla)");
}

inline bool uses_warmstart(Variant v) { return v != Variant::vanilla; }
/// Warm-start gates are part of the agent-visible (and counted) circuit.
inline bool warmstart_in_circuit(Variant v) { return v == Variant::trainable || v == Variant::structure; }

struct EnvConfig {
  Variant variant = Variant::fixed;
  std::size_t max_steps = 20;  // T_s^e; also the number of agent slots
  double threshold = 1e-2;     // target error against the reference energy
  bool curriculum = true;
  CurriculumConfig curriculum_cfg;
  double halting_p = 0.0;      // <= 0 disables random halting
  InnerOptimizerConfig optimizer;
  BackendConfig backend;

  void validate() const {
    if (max_steps == 0) throw std::invalid_argument("EnvConfig: max_steps must be >= 1");
    if (!(threshold > 0.0)) throw std::invalid_argument("EnvConfig: threshold must be positive");
    if (halting_p >= 1.0) throw std::invalid_argument("EnvConfig: halting_p must be < 1");
    curriculum_cfg.validate();
    optimizer.validate();
    backend.validate();
  }
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
  bool success = false;  // met the moving threshold (reward +5)
  bool solved = false;   // error below the fixed target threshold
  double energy = 0.0;
  std::size_t nfev = 0;
};

struct EpisodeStats {
  std::size_t steps = 0;
  std::size_t nfev = 0;
  double initial_energy = 0.0;
  double best_energy = std::numeric_limits<double>::infinity();
  bool success = false;
  bool solved = false;
  Circuit best_circuit;  // counted circuit at the best step, angles bound
};

class Environment {
 public:
  /// `warmstart` is the transpiled circuit with fitted angles; required for
  /// every variant but vanilla. `e_ref` is the exact ground energy when known.
  Environment(const PauliSum& h, EnvConfig cfg, std::optional<Circuit> warmstart, std::optional<double> e_ref, Rng rng)
      : h_(&h),
        cfg_(std::move(cfg)),
        space_(h.n_qubits()),
        e_ref_(e_ref),
        mu_(fake_minimum_energy(h)),
        rng_(std::move(rng)),
        eval_(h, StateVector::zero_state(h.n_qubits()), cfg_.backend, Rng(rng_())) {
    cfg_.validate();
    const std::size_t n = h.n_qubits();
    if (uses_warmstart(cfg_.variant)) {
      if (!warmstart) throw std::invalid_argument(std::string("Environment: variant '") + variant_name(cfg_.variant) +
                                                  "' needs a warm-start circuit");
      if (warmstart->n_qubits() != n) throw std::invalid_argument("Environment: warm-start qubit count mismatch");
      warm_ = *warmstart;
    }
    if (cfg_.variant == Variant::fixed)
      eval_ = EnergyEvaluator(h, run_circuit(StateVector::zero_state(n), warm_), cfg_.backend, Rng(rng_()));
    layout_ = {n, warmstart_in_circuit(cfg_.variant) ? circuit_depth(warm_) : 0, cfg_.max_steps};
    c_min_ = e_ref_ ? *e_ref_ : mu_;
    reset();
    const double floor = (e_ref_ ? *e_ref_ - mu_ : 0.0) + cfg_.curriculum_cfg.delta;
    const double xi0 = e_ref_ ? (*e_ref_ - mu_) + cfg_.threshold : (energy_ - mu_) + cfg_.curriculum_cfg.delta;
    curriculum_ = CurriculumState::start(mu_, xi0, floor);
    stats_.nfev = 0;
    eval_.reset_count();
  }

  const PauliSum& hamiltonian() const { return *h_; }
  const EnvConfig& config() const { return cfg_; }
  const ActionSpace& actions() const { return space_; }
  const ObservationLayout& layout() const { return layout_; }
  std::optional<double> reference_energy() const { return e_ref_; }
  double fake_minimum() const { return mu_; }
  double c_min() const { return c_min_; }
  std::size_t step_index() const { return t_; }
  std::size_t cap() const { return cap_; }
  bool done() const { return done_; }
  double energy() const { return energy_; }
  const EpisodeStats& episode() const { return stats_; }
  const CurriculumState& curriculum() const { return curriculum_; }
  void set_curriculum(const CurriculumState& cs) { curriculum_ = cs; }
  Rng& rng() { return rng_; }
  Rng& evaluator_rng() { return eval_.rng(); }
  double simulator_seconds() const { return eval_.simulator_seconds(); }

  /// Error threshold currently in force (curriculum threshold minus the
  /// reference offset); only meaningful with a reference energy.
  double error_threshold() const { return curriculum_.xi - (c_min_ - mu_); }

  void reset() {
    agent_ = Circuit(h_->n_qubits());
    prefix_ = warmstart_in_circuit(cfg_.variant) ? warm_ : Circuit(h_->n_qubits());
    if (cfg_.variant == Variant::structure) prefix_.set_parameters(std::vector<double>(prefix_.parameter_count(), 0.0));
    theta_ = prefix_.parameters();
    t_ = 0;
    done_ = false;
    cap_ = sample_episode_length(cfg_.max_steps, cfg_.halting_p, rng_);
    const std::size_t before = eval_.nfev();
    energy_ = eval_.energy(executable(), theta_);
    stats_ = EpisodeStats{};
    stats_.nfev = eval_.nfev() - before;
    stats_.initial_energy = energy_;
  }

  std::vector<std::uint8_t> legal_mask() const {
    const Circuit& last_src = agent_.empty() ? prefix_ : agent_;
    std::optional<GateOp> last;
    if (!last_src.empty()) last = last_src.gates().back();
    return legal_actions(space_, last);
  }

  ObservationTensor observation() const {
    return encode_observation(layout_, warmstart_in_circuit(cfg_.variant) ? &prefix_ : nullptr, agent_);
  }

  StepResult step(std::size_t a) {
    if (done_) throw std::logic_error("Environment::step: episode is over, call reset()");
    if (!legal_mask().at(a)) throw std::invalid_argument("Environment::step: illegal action " + std::to_string(a));
    const GateOp g = space_.decode(a).gate();
    agent_.add(g);
    std::vector<std::size_t> fresh;
    if (is_rotation(g.kind)) {
      fresh.push_back(theta_.size());
      theta_.push_back(0.0);
    }
    const Circuit exec = executable();
    const auto res = optimize_parameters(exec, theta_, eval_, cfg_.optimizer, fresh);
    theta_ = res.theta;
    bind_angles();

    const double prev = energy_;
    energy_ = res.energy;
    ++t_;
    StepResult out;
    out.energy = energy_;
    out.nfev = res.nfev;
    out.success = energy_ - mu_ < curriculum_.xi;
    out.solved = e_ref_ && energy_ - *e_ref_ < cfg_.threshold;
    out.reward = compute_reward(energy_, prev, energy_ - mu_, curriculum_.xi, t_, cap_, c_min_);
    out.done = out.success || t_ >= cap_;

    stats_.steps = t_;
    stats_.nfev += res.nfev;
    stats_.success = stats_.success || out.success;
    stats_.solved = stats_.solved || out.solved;
    if (energy_ < stats_.best_energy) {
      stats_.best_energy = energy_;
      stats_.best_circuit = counted_circuit();
    }
    if (out.done) {
      done_ = true;
      if (cfg_.curriculum) curriculum_ = curriculum_update(curriculum_, {stats_.success, stats_.best_energy}, cfg_.curriculum_cfg);
    }
    return out;
  }

  /// Gates whose angles are optimized, in execution order.
  Circuit executable() const {
    Circuit c = prefix_;
    c.append(agent_);
    return c;
  }

  /// Circuit reported in metrics: agent gates only for fixed and vanilla.
  Circuit counted_circuit() const { return warmstart_in_circuit(cfg_.variant) ? executable() : agent_; }

  const Circuit& agent_circuit() const { return agent_; }
  const Circuit& warmstart() const { return warm_; }

 private:
  void bind_angles() {
    const std::size_t np = prefix_.parameter_count();
    prefix_.set_parameters(std::span<const double>(theta_).first(np));
    agent_.set_parameters(std::span<const double>(theta_).subspan(np));
  }

  const PauliSum* h_;
  EnvConfig cfg_;
  ActionSpace space_;
  std::optional<double> e_ref_;
  double mu_;
  double c_min_ = 0.0;
  Rng rng_;
  EnergyEvaluator eval_;
  Circuit warm_;
  ObservationLayout layout_;
  Circuit prefix_, agent_;
  std::vector<double> theta_;
  std::size_t t_ = 0, cap_ = 0;
  bool done_ = false;
  double energy_ = 0.0;
  EpisodeStats stats_;
  CurriculumState curriculum_;
};

}  // namespace tnqas
