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
 * Run configuration. The file form is one JSON object with flat dotted keys,
 * e.g. {"problem.model": "tfim", "env.variant": "fixed", "run.seeds": [0, 1]}.
 * Unknown keys are rejected. Missing keys keep their defaults.
 */

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tnqas/agents/baselines.hpp"
#include "tnqas/agents/ddqn.hpp"
#include "tnqas/pauli/hamiltonian_io.hpp"
#include "tnqas/stiefel/riemannian.hpp"
#include "tnqas/tensornet/dmrg.hpp"

namespace tnqas {

enum class AgentKind { ddqn, random, sa };

inline const char* agent_name(AgentKind k) {
  switch (k) {
    case AgentKind::ddqn: return "ddqn";
    case AgentKind::random: return "random";
    case AgentKind::sa: return "sa";
  }
  return "?";
}

inline AgentKind parse_agent(const std::string& s) {
  if (s == "ddqn") return AgentKind::ddqn;
  if (s == "random") return AgentKind::random;
  if (s == "sa") return AgentKind::sa;
  throw std::invalid_argument("unknown agent '" + s + "' (expected ddqn, random or sa)");
}

struct RunConfig {
  // problem
  std::string model = "tfim";  // tfim | heisenberg | file
  std::size_t qubits = 6;
  double field = 0.05;
  std::string hamiltonian_file;

  // steps 1-2
  std::size_t chi = 2;
  std::size_t dmrg_sweeps = 20;
  std::size_t layers = 1;
  std::size_t fit_iters = 3000;
  double fit_lr = 0.01;
  std::uint64_t pipeline_seed = 0;

  // environment
  std::string variant = "fixed";
  std::size_t max_steps = 20;
  double threshold = 1e-2;
  bool curriculum = true;
  double halting_p = 0.0;
  std::size_t opt_iters = 1000;
  double opt_lr = 0.01;

  std::string backend = "exact";
  std::size_t shots = 10000;
  double p1 = 0.0;
  double p2 = 0.0;
  std::size_t noise_shots = 0;  // 0: exact expectation on the density matrix

  // agent
  std::string agent = "ddqn";
  DdqnConfig ddqn{};
  SaConfig sa{};

  // run
  std::vector<std::uint64_t> seeds{0};
  std::size_t episodes = 1000;
  double wall_clock = 0.0;    // seconds per seed, 0 = unlimited
  double target_error = 0.0;  // stop a seed once its best error is <= this; 0 = never
  std::size_t checkpoint_every = 10;
  bool trace = false;
  std::string label;

  /// Calls f(key, member) for every configurable field.
  template <class Self, class F>
  static void visit(Self& c, F&& f) {
    f("problem.model", c.model);
    f("problem.qubits", c.qubits);
    f("problem.field", c.field);
    f("problem.file", c.hamiltonian_file);
    f("pipeline.chi", c.chi);
    f("pipeline.dmrg_sweeps", c.dmrg_sweeps);
    f("pipeline.layers", c.layers);
    f("pipeline.fit_iters", c.fit_iters);
    f("pipeline.fit_lr", c.fit_lr);
    f("pipeline.seed", c.pipeline_seed);
    f("env.variant", c.variant);
    f("env.max_steps", c.max_steps);
    f("env.threshold", c.threshold);
    f("env.curriculum", c.curriculum);
    f("env.halting_p", c.halting_p);
    f("env.opt_iters", c.opt_iters);
    f("env.opt_lr", c.opt_lr);
    f("backend.kind", c.backend);
    f("backend.shots", c.shots);
    f("backend.p1", c.p1);
    f("backend.p2", c.p2);
    f("backend.noise_shots", c.noise_shots);
    f("agent.kind", c.agent);
    f("ddqn.gamma", c.ddqn.gamma);
    f("ddqn.n_step", c.ddqn.n_step);
    f("ddqn.eps_floor", c.ddqn.eps_floor);
    f("ddqn.eps_decay", c.ddqn.eps_decay);
    f("ddqn.target_sync", c.ddqn.target_sync);
    f("ddqn.batch", c.ddqn.batch);
    f("ddqn.buffer", c.ddqn.buffer);
    f("ddqn.learning_rate", c.ddqn.learning_rate);
    f("ddqn.hidden", c.ddqn.hidden);
    f("ddqn.train_every", c.ddqn.train_every);
    f("ddqn.use_angles", c.ddqn.use_angles);
    f("sa.t0", c.sa.t0);
    f("sa.alpha", c.sa.alpha);
    f("sa.max_iters", c.sa.max_iters);
    f("sa.stable_window", c.sa.stable_window);
    f("sa.stable_tol", c.sa.stable_tol);
    f("run.seeds", c.seeds);
    f("run.episodes", c.episodes);
    f("run.wall_clock", c.wall_clock);
    f("run.target_error", c.target_error);
    f("run.checkpoint_every", c.checkpoint_every);
    f("run.trace", c.trace);
    f("run.label", c.label);
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    visit(*this, [&](const char* key, const auto& v) { j[key] = v; });
    return j;
  }

  /// Overrides the fields present in `j`.
  void merge(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      bool known = false;
      visit(*this, [&](const char* k, auto& field) {
        if (key != k) return;
        known = true;
        try {
          field = value.get<std::decay_t<decltype(field)>>();
        } catch (const nlohmann::json::exception&) {
          throw std::invalid_argument("config: bad value for '" + key + "': " + value.dump());
        }
      });
      if (!known) throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

  /// Applies "key=value"; the value is read as JSON, or as a bare string.
  void set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    merge({{key, value}});
  }

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    c.merge(j);
    c.validate();
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument("config file '" + path + "' is not valid JSON");
    return from_json(j);
  }

  Variant env_variant() const { return parse_variant(variant); }
  AgentKind agent_kind() const { return parse_agent(agent); }

  EnvConfig env_config() const {
    EnvConfig e;
    e.variant = env_variant();
    e.max_steps = max_steps;
    e.threshold = threshold;
    e.curriculum = curriculum;
    e.halting_p = halting_p;
    e.optimizer.max_iters = opt_iters;
    e.optimizer.learning_rate = opt_lr;
    e.backend.kind = parse_backend(backend);
    e.backend.shots = shots;
    e.backend.noise.p1 = p1;
    e.backend.noise.p2 = p2;
    if (noise_shots > 0) e.backend.noise.shots = noise_shots;
    return e;
  }

  SaConfig sa_config() const {
    SaConfig s = sa;
    s.slots = max_steps;
    s.optimizer = env_config().optimizer;
    s.backend = env_config().backend;
    return s;
  }

  DmrgConfig dmrg_config() const {
    DmrgConfig d;
    d.chi_max = chi;
    d.max_sweeps = dmrg_sweeps;
    return d;
  }

  FitConfig fit_config() const {
    FitConfig f;
    f.layers = layers;
    f.max_iters = fit_iters;
    f.adam.learning_rate = fit_lr;
    return f;
  }

  void validate() const {
    if (model != "tfim" && model != "heisenberg" && model != "file")
      throw std::invalid_argument("config: problem.model must be tfim, heisenberg or file");
    if (model == "file" && hamiltonian_file.empty()) throw std::invalid_argument("config: problem.file is required");
    if (model != "file" && qubits < 2) throw std::invalid_argument("config: problem.qubits must be >= 2");
    if (seeds.empty()) throw std::invalid_argument("config: run.seeds must list at least one seed");
    if (wall_clock < 0.0 || target_error < 0.0) throw std::invalid_argument("config: budgets must be >= 0");
    if (checkpoint_every == 0) throw std::invalid_argument("config: run.checkpoint_every must be >= 1");
    if (layers == 0 || fit_iters == 0) throw std::invalid_argument("config: pipeline budgets must be >= 1");
    dmrg_config().validate();
    env_config().validate();
    ddqn.validate();
    sa_config().validate();
    agent_kind();
  }

  std::string method_label() const {
    if (!label.empty()) return label;
    return agent_kind() == AgentKind::sa ? std::string("sa") : agent + "/" + variant;
  }
};

/// Builds the problem Hamiltonian; a missing file fails here, before any compute.
inline PauliSum build_hamiltonian(const RunConfig& cfg) {
  if (cfg.model == "tfim") return build_tfim(cfg.qubits, cfg.field);
  if (cfg.model == "heisenberg") return build_heisenberg(cfg.qubits);
  return load_hamiltonian_file(cfg.hamiltonian_file);
}

}  // namespace tnqas
