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
 * Energy evaluation for the inner loop: exact statevector, finite shots on
 * the statevector, or depolarizing noise on the density matrix (optionally
 * with shots). Every call is counted toward nfev.
 */

#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "tnqas/core/rng.hpp"
#include "tnqas/sim/density_matrix.hpp"
#include "tnqas/sim/shots.hpp"

namespace tnqas {

enum class BackendKind { exact, shots, noisy };

inline const char* backend_name(BackendKind k) {
  switch (k) {
    case BackendKind::exact: return "exact";
    case BackendKind::shots: return "shots";
    case BackendKind::noisy: return "noisy";
  }
  return "?";
}

inline BackendKind parse_backend(const std::string& s) {
  if (s == "exact") return BackendKind::exact;
  if (s == "shots") return BackendKind::shots;
  if (s == "noisy") return BackendKind::noisy;
  throw std::invalid_argument("unknown backend '" + s + "' (expected exact, shots or noisy)");
}

struct BackendConfig {
  BackendKind kind = BackendKind::exact;
  std::size_t shots = 10000;
  NoiseModel noise;  // used by the noisy backend; noise.shots adds sampling on top

  void validate() const {
    if (kind == BackendKind::shots && shots == 0) throw std::invalid_argument("BackendConfig: shots must be >= 1");
    noise.validate();
  }
};

/// Adds the lifetime of the object to `acc`, in seconds.
class Stopwatch {
 public:
  explicit Stopwatch(double& acc) : acc_(acc), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() { acc_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }
  Stopwatch(const Stopwatch&) = delete;
  Stopwatch& operator=(const Stopwatch&) = delete;

 private:
  double& acc_;
  std::chrono::steady_clock::time_point start_;
};

class EnergyEvaluator {
 public:
  EnergyEvaluator(const PauliSum& h, StateVector init, BackendConfig cfg, Rng rng)
      : h_(&h), init_(std::move(init)), cfg_(cfg), rng_(std::move(rng)) {
    cfg_.validate();
    if (init_.n_qubits() != h.n_qubits()) throw std::invalid_argument("EnergyEvaluator: qubit count mismatch");
    if (cfg_.kind == BackendKind::noisy && h.n_qubits() > kDensityQubitLimit)
      throw std::invalid_argument("EnergyEvaluator: noisy backend supports at most " +
                                  std::to_string(kDensityQubitLimit) + " qubits");
  }

  const PauliSum& hamiltonian() const { return *h_; }
  const StateVector& initial_state() const { return init_; }
  const BackendConfig& config() const { return cfg_; }
  bool exact() const { return cfg_.kind == BackendKind::exact; }
  std::size_t nfev() const { return nfev_; }
  void reset_count() { nfev_ = 0; }
  Rng& rng() { return rng_; }

  /// Wall time spent inside the simulator since construction.
  double simulator_seconds() const { return sim_seconds_; }

  double energy(const Circuit& c, std::span<const double> theta) {
    ++nfev_;
    const Stopwatch sw(sim_seconds_);
    switch (cfg_.kind) {
      case BackendKind::exact: return expectation(run_circuit(init_, c, theta), *h_);
      case BackendKind::shots: return expectation_with_shots(run_circuit(init_, c, theta), *h_, cfg_.shots, rng_);
      case BackendKind::noisy: {
        const DensityMatrix rho = run_circuit_noisy(init_, c, theta, cfg_.noise);
        return cfg_.noise.shots ? expectation_with_shots(rho, *h_, *cfg_.noise.shots, rng_) : expectation(rho, *h_);
      }
    }
    return 0.0;
  }

  /// Exact backend only. Charged as one energy plus the 2P evaluations a
  /// parameter-shift gradient would need.
  EnergyGradient energy_and_gradient(const Circuit& c, std::span<const double> theta) {
    if (!exact()) throw std::logic_error("energy_and_gradient: analytic gradients need the exact backend");
    nfev_ += 1 + 2 * theta.size();
    const Stopwatch sw(sim_seconds_);
    return tnqas::energy_and_gradient(init_, c, theta, *h_);
  }

 private:
  const PauliSum* h_;
  StateVector init_;
  BackendConfig cfg_;
  Rng rng_;
  std::size_t nfev_ = 0;
  double sim_seconds_ = 0.0;
};

}  // namespace tnqas
