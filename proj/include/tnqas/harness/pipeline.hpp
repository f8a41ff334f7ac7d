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
 * Steps 1-2 of a run: DMRG ground state, brickwork fit, transpilation.
 * Files written into a run directory:
 *   mps.json           the DMRG state as a dense statevector plus its chi
 *   dmrg.json          DMRG energy, convergence, exact energy when known
 *   warmstart.circuit  transpiled circuit with fitted angles
 *   pipeline.json      fit overlap, transpile fidelity, gate counts
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "tnqas/harness/config.hpp"
#include "tnqas/sim/circuit_io.hpp"
#include "tnqas/stiefel/kak.hpp"
#include "tnqas/tensornet/mpo.hpp"

namespace tnqas {

/// Dense diagonalisation is used as the reference up to this size.
inline constexpr std::size_t kExactOracleQubits = 16;

inline std::optional<double> exact_reference(const PauliSum& h) {
  if (h.n_qubits() > kExactOracleQubits) return std::nullopt;
  return exact_ground_energy(h).energy;
}

struct DmrgArtifacts {
  Mps mps;
  double energy = 0.0;
  bool converged = false;
  std::size_t sweeps = 0;
  double truncation_error = 0.0;
  std::optional<double> exact_energy;

  /// DMRG energy minus the exact energy.
  std::optional<double> residual() const {
    if (!exact_energy) return std::nullopt;
    return energy - *exact_energy;
  }
};

struct FitArtifacts {
  double overlap = 0.0;
  std::size_t iterations = 0;
  Circuit circuit;
  double transpile_fidelity = 0.0;
  double circuit_energy = 0.0;
};

struct PipelineArtifacts {
  DmrgArtifacts dmrg;
  FitArtifacts fit;
};

inline DmrgArtifacts run_dmrg(const RunConfig& cfg, const PauliSum& h) {
  Rng rng = make_stream(cfg.pipeline_seed, "dmrg-init");
  const DmrgResult r = dmrg_ground_state(mpo_from_pauli_sum(h), cfg.dmrg_config(), rng);
  DmrgArtifacts out;
  out.mps = r.state;
  out.energy = r.energy;
  out.converged = r.converged;
  out.sweeps = r.sweep_energies.size();
  out.truncation_error = r.truncation_error;
  out.exact_energy = exact_reference(h);
  return out;
}

inline FitArtifacts run_fit(const RunConfig& cfg, const PauliSum& h, const Mps& mps) {
  Rng rng = make_stream(cfg.pipeline_seed, "fit-init");
  const FitResult f = fit_mps_to_circuit(mps, cfg.fit_config(), rng);
  FitArtifacts out;
  out.overlap = f.loss;
  out.iterations = f.iterations;
  out.circuit = transpile_stack(f.stack);
  const StateVector circ = run_circuit(StateVector::zero_state(h.n_qubits()), out.circuit);
  out.transpile_fidelity = std::norm(stack_statevector(f.stack).amplitudes().dot(circ.amplitudes()));
  out.circuit_energy = expectation(circ, h);
  return out;
}

namespace detail {

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << j.dump(2) << "\n";
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open '" + p.string() + "'");
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("'" + p.string() + "' is not valid JSON");
  return j;
}

inline nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace detail

inline void save_dmrg(const std::filesystem::path& dir, const DmrgArtifacts& d) {
  std::filesystem::create_directories(dir);
  const StateVector sv = statevector_from_mps(d.mps);
  std::vector<double> re, im;
  for (const cplx a : sv.amplitudes()) {
    re.push_back(a.real());
    im.push_back(a.imag());
  }
  detail::write_json(dir / "mps.json", {{"qubits", sv.n_qubits()}, {"chi", d.mps.chi_max}, {"re", re}, {"im", im}});
  detail::write_json(dir / "dmrg.json", {{"energy", d.energy},
                                         {"converged", d.converged},
                                         {"sweeps", d.sweeps},
                                         {"truncation_error", d.truncation_error},
                                         {"exact_energy", detail::optional_json(d.exact_energy)},
                                         {"residual", detail::optional_json(d.residual())}});
}

inline DmrgArtifacts load_dmrg(const std::filesystem::path& dir) {
  const auto m = detail::read_json(dir / "mps.json");
  const auto re = m.at("re").get<std::vector<double>>(), im = m.at("im").get<std::vector<double>>();
  if (re.size() != im.size()) throw std::runtime_error("mps.json: re/im length mismatch");
  Vector amps(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) amps[static_cast<Eigen::Index>(i)] = cplx(re[i], im[i]);
  DmrgArtifacts d;
  d.mps = mps_from_statevector(StateVector::from_amplitudes(amps), m.at("chi").get<std::size_t>());
  const auto j = detail::read_json(dir / "dmrg.json");
  d.energy = j.at("energy");
  d.converged = j.at("converged");
  d.sweeps = j.at("sweeps");
  d.truncation_error = j.at("truncation_error");
  if (!j.at("exact_energy").is_null()) d.exact_energy = j.at("exact_energy").get<double>();
  return d;
}

inline void save_fit(const std::filesystem::path& dir, const FitArtifacts& f) {
  std::filesystem::create_directories(dir);
  save_circuit_file((dir / "warmstart.circuit").string(), f.circuit, "warm-start");
  const GateCounts gc = count_gates(f.circuit);
  detail::write_json(dir / "pipeline.json", {{"fit_overlap", f.overlap},
                                             {"fit_iterations", f.iterations},
                                             {"transpile_fidelity", f.transpile_fidelity},
                                             {"circuit_energy", f.circuit_energy},
                                             {"cnot", gc.cnot},
                                             {"rot", gc.rotation},
                                             {"depth", circuit_depth(f.circuit)}});
}

inline Circuit load_warmstart(const std::filesystem::path& dir) {
  const auto p = dir / "warmstart.circuit";
  if (!std::filesystem::exists(p)) throw std::runtime_error("no warm-start circuit at '" + p.string() + "' (run fit first)");
  return load_circuit_file(p.string()).circuit;
}

/// Runs DMRG, fit and transpilation; persists everything when `dir` is set.
/// A DMRG run that hits its sweep cap is recorded as unconverged and used as is.
inline PipelineArtifacts run_pipeline(const RunConfig& cfg, const PauliSum& h,
                                      const std::optional<std::filesystem::path>& dir = std::nullopt) {
  PipelineArtifacts a;
  a.dmrg = run_dmrg(cfg, h);
  if (dir) save_dmrg(*dir, a.dmrg);
  a.fit = run_fit(cfg, h, a.dmrg.mps);
  if (dir) save_fit(*dir, a.fit);
  return a;
}

}  // namespace tnqas
