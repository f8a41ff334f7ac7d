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
 * Per-episode metrics as JSON lines, one file per seed.
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tnqas/sim/circuit_io.hpp"

namespace tnqas {

struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::size_t episode = 0;
  bool success = false;             // error below the target threshold
  bool curriculum_success = false;  // met the moving curriculum threshold
  std::size_t steps = 0;
  double best_energy = 0.0;
  double reference = 0.0;  // exact energy, or the fake minimum without one
  double error = 0.0;      // best_energy - reference
  std::size_t depth = 0;
  std::size_t cnot = 0;
  std::size_t rot = 0;
  std::size_t nfev = 0;
  double epsilon = 0.0;
  double loss = 0.0;
  std::string circuit;  // best counted circuit, circuit-file text
  // Timing; excluded from determinism checks.
  double wall_time = 0.0;
  double sim_time = 0.0;
  double opt_time = 0.0;  // optimizer bookkeeping outside the simulator
  double agent_time = 0.0;

  /// Fills the circuit metrics from `c`.
  void set_circuit(const Circuit& c) {
    const GateCounts g = count_gates(c);
    depth = circuit_depth(c);
    cnot = g.cnot;
    rot = g.rotation;
    circuit = serialize_circuit(c);
  }
};

inline nlohmann::json deterministic_json(const EpisodeRecord& r) {
  return {{"seed", r.seed},         {"episode", r.episode}, {"success", r.success},
          {"curriculum_success", r.curriculum_success},     {"steps", r.steps},
          {"best_energy", r.best_energy},                   {"reference", r.reference},
          {"error", r.error},       {"depth", r.depth},     {"cnot", r.cnot},
          {"rot", r.rot},           {"nfev", r.nfev},       {"epsilon", r.epsilon},
          {"loss", r.loss},         {"circuit", r.circuit}};
}

inline nlohmann::json to_json(const EpisodeRecord& r) {
  auto j = deterministic_json(r);
  j["wall_time"] = r.wall_time;
  j["sim_time"] = r.sim_time;
  j["opt_time"] = r.opt_time;
  j["agent_time"] = r.agent_time;
  return j;
}

inline EpisodeRecord record_from_json(const nlohmann::json& j) {
  EpisodeRecord r;
  r.seed = j.at("seed");
  r.episode = j.at("episode");
  r.success = j.at("success");
  r.curriculum_success = j.at("curriculum_success");
  r.steps = j.at("steps");
  r.best_energy = j.at("best_energy");
  r.reference = j.at("reference");
  r.error = j.at("error");
  r.depth = j.at("depth");
  r.cnot = j.at("cnot");
  r.rot = j.at("rot");
  r.nfev = j.at("nfev");
  r.epsilon = j.at("epsilon");
  r.loss = j.at("loss");
  r.circuit = j.at("circuit");
  r.wall_time = j.value("wall_time", 0.0);
  r.sim_time = j.value("sim_time", 0.0);
  r.opt_time = j.value("opt_time", 0.0);
  r.agent_time = j.value("agent_time", 0.0);
  return r;
}

inline std::filesystem::path records_path(const std::filesystem::path& dir, std::uint64_t seed) {
  return dir / ("records-" + std::to_string(seed) + ".jsonl");
}

/// Appends one line per record and flushes after each.
class RecordWriter {
 public:
  RecordWriter(const std::filesystem::path& path, bool append) : out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open records file '" + path.string() + "'");
  }
  void write(const EpisodeRecord& r) { write_line(to_json(r).dump()); }
  void write_line(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

using WarningSink = std::function<void(const std::string&)>;

/// Reads a records file. Lines that fail to parse are skipped and reported
/// through `warn`; a missing file reads as empty.
inline std::vector<EpisodeRecord> read_records(const std::filesystem::path& path, const WarningSink& warn = {}) {
  std::vector<EpisodeRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      if (warn) warn(path.string() + ":" + std::to_string(line_no) + ": skipping corrupt record (" + e.what() + ")");
    }
  }
  return out;
}

/// Rewrites `path` keeping only records with episode < `episodes`, in order.
inline std::vector<EpisodeRecord> truncate_records(const std::filesystem::path& path, std::size_t episodes,
                                                   const WarningSink& warn = {}) {
  std::vector<EpisodeRecord> kept;
  for (auto& r : read_records(path, warn))
    if (r.episode < episodes) kept.push_back(std::move(r));
  const auto tmp = path.string() + ".tmp";
  {
    RecordWriter w(tmp, false);
    for (const auto& r : kept) w.write(r);
  }
  std::filesystem::rename(tmp, path);
  return kept;
}

}  // namespace tnqas
