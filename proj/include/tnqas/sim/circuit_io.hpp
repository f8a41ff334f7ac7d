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
 * Text format for circuits, one gate per line:
 *
 *     qubits <n>
 *     RX <q> <angle>
 *     CNOT <control> <target>
 *
 * Lines starting with '#' are comments. A circuit written with a tag gets
 * a `# <tag>` line after the header (the warm-start circuit uses
 * `# warmstart`). Dense two-qubit gates have no text form.
 */

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "tnqas/pauli/hamiltonian_io.hpp"
#include "tnqas/sim/circuit.hpp"

namespace tnqas {

inline std::string serialize_circuit(const Circuit& c, std::string_view tag = {}) {
  std::string out = "qubits " + std::to_string(c.n_qubits()) + "\n";
  if (!tag.empty()) {
    out += "# ";
    out += tag;
    out += '\n';
  }
  char buf[96];
  for (const auto& g : c.gates()) {
    switch (g.kind) {
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
        std::snprintf(buf, sizeof(buf), "%s %zu %.17g\n", gate_name(g.kind), g.qubits[0], g.angle);
        break;
      case GateKind::CNOT: std::snprintf(buf, sizeof(buf), "CNOT %zu %zu\n", g.qubits[0], g.qubits[1]); break;
      case GateKind::U2Q: throw std::invalid_argument("serialize_circuit: dense two-qubit gates cannot be written");
    }
    out += buf;
  }
  return out;
}

struct ParsedCircuit {
  Circuit circuit;
  /// Comment lines (without the leading '#', trimmed).
  std::vector<std::string> tags;
};

inline ParsedCircuit parse_circuit_file(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  ParsedCircuit out;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (!have_header) {
      std::istringstream hs{std::string(line)};
      std::string key, extra;
      long long n = 0;
      if (!(hs >> key >> n) || key != "qubits" || (hs >> extra) || n <= 0)
        throw ParseError(line_no, "expected header 'qubits <n>'");
      out.circuit = Circuit(static_cast<std::size_t>(n));
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    if (line.front() == '#') {
      out.tags.emplace_back(detail::trim(line.substr(1)));
      continue;
    }
    std::istringstream ls{std::string(line)};
    std::string name, extra;
    long long a = -1, b = -1;
    if (!(ls >> name >> a)) throw ParseError(line_no, "malformed gate line");
    if (a < 0) throw ParseError(line_no, "negative qubit index");
    try {
      if (name == "CNOT") {
        if (!(ls >> b) || b < 0 || (ls >> extra)) throw ParseError(line_no, "expected 'CNOT <control> <target>'");
        out.circuit.add(GateOp::cnot(static_cast<std::size_t>(a), static_cast<std::size_t>(b)));
      } else if (name == "RX" || name == "RY" || name == "RZ") {
        std::string tok;
        double angle = 0.0;
        if (!(ls >> tok) || !detail::parse_double(tok, angle) || (ls >> extra))
          throw ParseError(line_no, "expected '" + name + " <qubit> <angle>'");
        const GateKind k = name == "RX" ? GateKind::RX : name == "RY" ? GateKind::RY : GateKind::RZ;
        out.circuit.add(GateOp::rotation(k, static_cast<std::size_t>(a), angle));
      } else {
        throw ParseError(line_no, "unknown gate '" + name + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!have_header) throw ParseError(1, "empty file, expected header 'qubits <n>'");
  return out;
}

inline void save_circuit_file(const std::string& path, const Circuit& c, std::string_view tag = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write circuit file '" + path + "'");
  out << serialize_circuit(c, tag);
}

inline ParsedCircuit load_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_circuit_file(ss.str());
}

}  // namespace tnqas
