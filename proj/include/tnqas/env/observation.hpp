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
 * Binary circuit encoding seen by the agent.
 *
 * Shape slots x N x (N + 3), flattened as [slot][qubit][channel]. Channels
 * 0..N-1 hold CNOTs (a 1 at the control row, target column); channels N,
 * N+1, N+2 hold RX, RY, RZ. Gates are packed greedily into moments. A
 * warm-start prefix, when present, occupies its own leading slots so agent
 * gates always start at slot prefix_slots.
 *
 * A parallel real tensor of shape slots x N x 3 carries rotation angles
 * (wrapped to (-pi, pi] and divided by pi); zeros elsewhere.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tnqas/sim/circuit.hpp"

namespace tnqas {

struct ObservationLayout {
  std::size_t n_qubits = 0;
  std::size_t prefix_slots = 0;
  std::size_t agent_slots = 0;

  std::size_t slots() const { return prefix_slots + agent_slots; }
  std::size_t channels() const { return n_qubits + 3; }
  std::size_t binary_size() const { return slots() * n_qubits * channels(); }
  std::size_t angle_size() const { return slots() * n_qubits * 3; }
  std::size_t binary_index(std::size_t slot, std::size_t q, std::size_t ch) const {
    return (slot * n_qubits + q) * channels() + ch;
  }
  std::size_t angle_index(std::size_t slot, std::size_t q, std::size_t axis) const {
    return (slot * n_qubits + q) * 3 + axis;
  }
};

struct ObservationTensor {
  ObservationLayout layout;
  std::vector<float> binary;
  std::vector<float> angles;
};

namespace detail {

inline void encode_block(ObservationTensor& obs, const Circuit& c, std::size_t first_slot, std::size_t slot_count) {
  const auto& lay = obs.layout;
  const auto moments = moment_indices(c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const GateOp& g = c.gates()[i];
    if (moments[i] >= slot_count)
      throw std::length_error("encode_observation: circuit needs " + std::to_string(moments[i] + 1) +
                              " slots, only " + std::to_string(slot_count) + " available");
    const std::size_t slot = first_slot + moments[i];
    if (g.kind == GateKind::CNOT) {
      obs.binary[lay.binary_index(slot, g.qubits[0], g.qubits[1])] = 1.0f;
    } else if (is_rotation(g.kind)) {
      const auto axis = static_cast<std::size_t>(g.kind);
      obs.binary[lay.binary_index(slot, g.qubits[0], lay.n_qubits + axis)] = 1.0f;
      obs.angles[lay.angle_index(slot, g.qubits[0], axis)] = static_cast<float>(wrap_angle(g.angle) / kPi);
    } else {
      throw std::invalid_argument("encode_observation: dense gates cannot be encoded");
    }
  }
}

}  // namespace detail

/// `prefix` may be null (fixed and vanilla variants carry no warm-start rows).
inline ObservationTensor encode_observation(const ObservationLayout& layout, const Circuit* prefix, const Circuit& agent) {
  if (agent.n_qubits() != layout.n_qubits || (prefix && prefix->n_qubits() != layout.n_qubits))
    throw std::invalid_argument("encode_observation: qubit count mismatch");
  ObservationTensor obs{layout, std::vector<float>(layout.binary_size(), 0.0f), std::vector<float>(layout.angle_size(), 0.0f)};
  if (prefix) detail::encode_block(obs, *prefix, 0, layout.prefix_slots);
  detail::encode_block(obs, agent, layout.prefix_slots, layout.agent_slots);
  return obs;
}

}  // namespace tnqas
