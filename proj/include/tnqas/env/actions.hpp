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
 * Agent action space over the gate pool {RX, RY, RZ, CNOT}.
 *
 * Index layout for N qubits: a < 3N is a rotation with axis a / N (X, Y, Z)
 * on qubit a % N; the remaining N(N-1) indices are ordered CNOT pairs in
 * row-major (control, target) order with the diagonal skipped.
 */

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnqas/sim/circuit.hpp"

namespace tnqas {

struct Action {
  GateKind kind = GateKind::RX;
  std::size_t q0 = 0;  // rotation qubit, or CNOT control
  std::size_t q1 = 0;  // CNOT target

  bool operator==(const Action&) const = default;

  /// New rotations start at angle 0.
  GateOp gate() const { return kind == GateKind::CNOT ? GateOp::cnot(q0, q1) : GateOp::rotation(kind, q0, 0.0); }
};

class ActionSpace {
 public:
  ActionSpace() = default;
  explicit ActionSpace(std::size_t n) : n_(n) {
    if (n < 2) throw std::invalid_argument("ActionSpace: need at least 2 qubits");
  }

  std::size_t n_qubits() const { return n_; }
  std::size_t size() const { return 3 * n_ + n_ * (n_ - 1); }

  Action decode(std::size_t a) const {
    if (a >= size()) throw std::out_of_range("ActionSpace: index " + std::to_string(a) + " out of range");
    if (a < 3 * n_) return {static_cast<GateKind>(a / n_), a % n_, a % n_};
    const std::size_t k = a - 3 * n_;
    const std::size_t c = k / (n_ - 1);
    std::size_t t = k % (n_ - 1);
    if (t >= c) ++t;
    return {GateKind::CNOT, c, t};
  }

  std::size_t encode(const Action& act) const {
    if (act.q0 >= n_ || act.q1 >= n_) throw std::out_of_range("ActionSpace: qubit out of range");
    if (is_rotation(act.kind)) return static_cast<std::size_t>(act.kind) * n_ + act.q0;
    if (act.kind != GateKind::CNOT || act.q0 == act.q1) throw std::invalid_argument("ActionSpace: not a pool action");
    return 3 * n_ + act.q0 * (n_ - 1) + (act.q1 > act.q0 ? act.q1 - 1 : act.q1);
  }

  /// Pool action equal to a circuit gate, if it is one.
  std::optional<std::size_t> index_of(const GateOp& g) const {
    if (g.kind == GateKind::U2Q) return std::nullopt;
    return encode({g.kind, g.qubits[0], g.qubits[1]});
  }

 private:
  std::size_t n_ = 0;
};

/// Legal-action mask (1 = legal). Repeating the immediately preceding gate
/// (same axis and qubit, or same directed CNOT pair) is illegal.
inline std::vector<std::uint8_t> legal_actions(const ActionSpace& space, const std::optional<GateOp>& last) {
  std::vector<std::uint8_t> mask(space.size(), 1);
  if (last) {
    if (const auto idx = space.index_of(*last)) mask[*idx] = 0;
  }
  return mask;
}

}  // namespace tnqas
