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
 * Gates over the pool {RX, RY, RZ, CNOT} plus an internal dense two-qubit
 * gate, and circuits built from them.
 *
 * Rotations use the half-angle convention RX(t) = exp(-i t X / 2), and
 * likewise for RY and RZ. Every rotation in a circuit is a trainable
 * parameter, numbered in gate order.
 */

#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnqas/core/linalg.hpp"

namespace tnqas {

enum class GateKind : std::uint8_t { RX, RY, RZ, CNOT, U2Q };

inline bool is_rotation(GateKind k) { return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ; }

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::U2Q: return "U2Q";
  }
  return "?";
}

inline Matrix2 rx_matrix(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  Matrix2 m;
  m << c, cplx(0, -s), cplx(0, -s), c;
  return m;
}

inline Matrix2 ry_matrix(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  Matrix2 m;
  m << c, -s, s, c;
  return m;
}

inline Matrix2 rz_matrix(double t) {
  Matrix2 m;
  m << std::polar(1.0, -t / 2), 0, 0, std::polar(1.0, t / 2);
  return m;
}

/// Wraps to (-pi, pi]; for half-angle rotations this only flips the global sign.
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

inline Matrix4 cnot_matrix() {
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

struct GateOp {
  GateKind kind = GateKind::RX;
  /// Rotations use qubits[0]; CNOT is (control, target); U2Q acts on
  /// (qubits[0], qubits[1]) with qubits[0] the more significant factor.
  std::array<std::size_t, 2> qubits{0, 0};
  double angle = 0.0;
  std::shared_ptr<const Matrix4> matrix;

  static GateOp rotation(GateKind k, std::size_t q, double angle) {
    if (!is_rotation(k)) throw std::invalid_argument("GateOp::rotation: not a rotation kind");
    if (!std::isfinite(angle)) throw std::invalid_argument("GateOp::rotation: non-finite angle");
    return GateOp{k, {q, q}, angle, nullptr};
  }
  static GateOp rx(std::size_t q, double a) { return rotation(GateKind::RX, q, a); }
  static GateOp ry(std::size_t q, double a) { return rotation(GateKind::RY, q, a); }
  static GateOp rz(std::size_t q, double a) { return rotation(GateKind::RZ, q, a); }
  static GateOp cnot(std::size_t control, std::size_t target) {
    if (control == target) throw std::invalid_argument("GateOp::cnot: control equals target");
    return GateOp{GateKind::CNOT, {control, target}, 0.0, nullptr};
  }
  static GateOp unitary(std::size_t q0, std::size_t q1, const Matrix4& u) {
    if (q0 == q1) throw std::invalid_argument("GateOp::unitary: repeated qubit");
    return GateOp{GateKind::U2Q, {q0, q1}, 0.0, std::make_shared<const Matrix4>(u)};
  }

  bool two_qubit() const { return kind == GateKind::CNOT || kind == GateKind::U2Q; }
  std::size_t arity() const { return two_qubit() ? 2 : 1; }

  Matrix2 single_qubit_matrix() const {
    switch (kind) {
      case GateKind::RX: return rx_matrix(angle);
      case GateKind::RY: return ry_matrix(angle);
      case GateKind::RZ: return rz_matrix(angle);
      default: throw std::logic_error("single_qubit_matrix on a two-qubit gate");
    }
  }

  /// Same kind and qubits; angles ignored.
  bool same_placement(const GateOp& o) const { return kind == o.kind && qubits == o.qubits; }
};

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits == 0) throw std::invalid_argument("Circuit: qubit count must be positive");
  }

  std::size_t n_qubits() const { return n_qubits_; }
  const std::vector<GateOp>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  void add(const GateOp& g) {
    for (std::size_t i = 0; i < g.arity(); ++i)
      if (g.qubits[i] >= n_qubits_)
        throw std::out_of_range("Circuit::add: qubit " + std::to_string(g.qubits[i]) + " out of range for " +
                                std::to_string(n_qubits_) + " qubits");
    if (g.two_qubit() && g.qubits[0] == g.qubits[1]) throw std::invalid_argument("Circuit::add: repeated qubit");
    if (g.kind == GateKind::U2Q && !g.matrix) throw std::invalid_argument("Circuit::add: U2Q without matrix");
    if (is_rotation(g.kind)) ++n_params_;
    gates_.push_back(g);
  }

  void append(const Circuit& other) {
    if (other.n_qubits_ != n_qubits_) throw std::invalid_argument("Circuit::append: qubit count mismatch");
    for (const auto& g : other.gates_) add(g);
  }

  /// Number of trainable rotation angles.
  std::size_t parameter_count() const { return n_params_; }

  std::vector<double> parameters() const {
    std::vector<double> p;
    p.reserve(n_params_);
    for (const auto& g : gates_)
      if (is_rotation(g.kind)) p.push_back(g.angle);
    return p;
  }

  void set_parameters(std::span<const double> theta) {
    if (theta.size() != n_params_)
      throw std::invalid_argument("Circuit::set_parameters: expected " + std::to_string(n_params_) +
                                  " parameters, got " + std::to_string(theta.size()));
    std::size_t k = 0;
    for (auto& g : gates_)
      if (is_rotation(g.kind)) g.angle = theta[k++];
  }

  Circuit with_parameters(std::span<const double> theta) const {
    Circuit c = *this;
    c.set_parameters(theta);
    return c;
  }

 private:
  std::size_t n_qubits_ = 0;
  std::vector<GateOp> gates_;
  std::size_t n_params_ = 0;
};

struct GateCounts {
  std::size_t cnot = 0;
  std::size_t rotation = 0;
  std::size_t other = 0;
};

inline GateCounts count_gates(const Circuit& c) {
  GateCounts out;
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::CNOT)
      ++out.cnot;
    else if (is_rotation(g.kind))
      ++out.rotation;
    else
      ++out.other;
  }
  return out;
}

/// Moment index of every gate under greedy left packing.
inline std::vector<std::size_t> moment_indices(const Circuit& c) {
  std::vector<std::size_t> free_at(c.n_qubits(), 0);
  std::vector<std::size_t> out;
  out.reserve(c.size());
  for (const auto& g : c.gates()) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < g.arity(); ++i) m = std::max(m, free_at[g.qubits[i]]);
    for (std::size_t i = 0; i < g.arity(); ++i) free_at[g.qubits[i]] = m + 1;
    out.push_back(m);
  }
  return out;
}

/// Number of moments when each gate is packed into the earliest moment
/// where all its qubits are free.
inline std::size_t circuit_depth(const Circuit& c) {
  std::size_t depth = 0;
  for (const std::size_t m : moment_indices(c)) depth = std::max(depth, m + 1);
  return depth;
}

}  // namespace tnqas
