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

#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "tnqas/pauli/pauli_sum.hpp"
#include "tnqas/sim/circuit.hpp"

namespace tnqas {

namespace kernels {

// All kernels act on a column of 2^n amplitudes; qubit q addresses bit n-1-q.

inline void apply_1q(cplx* psi, std::size_t n, std::size_t q, const Matrix2& u) {
  const std::size_t dim = dim_of(n);
  const std::size_t bit = std::size_t{1} << (n - 1 - q);
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const cplx a0 = psi[i], a1 = psi[i | bit];
    psi[i] = u(0, 0) * a0 + u(0, 1) * a1;
    psi[i | bit] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

inline void apply_cnot(cplx* psi, std::size_t n, std::size_t control, std::size_t target) {
  const std::size_t dim = dim_of(n);
  const std::size_t cb = std::size_t{1} << (n - 1 - control);
  const std::size_t tb = std::size_t{1} << (n - 1 - target);
  for (std::size_t i = 0; i < dim; ++i)
    if ((i & cb) && !(i & tb)) std::swap(psi[i], psi[i | tb]);
}

inline void apply_2q(cplx* psi, std::size_t n, std::size_t q0, std::size_t q1, const Matrix4& u) {
  const std::size_t dim = dim_of(n);
  const std::size_t b0 = std::size_t{1} << (n - 1 - q0);
  const std::size_t b1 = std::size_t{1} << (n - 1 - q1);
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & b0) || (i & b1)) continue;
    const std::size_t idx[4] = {i, i | b1, i | b0, i | b0 | b1};
    cplx a[4];
    for (int k = 0; k < 4; ++k) a[k] = psi[idx[k]];
    for (int r = 0; r < 4; ++r) psi[idx[r]] = u(r, 0) * a[0] + u(r, 1) * a[1] + u(r, 2) * a[2] + u(r, 3) * a[3];
  }
}

inline void apply_gate(cplx* psi, std::size_t n, const GateOp& g, bool adjoint = false) {
  switch (g.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ: {
      const Matrix2 u = g.single_qubit_matrix();
      apply_1q(psi, n, g.qubits[0], adjoint ? Matrix2(u.adjoint()) : u);
      break;
    }
    case GateKind::CNOT: apply_cnot(psi, n, g.qubits[0], g.qubits[1]); break;
    case GateKind::U2Q:
      apply_2q(psi, n, g.qubits[0], g.qubits[1], adjoint ? Matrix4(g.matrix->adjoint()) : *g.matrix);
      break;
  }
}

}  // namespace kernels

/// Normalised amplitude vector over n qubits.
class StateVector {
 public:
  StateVector() = default;

  static StateVector zero_state(std::size_t n) {
    StateVector s;
    s.n_ = n;
    s.amps_ = Vector::Zero(static_cast<Eigen::Index>(dim_of(n)));
    s.amps_[0] = 1.0;
    return s;
  }

  /// Validates the dimension; the input must already be normalised (1e-8).
  static StateVector from_amplitudes(Vector amps) {
    const auto d = static_cast<std::size_t>(amps.size());
    if (d == 0 || (d & (d - 1)) != 0) throw std::invalid_argument("StateVector: dimension is not a power of two");
    if (std::abs(amps.norm() - 1.0) > 1e-8) throw std::invalid_argument("StateVector: amplitudes are not normalised");
    StateVector s;
    s.n_ = static_cast<std::size_t>(std::countr_zero(d));
    s.amps_ = std::move(amps);
    return s;
  }

  std::size_t n_qubits() const { return n_; }
  const Vector& amplitudes() const { return amps_; }
  Vector& amplitudes() { return amps_; }
  double norm() const { return amps_.norm(); }

  void apply(const GateOp& g) {
    check_gate(g);
    kernels::apply_gate(amps_.data(), n_, g);
  }
  void apply_adjoint(const GateOp& g) {
    check_gate(g);
    kernels::apply_gate(amps_.data(), n_, g, true);
  }

 private:
  void check_gate(const GateOp& g) const {
    for (std::size_t i = 0; i < g.arity(); ++i)
      if (g.qubits[i] >= n_)
        throw std::out_of_range("gate qubit " + std::to_string(g.qubits[i]) + " out of range for " +
                                std::to_string(n_) + " qubits");
  }

  std::size_t n_ = 0;
  Vector amps_;
};

inline StateVector apply_gate(StateVector s, const GateOp& g) {
  s.apply(g);
  return s;
}

/// Applies the circuit to `init` with rotation angles bound from theta.
inline StateVector run_circuit(const StateVector& init, const Circuit& c, std::span<const double> theta) {
  if (theta.size() != c.parameter_count())
    throw std::invalid_argument("run_circuit: expected " + std::to_string(c.parameter_count()) +
                                " parameters, got " + std::to_string(theta.size()));
  if (init.n_qubits() != c.n_qubits()) throw std::invalid_argument("run_circuit: qubit count mismatch");
  StateVector s = init;
  std::size_t k = 0;
  for (const auto& g : c.gates()) {
    if (is_rotation(g.kind)) {
      GateOp bound = g;
      bound.angle = theta[k++];
      s.apply(bound);
    } else {
      s.apply(g);
    }
  }
  return s;
}

/// Uses the angles stored in the circuit.
inline StateVector run_circuit(const StateVector& init, const Circuit& c) {
  const auto theta = c.parameters();
  return run_circuit(init, c, theta);
}

inline double expectation(const Vector& psi, const PauliSum& h) {
  const std::size_t dim = dim_of(h.n_qubits());
  if (static_cast<std::size_t>(psi.size()) != dim) throw std::invalid_argument("expectation: dimension mismatch");
  double e = 0.0;
  for (const auto& t : h.terms()) {
    const std::uint64_t x = t.string.x_mask();
    cplx acc = 0.0;
    for (std::uint64_t b = 0; b < dim; ++b)
      acc += std::conj(psi[static_cast<Eigen::Index>(b ^ x)]) * t.string.phase(b) * psi[static_cast<Eigen::Index>(b)];
    e += t.coefficient * acc.real();
  }
  return e;
}

inline double expectation(const StateVector& s, const PauliSum& h) { return expectation(s.amplitudes(), h); }

struct EnergyGradient {
  double energy = 0.0;
  std::vector<double> gradient;
};

/// Energy <psi(theta)|H|psi(theta)> and its exact gradient by reverse-mode
/// (adjoint) differentiation. Mathematically identical to the two-term
/// parameter-shift rule for half-angle rotations.
inline EnergyGradient energy_and_gradient(const StateVector& init, const Circuit& c, std::span<const double> theta,
                                          const PauliSum& h) {
  const Circuit bound = c.with_parameters(theta);
  StateVector psi = run_circuit(init, bound);
  EnergyGradient out;
  out.energy = expectation(psi, h);
  out.gradient.assign(theta.size(), 0.0);
  StateVector lambda = psi;
  lambda.amplitudes() = apply_hamiltonian(h, psi.amplitudes());

  const std::size_t n = c.n_qubits();
  std::size_t k = theta.size();
  const auto& gates = bound.gates();
  for (std::size_t gi = gates.size(); gi-- > 0;) {
    const GateOp& g = gates[gi];
    if (is_rotation(g.kind)) {
      --k;
      // dE/dtheta = Im <lambda| P |psi_after>, P the generator of the rotation.
      const std::size_t bit = std::size_t{1} << (n - 1 - g.qubits[0]);
      const cplx* l = lambda.amplitudes().data();
      const cplx* p = psi.amplitudes().data();
      cplx acc = 0.0;
      const std::size_t dim = dim_of(n);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const cplx p0 = p[i], p1 = p[i | bit];
        cplx q0, q1;
        switch (g.kind) {
          case GateKind::RX: q0 = p1; q1 = p0; break;
          case GateKind::RY: q0 = -kI * p1; q1 = kI * p0; break;
          default: q0 = p0; q1 = -p1; break;
        }
        acc += std::conj(l[i]) * q0 + std::conj(l[i | bit]) * q1;
      }
      out.gradient[k] = acc.imag();
    }
    psi.apply_adjoint(g);
    lambda.apply_adjoint(g);
  }
  return out;
}

}  // namespace tnqas
