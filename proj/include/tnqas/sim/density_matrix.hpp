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
 * Mixed-state simulation with depolarizing gate noise.
 *
 * The k-qubit depolarizing channel on a qubit subset S is
 *   E(rho) = (1 - p) rho + p Tr_S(rho) (x) I_S / 2^k,
 * applied after every gate on the gate's own qubits: p1 after rotations,
 * p2 after CNOT (and dense two-qubit gates).
 */

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnqas/sim/statevector.hpp"

namespace tnqas {

/// Largest qubit count for the density-matrix backend.
inline constexpr std::size_t kDensityQubitLimit = 8;

struct NoiseModel {
  double p1 = 0.0;
  double p2 = 0.0;
  /// Samples per Pauli term; nullopt means exact expectation values.
  std::optional<std::size_t> shots;

  void validate() const {
    if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0))
      throw std::invalid_argument("NoiseModel: depolarizing rates must lie in [0, 1]");
    if (shots && *shots == 0) throw std::invalid_argument("NoiseModel: shots must be >= 1");
  }
  bool noiseless() const { return p1 == 0.0 && p2 == 0.0; }
};

class DensityMatrix {
 public:
  DensityMatrix() = default;

  static DensityMatrix pure(const StateVector& s) {
    if (s.n_qubits() > kDensityQubitLimit)
      throw std::invalid_argument("DensityMatrix: " + std::to_string(s.n_qubits()) + " qubits exceeds limit " +
                                  std::to_string(kDensityQubitLimit));
    DensityMatrix d;
    d.n_ = s.n_qubits();
    d.rho_ = s.amplitudes() * s.amplitudes().adjoint();
    return d;
  }

  static DensityMatrix from_matrix(Matrix rho) {
    const auto d = static_cast<std::size_t>(rho.rows());
    if (rho.rows() != rho.cols() || d == 0 || (d & (d - 1)) != 0)
      throw std::invalid_argument("DensityMatrix: matrix must be square with power-of-two size");
    DensityMatrix out;
    out.n_ = static_cast<std::size_t>(std::countr_zero(d));
    out.rho_ = std::move(rho);
    return out;
  }

  std::size_t n_qubits() const { return n_; }
  const Matrix& matrix() const { return rho_; }

  /// rho -> U rho U^dagger.
  void apply(const GateOp& g) {
    for (std::size_t i = 0; i < g.arity(); ++i)
      if (g.qubits[i] >= n_) throw std::out_of_range("gate qubit out of range");
    const auto d = rho_.cols();
    for (Eigen::Index c = 0; c < d; ++c) kernels::apply_gate(rho_.col(c).data(), n_, g);
    rho_.adjointInPlace();
    for (Eigen::Index c = 0; c < d; ++c) kernels::apply_gate(rho_.col(c).data(), n_, g);
    rho_.adjointInPlace();
  }

  /// rho -> u rho u^dagger for a single-qubit unitary.
  void apply_1q(std::size_t q, const Matrix2& u) {
    if (q >= n_) throw std::out_of_range("apply_1q: qubit out of range");
    const auto d = rho_.cols();
    for (Eigen::Index c = 0; c < d; ++c) kernels::apply_1q(rho_.col(c).data(), n_, q, u);
    rho_.adjointInPlace();
    for (Eigen::Index c = 0; c < d; ++c) kernels::apply_1q(rho_.col(c).data(), n_, q, u);
    rho_.adjointInPlace();
  }

  /// Depolarizing channel on the listed qubits (all qubits gives the global
  /// channel).
  void depolarize(std::span<const std::size_t> qubits, double p) {
    if (p == 0.0) return;
    std::size_t mask = 0;
    for (const std::size_t q : qubits) {
      if (q >= n_) throw std::out_of_range("depolarize: qubit out of range");
      mask |= std::size_t{1} << (n_ - 1 - q);
    }
    const double weight = 1.0 / static_cast<double>(std::size_t{1} << qubits.size());
    std::vector<std::size_t> subs;
    for (std::size_t s = 0;; s = (s - mask) & mask) {  // all subsets of mask
      subs.push_back(s);
      if (((s - mask) & mask) == 0) break;
    }
    const std::size_t dim = dim_of(n_);
    for (std::size_t r = 0; r < dim; ++r) {
      if (r & mask) continue;
      for (std::size_t c = 0; c < dim; ++c) {
        if (c & mask) continue;
        cplx trace = 0.0;
        for (const std::size_t s : subs) trace += rho_(static_cast<Eigen::Index>(r | s), static_cast<Eigen::Index>(c | s));
        for (const std::size_t s : subs)
          for (const std::size_t t : subs) {
            cplx& v = rho_(static_cast<Eigen::Index>(r | s), static_cast<Eigen::Index>(c | t));
            v *= (1.0 - p);
            if (s == t) v += p * weight * trace;
          }
      }
    }
  }

  void depolarize_all(double p) {
    std::vector<std::size_t> all(n_);
    for (std::size_t q = 0; q < n_; ++q) all[q] = q;
    depolarize(all, p);
  }

  double trace() const { return rho_.trace().real(); }

 private:
  std::size_t n_ = 0;
  Matrix rho_;
};

/// Tr(rho H).
inline double expectation(const DensityMatrix& rho, const PauliSum& h) {
  const std::size_t dim = dim_of(h.n_qubits());
  if (rho.n_qubits() != h.n_qubits()) throw std::invalid_argument("expectation: dimension mismatch");
  const Matrix& m = rho.matrix();
  double e = 0.0;
  for (const auto& t : h.terms()) {
    const std::uint64_t x = t.string.x_mask();
    cplx acc = 0.0;
    for (std::uint64_t b = 0; b < dim; ++b)
      acc += t.string.phase(b) * m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b ^ x));
    e += t.coefficient * acc.real();
  }
  return e;
}

/// Runs the circuit from `init` with a depolarizing channel after each gate.
inline DensityMatrix run_circuit_noisy(const StateVector& init, const Circuit& c, std::span<const double> theta,
                                       const NoiseModel& noise) {
  noise.validate();
  if (c.n_qubits() > kDensityQubitLimit)
    throw std::invalid_argument("run_circuit_noisy: " + std::to_string(c.n_qubits()) + " qubits exceeds limit " +
                                std::to_string(kDensityQubitLimit));
  if (init.n_qubits() != c.n_qubits()) throw std::invalid_argument("run_circuit_noisy: qubit count mismatch");
  const Circuit bound = c.with_parameters(theta);
  DensityMatrix rho = DensityMatrix::pure(init);
  for (const auto& g : bound.gates()) {
    rho.apply(g);
    if (g.two_qubit()) {
      const std::size_t qs[2] = {g.qubits[0], g.qubits[1]};
      rho.depolarize(qs, noise.p2);
    } else {
      const std::size_t qs[1] = {g.qubits[0]};
      rho.depolarize(qs, noise.p1);
    }
  }
  return rho;
}

inline DensityMatrix run_circuit_noisy(const Circuit& c, std::span<const double> theta, const NoiseModel& noise) {
  return run_circuit_noisy(StateVector::zero_state(c.n_qubits()), c, theta, noise);
}

}  // namespace tnqas
