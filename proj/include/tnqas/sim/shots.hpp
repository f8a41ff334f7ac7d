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
 * Finite-sampling energy estimates. Each non-identity Pauli term is measured
 * on its own: the state is rotated into the term's eigenbasis, `shots`
 * bitstrings are drawn from the Born distribution, and the parity
 * eigenvalues are averaged. Identity terms contribute their coefficient
 * exactly.
 */

#pragma once

#include <bit>
#include <random>
#include <stdexcept>

#include "tnqas/core/rng.hpp"
#include "tnqas/sim/density_matrix.hpp"

namespace tnqas {

namespace detail {

// Basis change taking the eigenbasis of X (or Y) onto the computational basis.
inline const Matrix2& hadamard() {
  static const Matrix2 h = [] {
    Matrix2 m;
    m << 1, 1, 1, -1;
    return Matrix2(m / std::sqrt(2.0));
  }();
  return h;
}
inline const Matrix2& y_to_z() {
  static const Matrix2 m = [] {
    Matrix2 sdg;
    sdg << 1, 0, 0, -kI;
    return Matrix2(hadamard() * sdg);
  }();
  return m;
}

inline double sample_parity(const RealVector& probs, std::uint64_t support, std::size_t shots, Rng& rng) {
  std::discrete_distribution<std::size_t> dist(probs.data(), probs.data() + probs.size());
  long long sum = 0;
  for (std::size_t s = 0; s < shots; ++s) sum += (std::popcount(dist(rng) & support) & 1) ? -1 : 1;
  return static_cast<double>(sum) / static_cast<double>(shots);
}

}  // namespace detail

inline double expectation_with_shots(const StateVector& state, const PauliSum& h, std::size_t shots, Rng& rng) {
  if (shots == 0) throw std::invalid_argument("expectation_with_shots: shots must be >= 1");
  if (state.n_qubits() != h.n_qubits()) throw std::invalid_argument("expectation_with_shots: dimension mismatch");
  const std::size_t n = h.n_qubits();
  double e = 0.0;
  for (const auto& t : h.terms()) {
    if (t.string.is_identity()) {
      e += t.coefficient;
      continue;
    }
    Vector psi = state.amplitudes();
    for (std::size_t q = 0; q < n; ++q) {
      if (t.string[q] == Pauli::X) kernels::apply_1q(psi.data(), n, q, detail::hadamard());
      if (t.string[q] == Pauli::Y) kernels::apply_1q(psi.data(), n, q, detail::y_to_z());
    }
    const RealVector probs = psi.cwiseAbs2();
    e += t.coefficient * detail::sample_parity(probs, t.string.x_mask() | t.string.z_mask(), shots, rng);
  }
  return e;
}

inline double expectation_with_shots(const DensityMatrix& rho, const PauliSum& h, std::size_t shots, Rng& rng) {
  if (shots == 0) throw std::invalid_argument("expectation_with_shots: shots must be >= 1");
  if (rho.n_qubits() != h.n_qubits()) throw std::invalid_argument("expectation_with_shots: dimension mismatch");
  const std::size_t n = h.n_qubits();
  double e = 0.0;
  for (const auto& t : h.terms()) {
    if (t.string.is_identity()) {
      e += t.coefficient;
      continue;
    }
    DensityMatrix rotated = rho;
    for (std::size_t q = 0; q < n; ++q) {
      if (t.string[q] == Pauli::X) rotated.apply_1q(q, detail::hadamard());
      if (t.string[q] == Pauli::Y) rotated.apply_1q(q, detail::y_to_z());
    }
    RealVector probs = rotated.matrix().diagonal().real().cwiseMax(0.0);
    e += t.coefficient * detail::sample_parity(probs, t.string.x_mask() | t.string.z_mask(), shots, rng);
  }
  return e;
}

}  // namespace tnqas
