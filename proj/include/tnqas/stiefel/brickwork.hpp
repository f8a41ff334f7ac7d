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
 * Brickwork stacks of two-qubit unitaries and their overlap with a target
 * MPS. The stack prepares U_K ... U_1 |0...0>, with U_1 applied first, and
 * the loss is L = |<Psi| U_K ... U_1 |0...0>|.
 */

#pragma once

#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tnqas/core/rng.hpp"
#include "tnqas/tensornet/mps.hpp"

namespace tnqas {

struct BrickworkLayout {
  std::size_t n_qubits = 0;
  std::size_t layers = 0;
  /// Left qubit of each nearest-neighbour pair, in application order.
  std::vector<std::size_t> pairs;

  static BrickworkLayout make(std::size_t n, std::size_t layers) {
    if (n < 2) throw std::invalid_argument("BrickworkLayout: need at least 2 qubits");
    BrickworkLayout l{n, layers, {}};
    for (std::size_t layer = 0; layer < layers; ++layer) {
      for (std::size_t q = 0; q + 1 < n; q += 2) l.pairs.push_back(q);
      for (std::size_t q = 1; q + 1 < n; q += 2) l.pairs.push_back(q);
    }
    return l;
  }
  std::size_t size() const { return pairs.size(); }
};

struct UnitaryStack {
  BrickworkLayout layout;
  std::vector<Matrix4> unitaries;

  std::size_t size() const { return unitaries.size(); }

  static UnitaryStack identity(const BrickworkLayout& l) {
    return {l, std::vector<Matrix4>(l.size(), Matrix4::Identity())};
  }
  double max_unitarity_error() const {
    double e = 0.0;
    for (const auto& u : unitaries) e = std::max(e, (u.adjoint() * u - Matrix4::Identity()).norm());
    return e;
  }
};

/// U_K ... U_1 |0...0> as an MPS (no truncation).
inline Mps stack_state(const UnitaryStack& stack) {
  Mps m = zero_mps(stack.layout.n_qubits);
  for (std::size_t k = 0; k < stack.size(); ++k) apply_two_site(m, stack.layout.pairs[k], stack.unitaries[k], kExactRankCutoff);
  return m;
}

/// Dense statevector of the stack applied to |0...0>.
inline StateVector stack_statevector(const UnitaryStack& stack) {
  StateVector s = StateVector::zero_state(stack.layout.n_qubits);
  for (std::size_t k = 0; k < stack.size(); ++k) s.apply(GateOp::unitary(stack.layout.pairs[k], stack.layout.pairs[k] + 1, stack.unitaries[k]));
  return s;
}

namespace detail {

inline void check_sizes(const UnitaryStack& stack, const Mps& target) {
  if (stack.layout.n_qubits != target.size())
    throw std::invalid_argument("stack acts on " + std::to_string(stack.layout.n_qubits) + " qubits but target has " +
                                std::to_string(target.size()) + " sites");
  if (stack.unitaries.size() != stack.layout.size()) throw std::invalid_argument("stack size does not match layout");
}

inline Matrix transfer(const SiteTensor& bra, const SiteTensor& ket, const Matrix& e) {
  return bra[0].adjoint() * e * ket[0] + bra[1].adjoint() * e * ket[1];
}

}  // namespace detail

/// <Psi| U_K ... U_1 |0...0>.
inline cplx stack_amplitude(const UnitaryStack& stack, const Mps& target) {
  detail::check_sizes(stack, target);
  return overlap(target, stack_state(stack));
}

inline double overlap_loss(const UnitaryStack& stack, const Mps& target) { return std::abs(stack_amplitude(stack, target)); }

struct OverlapGradients {
  cplx amplitude;
  double loss = 0.0;
  /// dL in the real representation: G(i,j) = dL/dRe U(i,j) + i dL/dIm U(i,j).
  std::vector<Matrix4> grads;
};

/// Environments by punching each unitary out of the overlap network.
inline OverlapGradients euclid_gradients(const UnitaryStack& stack, const Mps& target) {
  detail::check_sizes(stack, target);
  const std::size_t n = stack.layout.n_qubits;
  const std::size_t depth = stack.size();

  // forward[k] = U_{k-1} ... U_1 |0>, backward[k] = U_{k+1}^dag ... U_K^dag |Psi>.
  std::vector<Mps> forward(depth + 1), backward(depth + 1);
  forward[0] = zero_mps(n);
  for (std::size_t k = 0; k < depth; ++k) {
    forward[k + 1] = forward[k];
    apply_two_site(forward[k + 1], stack.layout.pairs[k], stack.unitaries[k], kExactRankCutoff);
  }
  if (depth > 0) backward[depth - 1] = target;
  for (std::size_t k = depth; k-- > 1;) {
    backward[k - 1] = backward[k];
    apply_two_site(backward[k - 1], stack.layout.pairs[k], stack.unitaries[k].adjoint(), kExactRankCutoff);
  }

  OverlapGradients out;
  out.amplitude = overlap(target, forward[depth]);
  out.loss = std::abs(out.amplitude);
  const double denom = std::max(out.loss, 1e-12);
  out.grads.resize(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    const Mps& ket = forward[k];
    const Mps& bra = backward[k];
    const std::size_t q = stack.layout.pairs[k];
    Matrix left = Matrix::Identity(1, 1);
    for (std::size_t s = 0; s < q; ++s) left = detail::transfer(bra.sites[s], ket.sites[s], left);
    Matrix right = Matrix::Identity(1, 1);
    for (std::size_t s = n; s-- > q + 2;) {
      const auto& b = bra.sites[s];
      const auto& a = ket.sites[s];
      right = b[0].conjugate() * right * a[0].transpose() + b[1].conjugate() * right * a[1].transpose();
    }
    // env(i, j) = d<bra|U|ket>/dU(i, j).
    Matrix4 env;
    for (int j = 0; j < 4; ++j) {
      const Matrix y = left * ket.sites[q][j / 2] * ket.sites[q + 1][j % 2] * right.transpose();
      for (int i = 0; i < 4; ++i) {
        const Matrix x = bra.sites[q][i / 2] * bra.sites[q + 1][i % 2];
        env(i, j) = x.cwiseProduct(y.conjugate()).sum();
        env(i, j) = std::conj(env(i, j));
      }
    }
    out.grads[k] = out.amplitude * env.conjugate() / denom;
  }
  return out;
}

}  // namespace tnqas
