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
 * Riemannian Adam on the unitary group U(4), one optimizer state per
 * unitary, with a Cayley retraction and projection-based vector transport.
 *
 * Velocity is a scalar per unitary, accumulated from the trace inner product
 * <g, g> = Re Tr(g^dag g) of the Riemannian gradient.
 */

#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "tnqas/core/rng.hpp"
#include "tnqas/stiefel/brickwork.hpp"

namespace tnqas {

/// G - U G^dag U: projection of a Euclidean gradient onto the tangent space.
inline Matrix4 riemannian_gradient(const Matrix4& u, const Matrix4& g) { return g - u * g.adjoint() * u; }

/// (V - U V^dag U) / 2.
inline Matrix4 transport(const Matrix4& u_new, const Matrix4& m) { return 0.5 * (m - u_new * m.adjoint() * u_new); }

/// Cayley retraction of a step of length eta along -v:
///   W = (V U^dag - U V^dag) / 2 with V = -eta v,
///   U' = (I - W/2)^{-1} (I + W/2) U.
inline Matrix4 cayley_retract(const Matrix4& u, const Matrix4& v, double eta) {
  const Matrix4 step = -eta * v;
  const Matrix4 w = 0.5 * (step * u.adjoint() - u * step.adjoint());
  const Matrix4 id = Matrix4::Identity();
  Eigen::PartialPivLU<Matrix4> lu(id - 0.5 * w);
  if (!(std::abs(lu.determinant()) > 1e-300))
    throw std::logic_error("cayley_retract: singular I - W/2; W is not anti-Hermitian");
  return lu.solve((id + 0.5 * w) * u);
}

struct RiemannianAdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct RiemannianAdamState {
  std::vector<Matrix4> momentum;
  std::vector<double> velocity;
  std::size_t step = 0;

  static RiemannianAdamState zeros(std::size_t count) {
    return {std::vector<Matrix4>(count, Matrix4::Zero()), std::vector<double>(count, 0.0), 0};
  }
};

/// One ascent step on L. `grads` are Euclidean gradients of L; the optimizer
/// descends on 1 - L, so it works with their negatives.
inline void riemannian_adam_step(RiemannianAdamState& state, UnitaryStack& stack, const std::vector<Matrix4>& grads,
                                 const RiemannianAdamConfig& cfg) {
  const std::size_t count = stack.unitaries.size();
  if (grads.size() != count || state.momentum.size() != count || state.velocity.size() != count)
    throw std::invalid_argument("riemannian_adam_step: size mismatch");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double eta_t = cfg.learning_rate * std::sqrt(1.0 - std::pow(cfg.beta2, t)) / (1.0 - std::pow(cfg.beta1, t));
  for (std::size_t k = 0; k < count; ++k) {
    Matrix4& u = stack.unitaries[k];
    const Matrix4 rg = riemannian_gradient(u, -grads[k]);
    const Matrix4 m = cfg.beta1 * state.momentum[k] + (1.0 - cfg.beta1) * rg;
    const double v = cfg.beta2 * state.velocity[k] + (1.0 - cfg.beta2) * (rg.adjoint() * rg).trace().real();
    const Matrix4 direction = m / (std::sqrt(v) + cfg.epsilon);
    u = cayley_retract(u, direction, eta_t);
    state.momentum[k] = transport(u, m);
    state.velocity[k] = v;
  }
}

/// Identity unitaries moved along a random tangent direction of norm `scale`.
inline UnitaryStack perturbed_identity_stack(const BrickworkLayout& layout, double scale, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  UnitaryStack s = UnitaryStack::identity(layout);
  for (auto& u : s.unitaries) {
    Matrix4 a;
    for (int i = 0; i < 16; ++i) a.data()[i] = cplx(g(rng), g(rng));
    Matrix4 tangent = 0.5 * (a - a.adjoint());  // anti-Hermitian: tangent at I
    tangent *= scale / tangent.norm();
    u = cayley_retract(u, tangent, -1.0);
  }
  return s;
}

struct FitConfig {
  std::size_t layers = 1;
  std::size_t max_iters = 3000;
  /// Stop once 1 - L falls below this.
  double tol = 1e-10;
  double init_scale = 0.01;
  RiemannianAdamConfig adam{};
};

struct FitResult {
  UnitaryStack stack;
  /// Overlap of the best stack seen.
  double loss = 0.0;
  std::vector<double> history;
  std::size_t iterations = 0;
};

/// Maximises |<Psi|U_K ... U_1|0>| and returns the best stack visited.
inline FitResult fit_mps_to_circuit(const Mps& target, const FitConfig& cfg, Rng& rng) {
  const auto layout = BrickworkLayout::make(target.size(), cfg.layers);
  UnitaryStack stack = perturbed_identity_stack(layout, cfg.init_scale, rng);
  auto state = RiemannianAdamState::zeros(layout.size());
  FitResult out{stack, -1.0, {}, 0};
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const auto g = euclid_gradients(stack, target);
    out.history.push_back(g.loss);
    if (g.loss > out.loss) {
      out.loss = g.loss;
      out.stack = stack;
    }
    if (1.0 - g.loss < cfg.tol) break;
    riemannian_adam_step(state, stack, g.grads, cfg.adam);
    out.iterations = it + 1;
  }
  const double last = overlap_loss(stack, target);
  if (last > out.loss) {
    out.loss = last;
    out.stack = stack;
  }
  return out;
}

}  // namespace tnqas
