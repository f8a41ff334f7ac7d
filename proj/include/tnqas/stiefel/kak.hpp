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
 * Transpilation of two-qubit unitaries into {RX, RY, RZ, CNOT}.
 *
 * A 4x4 unitary is split as
 *   U = e^{i phi} (A1 (x) B1) exp(i (a XX + b YY + c ZZ)) (A2 (x) B2)
 * through the magic basis, where local gates become real orthogonal
 * matrices and the core is diagonal. The core costs exactly three CNOTs and
 * each local factor is written as RZ RY RZ.
 */

#pragma once

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "tnqas/sim/circuit.hpp"
#include "tnqas/stiefel/brickwork.hpp"

namespace tnqas {

struct ZyzAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double phase = 0.0;
};

/// u = e^{i phase} RZ(alpha) RY(beta) RZ(gamma), beta in [0, pi]. When beta
/// is 0 or pi, gamma is set to 0.
inline ZyzAngles zyz_decompose(const Matrix2& u) {
  const double phase = std::arg(u.determinant()) / 2.0;
  const Matrix2 v = u * std::polar(1.0, -phase);
  const double a00 = std::abs(v(0, 0)), a10 = std::abs(v(1, 0));
  ZyzAngles z;
  z.phase = phase;
  z.beta = 2.0 * std::atan2(a10, a00);
  constexpr double kGimbal = 1e-14;
  if (a10 < kGimbal) {
    z.alpha = -2.0 * std::arg(v(0, 0));
  } else if (a00 < kGimbal) {
    z.alpha = 2.0 * std::arg(v(1, 0));
  } else {
    z.alpha = std::arg(v(1, 0)) - std::arg(v(0, 0));
    z.gamma = -std::arg(v(0, 0)) - std::arg(v(1, 0));
  }
  return z;
}

struct KakCoefficients {
  /// U = e^{i phase} (a1 (x) b1) exp(i (x XX + y YY + z ZZ)) (a2 (x) b2).
  Matrix2 a1, b1, a2, b2;
  double x = 0.0, y = 0.0, z = 0.0;
  double phase = 0.0;
};

namespace detail {

inline const Matrix4& magic_basis() {
  static const Matrix4 b = [] {
    Matrix4 m;
    m << 1, 0, 0, kI, 0, kI, 1, 0, 0, kI, -1, 0, 1, 0, 0, -kI;
    return Matrix4(m / std::sqrt(2.0));
  }();
  return b;
}

inline Matrix4 two_qubit_pauli(int p) {
  Matrix2 m;
  if (p == 0) m << 0, 1, 1, 0;
  if (p == 1) m << 0, -kI, kI, 0;
  if (p == 2) m << 1, 0, 0, -1;
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = m(i, j) * m;
  return out;
}

/// Splits a local 4x4 gate into a (x) b with both factors in SU(2); returns
/// the leftover phase.
inline double split_local(const Matrix4& k, Matrix2& a, Matrix2& b) {
  // Rearranged so that a (x) b becomes the rank-one matrix vec(a) vec(b)^T.
  Matrix4 r;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int j1 = 0; j1 < 2; ++j1)
      for (int i2 = 0; i2 < 2; ++i2)
        for (int j2 = 0; j2 < 2; ++j2) r(2 * i1 + j1, 2 * i2 + j2) = k(2 * i1 + i2, 2 * j1 + j2);
  Eigen::JacobiSVD<Matrix4> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double s = std::sqrt(svd.singularValues()[0]);
  const Eigen::Vector4cd va = svd.matrixU().col(0) * s;
  const Eigen::Vector4cd vb = svd.matrixV().col(0).conjugate() * s;
  a << va[0], va[1], va[2], va[3];
  b << vb[0], vb[1], vb[2], vb[3];
  const cplx pa = std::sqrt(a.determinant()), pb = std::sqrt(b.determinant());
  a /= pa;
  b /= pb;
  return std::arg(pa * pb);
}

}  // namespace detail

inline KakCoefficients kak_coefficients(const Matrix4& u) {
  if (unitarity_error(u) > 1e-9) throw std::invalid_argument("kak_decompose: input is not unitary");
  const Matrix4& mb = detail::magic_basis();
  const cplx det = u.determinant();
  const double phase0 = std::arg(det) / 4.0;
  const Matrix4 su = u * std::polar(1.0, -phase0);
  const Matrix4 up = mb.adjoint() * su * mb;
  const Matrix4 m2 = up.transpose() * up;

  // Re(m2) and Im(m2) are commuting real symmetric matrices; a generic real
  // combination shares their eigenvectors.
  std::mt19937_64 rng(0x6b616bULL);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  Eigen::Matrix4d p;
  Eigen::Vector4cd d;
  bool ok = false;
  for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
    const double cr = attempt == 0 ? 1.0 : coeff(rng), ci = attempt == 0 ? 0.5772156649 : coeff(rng);
    const Eigen::Matrix4d mix = cr * m2.real() + ci * m2.imag();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(0.5 * (mix + mix.transpose()));
    p = es.eigenvectors();
    const Matrix4 diag = p.transpose().cast<cplx>() * m2 * p.cast<cplx>();
    d = diag.diagonal();
    ok = (diag - Matrix4(d.asDiagonal())).cwiseAbs().maxCoeff() < 1e-10;
  }
  if (!ok) throw std::runtime_error("kak_decompose: failed to diagonalise");
  if (p.determinant() < 0) p.col(0) = -p.col(0);

  Eigen::Vector4d theta;
  for (int j = 0; j < 4; ++j) theta[j] = std::arg(d[j]) / 2.0;
  Matrix4 k1 = up * p.cast<cplx>() * Eigen::Vector4cd((-kI * theta.cast<cplx>()).array().exp()).asDiagonal();
  if (k1.determinant().real() < 0) {
    theta[0] += kPi;
    k1.col(0) = -k1.col(0);
  }
  const Matrix4 k1c = mb * k1 * mb.adjoint();
  const Matrix4 k2c = mb * p.transpose().cast<cplx>() * mb.adjoint();

  // theta_j = x l_XX + y l_YY + z l_ZZ + phi with l the diagonals of the
  // Paulis in the magic basis.
  Eigen::Matrix4d sys;
  for (int p2 = 0; p2 < 3; ++p2) sys.col(p2) = (mb.adjoint() * detail::two_qubit_pauli(p2) * mb).diagonal().real();
  sys.col(3).setOnes();
  const Eigen::Vector4d sol = sys.fullPivLu().solve(theta);

  KakCoefficients out;
  out.x = sol[0];
  out.y = sol[1];
  out.z = sol[2];
  const double p1 = detail::split_local(k1c, out.a1, out.b1);
  const double p2 = detail::split_local(k2c, out.a2, out.b2);
  out.phase = phase0 + sol[3] + p1 + p2;
  return out;
}

struct KakCircuit {
  /// Gates on qubits {0, 1}; qubit 0 is the more significant factor.
  std::vector<GateOp> gates;
  double phase = 0.0;
};

namespace detail {

inline void append_zyz(std::vector<GateOp>& out, std::size_t q, const Matrix2& u, double& phase) {
  const ZyzAngles z = zyz_decompose(u);
  out.push_back(GateOp::rz(q, z.gamma));
  out.push_back(GateOp::ry(q, z.beta));
  out.push_back(GateOp::rz(q, z.alpha));
  phase += z.phase;
}

}  // namespace detail

/// Exactly three CNOTs; the matrix product equals u up to e^{i phase}.
inline KakCircuit kak_decompose(const Matrix4& u) {
  const KakCoefficients k = kak_coefficients(u);
  KakCircuit c;
  c.phase = k.phase;
  detail::append_zyz(c.gates, 0, k.a2, c.phase);
  detail::append_zyz(c.gates, 1, k.b2, c.phase);
  // exp(i (x XX + y YY + z ZZ)) up to a global phase of e^{i pi/4}.
  c.gates.push_back(GateOp::rz(1, kPi / 2));
  c.gates.push_back(GateOp::cnot(1, 0));
  c.gates.push_back(GateOp::rz(0, kPi / 2 - 2 * k.z));
  c.gates.push_back(GateOp::ry(1, kPi / 2 - 2 * k.x));
  c.gates.push_back(GateOp::cnot(0, 1));
  c.gates.push_back(GateOp::ry(1, -kPi / 2 + 2 * k.y));
  c.gates.push_back(GateOp::cnot(1, 0));
  c.gates.push_back(GateOp::rz(0, -kPi / 2));
  c.phase += kPi / 4;
  detail::append_zyz(c.gates, 0, k.a1, c.phase);
  detail::append_zyz(c.gates, 1, k.b1, c.phase);
  return c;
}

/// Merges consecutive same-axis rotations on a qubit when no other gate
/// touches that qubit in between. Zero angles are kept so the structure is
/// fixed.
inline Circuit merge_rotations(const Circuit& c) {
  std::vector<GateOp> out;
  std::vector<long> last(c.n_qubits(), -1);
  for (const auto& g : c.gates()) {
    if (is_rotation(g.kind)) {
      const long prev = last[g.qubits[0]];
      if (prev >= 0 && out[static_cast<std::size_t>(prev)].kind == g.kind) {
        out[static_cast<std::size_t>(prev)].angle += g.angle;
        continue;
      }
    }
    out.push_back(g);
    for (std::size_t i = 0; i < g.arity(); ++i) last[g.qubits[i]] = static_cast<long>(out.size() - 1);
  }
  Circuit merged(c.n_qubits());
  for (auto& g : out) {
    if (is_rotation(g.kind)) g.angle = wrap_angle(g.angle);
    merged.add(g);
  }
  return merged;
}

/// Circuit over {RX, RY, RZ, CNOT} preparing the stack's action up to global
/// phase.
inline Circuit transpile_stack(const UnitaryStack& stack) {
  Circuit c(stack.layout.n_qubits);
  for (std::size_t k = 0; k < stack.size(); ++k) {
    const std::size_t q = stack.layout.pairs[k];
    for (auto g : kak_decompose(stack.unitaries[k]).gates) {
      g.qubits = {g.qubits[0] + q, g.qubits[1] + q};
      c.add(g);
    }
  }
  return merge_rotations(c);
}

}  // namespace tnqas
