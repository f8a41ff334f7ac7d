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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace tnqas {

using cplx = std::complex<double>;

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Largest qubit count for which dense 2^n x 2^n matrices are built.
inline constexpr std::size_t kDenseQubitLimit = 12;

inline std::size_t dim_of(std::size_t n_qubits) { return std::size_t{1} << n_qubits; }

/// Frobenius norm of U^dagger U - I.
template <typename Derived>
double unitarity_error(const Eigen::MatrixBase<Derived>& u) {
  const auto n = u.cols();
  return (u.adjoint() * u - Matrix::Identity(n, n)).norm();
}

/// max |A - phase * B| after aligning the global phase on the largest entry of B.
inline double phase_aligned_distance(const Matrix& a, const Matrix& b) {
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(b(r, c)) == 0.0) return a.cwiseAbs().maxCoeff();
  cplx phase = a(r, c) / b(r, c);
  const double mag = std::abs(phase);
  phase = mag > 0.0 ? phase / mag : cplx{1.0, 0.0};
  return (a - phase * b).cwiseAbs().maxCoeff();
}

/// Kronecker product of two dense complex matrices (a is the more significant factor).
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace tnqas
