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
 * Matrix product operators. Site k stores W_k[s][t] for the operator
 * element <s|.|t>, each of shape (left bond) x (right bond).
 */

#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "tnqas/pauli/pauli_sum.hpp"
#include "tnqas/tensornet/mps.hpp"

namespace tnqas {

/// Index 2 * s + t holds <s|W|t>.
using OperatorSite = std::array<Matrix, 4>;

struct Mpo {
  std::vector<OperatorSite> sites;

  std::size_t size() const { return sites.size(); }
  std::size_t max_bond() const {
    Eigen::Index b = 1;
    for (const auto& s : sites) b = std::max(b, s[0].cols());
    return static_cast<std::size_t>(b);
  }
};

inline constexpr double kMpoCutoff = 1e-12;

namespace detail {

inline Matrix2 pauli_matrix(Pauli p) {
  Matrix2 m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -kI, kI, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Mpo term_mpo(const PauliTerm& t, std::size_t n) {
  Mpo m;
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix2 p = pauli_matrix(t.string[k]) * (k == 0 ? t.coefficient : 1.0);
    OperatorSite w;
    for (int i = 0; i < 4; ++i) w[i] = Matrix::Constant(1, 1, p(i / 2, i % 2));
    m.sites.push_back(w);
  }
  return m;
}

/// Direct sum of two MPOs on the same chain.
inline Mpo mpo_sum(const Mpo& a, const Mpo& b) {
  const std::size_t n = a.size();
  Mpo out;
  for (std::size_t k = 0; k < n; ++k) {
    OperatorSite w;
    for (int i = 0; i < 4; ++i) {
      const Matrix& x = a.sites[k][i];
      const Matrix& y = b.sites[k][i];
      if (n == 1) {
        w[i] = x + y;
      } else if (k == 0) {
        w[i].resize(1, x.cols() + y.cols());
        w[i] << x, y;
      } else if (k + 1 == n) {
        w[i].resize(x.rows() + y.rows(), 1);
        w[i] << x, y;
      } else {
        w[i] = Matrix::Zero(x.rows() + y.rows(), x.cols() + y.cols());
        w[i].topLeftCorner(x.rows(), x.cols()) = x;
        w[i].bottomRightCorner(y.rows(), y.cols()) = y;
      }
    }
    out.sites.push_back(w);
  }
  return out;
}

// The generic chain compression below treats the 4 operator indices as a
// physical leg.
inline Matrix stack_rows4(const OperatorSite& a) {
  const auto r = a[0].rows();
  Matrix m(4 * r, a[0].cols());
  for (int i = 0; i < 4; ++i) m.middleRows(i * r, r) = a[i];
  return m;
}
inline Matrix stack_cols4(const OperatorSite& a) {
  const auto c = a[0].cols();
  Matrix m(a[0].rows(), 4 * c);
  for (int i = 0; i < 4; ++i) m.middleCols(i * c, c) = a[i];
  return m;
}

inline void compress_mpo(Mpo& m, double cutoff) {
  const std::size_t n = m.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Matrix a = stack_rows4(m.sites[k]);
    Eigen::HouseholderQR<Matrix> qr(a);
    const Eigen::Index r = std::min(a.rows(), a.cols());
    const Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), r);
    const Matrix rr = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
    const auto rows = a.rows() / 4;
    for (int i = 0; i < 4; ++i) m.sites[k][i] = q.middleRows(i * rows, rows);
    for (auto& t : m.sites[k + 1]) t = rr * t;
  }
  for (std::size_t k = n; k-- > 1;) {
    const Matrix a = stack_cols4(m.sites[k]);
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s[r] > cutoff * s[0]) ++r;
    r = std::max<Eigen::Index>(r, 1);
    const Matrix vh = svd.matrixV().leftCols(r).adjoint();
    const Matrix us = svd.matrixU().leftCols(r) * s.head(r).asDiagonal();
    const auto cols = a.cols() / 4;
    for (int i = 0; i < 4; ++i) m.sites[k][i] = vh.middleCols(i * cols, cols);
    for (auto& t : m.sites[k - 1]) t = t * us;
  }
}

}  // namespace detail

/// Sums rank-one term MPOs, compressing by SVD (relative cutoff 1e-12)
/// every few terms so the bond stays near its minimal value.
inline Mpo mpo_from_pauli_sum(const PauliSum& h) {
  const std::size_t n = h.n_qubits();
  if (h.empty()) {
    PauliTerm zero{0.0, PauliString::from_string(std::string(n, 'I'))};
    return detail::term_mpo(zero, n);
  }
  constexpr std::size_t kChunk = 8;
  Mpo acc;
  bool have = false;
  std::size_t pending = 0;
  for (const auto& t : h.terms()) {
    const Mpo one = detail::term_mpo(t, n);
    acc = have ? detail::mpo_sum(acc, one) : one;
    have = true;
    if (++pending == kChunk) {
      detail::compress_mpo(acc, kMpoCutoff);
      pending = 0;
    }
  }
  detail::compress_mpo(acc, kMpoCutoff);
  return acc;
}

/// Dense 2^n x 2^n contraction (n <= 8).
inline Matrix mpo_to_dense(const Mpo& m) {
  if (m.size() > 8) throw std::invalid_argument("mpo_to_dense: more than 8 sites");
  // blocks[(row, col)] is a 1 x bond row vector.
  std::vector<Matrix> acc{Matrix::Identity(1, 1)};
  std::size_t dim = 1;
  for (const auto& w : m.sites) {
    std::vector<Matrix> next(4 * dim * dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c)
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t) next[(2 * r + s) * 2 * dim + (2 * c + t)] = acc[r * dim + c] * w[2 * s + t];
    acc = std::move(next);
    dim *= 2;
  }
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix out(d, d);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc[r * dim + c](0, 0);
  return out;
}

/// <psi|W|psi> / <psi|psi>.
inline double expectation(const Mps& psi, const Mpo& w) {
  if (psi.size() != w.size()) throw std::invalid_argument("expectation: site counts differ");
  // env[b](a, c): bra bond a, operator bond b, ket bond c.
  std::vector<Matrix> env{Matrix::Identity(1, 1)};
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const auto& a = psi.sites[k];
    const auto& op = w.sites[k];
    const Eigen::Index wb = op[0].cols();
    std::vector<Matrix> next(static_cast<std::size_t>(wb), Matrix::Zero(a[0].cols(), a[0].cols()));
    for (std::size_t b = 0; b < env.size(); ++b)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
          const Matrix& ws = op[2 * s + t];
          if (ws.row(static_cast<Eigen::Index>(b)).isZero(0.0)) continue;
          const Matrix piece = a[s].adjoint() * env[b] * a[t];
          for (Eigen::Index b2 = 0; b2 < wb; ++b2) {
            const cplx c = ws(static_cast<Eigen::Index>(b), b2);
            if (c != 0.0) next[static_cast<std::size_t>(b2)] += c * piece;
          }
        }
    env = std::move(next);
  }
  return env[0](0, 0).real() / overlap(psi, psi).real();
}

}  // namespace tnqas
