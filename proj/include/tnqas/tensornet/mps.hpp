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
 * Open-boundary matrix product states over qubits.
 *
 * Site k stores one matrix per physical value, A_k[s] of shape
 * (left bond) x (right bond), so that
 *   <s_0 ... s_{n-1}|psi> = A_0[s_0] A_1[s_1] ... A_{n-1}[s_{n-1}].
 * Site 0 is qubit 0, the most significant bit of a dense index.
 */

#pragma once

#include <array>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnqas/core/rng.hpp"
#include "tnqas/sim/statevector.hpp"

namespace tnqas {

using SiteTensor = std::array<Matrix, 2>;

struct Mps {
  std::vector<SiteTensor> sites;
  /// Bond cap recorded at construction.
  std::size_t chi_max = 1;
  /// Orthogonality center if known.
  std::optional<std::size_t> center;

  std::size_t size() const { return sites.size(); }
  Eigen::Index left_dim(std::size_t k) const { return sites[k][0].rows(); }
  Eigen::Index right_dim(std::size_t k) const { return sites[k][0].cols(); }

  std::size_t max_bond() const {
    Eigen::Index b = 1;
    for (const auto& s : sites) b = std::max(b, s[0].cols());
    return static_cast<std::size_t>(b);
  }
};

namespace detail {

// Rows (p, l) stacked: (2 Dl) x Dr.
inline Matrix stack_rows(const SiteTensor& a) {
  Matrix m(2 * a[0].rows(), a[0].cols());
  m << a[0], a[1];
  return m;
}
// Columns (p, r) side by side: Dl x (2 Dr).
inline Matrix stack_cols(const SiteTensor& a) {
  Matrix m(a[0].rows(), 2 * a[0].cols());
  m << a[0], a[1];
  return m;
}
inline SiteTensor split_rows(const Matrix& m) {
  const auto h = m.rows() / 2;
  return {m.topRows(h), m.bottomRows(h)};
}
inline SiteTensor split_cols(const Matrix& m) {
  const auto w = m.cols() / 2;
  return {m.leftCols(w), m.rightCols(w)};
}

/// Number of singular values to keep: at most `cap`, dropping those at or
/// below `cutoff` times the largest, never fewer than one.
inline Eigen::Index kept_rank(const RealVector& s, std::size_t cap, double cutoff) {
  Eigen::Index r = std::min<Eigen::Index>(s.size(), static_cast<Eigen::Index>(cap));
  if (cutoff > 0.0 && s.size() > 0)
    while (r > 1 && s[r - 1] <= cutoff * s[0]) --r;
  return std::max<Eigen::Index>(r, 1);
}

}  // namespace detail

/// Singular values below this fraction of the largest count as exact zeros.
inline constexpr double kExactRankCutoff = 1e-14;

inline Mps product_mps(const std::vector<Eigen::Vector2cd>& local) {
  if (local.empty()) throw std::invalid_argument("product_mps: need at least one site");
  Mps m;
  for (const auto& v : local) {
    SiteTensor t{Matrix::Constant(1, 1, v[0]), Matrix::Constant(1, 1, v[1])};
    m.sites.push_back(t);
  }
  m.chi_max = 1;
  return m;
}

/// |b_0 ... b_{n-1}> for a bit string given qubit by qubit.
inline Mps basis_mps(const std::vector<int>& bits) {
  std::vector<Eigen::Vector2cd> local;
  for (const int b : bits) local.emplace_back(b ? 0.0 : 1.0, b ? 1.0 : 0.0);
  return product_mps(local);
}

inline Mps zero_mps(std::size_t n) { return basis_mps(std::vector<int>(n, 0)); }

/// Each site an independent random unit vector.
inline Mps random_product_mps(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::Vector2cd> local(n);
  for (auto& v : local) v = Eigen::Vector2cd(cplx(g(rng), g(rng)), cplx(g(rng), g(rng))).normalized();
  return product_mps(local);
}

/// Random MPS with the given bond cap, left-canonical and normalised.
inline Mps random_mps(std::size_t n, std::size_t chi, Rng& rng);

/// <a|b> by transfer-matrix contraction.
inline cplx overlap(const Mps& a, const Mps& b) {
  if (a.size() != b.size()) throw std::invalid_argument("overlap: site counts differ");
  Matrix e = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < a.size(); ++k) e = a.sites[k][0].adjoint() * e * b.sites[k][0] + a.sites[k][1].adjoint() * e * b.sites[k][1];
  return e(0, 0);
}

inline double norm(const Mps& m) { return std::sqrt(std::max(0.0, overlap(m, m).real())); }

inline void scale(Mps& m, cplx factor) {
  for (auto& t : m.sites[0]) t *= factor;
}

/// Left-canonicalises by successive QR; the norm ends up on the last site.
inline void left_canonicalize(Mps& m) {
  for (std::size_t k = 0; k + 1 < m.size(); ++k) {
    const Matrix a = detail::stack_rows(m.sites[k]);
    Eigen::HouseholderQR<Matrix> qr(a);
    const Eigen::Index r = std::min(a.rows(), a.cols());
    const Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), r);
    const Matrix rr = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
    m.sites[k] = detail::split_rows(q);
    for (auto& t : m.sites[k + 1]) t = rr * t;
  }
  m.center = m.size() - 1;
}

inline void normalize(Mps& m) {
  const double nrm = norm(m);
  if (nrm == 0.0) throw std::runtime_error("normalize: zero MPS");
  scale(m, 1.0 / nrm);
}

/// Right-to-left SVD truncation to bond cap `chi` (and relative cutoff),
/// after left-canonicalisation. Leaves the MPS right-canonical except site 0.
inline void compress(Mps& m, std::size_t chi, double cutoff = 0.0) {
  left_canonicalize(m);
  for (std::size_t k = m.size(); k-- > 1;) {
    const Matrix a = detail::stack_cols(m.sites[k]);
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index r = detail::kept_rank(svd.singularValues(), chi, cutoff);
    const Matrix vh = svd.matrixV().leftCols(r).adjoint();
    const Matrix us = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal();
    m.sites[k] = detail::split_cols(vh);
    for (auto& t : m.sites[k - 1]) t = t * us;
  }
  m.chi_max = chi;
  m.center = 0;
}

inline Mps random_mps(std::size_t n, std::size_t chi, Rng& rng) {
  if (n == 0 || chi == 0) throw std::invalid_argument("random_mps: need n >= 1 and chi >= 1");
  std::normal_distribution<double> g(0.0, 1.0);
  Mps m;
  Eigen::Index left = 1;
  for (std::size_t k = 0; k < n; ++k) {
    // Largest bond compatible with both ends of the chain.
    const auto to_end = static_cast<Eigen::Index>(std::min<std::size_t>(n - 1 - k, 20));
    const Eigen::Index right = k + 1 == n ? 1 : std::min<Eigen::Index>(static_cast<Eigen::Index>(chi), std::min<Eigen::Index>(2 * left, Eigen::Index{1} << to_end));
    SiteTensor t;
    for (auto& x : t) {
      x.resize(left, right);
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = cplx(g(rng), g(rng));
    }
    m.sites.push_back(t);
    left = right;
  }
  left_canonicalize(m);
  normalize(m);
  m.chi_max = chi;
  return m;
}

/// Dense amplitudes (normalised) of an MPS with at most 12 sites.
inline StateVector statevector_from_mps(const Mps& m) {
  if (m.size() > kDenseQubitLimit)
    throw std::invalid_argument("statevector_from_mps: " + std::to_string(m.size()) + " sites exceeds limit " +
                                std::to_string(kDenseQubitLimit));
  // rows: basis prefix, cols: current right bond.
  Matrix acc = Matrix::Identity(1, 1);
  for (const auto& site : m.sites) {
    Matrix next(acc.rows() * 2, site[0].cols());
    for (Eigen::Index r = 0; r < acc.rows(); ++r) {
      next.row(2 * r) = acc.row(r) * site[0];
      next.row(2 * r + 1) = acc.row(r) * site[1];
    }
    acc = std::move(next);
  }
  Vector v = acc.col(0);
  const double nrm = v.norm();
  if (nrm == 0.0) throw std::runtime_error("statevector_from_mps: zero state");
  return StateVector::from_amplitudes(v / nrm);
}

/// Sequential SVD from the left, keeping the chi largest singular values at
/// every cut. Exact for chi >= 2^floor(n/2). Result is normalised.
inline Mps mps_from_statevector(const StateVector& v, std::size_t chi) {
  if (chi == 0) throw std::invalid_argument("mps_from_statevector: chi must be >= 1");
  const std::size_t n = v.n_qubits();
  if (n > kDenseQubitLimit) throw std::invalid_argument("mps_from_statevector: too many qubits");
  Mps m;
  m.chi_max = chi;
  // rest: (bond) x (remaining basis).
  Matrix rest = v.amplitudes().transpose();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Eigen::Index bond = rest.rows();
    const Eigen::Index right = rest.cols() / 2;
    // Reshape to (bond * 2) x right with rows (p, l).
    Matrix a(2 * bond, right);
    a.topRows(bond) = rest.leftCols(right);
    a.bottomRows(bond) = rest.rightCols(right);
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index r = detail::kept_rank(svd.singularValues(), chi, kExactRankCutoff);
    m.sites.push_back(detail::split_rows(svd.matrixU().leftCols(r)));
    rest = svd.singularValues().head(r).asDiagonal() * svd.matrixV().leftCols(r).adjoint();
  }
  m.sites.push_back(detail::split_cols(rest));
  normalize(m);
  m.center = n - 1;
  return m;
}

/// Applies a 4x4 unitary to adjacent sites (k, k+1), site k the more
/// significant factor, splitting back by an untruncated SVD. Bonds may grow.
inline void apply_two_site(Mps& m, std::size_t k, const Matrix4& u, double cutoff = 0.0) {
  if (k + 1 >= m.size()) throw std::out_of_range("apply_two_site: site out of range");
  const Eigen::Index dl = m.left_dim(k), dr = m.right_dim(k + 1);
  // theta rows (s1, l), cols (s2, r).
  Matrix theta[2][2];
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) theta[s1][s2] = m.sites[k][s1] * m.sites[k + 1][s2];
  Matrix big(2 * dl, 2 * dr);
  for (int t1 = 0; t1 < 2; ++t1)
    for (int t2 = 0; t2 < 2; ++t2) {
      Matrix blk = Matrix::Zero(dl, dr);
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) {
          const cplx c = u(2 * t1 + t2, 2 * s1 + s2);
          if (c != 0.0) blk += c * theta[s1][s2];
        }
      big.block(t1 * dl, t2 * dr, dl, dr) = blk;
    }
  Eigen::BDCSVD<Matrix> svd(big, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index r = detail::kept_rank(svd.singularValues(), static_cast<std::size_t>(svd.singularValues().size()), cutoff);
  m.sites[k] = detail::split_rows(svd.matrixU().leftCols(r));
  m.sites[k + 1] = detail::split_cols(svd.singularValues().head(r).asDiagonal() * svd.matrixV().leftCols(r).adjoint());
  m.chi_max = std::max<std::size_t>(m.chi_max, static_cast<std::size_t>(r));
  m.center = k + 1;
}

/// Applies a single-qubit unitary to site k.
inline void apply_one_site(Mps& m, std::size_t k, const Matrix2& u) {
  const SiteTensor old = m.sites[k];
  m.sites[k][0] = u(0, 0) * old[0] + u(0, 1) * old[1];
  m.sites[k][1] = u(1, 0) * old[0] + u(1, 1) * old[1];
}

}  // namespace tnqas
