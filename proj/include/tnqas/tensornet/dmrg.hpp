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
 * Two-site DMRG with a dense eigensolve of the effective Hamiltonian.
 */

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tnqas/core/rng.hpp"
#include "tnqas/tensornet/mpo.hpp"
#include "tnqas/tensornet/mps.hpp"

namespace tnqas {

struct DmrgConfig {
  std::size_t chi_max = 2;
  std::size_t max_sweeps = 20;
  /// Stop once the sweep-to-sweep energy change falls below this.
  double tolerance = 1e-10;
  /// Relative singular-value cutoff applied on top of chi_max.
  double cutoff = 1e-12;

  void validate() const {
    if (chi_max < 1) throw std::invalid_argument("DmrgConfig: chi_max must be >= 1");
    if (max_sweeps < 1) throw std::invalid_argument("DmrgConfig: max_sweeps must be >= 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("DmrgConfig: tolerance must be > 0");
  }
};

struct DmrgResult {
  Mps state;
  double energy = 0.0;
  /// <psi|H|psi> of the truncated state after every full sweep.
  std::vector<double> sweep_energies;
  bool converged = false;
  /// Largest discarded weight seen in the last sweep.
  double truncation_error = 0.0;
};

namespace detail {

// env[w](a, b): bra bond a, operator bond w, ket bond b.
using Environment = std::vector<Matrix>;

inline Environment grow_left(const Environment& env, const SiteTensor& a, const OperatorSite& op) {
  const Eigen::Index wb = op[0].cols();
  Environment next(static_cast<std::size_t>(wb), Matrix::Zero(a[0].cols(), a[0].cols()));
  for (std::size_t w = 0; w < env.size(); ++w)
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) {
        const Matrix& ws = op[2 * s + t];
        if (ws.row(static_cast<Eigen::Index>(w)).isZero(0.0)) continue;
        const Matrix piece = a[s].adjoint() * env[w] * a[t];
        for (Eigen::Index x = 0; x < wb; ++x)
          if (ws(static_cast<Eigen::Index>(w), x) != 0.0) next[static_cast<std::size_t>(x)] += ws(static_cast<Eigen::Index>(w), x) * piece;
      }
  return next;
}

inline Environment grow_right(const Environment& env, const SiteTensor& b, const OperatorSite& op) {
  const Eigen::Index wa = op[0].rows();
  Environment next(static_cast<std::size_t>(wa), Matrix::Zero(b[0].rows(), b[0].rows()));
  for (std::size_t x = 0; x < env.size(); ++x)
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) {
        const Matrix& ws = op[2 * s + t];
        if (ws.col(static_cast<Eigen::Index>(x)).isZero(0.0)) continue;
        const Matrix piece = b[s].conjugate() * env[x] * b[t].transpose();
        for (Eigen::Index w = 0; w < wa; ++w)
          if (ws(w, static_cast<Eigen::Index>(x)) != 0.0) next[static_cast<std::size_t>(w)] += ws(w, static_cast<Eigen::Index>(x)) * piece;
      }
  return next;
}

// Theta layout: row-major over the (2 Dl) x (2 Dr) matrix with rows (s1, a)
// and columns (s2, c).
inline Matrix effective_hamiltonian(const Environment& left, const OperatorSite& w1, const OperatorSite& w2,
                                    const Environment& right, Eigen::Index dl, Eigen::Index dr) {
  const Eigen::Index dim = 4 * dl * dr;
  Matrix h = Matrix::Zero(dim, dim);
  const Eigen::Index cols = 2 * dr;
  for (int s1 = 0; s1 < 2; ++s1)
    for (int t1 = 0; t1 < 2; ++t1)
      for (int s2 = 0; s2 < 2; ++s2)
        for (int t2 = 0; t2 < 2; ++t2) {
          const Matrix bond = w1[2 * s1 + t1] * w2[2 * s2 + t2];
          for (Eigen::Index w = 0; w < bond.rows(); ++w)
            for (Eigen::Index y = 0; y < bond.cols(); ++y) {
              const cplx c = bond(w, y);
              if (c == 0.0) continue;
              const Matrix& l = left[static_cast<std::size_t>(w)];
              const Matrix& r = right[static_cast<std::size_t>(y)];
              for (Eigen::Index a = 0; a < dl; ++a)
                for (Eigen::Index b = 0; b < dl; ++b) {
                  const cplx lab = c * l(a, b);
                  if (lab == 0.0) continue;
                  const Eigen::Index row0 = (s1 * dl + a) * cols + s2 * dr;
                  const Eigen::Index col0 = (t1 * dl + b) * cols + t2 * dr;
                  h.block(row0, col0, dr, dr) += lab * r;
                }
            }
        }
  return h;
}

}  // namespace detail

inline DmrgResult dmrg_ground_state(const Mpo& h, const DmrgConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n = h.size();
  if (n < 2) throw std::invalid_argument("dmrg_ground_state: need at least 2 sites");

  DmrgResult out;
  Mps psi = random_product_mps(n, rng);
  psi.chi_max = cfg.chi_max;

  std::vector<detail::Environment> lenv(n + 1), renv(n + 1);
  lenv[0] = {Matrix::Identity(1, 1)};
  renv[n] = {Matrix::Identity(1, 1)};
  for (std::size_t k = n; k-- > 2;) renv[k] = detail::grow_right(renv[k + 1], psi.sites[k], h.sites[k]);

  auto solve_pair = [&](std::size_t k, bool moving_right) {
    const Eigen::Index dl = psi.left_dim(k), dr = psi.right_dim(k + 1);
    Matrix heff = detail::effective_hamiltonian(lenv[k], h.sites[k], h.sites[k + 1], renv[k + 2], dl, dr);
    heff = (0.5 * (heff + heff.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(heff);
    const Vector v = es.eigenvectors().col(0);
    Matrix theta(2 * dl, 2 * dr);
    for (Eigen::Index i = 0; i < theta.rows(); ++i)
      for (Eigen::Index j = 0; j < theta.cols(); ++j) theta(i, j) = v[i * theta.cols() + j];
    Eigen::BDCSVD<Matrix> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::Index r = detail::kept_rank(svd.singularValues(), cfg.chi_max, cfg.cutoff);
    // Truncation can raise the energy above that of the current pair; the
    // current pair already fits the bond cap, so keep it in that case.
    const Matrix truncated = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
                             svd.matrixV().leftCols(r).adjoint();
    Matrix current(2 * dl, 2 * dr);
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2) current.block(s1 * dl, s2 * dr, dl, dr) = psi.sites[k][s1] * psi.sites[k + 1][s2];
    auto pair_energy = [&](const Matrix& t) {
      Vector x(t.size());
      for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j) x[i * t.cols() + j] = t(i, j);
      return (x.dot(heff * x)).real() / x.squaredNorm();
    };
    if (pair_energy(truncated) > pair_energy(current)) {
      svd.compute(current, Eigen::ComputeThinU | Eigen::ComputeThinV);
      r = detail::kept_rank(svd.singularValues(), cfg.chi_max, cfg.cutoff);
    }
    const RealVector& s = svd.singularValues();
    const double kept = s.head(r).norm();
    out.truncation_error = std::max(out.truncation_error, std::max(0.0, 1.0 - kept * kept / s.squaredNorm()));
    const RealVector sk = s.head(r) / kept;
    if (moving_right) {
      psi.sites[k] = detail::split_rows(svd.matrixU().leftCols(r));
      psi.sites[k + 1] = detail::split_cols(sk.asDiagonal() * svd.matrixV().leftCols(r).adjoint());
      lenv[k + 1] = detail::grow_left(lenv[k], psi.sites[k], h.sites[k]);
    } else {
      psi.sites[k] = detail::split_rows(svd.matrixU().leftCols(r) * sk.asDiagonal());
      psi.sites[k + 1] = detail::split_cols(svd.matrixV().leftCols(r).adjoint());
      renv[k + 1] = detail::grow_right(renv[k + 2], psi.sites[k + 1], h.sites[k + 1]);
    }
  };

  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    out.truncation_error = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) solve_pair(k, true);
    for (std::size_t k = n - 1; k-- > 0;) solve_pair(k, false);
    const double e = expectation(psi, h);
    out.sweep_energies.push_back(e);
    if (std::abs(previous - e) < cfg.tolerance) {
      out.converged = true;
      break;
    }
    previous = e;
  }
  psi.center = 0;
  out.energy = out.sweep_energies.back();
  out.state = std::move(psi);
  return out;
}

}  // namespace tnqas
