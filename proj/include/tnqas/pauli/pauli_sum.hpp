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
 * Qubit Hamiltonians as real-weighted sums of Pauli strings.
 *
 * Qubit 0 is the leftmost character of a Pauli string and the most
 * significant bit of a computational-basis index, so the string "ZI" acts
 * on the first tensor factor.
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tnqas/core/linalg.hpp"

namespace tnqas {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

/// Largest qubit count a Pauli string can address (bit masks are 64 bit).
inline constexpr std::size_t kMaxPauliQubits = 63;

class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::vector<Pauli> ops) : ops_(std::move(ops)) {
    if (ops_.size() > kMaxPauliQubits) throw std::invalid_argument("PauliString: too many qubits");
    rebuild_masks();
  }

  /// Parses "IXYZ"-style text. Throws std::invalid_argument naming the
  /// offending character position.
  static PauliString from_string(std::string_view text) {
    std::vector<Pauli> ops;
    ops.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      switch (text[i]) {
        case 'I': ops.push_back(Pauli::I); break;
        case 'X': ops.push_back(Pauli::X); break;
        case 'Y': ops.push_back(Pauli::Y); break;
        case 'Z': ops.push_back(Pauli::Z); break;
        default:
          throw std::invalid_argument("unknown Pauli letter '" + std::string(1, text[i]) + "' at position " +
                                      std::to_string(i));
      }
    }
    return PauliString(std::move(ops));
  }

  /// Single-qubit or two-qubit factor embedded in an n-qubit identity.
  static PauliString single(std::size_t n, std::size_t q, Pauli p) {
    std::vector<Pauli> ops(n, Pauli::I);
    ops.at(q) = p;
    return PauliString(std::move(ops));
  }
  static PauliString pair(std::size_t n, std::size_t q0, Pauli p0, std::size_t q1, Pauli p1) {
    std::vector<Pauli> ops(n, Pauli::I);
    ops.at(q0) = p0;
    ops.at(q1) = p1;
    return PauliString(std::move(ops));
  }

  std::size_t size() const { return ops_.size(); }
  Pauli operator[](std::size_t q) const { return ops_[q]; }
  const std::vector<Pauli>& ops() const { return ops_; }

  bool is_identity() const { return x_mask_ == 0 && z_mask_ == 0; }

  /// Bits set where the string flips the basis state (X or Y).
  std::uint64_t x_mask() const { return x_mask_; }
  /// Bits set where the string contributes a sign (Y or Z).
  std::uint64_t z_mask() const { return z_mask_; }
  int y_count() const { return y_count_; }

  /// P|b> = phase(b) |b ^ x_mask>.
  cplx phase(std::uint64_t basis) const {
    static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx base = kIPow[y_count_ & 3];
    return (std::popcount(basis & z_mask_) & 1) ? -base : base;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(ops_.size());
    for (const Pauli p : ops_) s.push_back(to_char(p));
    return s;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) { return a.ops_ == b.ops_; }
  friend bool operator<(const PauliString& a, const PauliString& b) { return a.ops_ < b.ops_; }

 private:
  void rebuild_masks() {
    x_mask_ = z_mask_ = 0;
    y_count_ = 0;
    const std::size_t n = ops_.size();
    for (std::size_t q = 0; q < n; ++q) {
      const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
      if (ops_[q] == Pauli::X || ops_[q] == Pauli::Y) x_mask_ |= bit;
      if (ops_[q] == Pauli::Z || ops_[q] == Pauli::Y) z_mask_ |= bit;
      if (ops_[q] == Pauli::Y) ++y_count_;
    }
  }

  std::vector<Pauli> ops_;
  std::uint64_t x_mask_ = 0;
  std::uint64_t z_mask_ = 0;
  int y_count_ = 0;
};

struct PauliTerm {
  double coefficient = 0.0;
  PauliString string;
};

/// Coefficients whose merged magnitude falls below this are dropped.
inline constexpr double kTermMergeTolerance = 1e-14;

/// Immutable weighted sum of Pauli strings with real coefficients.
class PauliSum {
 public:
  PauliSum() = default;

  /// Merges duplicate strings (first-appearance order is kept) and drops
  /// terms that cancel.
  PauliSum(std::size_t n_qubits, const std::vector<PauliTerm>& terms) : n_qubits_(n_qubits) {
    if (n_qubits == 0) throw std::invalid_argument("PauliSum: qubit count must be positive");
    if (n_qubits > kMaxPauliQubits) throw std::invalid_argument("PauliSum: too many qubits");
    std::map<PauliString, std::size_t> index;
    std::vector<PauliTerm> merged;
    for (const auto& t : terms) {
      if (t.string.size() != n_qubits)
        throw std::invalid_argument("PauliSum: string length " + std::to_string(t.string.size()) +
                                    " does not match qubit count " + std::to_string(n_qubits));
      if (!std::isfinite(t.coefficient)) throw std::invalid_argument("PauliSum: non-finite coefficient");
      auto [it, inserted] = index.try_emplace(t.string, merged.size());
      if (inserted)
        merged.push_back(t);
      else
        merged[it->second].coefficient += t.coefficient;
    }
    for (auto& t : merged)
      if (std::abs(t.coefficient) >= kTermMergeTolerance) terms_.push_back(std::move(t));
  }

  std::size_t n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Coefficient of a given string, zero when absent.
  double coefficient(const PauliString& s) const {
    for (const auto& t : terms_)
      if (t.string == s) return t.coefficient;
    return 0.0;
  }

 private:
  std::size_t n_qubits_ = 0;
  std::vector<PauliTerm> terms_;
};

/// H|psi> without forming the matrix.
inline Vector apply_hamiltonian(const PauliSum& h, const Vector& psi) {
  const std::size_t dim = dim_of(h.n_qubits());
  if (static_cast<std::size_t>(psi.size()) != dim) throw std::invalid_argument("apply_hamiltonian: dimension mismatch");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& t : h.terms()) {
    const std::uint64_t x = t.string.x_mask();
    for (std::uint64_t b = 0; b < dim; ++b) out[static_cast<Eigen::Index>(b ^ x)] += t.coefficient * t.string.phase(b) * psi[static_cast<Eigen::Index>(b)];
  }
  return out;
}

/// Sum_i Z_i Z_{i+1} + h Sum_i X_i on an open chain.
inline PauliSum build_tfim(std::size_t n, double field) {
  if (n < 2) throw std::invalid_argument("build_tfim: need at least 2 qubits");
  if (field < 0.0 || !std::isfinite(field)) throw std::invalid_argument("build_tfim: field must be finite and >= 0");
  std::vector<PauliTerm> terms;
  for (std::size_t i = 0; i + 1 < n; ++i) terms.push_back({1.0, PauliString::pair(n, i, Pauli::Z, i + 1, Pauli::Z)});
  if (field > 0.0)
    for (std::size_t i = 0; i < n; ++i) terms.push_back({field, PauliString::single(n, i, Pauli::X)});
  return PauliSum(n, terms);
}

/// Open-chain XXX model with a uniform Z field of unit strength.
inline PauliSum build_heisenberg(std::size_t n) {
  if (n < 2) throw std::invalid_argument("build_heisenberg: need at least 2 qubits");
  std::vector<PauliTerm> terms;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (const Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) terms.push_back({1.0, PauliString::pair(n, i, p, i + 1, p)});
  for (std::size_t i = 0; i < n; ++i) terms.push_back({1.0, PauliString::single(n, i, Pauli::Z)});
  return PauliSum(n, terms);
}

/// -Sum_i |c_i|; never above the true ground energy.
inline double fake_minimum_energy(const PauliSum& h) {
  double mu = 0.0;
  for (const auto& t : h.terms()) mu -= std::abs(t.coefficient);
  return mu;
}

inline Matrix to_dense_matrix(const PauliSum& h) {
  if (h.n_qubits() > kDenseQubitLimit)
    throw std::invalid_argument("to_dense_matrix: " + std::to_string(h.n_qubits()) + " qubits exceeds limit " +
                                std::to_string(kDenseQubitLimit));
  const std::size_t dim = dim_of(h.n_qubits());
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(d, d);
  for (const auto& t : h.terms()) {
    const std::uint64_t x = t.string.x_mask();
    for (std::uint64_t b = 0; b < dim; ++b)
      m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) += t.coefficient * t.string.phase(b);
  }
  return m;
}

struct GroundState {
  double energy = 0.0;
  Vector state;
};

namespace detail {

// Lanczos with full reorthogonalisation and thick restarts from the Ritz vector.
inline GroundState lanczos_ground_state(const PauliSum& h, std::size_t krylov = 120, int restarts = 30,
                                        double tol = 1e-12) {
  const auto d = static_cast<Eigen::Index>(dim_of(h.n_qubits()));
  const auto m_max = static_cast<Eigen::Index>(std::min<std::size_t>(krylov, static_cast<std::size_t>(d)));
  Vector start(d);
  // Deterministic start with no special symmetry.
  for (Eigen::Index i = 0; i < d; ++i) start[i] = cplx(std::cos(0.7 * i + 0.3), std::sin(1.3 * i + 0.1));
  start.normalize();

  GroundState best{std::numeric_limits<double>::infinity(), start};
  for (int r = 0; r < restarts; ++r) {
    Matrix basis(d, m_max);
    RealVector alpha(m_max), beta(m_max);
    basis.col(0) = start;
    Eigen::Index m = 0;
    for (; m < m_max; ++m) {
      Vector w = apply_hamiltonian(h, basis.col(m));
      alpha[m] = basis.col(m).dot(w).real();
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j = 0; j <= m; ++j) w -= basis.col(j).dot(w) * basis.col(j);
      beta[m] = w.norm();
      if (m + 1 == m_max || beta[m] < 1e-14) {
        ++m;
        break;
      }
      basis.col(m + 1) = w / beta[m];
    }
    RealMatrix t = RealMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(t);
    const Vector ritz = (basis.leftCols(m) * es.eigenvectors().col(0).cast<cplx>()).normalized();
    const double residual = (apply_hamiltonian(h, ritz) - es.eigenvalues()[0] * ritz).norm();
    best = {es.eigenvalues()[0], ritz};
    if (residual < tol || m < m_max) break;
    start = ritz;
  }
  return best;
}

}  // namespace detail

/// Lowest eigenvalue and one eigenvector. Dense diagonalisation up to 8
/// qubits, Lanczos above that (oracle limit 12 qubits).
inline GroundState exact_ground_energy(const PauliSum& h) {
  if (h.n_qubits() > kDenseQubitLimit)
    throw std::invalid_argument("exact_ground_energy: " + std::to_string(h.n_qubits()) +
                                " qubits exceeds oracle limit " + std::to_string(kDenseQubitLimit));
  if (h.n_qubits() <= 8) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(to_dense_matrix(h));
    return {es.eigenvalues()[0], es.eigenvectors().col(0)};
  }
  return detail::lanczos_ground_state(h);
}

}  // namespace tnqas
