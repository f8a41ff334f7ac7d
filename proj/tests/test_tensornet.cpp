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

#include <gtest/gtest.h>

#include <random>

#include "tnqas/core/rng.hpp"
#include "tnqas/tensornet/dmrg.hpp"
#include "tnqas/tensornet/mpo.hpp"
#include "tnqas/tensornet/mps.hpp"

namespace tnqas {
namespace {

StateVector random_state(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(dim_of(n)));
  for (auto& a : v) a = cplx(g(rng), g(rng));
  return StateVector::from_amplitudes(v.normalized());
}

PauliSum random_pauli_sum(std::size_t n, std::size_t terms, Rng& rng) {
  std::uniform_int_distribution<int> letter(0, 3);
  std::normal_distribution<double> coeff(0.0, 1.0);
  std::vector<PauliTerm> out;
  for (std::size_t k = 0; k < terms; ++k) {
    std::string s(n, 'I');
    for (auto& ch : s) ch = "IXYZ"[letter(rng)];
    out.push_back({coeff(rng), PauliString::from_string(s)});
  }
  return PauliSum(n, out);
}

// Unnormalised dense contraction, written independently of the library.
Vector dense_contract(const Mps& m) {
  const std::size_t n = m.size();
  Vector v(static_cast<Eigen::Index>(dim_of(n)));
  for (std::size_t idx = 0; idx < dim_of(n); ++idx) {
    Matrix acc = Matrix::Identity(1, 1);
    for (std::size_t k = 0; k < n; ++k) acc = acc * m.sites[k][(idx >> (n - 1 - k)) & 1];
    v[static_cast<Eigen::Index>(idx)] = acc(0, 0);
  }
  return v;
}

TEST(Mps, ProductZeroState) {
  const auto v = statevector_from_mps(zero_mps(4));
  EXPECT_NEAR(std::abs(v.amplitudes()[0]), 1.0, 1e-15);
  EXPECT_NEAR(v.amplitudes().tail(15).norm(), 0.0, 1e-15);
}

TEST(Mps, BellState) {
  Mps bell;
  bell.chi_max = 2;
  SiteTensor a{Matrix(1, 2), Matrix(1, 2)};
  a[0] << 1, 0;
  a[1] << 0, 1;
  SiteTensor b{Matrix(2, 1), Matrix(2, 1)};
  b[0] << 1, 0;
  b[1] << 0, 1;
  bell.sites = {a, b};
  const auto v = statevector_from_mps(bell).amplitudes();
  EXPECT_NEAR(v[0].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(v[1]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v[2]), 0.0, 1e-15);
  EXPECT_NEAR(v[3].real(), 1 / std::sqrt(2.0), 1e-15);
}

TEST(Mps, RoundTripAtFullBond) {
  Rng rng = make_stream(1, "mps");
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto v = random_state(n, rng);
    const auto m = mps_from_statevector(v, std::size_t{1} << (n / 2));
    EXPECT_LE(m.max_bond(), std::size_t{1} << (n / 2));
    const cplx f = statevector_from_mps(m).amplitudes().dot(v.amplitudes());
    EXPECT_NEAR(std::abs(f), 1.0, 1e-10);
  }
}

TEST(Mps, ZeroStateHasUnitBonds) {
  for (const std::size_t chi : {1u, 2u, 8u}) EXPECT_EQ(mps_from_statevector(StateVector::zero_state(5), chi).max_bond(), 1u);
}

TEST(Mps, GhzExactAtBondTwo) {
  Vector v = Vector::Zero(32);
  v[0] = v[31] = 1 / std::sqrt(2.0);
  const auto m = mps_from_statevector(StateVector::from_amplitudes(v), 2);
  EXPECT_EQ(m.max_bond(), 2u);
  EXPECT_NEAR(std::abs(statevector_from_mps(m).amplitudes().dot(v)), 1.0, 1e-12);
}

TEST(Mps, TruncationMatchesProjectionOracle) {
  Rng rng = make_stream(2, "mps");
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 6;
    const auto v = random_state(n, rng);
    // Dense oracle: project onto the chi leading left singular vectors at
    // every cut in turn; the squared norm left over is the fidelity.
    Vector w = v.amplitudes();
    double first_cut_weight = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      const auto rows = static_cast<Eigen::Index>(dim_of(k)), cols = static_cast<Eigen::Index>(dim_of(n - k));
      Matrix m = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(w.data(), rows, cols);
      Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
      const Eigen::Index r = std::min<Eigen::Index>(2, svd.singularValues().size());
      if (k == 1) first_cut_weight = svd.singularValues().head(r).squaredNorm();
      const Matrix u = svd.matrixU().leftCols(r);
      const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> p = u * (u.adjoint() * m);
      w = Eigen::Map<const Vector>(p.data(), p.size());
    }
    const double oracle = w.squaredNorm();
    const auto m = mps_from_statevector(v, 2);
    const double fid = std::norm(statevector_from_mps(m).amplitudes().dot(v.amplitudes()));
    EXPECT_LT(fid, 1.0);
    EXPECT_NEAR(fid, oracle, 1e-10);
    EXPECT_LE(fid, first_cut_weight + 1e-12);
  }
}

TEST(Mps, OverlapBasics) {
  Rng rng = make_stream(3, "mps");
  const auto m = random_mps(6, 3, rng);
  EXPECT_NEAR(std::abs(overlap(m, m) - 1.0), 0.0, 1e-10);
  EXPECT_EQ(overlap(basis_mps({0, 0, 0}), basis_mps({1, 1, 1})), cplx(0.0));
  EXPECT_THROW(overlap(zero_mps(3), zero_mps(4)), std::invalid_argument);
}

TEST(Mps, OverlapMatchesDense) {
  Rng rng = make_stream(4, "mps");
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_mps(5, 1 + trial % 4, rng);
    const auto b = random_mps(5, 1 + (trial + 1) % 4, rng);
    const cplx dense = dense_contract(a).dot(dense_contract(b));
    EXPECT_LE(std::abs(overlap(a, b) - dense), 1e-10);
    EXPECT_LE(std::abs(overlap(a, b)), 1.0 + 1e-10);
  }
}

TEST(Mps, TwoSiteGateMatchesStatevector) {
  Rng rng = make_stream(5, "mps");
  auto m = random_mps(5, 2, rng);
  StateVector v = StateVector::from_amplitudes(dense_contract(m));
  for (std::size_t k = 0; k + 1 < 5; ++k) {
    const Matrix4 u = Eigen::HouseholderQR<Matrix>(Matrix::Random(4, 4)).householderQ();
    apply_two_site(m, k, u);
    v.apply(GateOp::unitary(k, k + 1, u));
  }
  EXPECT_LE((dense_contract(m) - v.amplitudes()).norm(), 1e-12);
}

TEST(Mpo, SingleProductTermHasUnitBond) {
  const auto w = mpo_from_pauli_sum(PauliSum(2, {{1.0, PauliString::from_string("ZZ")}}));
  EXPECT_EQ(w.max_bond(), 1u);
}

TEST(Mpo, TfimDenseContraction) {
  const auto h = build_tfim(4, 0.05);
  const auto w = mpo_from_pauli_sum(h);
  EXPECT_LE((mpo_to_dense(w) - to_dense_matrix(h)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(w.max_bond(), 3u);
}

TEST(Mpo, RandomSumsContractCorrectly) {
  Rng rng = make_stream(6, "mpo");
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto h = random_pauli_sum(n, 25, rng);
    EXPECT_LE((mpo_to_dense(mpo_from_pauli_sum(h)) - to_dense_matrix(h)).cwiseAbs().maxCoeff(), 1e-10) << n;
  }
}

TEST(Mpo, IdentityExpectationIsCoefficient) {
  Rng rng = make_stream(7, "mpo");
  const auto w = mpo_from_pauli_sum(PauliSum(4, {{0.37, PauliString::from_string("IIII")}}));
  EXPECT_NEAR(expectation(random_mps(4, 2, rng), w), 0.37, 1e-12);
}

TEST(Mpo, ExpectationMatchesStatevector) {
  Rng rng = make_stream(8, "mpo");
  const auto h = random_pauli_sum(5, 20, rng);
  const auto m = random_mps(5, 3, rng);
  EXPECT_NEAR(expectation(m, mpo_from_pauli_sum(h)), expectation(statevector_from_mps(m), h), 1e-10);
}

TEST(Dmrg, TwoSiteIsing) {
  Rng rng = make_stream(9, "dmrg");
  const auto r = dmrg_ground_state(mpo_from_pauli_sum(build_tfim(2, 0.0)), DmrgConfig{2, 20, 1e-10, 1e-12}, rng);
  EXPECT_NEAR(r.energy, -1.0, 1e-10);
}

TEST(Dmrg, LargeBondMatchesDense) {
  Rng rng = make_stream(10, "dmrg");
  const auto h = build_tfim(6, 0.05);
  const auto r = dmrg_ground_state(mpo_from_pauli_sum(h), DmrgConfig{16, 20, 1e-10, 1e-12}, rng);
  EXPECT_NEAR(r.energy, exact_ground_energy(h).energy, 1e-8);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(norm(r.state), 1.0, 1e-10);
}

TEST(Dmrg, BondTwoIsVariational) {
  Rng rng = make_stream(11, "dmrg");
  const auto h = build_tfim(6, 0.05);
  const auto r = dmrg_ground_state(mpo_from_pauli_sum(h), DmrgConfig{2, 20, 1e-10, 1e-12}, rng);
  const double exact = exact_ground_energy(h).energy;
  EXPECT_GE(r.energy, exact - 1e-9);
  EXPECT_LE(r.state.max_bond(), 2u);
  EXPECT_NEAR(r.energy, expectation(statevector_from_mps(r.state), h), 1e-10);
}

TEST(Dmrg, SweepsAreMonotoneAndBounded) {
  Rng seeds = make_stream(12, "dmrg");
  for (const std::size_t chi : {1u, 2u, 3u, 4u}) {
    for (const auto& h : {build_tfim(6, 0.5), build_heisenberg(5), build_tfim(5, 0.05)}) {
      Rng rng = make_stream(seeds(), "dmrg-init");
      const auto r = dmrg_ground_state(mpo_from_pauli_sum(h), DmrgConfig{chi, 20, 1e-10, 1e-12}, rng);
      EXPECT_GE(r.energy, exact_ground_energy(h).energy - 1e-9);
      for (std::size_t s = 1; s < r.sweep_energies.size(); ++s) EXPECT_LE(r.sweep_energies[s], r.sweep_energies[s - 1] + 1e-9);
    }
  }
}

TEST(Dmrg, RejectsBadConfig) {
  Rng rng = make_stream(13, "dmrg");
  EXPECT_THROW(dmrg_ground_state(mpo_from_pauli_sum(build_tfim(3, 0.1)), DmrgConfig{0, 20, 1e-10, 1e-12}, rng), std::invalid_argument);
  EXPECT_THROW(dmrg_ground_state(mpo_from_pauli_sum(build_tfim(3, 0.1)), DmrgConfig{2, 20, 0.0, 1e-12}, rng), std::invalid_argument);
}

}  // namespace
}  // namespace tnqas
