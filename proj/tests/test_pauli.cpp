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

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

#include "tnqas/core/rng.hpp"
#include "tnqas/pauli/hamiltonian_io.hpp"
#include "tnqas/pauli/pauli_sum.hpp"

namespace tnqas {
namespace {

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

// Independent oracle: explicit Kronecker products of 2x2 Pauli matrices.
Matrix kron_oracle(const PauliSum& h) {
  Matrix2 paulis[4];
  paulis[0] << 1, 0, 0, 1;
  paulis[1] << 0, 1, 1, 0;
  paulis[2] << 0, -kI, kI, 0;
  paulis[3] << 1, 0, 0, -1;
  const auto d = static_cast<Eigen::Index>(dim_of(h.n_qubits()));
  Matrix m = Matrix::Zero(d, d);
  for (const auto& t : h.terms()) {
    Matrix term = Matrix::Identity(1, 1);
    for (std::size_t q = 0; q < h.n_qubits(); ++q) term = kron(term, paulis[static_cast<int>(t.string[q])]);
    m += t.coefficient * term;
  }
  return m;
}

TEST(PauliString, ParsesAndPrints) {
  const auto s = PauliString::from_string("XIYZ");
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0], Pauli::X);
  EXPECT_EQ(s[2], Pauli::Y);
  EXPECT_EQ(s.to_string(), "XIYZ");
  EXPECT_THROW(PauliString::from_string("XQ"), std::invalid_argument);
}

TEST(PauliSum, MergesDuplicates) {
  const PauliSum h(2, {{0.5, PauliString::from_string("XI")}, {0.25, PauliString::from_string("XI")}});
  ASSERT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h.terms()[0].coefficient, 0.75);
}

TEST(PauliSum, DropsCancelledTerms) {
  const PauliSum h(1, {{0.5, PauliString::from_string("Z")}, {-0.5, PauliString::from_string("Z")}});
  EXPECT_TRUE(h.empty());
}

TEST(PauliSum, RejectsBadTerms) {
  EXPECT_THROW(PauliSum(2, {{1.0, PauliString::from_string("XYZ")}}), std::invalid_argument);
  EXPECT_THROW(PauliSum(1, {{std::nan(""), PauliString::from_string("X")}}), std::invalid_argument);
}

TEST(BuildTfim, FieldFreeChain) {
  const auto h = build_tfim(3, 0.0);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_DOUBLE_EQ(h.coefficient(PauliString::from_string("ZZI")), 1.0);
  EXPECT_DOUBLE_EQ(h.coefficient(PauliString::from_string("IZZ")), 1.0);
}

TEST(BuildTfim, SixQubitsWeakField) {
  const auto h = build_tfim(6, 0.05);
  std::size_t zz = 0, x = 0;
  for (const auto& t : h.terms()) {
    const auto s = t.string.to_string();
    if (std::count(s.begin(), s.end(), 'Z') == 2) {
      ++zz;
      EXPECT_DOUBLE_EQ(t.coefficient, 1.0);
    } else {
      ++x;
      EXPECT_DOUBLE_EQ(t.coefficient, 0.05);
    }
  }
  EXPECT_EQ(zz, 5u);
  EXPECT_EQ(x, 6u);
}

TEST(BuildTfim, TermCountLaw) {
  for (std::size_t n = 2; n <= 9; ++n) {
    EXPECT_EQ(build_tfim(n, 0.0).size(), n - 1);
    EXPECT_EQ(build_tfim(n, 0.3).size(), 2 * n - 1);
  }
  EXPECT_THROW(build_tfim(1, 0.1), std::invalid_argument);
}

TEST(BuildTfim, TwoQubitGroundEnergy) { EXPECT_NEAR(exact_ground_energy(build_tfim(2, 0.0)).energy, -1.0, 1e-12); }

TEST(BuildTfim, SixQubitRegression) {
  // Frozen from a dense diagonalisation.
  EXPECT_NEAR(exact_ground_energy(build_tfim(6, 0.05)).energy, -5.005000992881691, 1e-10);
}

TEST(BuildHeisenberg, TermCounts) {
  EXPECT_EQ(build_heisenberg(2).size(), 5u);
  EXPECT_EQ(build_heisenberg(5).size(), 17u);
  EXPECT_THROW(build_heisenberg(1), std::invalid_argument);
}

TEST(BuildHeisenberg, TwoQubitSinglet) {
  // The field cancels on the singlet, leaving the coupling eigenvalue -3.
  const Matrix m = kron_oracle(build_heisenberg(2));
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  EXPECT_NEAR(es.eigenvalues()[0], -3.0, 1e-12);
  EXPECT_NEAR(exact_ground_energy(build_heisenberg(2)).energy, -3.0, 1e-12);
}

TEST(FakeMinimum, Formula) {
  EXPECT_DOUBLE_EQ(fake_minimum_energy(build_tfim(3, 0.05)), -2.15);
  EXPECT_DOUBLE_EQ(fake_minimum_energy(PauliSum(2, {})), 0.0);
  EXPECT_DOUBLE_EQ(fake_minimum_energy(PauliSum(2, {{-0.7, PauliString::from_string("ZZ")}})), -0.7);
}

TEST(FakeMinimum, BoundsGroundEnergyOnRandomSums) {
  Rng rng = make_stream(7, "pauli-bound");
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto h = random_pauli_sum(n, 1 + trial % 11, rng);
    EXPECT_LE(fake_minimum_energy(h), exact_ground_energy(h).energy + 1e-12);
  }
}

TEST(ToDense, SmallCases) {
  const Matrix z = to_dense_matrix(PauliSum(1, {{1.0, PauliString::from_string("Z")}}));
  EXPECT_EQ(z(0, 0), cplx(1.0));
  EXPECT_EQ(z(1, 1), cplx(-1.0));
  EXPECT_EQ(z(0, 1), cplx(0.0));
  EXPECT_TRUE(to_dense_matrix(PauliSum(1, {{1.0, PauliString::from_string("I")}})).isIdentity());
  const Matrix zz = to_dense_matrix(PauliSum(2, {{1.0, PauliString::from_string("ZZ")}}));
  EXPECT_EQ(zz.diagonal(), (Vector(4) << 1, -1, -1, 1).finished());
}

TEST(ToDense, MatchesKroneckerOracleAndIsHermitian) {
  Rng rng = make_stream(11, "pauli-dense");
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto h = random_pauli_sum(n, 12, rng);
    const Matrix m = to_dense_matrix(h);
    EXPECT_LE((m - kron_oracle(h)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(to_dense_matrix(build_tfim(13, 0.1)), std::invalid_argument);
}

TEST(ExactGround, SingleZ) {
  const auto g = exact_ground_energy(PauliSum(1, {{1.0, PauliString::from_string("Z")}}));
  EXPECT_NEAR(g.energy, -1.0, 1e-14);
  EXPECT_NEAR(std::abs(g.state[1]), 1.0, 1e-12);
}

TEST(ExactGround, LanczosAgreesWithDense) {
  const auto h = build_heisenberg(8);
  Eigen::SelfAdjointEigenSolver<Matrix> es(to_dense_matrix(h));
  const auto g = detail::lanczos_ground_state(h);
  EXPECT_NEAR(g.energy, es.eigenvalues()[0], 1e-9);
  const auto h10 = build_tfim(10, 0.05);
  const auto big = exact_ground_energy(h10);
  EXPECT_LE((apply_hamiltonian(h10, big.state) - big.energy * big.state).norm(), 1e-8);
  EXPECT_THROW(exact_ground_energy(build_tfim(13, 0.05)), std::invalid_argument);
}

TEST(ParseHamiltonian, SingleTerm) {
  const auto h = parse_hamiltonian_file("qubits 2\n-1.0 ZZ\n");
  EXPECT_EQ(h.n_qubits(), 2u);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h.terms()[0].coefficient, -1.0);
}

TEST(ParseHamiltonian, MergesDuplicateLines) {
  const auto h = parse_hamiltonian_file("qubits 2\n# comment\n\n0.5 XI\n0.25 XI\n");
  ASSERT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h.terms()[0].coefficient, 0.75);
}

TEST(ParseHamiltonian, ScientificNotation) {
  const auto h = parse_hamiltonian_file("qubits 1\n-2.5e-3 X\n+1E2 Z\n");
  EXPECT_DOUBLE_EQ(h.coefficient(PauliString::from_string("X")), -2.5e-3);
  EXPECT_DOUBLE_EQ(h.coefficient(PauliString::from_string("Z")), 100.0);
}

TEST(ParseHamiltonian, ErrorsNameLineAndCharacter) {
  try {
    parse_hamiltonian_file("qubits 3\n1.0 ZZI\n0.5 XYQ\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("'Q'"), std::string::npos);
  }
  auto line_of = [](const char* text) {
    try {
      parse_hamiltonian_file(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("qubits 2\n1.0 ZZZ\n"), 2u);
  EXPECT_EQ(line_of("qubits 2\nabc ZZ\n"), 2u);
  EXPECT_EQ(line_of("qubits 2\ninf ZZ\n"), 2u);
  EXPECT_EQ(line_of("qubits 2\nnan ZZ\n"), 2u);
  EXPECT_EQ(line_of("qubits 2\n1.0\n"), 2u);
  EXPECT_EQ(line_of("1.0 ZZ\n"), 1u);
  EXPECT_EQ(line_of(""), 1u);
  EXPECT_EQ(line_of("qubits 2\n\n\n1.0 ZZ extra\n"), 4u);
}

TEST(ParseHamiltonian, RoundTripPreservesTermSet) {
  Rng rng = make_stream(3, "pauli-roundtrip");
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = random_pauli_sum(1 + trial % 6, 15, rng);
    const auto back = parse_hamiltonian_file(serialize_hamiltonian(h));
    ASSERT_EQ(back.size(), h.size());
    for (const auto& t : h.terms()) EXPECT_EQ(back.coefficient(t.string), t.coefficient);
  }
}

TEST(Fixtures, H2MatchesStoredFci) {
  const std::string dir = std::string(TNQAS_DATA_DIR) + "/fixtures/";
  std::ifstream manifest(dir + "fixtures.json");
  ASSERT_TRUE(manifest) << "missing fixture manifest";
  const auto j = nlohmann::json::parse(manifest);
  for (const auto& [file, meta] : j.items()) {
    const auto h = load_hamiltonian_file(dir + file);
    EXPECT_EQ(h.n_qubits(), meta.at("qubits").get<std::size_t>()) << file;
    EXPECT_NEAR(exact_ground_energy(h).energy, meta.at("fci_energy").get<double>(), 1e-8) << file;
  }
}

TEST(Fixtures, CorruptFilesFailLoudly) {
  EXPECT_THROW(load_hamiltonian_file("/nonexistent/h.ham"), std::runtime_error);
  EXPECT_THROW(parse_hamiltonian_file("-0.09 IIII\nqubits 4\n"), ParseError);
}

}  // namespace
}  // namespace tnqas
