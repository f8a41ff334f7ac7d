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
 * Text format for Hamiltonians:
 *
 *     qubits <n>
 *     <coefficient> <pauli-string>
 *     ...
 *
 * Line 1 is the header. Later lines that are blank or start with '#' are
 * ignored. Strings have exactly n characters over {I,X,Y,Z}, qubit 0
 * leftmost. Coefficients accept scientific notation.
 */

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tnqas/pauli/pauli_sum.hpp"

namespace tnqas {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(std::string_view tok, double& out) {
  // std::from_chars rejects a leading '+', strtod does not; accept both.
  std::string buf(tok);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && !buf.empty();
}

}  // namespace detail

inline PauliSum parse_hamiltonian_file(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t n_qubits = 0;
  bool have_header = false;
  std::vector<PauliTerm> terms;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = detail::trim(raw);

    if (!have_header) {
      std::istringstream in{std::string(line)};
      std::string key;
      long long n = 0;
      std::string extra;
      if (!(in >> key >> n) || key != "qubits" || (in >> extra))
        throw ParseError(line_no, "expected header 'qubits <n>'");
      if (n <= 0 || static_cast<std::size_t>(n) > kMaxPauliQubits) throw ParseError(line_no, "invalid qubit count");
      n_qubits = static_cast<std::size_t>(n);
      have_header = true;
      continue;
    }
    if (line.empty() || line.front() == '#') continue;

    const auto sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos) throw ParseError(line_no, "expected '<coefficient> <pauli-string>'");
    const auto coeff_tok = line.substr(0, sep);
    const auto string_tok = detail::trim(line.substr(sep));
    if (string_tok.find_first_of(" \t") != std::string_view::npos)
      throw ParseError(line_no, "unexpected trailing tokens");

    double c = 0.0;
    if (!detail::parse_double(coeff_tok, c)) throw ParseError(line_no, "malformed coefficient '" + std::string(coeff_tok) + "'");
    if (!std::isfinite(c)) throw ParseError(line_no, "coefficient is not a finite real");

    for (std::size_t i = 0; i < string_tok.size(); ++i)
      if (std::string_view("IXYZ").find(string_tok[i]) == std::string_view::npos)
        throw ParseError(line_no, "unknown Pauli letter '" + std::string(1, string_tok[i]) + "' at column " +
                                      std::to_string(i + 1) + " of '" + std::string(string_tok) + "'");
    if (string_tok.size() != n_qubits)
      throw ParseError(line_no, "string '" + std::string(string_tok) + "' has length " +
                                    std::to_string(string_tok.size()) + ", expected " + std::to_string(n_qubits));
    terms.push_back({c, PauliString::from_string(string_tok)});
  }
  if (!have_header) throw ParseError(1, "empty file, expected header 'qubits <n>'");
  return PauliSum(n_qubits, terms);
}

inline std::string serialize_hamiltonian(const PauliSum& h) {
  std::string out = "qubits " + std::to_string(h.n_qubits()) + "\n";
  char buf[64];
  for (const auto& t : h.terms()) {
    std::snprintf(buf, sizeof(buf), "%.17g", t.coefficient);
    out += buf;
    out += ' ';
    out += t.string.to_string();
    out += '\n';
  }
  return out;
}

inline PauliSum load_hamiltonian_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open Hamiltonian file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_hamiltonian_file(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
  }
}

}  // namespace tnqas
