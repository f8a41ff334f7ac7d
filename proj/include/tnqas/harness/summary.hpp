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
 * Aggregation of episode records and the Method/Error/Depth/CNOT/ROT/
 * SuccessProb table, as CSV and as aligned text.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tnqas/harness/records.hpp"

namespace tnqas {

struct SeedSummary {
  std::uint64_t seed = 0;
  std::size_t episodes = 0;
  std::size_t successes = 0;
  std::size_t nfev = 0;
  EpisodeRecord best;  // lowest-error episode, earliest on ties
  /// Fewest gates (CNOT + ROT) among successful episodes.
  std::optional<std::size_t> min_gates_to_accuracy;
  std::optional<std::size_t> first_success;  // 1-based episode count

  double success_probability() const { return episodes ? double(successes) / double(episodes) : 0.0; }
};

struct RunSummary {
  std::string method;
  std::vector<SeedSummary> seeds;  // only seeds with at least one record

  bool empty() const { return seeds.empty(); }
  std::size_t episodes() const {
    std::size_t n = 0;
    for (const auto& s : seeds) n += s.episodes;
    return n;
  }
  std::size_t successes() const {
    std::size_t n = 0;
    for (const auto& s : seeds) n += s.successes;
    return n;
  }
  std::size_t nfev() const {
    std::size_t n = 0;
    for (const auto& s : seeds) n += s.nfev;
    return n;
  }
  /// Successful episodes over all episodes.
  double success_probability() const { return episodes() ? double(successes()) / double(episodes()) : 0.0; }

  /// Best record over all seeds; requires !empty().
  const EpisodeRecord& best() const {
    const SeedSummary* b = &seeds.front();
    for (const auto& s : seeds)
      if (s.best.error < b->best.error) b = &s;
    return b->best;
  }

  /// Mean and population standard deviation of per-seed best errors.
  std::pair<double, double> best_error_stats() const {
    if (seeds.empty()) return {0.0, 0.0};
    double m = 0.0;
    for (const auto& s : seeds) m += s.best.error;
    m /= double(seeds.size());
    double v = 0.0;
    for (const auto& s : seeds) v += (s.best.error - m) * (s.best.error - m);
    return {m, std::sqrt(v / double(seeds.size()))};
  }
};

/// Groups records by seed (first-seen order). With `e_exact` the errors are
/// recomputed against it; otherwise the stored errors are used.
inline RunSummary summarize(const std::string& method, const std::vector<EpisodeRecord>& records,
                            std::optional<double> e_exact = std::nullopt) {
  RunSummary out;
  out.method = method;
  std::map<std::uint64_t, std::size_t> index;
  for (EpisodeRecord r : records) {
    if (e_exact) r.error = r.best_energy - *e_exact;
    auto it = index.find(r.seed);
    if (it == index.end()) {
      it = index.emplace(r.seed, out.seeds.size()).first;
      out.seeds.push_back({});
      out.seeds.back().seed = r.seed;
      out.seeds.back().best = r;
    }
    SeedSummary& s = out.seeds[it->second];
    ++s.episodes;
    s.nfev += r.nfev;
    if (r.error < s.best.error) s.best = r;
    if (r.success) {
      ++s.successes;
      const std::size_t gates = r.cnot + r.rot;
      if (!s.min_gates_to_accuracy || gates < *s.min_gates_to_accuracy) s.min_gates_to_accuracy = gates;
      if (!s.first_success) s.first_success = s.episodes;
    }
  }
  return out;
}

inline nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json j{{"method", s.method}, {"empty", s.empty()}};
  if (s.empty()) return j;
  const auto [mean, sd] = s.best_error_stats();
  j["episodes"] = s.episodes();
  j["successes"] = s.successes();
  j["success_probability"] = s.success_probability();
  j["nfev"] = s.nfev();
  j["best_error_mean"] = mean;
  j["best_error_std"] = sd;
  j["best"] = to_json(s.best());
  for (const auto& seed : s.seeds) {
    nlohmann::json e{{"seed", seed.seed},
                     {"episodes", seed.episodes},
                     {"successes", seed.successes},
                     {"success_probability", seed.success_probability()},
                     {"nfev", seed.nfev},
                     {"best_error", seed.best.error},
                     {"best_episode", seed.best.episode},
                     {"circuit", seed.best.circuit}};
    e["min_gates_to_accuracy"] = seed.min_gates_to_accuracy ? nlohmann::json(*seed.min_gates_to_accuracy) : nlohmann::json();
    e["first_success"] = seed.first_success ? nlohmann::json(*seed.first_success) : nlohmann::json();
    j["seeds"].push_back(e);
  }
  return j;
}

inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> c{"Method", "Error", "Depth", "CNOT", "ROT", "SuccessProb"};
  return c;
}

/// One table row; an empty summary shows "n/a" rather than zeros.
inline std::vector<std::string> report_row(const RunSummary& s) {
  if (s.empty()) return {s.method, "n/a", "n/a", "n/a", "n/a", "n/a"};
  const EpisodeRecord& b = s.best();
  char err[32], prob[32];
  std::snprintf(err, sizeof(err), "%.3e", b.error);
  std::snprintf(prob, sizeof(prob), "%.4f", s.success_probability());
  return {s.method, err, std::to_string(b.depth), std::to_string(b.cnot), std::to_string(b.rot), prob};
}

namespace detail {

inline std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) return f;
  std::string q = "\"";
  for (const char c : f) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace detail

inline std::string report_csv(const std::vector<RunSummary>& rows) {
  std::vector<std::vector<std::string>> table{report_columns()};
  for (const auto& s : rows) table.push_back(report_row(s));
  std::string out;
  for (const auto& r : table) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + detail::csv_field(r[i]);
    out += '\n';
  }
  return out;
}

/// Left-aligned Method, right-aligned numbers, two spaces between columns.
inline std::string report_text(const std::vector<RunSummary>& rows) {
  std::vector<std::vector<std::string>> table{report_columns()};
  for (const auto& s : rows) table.push_back(report_row(s));
  std::vector<std::size_t> width(report_columns().size(), 0);
  for (const auto& r : table)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  std::string out;
  for (const auto& r : table) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string pad(width[i] - r[i].size(), ' ');
      if (i) line += "  ";
      line += i == 0 ? r[i] + pad : pad + r[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

/// summary.csv, summary.txt and summary.json for one run.
inline void write_summary(const std::filesystem::path& dir, const RunSummary& s) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
    out << text;
  };
  put("summary.csv", report_csv({s}));
  put("summary.txt", report_text({s}));
  put("summary.json", to_json(s).dump(2) + "\n");
}

}  // namespace tnqas
