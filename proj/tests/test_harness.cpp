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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tnqas/harness/training.hpp"

namespace tnqas {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tnqas-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrainingOptions in_dir(const fs::path& dir) {
  TrainingOptions o;
  o.dir = dir;
  return o;
}

RunConfig small_config() {
  RunConfig c;
  c.model = "tfim";
  c.qubits = 3;
  c.field = 0.5;
  c.variant = "vanilla";
  c.agent = "ddqn";
  c.max_steps = 4;
  c.opt_iters = 100;
  c.episodes = 6;
  c.seeds = {3};
  c.checkpoint_every = 2;
  c.ddqn.hidden = {16};
  c.ddqn.batch = 8;
  c.ddqn.buffer = 64;
  c.ddqn.target_sync = 5;
  return c;
}

std::vector<nlohmann::json> stripped(const std::vector<EpisodeRecord>& rs) {
  std::vector<nlohmann::json> out;
  for (const auto& r : rs) out.push_back(deterministic_json(r));
  return out;
}

TEST(Config, RoundTripAndOverrides) {
  RunConfig c = small_config();
  c.seeds = {1, 2, 5};
  c.ddqn.hidden = {7, 9};
  const RunConfig back = RunConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
  EXPECT_EQ(back.to_json(), c.to_json());
  c.set("env.max_steps=11");
  c.set("env.variant=trainable");
  c.set("run.seeds=[4,8]");
  EXPECT_EQ(c.max_steps, 11u);
  EXPECT_EQ(c.variant, "trainable");
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 8}));
  EXPECT_THROW(c.set("env.max_step=3"), std::invalid_argument);
  EXPECT_THROW(c.set("env.max_steps=\"three\""), std::invalid_argument);
  EXPECT_THROW(c.set("no-equals"), std::invalid_argument);
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(RunConfig{}.validate());
  RunConfig c;
  c.seeds.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.variant = "hybrid";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.agent = "ppo";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.model = "file";
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, MissingHamiltonianFileFailsEarly) {
  RunConfig c;
  c.model = "file";
  c.hamiltonian_file = "/nonexistent/h.ham";
  c.validate();
  EXPECT_THROW(build_hamiltonian(c), std::runtime_error);
}

TEST(Config, WorkerCount) {
  EXPECT_EQ(worker_count(4), 4u);
  ::setenv("TNQAS_WORKERS", "3", 1);
  EXPECT_EQ(worker_count(0), 3u);
  ::setenv("TNQAS_WORKERS", "three", 1);
  EXPECT_THROW(worker_count(0), std::invalid_argument);
  ::unsetenv("TNQAS_WORKERS");
  EXPECT_EQ(worker_count(0), 1u);
}

TEST(Pipeline, Tfim6WarmStartPersisted) {
  RunConfig c;
  c.qubits = 6;
  c.field = 0.05;
  const auto h = build_hamiltonian(c);
  const fs::path dir = fresh_dir("pipeline");
  const auto a = run_pipeline(c, h, dir);
  EXPECT_GE(a.fit.overlap, 0.99);
  EXPECT_GE(a.fit.transpile_fidelity, 1 - 1e-7);
  EXPECT_EQ(count_gates(a.fit.circuit).cnot, 15u);
  ASSERT_TRUE(a.dmrg.residual());
  EXPECT_GE(*a.dmrg.residual(), 0.0);

  const Circuit warm = load_warmstart(dir);
  ASSERT_EQ(warm.size(), a.fit.circuit.size());
  EXPECT_EQ(warm.parameters(), a.fit.circuit.parameters());
  const DmrgArtifacts d = load_dmrg(dir);
  EXPECT_EQ(d.energy, a.dmrg.energy);
  EXPECT_NEAR(std::abs(overlap(d.mps, a.dmrg.mps)), 1.0, 1e-12);
  const auto pj = nlohmann::json::parse(slurp(dir / "pipeline.json"));
  EXPECT_EQ(pj.at("cnot"), 15);
}

TEST(Pipeline, LargeBondDimensionResidual) {
  RunConfig c;
  c.qubits = 6;
  c.field = 0.05;
  c.chi = 16;
  const auto d = run_dmrg(c, build_hamiltonian(c));
  ASSERT_TRUE(d.residual());
  EXPECT_LT(std::abs(*d.residual()), 1e-8);
}

TEST(Pipeline, MissingWarmStart) {
  EXPECT_THROW(load_warmstart(fresh_dir("nowarm")), std::runtime_error);
}

EpisodeRecord make_record(std::uint64_t seed, std::size_t ep, double energy, bool success, std::size_t cnot) {
  EpisodeRecord r;
  r.seed = seed;
  r.episode = ep;
  r.best_energy = energy;
  r.reference = -1.0;
  r.error = energy + 1.0;
  r.success = success;
  Circuit c(2);
  for (std::size_t i = 0; i < cnot; ++i) c.add(GateOp::cnot(0, 1));
  c.add(GateOp::ry(0, 0.25));
  r.set_circuit(c);
  r.nfev = 10 + ep;
  return r;
}

TEST(Records, JsonRoundTripAndCorruptLines) {
  const fs::path dir = fresh_dir("records");
  const auto path = records_path(dir, 7);
  {
    RecordWriter w(path, false);
    w.write(make_record(7, 0, -0.5, false, 1));
    w.write_line("{\"seed\": 7, \"episode\": 1, trunc");
    w.write(make_record(7, 2, -0.9, true, 2));
  }
  std::vector<std::string> warnings;
  const auto rs = read_records(path, [&](const std::string& m) { warnings.push_back(m); });
  ASSERT_EQ(rs.size(), 2u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find(":2:"), std::string::npos);
  EXPECT_EQ(deterministic_json(rs[1]), deterministic_json(make_record(7, 2, -0.9, true, 2)));
  const auto kept = truncate_records(path, 1);
  EXPECT_EQ(kept.size(), 1u);
  EXPECT_EQ(read_records(path).size(), 1u);
  EXPECT_TRUE(read_records(dir / "absent.jsonl").empty());
}

TEST(Summary, SingleSuccessfulEpisode) {
  const auto s = summarize("m", {make_record(0, 0, -0.99, true, 5)});
  ASSERT_FALSE(s.empty());
  EXPECT_EQ(s.best().cnot, 5u);
  EXPECT_EQ(s.best().rot, 1u);
  EXPECT_EQ(s.success_probability(), 1.0);
  EXPECT_EQ(*s.seeds[0].min_gates_to_accuracy, 6u);
  EXPECT_EQ(*s.seeds[0].first_success, 1u);
}

TEST(Summary, ProbabilityBestAndRecompute) {
  std::vector<EpisodeRecord> rs{make_record(1, 0, -0.5, false, 1), make_record(1, 1, -0.9, true, 3),
                                make_record(2, 0, -0.9, true, 4),  make_record(2, 1, -0.9, true, 2),
                                make_record(2, 2, -0.1, false, 0)};
  const auto s = summarize("m", rs);
  EXPECT_EQ(s.episodes(), 5u);
  EXPECT_EQ(s.successes(), 3u);
  EXPECT_EQ(s.success_probability(), 3.0 / 5.0);
  EXPECT_EQ(s.seeds[1].best.episode, 0u);  // tie keeps the earlier episode
  EXPECT_EQ(*s.seeds[1].min_gates_to_accuracy, 3u);
  EXPECT_EQ(s.nfev(), 10u + 11 + 10 + 11 + 12);
  const auto r = summarize("m", rs, -0.95);
  EXPECT_NEAR(r.best().error, 0.05, 1e-15);
  const auto [mean, sd] = s.best_error_stats();
  EXPECT_NEAR(mean, 0.1, 1e-15);
  EXPECT_NEAR(sd, 0.0, 1e-15);
}

TEST(Summary, EmptyMarker) {
  const auto s = summarize("none", {});
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.success_probability(), 0.0);
  EXPECT_EQ(report_row(s), (std::vector<std::string>{"none", "n/a", "n/a", "n/a", "n/a", "n/a"}));
  EXPECT_EQ(to_json(s).at("empty"), true);
}

std::vector<RunSummary> golden_summaries() {
  return {summarize("ddqn/fixed", {make_record(0, 0, -0.9997, true, 5), make_record(0, 1, -0.8, false, 2)}),
          summarize("random/vanilla", {make_record(0, 0, -0.75, false, 12)}), summarize("sa", {})};
}

TEST(Report, Golden) {
  const auto rows = golden_summaries();
  EXPECT_EQ(report_csv(rows), slurp(fs::path(TNQAS_DATA_DIR) / "golden" / "report.csv"));
  EXPECT_EQ(report_text(rows), slurp(fs::path(TNQAS_DATA_DIR) / "golden" / "report.txt"));
}

TEST(Report, CsvAndTextAgree) {
  const auto rows = golden_summaries();
  std::istringstream csv(report_csv(rows)), txt(report_text(rows));
  std::string cl, tl;
  std::size_t lines = 0;
  while (std::getline(csv, cl) && std::getline(txt, tl)) {
    std::vector<std::string> a, b;
    std::stringstream cs(cl);
    for (std::string f; std::getline(cs, f, ',');) a.push_back(f);
    std::stringstream ts(tl);
    for (std::string f; ts >> f;) b.push_back(f);
    EXPECT_EQ(a, b);
    ++lines;
  }
  EXPECT_EQ(lines, rows.size() + 1);
  EXPECT_EQ(report_columns(), (std::vector<std::string>{"Method", "Error", "Depth", "CNOT", "ROT", "SuccessProb"}));
}

TEST(Training, ZeroBudget) {
  RunConfig c = small_config();
  c.episodes = 0;
  const fs::path dir = fresh_dir("zero");
  const auto r = run_training(c, build_hamiltonian(c), std::nullopt, in_dir(dir));
  EXPECT_TRUE(r.seeds[0].records.empty());
  EXPECT_TRUE(r.summary.empty());
  EXPECT_EQ(r.summary.success_probability(), 0.0);
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  EXPECT_NE(slurp(dir / "summary.csv").find("n/a"), std::string::npos);
}

TEST(Training, DeterministicAcrossRunsAndWorkers) {
  RunConfig c = small_config();
  c.seeds = {3, 4};
  const auto h = build_hamiltonian(c);
  TrainingOptions one;
  one.workers = 1;
  TrainingOptions two;
  two.workers = 2;
  const auto a = run_training(c, h, std::nullopt, one);
  const auto b = run_training(c, h, std::nullopt, two);
  for (std::size_t i = 0; i < 2; ++i) {
    ASSERT_EQ(a.seeds[i].records.size(), c.episodes);
    EXPECT_EQ(stripped(a.seeds[i].records), stripped(b.seeds[i].records));
  }
  EXPECT_NE(stripped(a.seeds[0].records), stripped(a.seeds[1].records));
}

TEST(Training, ResumeMatchesUninterrupted) {
  RunConfig c = small_config();
  c.episodes = 7;
  const auto h = build_hamiltonian(c);
  const fs::path ref_dir = fresh_dir("resume-ref"), dir = fresh_dir("resume");
  const auto ref = run_training(c, h, std::nullopt, in_dir(ref_dir));

  TrainingOptions kill = in_dir(dir);
  kill.interrupt = [](std::uint64_t, std::size_t done) { return done == 5; };  // last checkpoint at 4
  const auto partial = run_training(c, h, std::nullopt, kill);
  EXPECT_EQ(partial.seeds[0].stop_reason, "interrupted");
  EXPECT_EQ(read_records(records_path(dir, 3)).size(), 5u);

  const auto resumed = run_training(c, h, std::nullopt, in_dir(dir));
  EXPECT_EQ(resumed.seeds[0].resumed_from, 4u);
  EXPECT_EQ(stripped(resumed.seeds[0].records), stripped(ref.seeds[0].records));
  EXPECT_EQ(stripped(read_records(records_path(dir, 3))), stripped(ref.seeds[0].records));
  EXPECT_EQ(report_csv({resumed.summary}), report_csv({ref.summary}));

  // A finished run resumes to the same place.
  const auto again = run_training(c, h, std::nullopt, in_dir(dir));
  EXPECT_EQ(again.seeds[0].resumed_from, 7u);
  EXPECT_EQ(stripped(again.seeds[0].records), stripped(ref.seeds[0].records));

  c.max_steps = 5;
  EXPECT_THROW(run_training(c, h, std::nullopt, in_dir(dir)), std::runtime_error);
}

TEST(Training, TraceNfevMatchesSummary) {
  RunConfig c = small_config();
  c.trace = true;
  c.agent = "random";
  const fs::path dir = fresh_dir("trace");
  const auto r = run_training(c, build_hamiltonian(c), std::nullopt, in_dir(dir));
  std::ifstream in(dir / "trace-3.jsonl");
  std::size_t total = 0, lines = 0;
  for (std::string line; std::getline(in, line); ++lines) total += nlohmann::json::parse(line).at("nfev").get<std::size_t>();
  EXPECT_EQ(total, r.summary.nfev());
  std::size_t steps = 0;
  for (const auto& rec : r.seeds[0].records) steps += rec.steps;
  EXPECT_EQ(lines, steps + c.episodes);
}

TEST(Training, FixedVariantCountsAgentGatesOnly) {
  RunConfig c;
  c.qubits = 5;
  c.field = 0.05;
  c.variant = "fixed";
  c.agent = "random";
  c.max_steps = 3;
  c.opt_iters = 100;
  c.episodes = 3;
  c.seeds = {0};
  const auto h = build_hamiltonian(c);
  const Circuit warm = run_pipeline(c, h).fit.circuit;
  const auto fixed = run_training(c, h, warm);
  for (const auto& r : fixed.seeds[0].records) {
    const Circuit got = parse_circuit_file(r.circuit).circuit;
    EXPECT_LE(got.size(), r.steps);
    EXPECT_LE(r.depth, r.steps);
  }
  c.variant = "trainable";
  const auto trainable = run_training(c, h, warm);
  for (const auto& r : trainable.seeds[0].records)
    EXPECT_GT(parse_circuit_file(r.circuit).circuit.size(), warm.size());
  c.variant = "fixed";
  EXPECT_THROW(run_training(c, h, std::nullopt), std::invalid_argument);
}

TEST(Training, StopsAtTarget) {
  RunConfig c = small_config();
  c.agent = "random";
  c.target_error = 10.0;
  const auto r = run_training(c, build_hamiltonian(c), std::nullopt);
  EXPECT_EQ(r.seeds[0].records.size(), 1u);
  EXPECT_EQ(r.seeds[0].stop_reason, "target");
}

TEST(Training, AnnealingRecords) {
  RunConfig c = small_config();
  c.agent = "sa";
  c.sa.max_iters = 40;
  const fs::path dir = fresh_dir("sa");
  const auto r = run_training(c, build_hamiltonian(c), std::nullopt, in_dir(dir));
  ASSERT_FALSE(r.seeds[0].records.empty());
  EXPECT_LE(r.seeds[0].records.size(), 40u);
  EXPECT_EQ(read_records(records_path(dir, 3)).size(), r.seeds[0].records.size());
  for (const auto& rec : r.seeds[0].records) EXPECT_LE(rec.depth, c.max_steps);
  EXPECT_EQ(r.summary.method, "sa");
}

}  // namespace
}  // namespace tnqas
