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

// tnqas: command line front end.
//
//   tnqas dmrg     --run DIR [--config FILE] [--set key=value ...]
//   tnqas fit      --run DIR
//   tnqas train    --run DIR [--warm DIR] [--seed N ...] [--variant V] [--backend B]
//   tnqas baseline random|sa --run DIR [...]
//   tnqas report   DIR [DIR ...] [--csv FILE]
//
// Each run directory keeps the merged config in config.json. Later
// subcommands start from it, then apply --config, --set and the flags.

#include <filesystem>
#include <iostream>

#include <CLI11/CLI11.hpp>

#include "tnqas/harness/training.hpp"

namespace fs = std::filesystem;
using namespace tnqas;

namespace {

struct Common {
  std::string run;
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::uint64_t> seeds;
  std::string variant;
  std::string backend;
};

void add_common(CLI::App* app, Common& c, bool run_flags) {
  app->add_option("--run", c.run, "run directory")->required();
  app->add_option("--config", c.config, "JSON config with flat dotted keys");
  app->add_option("--set", c.sets, "override one key, e.g. --set env.max_steps=30");
  if (run_flags) {
    app->add_option("--seed", c.seeds, "seed (repeatable); replaces run.seeds");
    app->add_option("--variant", c.variant, "trainable | fixed | structure | vanilla");
    app->add_option("--backend", c.backend, "exact | shots | noisy");
  }
}

RunConfig resolve(const Common& c) {
  RunConfig cfg;
  const fs::path saved = fs::path(c.run) / "config.json";
  if (fs::exists(saved)) cfg.merge(detail::read_json(saved));
  if (!c.config.empty()) cfg.merge(detail::read_json(c.config));
  for (const auto& s : c.sets) cfg.set(s);
  if (!c.seeds.empty()) cfg.seeds = c.seeds;
  if (!c.variant.empty()) cfg.variant = c.variant;
  if (!c.backend.empty()) cfg.backend = c.backend;
  cfg.validate();
  return cfg;
}

void save_config(const Common& c, const RunConfig& cfg) {
  fs::create_directories(c.run);
  detail::write_json(fs::path(c.run) / "config.json", cfg.to_json());
}

void log(const std::string& m) { std::cerr << m << '\n'; }

int cmd_dmrg(const Common& c) {
  const RunConfig cfg = resolve(c);
  const PauliSum h = build_hamiltonian(cfg);
  save_config(c, cfg);
  const DmrgArtifacts d = run_dmrg(cfg, h);
  save_dmrg(c.run, d);
  std::cout << "dmrg energy " << d.energy << (d.converged ? "" : " (not converged)") << " after " << d.sweeps
            << " sweeps\n";
  if (d.exact_energy) std::cout << "exact energy " << *d.exact_energy << ", residual " << *d.residual() << '\n';
  return 0;
}

int cmd_fit(const Common& c) {
  const RunConfig cfg = resolve(c);
  const PauliSum h = build_hamiltonian(cfg);
  if (!fs::exists(fs::path(c.run) / "mps.json")) throw std::runtime_error("no mps.json in '" + c.run + "' (run dmrg first)");
  save_config(c, cfg);
  const DmrgArtifacts d = load_dmrg(c.run);
  const FitArtifacts f = run_fit(cfg, h, d.mps);
  save_fit(c.run, f);
  const GateCounts g = count_gates(f.circuit);
  std::cout << "fit overlap " << f.overlap << " after " << f.iterations << " iterations\n"
            << "transpiled: " << g.cnot << " CNOT, " << g.rotation << " ROT, depth " << circuit_depth(f.circuit)
            << ", fidelity " << f.transpile_fidelity << ", energy " << f.circuit_energy << '\n'
            << "wrote " << (fs::path(c.run) / "warmstart.circuit").string() << '\n';
  return 0;
}

int cmd_train(const Common& c, const std::string& warm_dir, const std::string& agent, bool baseline) {
  RunConfig cfg = resolve(c);
  cfg.agent = agent;
  // Baselines search from |0...0> unless a variant was asked for.
  if (baseline && c.variant.empty()) cfg.variant = "vanilla";
  cfg.validate();
  const PauliSum h = build_hamiltonian(cfg);
  std::optional<Circuit> warm;
  if (cfg.agent_kind() != AgentKind::sa && uses_warmstart(cfg.env_variant()))
    warm = load_warmstart(warm_dir.empty() ? fs::path(c.run) : fs::path(warm_dir));
  save_config(c, cfg);
  TrainingOptions opts;
  opts.dir = c.run;
  opts.log = log;
  const TrainingResult r = run_training(cfg, h, warm, opts);
  std::cout << report_text({r.summary});
  return 0;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& csv) {
  std::vector<RunSummary> rows;
  for (const auto& d : dirs) {
    RunConfig cfg;
    if (fs::exists(fs::path(d) / "config.json")) cfg.merge(detail::read_json(fs::path(d) / "config.json"));
    std::vector<EpisodeRecord> all;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(d)) {
      const auto name = e.path().filename().string();
      if (name.rfind("records-", 0) == 0 && e.path().extension() == ".jsonl") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const auto rs = read_records(f, log);
      all.insert(all.end(), rs.begin(), rs.end());
    }
    rows.push_back(summarize(cfg.method_label(), all));
    write_summary(d, rows.back());
  }
  std::cout << report_text(rows);
  if (!csv.empty()) {
    std::ofstream out(csv);
    if (!out) throw std::runtime_error("cannot write '" + csv + "'");
    out << report_csv(rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-network warm-started quantum architecture search"};
  app.require_subcommand(1);

  Common dmrg_c, fit_c, train_c, base_c;
  std::string warm_dir, base_warm, base_kind, csv;
  std::vector<std::string> report_dirs;

  auto* dmrg = app.add_subcommand("dmrg", "step 1: DMRG ground state (writes mps.json, dmrg.json)");
  add_common(dmrg, dmrg_c, false);
  auto* fit = app.add_subcommand("fit", "step 2: brickwork fit and transpile (writes warmstart.circuit)");
  add_common(fit, fit_c, false);
  auto* train = app.add_subcommand("train", "step 3: DDQN architecture search");
  add_common(train, train_c, true);
  train->add_option("--warm", warm_dir, "directory holding warmstart.circuit (default: --run)");
  auto* base = app.add_subcommand("baseline", "random agent or simulated annealing");
  base->add_option("kind", base_kind, "random | sa")->required()->check(CLI::IsMember({"random", "sa"}));
  add_common(base, base_c, true);
  base->add_option("--warm", base_warm, "directory holding warmstart.circuit (default: --run)");
  auto* report = app.add_subcommand("report", "Method/Error/Depth/CNOT/ROT/SuccessProb table");
  report->add_option("dirs", report_dirs, "run directories")->required()->check(CLI::ExistingDirectory);
  report->add_option("--csv", csv, "also write the table as CSV");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*dmrg) return cmd_dmrg(dmrg_c);
    if (*fit) return cmd_fit(fit_c);
    if (*train) return cmd_train(train_c, warm_dir, "ddqn", false);
    if (*base) return cmd_train(base_c, base_warm, base_kind, true);
    if (*report) return cmd_report(report_dirs, csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
