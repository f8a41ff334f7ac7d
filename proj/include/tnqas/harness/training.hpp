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
 * Step 3: architecture search over seeds.
 *
 * Each seed owns its environment, agent and files:
 *   records-<seed>.jsonl     one EpisodeRecord per episode, flushed per line
 *   checkpoint-<seed>.cbor   agent, rng streams and curriculum state
 *   trace-<seed>.jsonl       per-step trace when run.trace is set
 * A rerun resumes from the checkpoint and drops records written after it,
 * so kill/resume reproduces the uninterrupted records on the exact backend.
 * SA has no checkpoint and is rerun from scratch.
 */

#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include "tnqas/harness/pipeline.hpp"
#include "tnqas/harness/summary.hpp"

namespace tnqas {

inline constexpr int kCheckpointVersion = 1;

struct TrainingOptions {
  /// Output directory; nullopt keeps everything in memory.
  std::optional<std::filesystem::path> dir;
  bool resume = true;
  /// 0 reads TNQAS_WORKERS, defaulting to 1.
  std::size_t workers = 0;
  WarningSink log;
  /// Test hook: returning true after an episode ends the seed at once, as a
  /// crash would (no final checkpoint).
  std::function<bool(std::uint64_t seed, std::size_t episodes_done)> interrupt;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> records;
  std::size_t resumed_from = 0;  // episodes restored from a checkpoint
  std::string stop_reason;       // budget | target | wall_clock | interrupted
};

struct TrainingResult {
  std::vector<SeedResult> seeds;
  RunSummary summary;
};

inline std::size_t worker_count(std::size_t requested) {
  if (requested) return requested;
  if (const char* env = std::getenv("TNQAS_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw std::invalid_argument(std::string("TNQAS_WORKERS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

namespace detail {

inline nlohmann::json curriculum_json(const CurriculumState& c) {
  return {{"xi", c.xi},
          {"best", std::isfinite(c.best) ? nlohmann::json(c.best) : nlohmann::json()},
          {"mu", c.mu},
          {"floor", c.floor},
          {"successes", c.successes},
          {"stagnant", c.stagnant},
          {"episodes", c.episodes}};
}

inline CurriculumState curriculum_from_json(const nlohmann::json& j) {
  CurriculumState c;
  c.xi = j.at("xi");
  c.best = j.at("best").is_null() ? std::numeric_limits<double>::infinity() : j.at("best").get<double>();
  c.mu = j.at("mu");
  c.floor = j.at("floor");
  c.successes = j.at("successes");
  c.stagnant = j.at("stagnant");
  c.episodes = j.at("episodes");
  return c;
}

/// Config keys that must match for a checkpoint to be reused. Run budgets
/// may change between invocations.
inline nlohmann::json resumable_config(const RunConfig& cfg) {
  nlohmann::json j = cfg.to_json();
  for (const char* k : {"run.seeds", "run.episodes", "run.wall_clock", "run.target_error", "run.checkpoint_every",
                        "run.label"})
    j.erase(k);
  return j;
}

inline void write_atomic(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  std::filesystem::rename(tmp, p);
}

inline std::optional<nlohmann::json> read_cbor(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return nlohmann::json::from_cbor(bytes);
}

inline void truncate_trace(const std::filesystem::path& p, std::size_t episodes) {
  std::ifstream in(p);
  if (!in) return;
  std::vector<std::string> keep;
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_discarded() && j.contains("episode") && j["episode"].get<std::size_t>() < episodes) keep.push_back(line);
  }
  in.close();
  RecordWriter w(p.string() + ".tmp", false);
  for (const auto& l : keep) w.write_line(l);
  std::filesystem::rename(p.string() + ".tmp", p);
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

/// Trains one seed of an episodic agent (DDQN or random).
inline SeedResult train_episodic(const RunConfig& cfg, const PauliSum& h, const std::optional<Circuit>& warm,
                                 std::optional<double> e_ref, std::uint64_t seed, const TrainingOptions& opts) {
  SeedResult out;
  out.seed = seed;
  tnqas::Environment env(h, cfg.env_config(), warm, e_ref, make_stream(seed, "env"));
  set_rng_state(env.evaluator_rng(), rng_state(make_stream(seed, "shots")));
  const bool ddqn = cfg.agent_kind() == AgentKind::ddqn;
  std::optional<DdqnAgent> agent;
  if (ddqn) agent.emplace(feature_size(env.layout(), cfg.ddqn.use_angles), env.actions().size(), cfg.ddqn,
                          make_stream(seed, "agent-init"));
  Rng random_rng = make_stream(seed, "agent-init");

  std::optional<std::filesystem::path> rec_path, ckpt_path, trace_path;
  if (opts.dir) {
    std::filesystem::create_directories(*opts.dir);
    rec_path = records_path(*opts.dir, seed);
    ckpt_path = *opts.dir / ("checkpoint-" + std::to_string(seed) + ".cbor");
    if (cfg.trace) trace_path = *opts.dir / ("trace-" + std::to_string(seed) + ".jsonl");
  }

  std::size_t start = 0;
  if (ckpt_path && opts.resume) {
    if (const auto ck = read_cbor(*ckpt_path)) {
      if (ck->at("version") != kCheckpointVersion) throw std::runtime_error(ckpt_path->string() + ": unsupported version");
      if (ck->at("config") != resumable_config(cfg))
        throw std::runtime_error(ckpt_path->string() + ": written with a different configuration; remove it to restart");
      start = ck->at("episode");
      set_rng_state(env.rng(), ck->at("env_rng").get<std::string>());
      set_rng_state(env.evaluator_rng(), ck->at("eval_rng").get<std::string>());
      env.set_curriculum(curriculum_from_json(ck->at("curriculum")));
      if (agent) agent->load_json(ck->at("agent"));
      set_rng_state(random_rng, ck->at("random_rng").get<std::string>());
      out.resumed_from = start;
    }
  }
  if (rec_path) out.records = truncate_records(*rec_path, start, opts.log);
  if (trace_path) truncate_trace(*trace_path, start);
  if (out.records.size() != start)
    throw std::runtime_error("records for seed " + std::to_string(seed) + " do not cover the checkpoint");
  std::optional<RecordWriter> writer, tracer;
  if (rec_path) writer.emplace(*rec_path, true);
  if (trace_path) tracer.emplace(*trace_path, true);

  auto save_checkpoint = [&](std::size_t episodes_done) {
    if (!ckpt_path) return;
    nlohmann::json ck{{"version", kCheckpointVersion},
                      {"episode", episodes_done},
                      {"config", resumable_config(cfg)},
                      {"env_rng", rng_state(env.rng())},
                      {"eval_rng", rng_state(env.evaluator_rng())},
                      {"curriculum", curriculum_json(env.curriculum())},
                      {"random_rng", rng_state(random_rng)},
                      {"agent", agent ? agent->to_json() : nlohmann::json()}};
    write_atomic(*ckpt_path, nlohmann::json::to_cbor(ck));
  };

  double best_error = std::numeric_limits<double>::infinity();
  for (const auto& r : out.records) best_error = std::min(best_error, r.error);
  const auto t_seed = Clock::now();
  out.stop_reason = "budget";
  for (std::size_t ep = start; ep < cfg.episodes; ++ep) {
    if (cfg.target_error > 0.0 && best_error <= cfg.target_error) {
      out.stop_reason = "target";
      break;
    }
    if (cfg.wall_clock > 0.0 && seconds_since(t_seed) > cfg.wall_clock) {
      out.stop_reason = "wall_clock";
      break;
    }
    const auto t0 = Clock::now();
    const double sim0 = env.simulator_seconds();
    double agent_time = 0.0;
    env.reset();
    if (tracer)
      tracer->write_line(nlohmann::json{{"episode", ep}, {"t", 0}, {"action", nullptr}, {"reward", 0.0},
                                        {"energy", env.energy()}, {"nfev", env.episode().nfev}}
                             .dump());
    SparseVector s;
    if (agent) s = features(env.observation(), cfg.ddqn.use_angles);
    while (!env.done()) {
      std::size_t a;
      {
        const Stopwatch sw(agent_time);
        a = agent ? agent->act(s, env.legal_mask()) : random_legal_action(env.legal_mask(), random_rng);
      }
      const StepResult r = env.step(a);
      if (tracer)
        tracer->write_line(nlohmann::json{{"episode", ep}, {"t", env.step_index()}, {"action", a}, {"reward", r.reward},
                                          {"energy", r.energy}, {"nfev", r.nfev}}
                               .dump());
      if (agent) {
        const Stopwatch sw(agent_time);
        SparseVector next = features(env.observation(), cfg.ddqn.use_angles);
        agent->observe(s, a, r.reward, next, r.done, env.legal_mask());
        s = std::move(next);
      }
    }
    const EpisodeStats& st = env.episode();
    EpisodeRecord rec;
    rec.seed = seed;
    rec.episode = ep;
    rec.success = st.solved;
    rec.curriculum_success = st.success;
    rec.steps = st.steps;
    rec.best_energy = st.best_energy;
    rec.reference = env.c_min();
    rec.error = st.best_energy - env.c_min();
    rec.nfev = st.nfev;
    rec.set_circuit(st.best_circuit);
    if (agent) {
      rec.epsilon = agent->epsilon();
      rec.loss = agent->last_loss();
    } else {
      rec.epsilon = 1.0;
    }
    rec.wall_time = seconds_since(t0);
    rec.sim_time = env.simulator_seconds() - sim0;
    rec.agent_time = agent_time;
    rec.opt_time = std::max(0.0, rec.wall_time - rec.sim_time - rec.agent_time);
    best_error = std::min(best_error, rec.error);
    if (writer) writer->write(rec);
    out.records.push_back(std::move(rec));
    if ((ep + 1) % cfg.checkpoint_every == 0) save_checkpoint(ep + 1);
    if (opts.interrupt && opts.interrupt(seed, ep + 1)) {
      out.stop_reason = "interrupted";
      return out;
    }
  }
  save_checkpoint(out.records.size());
  return out;
}

/// SA: one record per iteration, for the candidate evaluated there.
inline SeedResult train_sa(const RunConfig& cfg, const PauliSum& h, std::optional<double> e_ref, std::uint64_t seed,
                           const TrainingOptions& opts) {
  SeedResult out;
  out.seed = seed;
  SaConfig sc = cfg.sa_config();
  const double reference = e_ref ? *e_ref : fake_minimum_energy(h);
  if (cfg.target_error > 0.0) sc.stop_below = reference + cfg.target_error;
  Rng rng = make_stream(seed, "agent-init");
  const auto t0 = Clock::now();
  const SaResult r = sa_search(h, sc, rng);
  const double per_iter = seconds_since(t0) / double(std::max<std::size_t>(1, r.trace.size()));
  std::optional<RecordWriter> writer;
  if (opts.dir) {
    std::filesystem::create_directories(*opts.dir);
    writer.emplace(records_path(*opts.dir, seed), false);
  }
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    const SaIteration& it = r.trace[k];
    EpisodeRecord rec;
    rec.seed = seed;
    rec.episode = k;
    rec.best_energy = it.candidate;
    rec.reference = reference;
    rec.error = it.candidate - reference;
    rec.success = e_ref && rec.error < cfg.threshold;
    rec.steps = it.circuit.size();
    rec.nfev = it.nfev;
    rec.set_circuit(it.circuit);
    rec.wall_time = per_iter;
    if (writer) writer->write(rec);
    out.records.push_back(std::move(rec));
  }
  out.stop_reason = sc.stop_below && r.best_energy < *sc.stop_below ? "target" : "budget";
  return out;
}

}  // namespace detail

/// Trains every seed, in parallel across workers. `warm` is required for
/// variants other than vanilla.
inline TrainingResult run_training(const RunConfig& cfg, const PauliSum& h, const std::optional<Circuit>& warm,
                                   const TrainingOptions& opts = {}) {
  cfg.validate();
  const bool sa = cfg.agent_kind() == AgentKind::sa;
  if (!sa && uses_warmstart(cfg.env_variant()) && !warm)
    throw std::invalid_argument(std::string("run_training: variant '") + cfg.variant + "' needs a warm-start circuit");
  const std::optional<double> e_ref = exact_reference(h);

  std::mutex log_mu;
  TrainingOptions local = opts;
  if (opts.log)
    local.log = [&](const std::string& m) {
      const std::lock_guard lock(log_mu);
      opts.log(m);
    };

  TrainingResult out;
  out.seeds.resize(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      try {
        const std::uint64_t seed = cfg.seeds[i];
        out.seeds[i] = sa ? detail::train_sa(cfg, h, e_ref, seed, local)
                          : detail::train_episodic(cfg, h, warm, e_ref, seed, local);
        if (local.log)
          local.log("seed " + std::to_string(seed) + ": " + std::to_string(out.seeds[i].records.size()) +
                    " episodes (" + out.seeds[i].stop_reason + ")");
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min(worker_count(opts.workers), cfg.seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<EpisodeRecord> all;
  for (const auto& s : out.seeds) all.insert(all.end(), s.records.begin(), s.records.end());
  out.summary = summarize(cfg.method_label(), all, e_ref);
  if (opts.dir) write_summary(*opts.dir, out.summary);
  return out;
}

}  // namespace tnqas
