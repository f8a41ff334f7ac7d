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
 * Double deep-Q agent with n-step returns and uniform experience replay.
 *
 * Target for a stored transition (s, a, G_n, s', done, k):
 *   y = G_n + gamma^k Q_target(s', argmax_{a' legal} Q_online(s', a'))
 * and y = G_n when the episode ended inside the n-step window.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnqas/agents/mlp.hpp"
#include "tnqas/env/observation.hpp"

namespace tnqas {

struct DdqnConfig {
  double gamma = 0.88;
  std::size_t n_step = 5;
  double eps_floor = 0.05;
  double eps_decay = 0.99995;
  std::size_t target_sync = 500;
  std::size_t batch = 1000;
  std::size_t buffer = 20000;
  double learning_rate = 3e-4;
  std::vector<std::size_t> hidden{128, 128, 128};
  std::size_t train_every = 1;
  bool use_angles = false;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("DdqnConfig: gamma must lie in (0, 1)");
    if (n_step == 0) throw std::invalid_argument("DdqnConfig: n_step must be >= 1");
    if (!(eps_floor >= 0.0 && eps_floor <= 1.0) || !(eps_decay > 0.0 && eps_decay <= 1.0))
      throw std::invalid_argument("DdqnConfig: bad epsilon schedule");
    if (target_sync == 0 || batch == 0 || buffer < batch || train_every == 0)
      throw std::invalid_argument("DdqnConfig: need target_sync, batch, train_every >= 1 and buffer >= batch");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("DdqnConfig: learning_rate must be positive");
  }
};

/// max(floor, decay^t).
inline double epsilon_at(std::size_t t, const DdqnConfig& cfg) {
  return std::max(cfg.eps_floor, std::pow(cfg.eps_decay, static_cast<double>(t)));
}

/// Epsilon-greedy over legal actions; greedy ties go to the lowest index.
inline std::size_t select_action(const Eigen::VectorXd& q, const std::vector<std::uint8_t>& mask, double eps, Rng& rng) {
  if (static_cast<std::size_t>(q.size()) != mask.size()) throw std::invalid_argument("select_action: size mismatch");
  std::vector<std::size_t> legal;
  for (std::size_t a = 0; a < mask.size(); ++a)
    if (mask[a]) legal.push_back(a);
  if (legal.empty()) throw std::invalid_argument("select_action: every action is masked");
  if (uniform01(rng) < eps) return legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)];
  std::size_t best = legal.front();
  for (const std::size_t a : legal)
    if (q[static_cast<Eigen::Index>(a)] > q[static_cast<Eigen::Index>(best)]) best = a;
  return best;
}

/// sum_k gamma^k r_k over the given (already terminal-truncated) rewards.
inline double n_step_return(std::span<const double> rewards, double gamma) {
  double g = 0.0, w = 1.0;
  for (const double r : rewards) {
    g += w * r;
    w *= gamma;
  }
  return g;
}

inline std::size_t feature_size(const ObservationLayout& lay, bool use_angles) {
  return lay.binary_size() + (use_angles ? lay.angle_size() : 0);
}

/// Binary cells first, then (optionally) the angle tensor.
inline SparseVector features(const ObservationTensor& obs, bool use_angles) {
  SparseVector s;
  for (std::size_t i = 0; i < obs.binary.size(); ++i)
    if (obs.binary[i] != 0.0f) {
      s.index.push_back(static_cast<std::uint32_t>(i));
      s.value.push_back(obs.binary[i]);
    }
  if (use_angles) {
    const auto off = static_cast<std::uint32_t>(obs.binary.size());
    for (std::size_t i = 0; i < obs.angles.size(); ++i)
      if (obs.angles[i] != 0.0f) {
        s.index.push_back(off + static_cast<std::uint32_t>(i));
        s.value.push_back(obs.angles[i]);
      }
  }
  return s;
}

struct Transition {
  SparseVector state;
  std::uint32_t action = 0;
  double ret = 0.0;       // G_n
  SparseVector next;
  bool done = false;
  double discount = 0.0;  // gamma^k for the bootstrap term
  std::vector<std::uint8_t> next_mask;
};

inline nlohmann::json to_json(const SparseVector& s) { return {{"i", s.index}, {"v", s.value}}; }
inline SparseVector sparse_from_json(const nlohmann::json& j) {
  return {j.at("i").get<std::vector<std::uint32_t>>(), j.at("v").get<std::vector<double>>()};
}

inline nlohmann::json to_json(const Transition& t) {
  return {{"s", to_json(t.state)}, {"a", t.action}, {"g", t.ret},          {"n", to_json(t.next)},
          {"d", t.done},           {"k", t.discount}, {"m", t.next_mask}};
}
inline Transition transition_from_json(const nlohmann::json& j) {
  return {sparse_from_json(j.at("s")), j.at("a"), j.at("g"), sparse_from_json(j.at("n")),
          j.at("d"), j.at("k"), j.at("m").get<std::vector<std::uint8_t>>()};
}

/// Fixed-capacity FIFO ring.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 20000) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_.at(i); }

  void push(Transition t) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  /// Uniform with replacement.
  std::vector<const Transition*> sample(std::size_t k, Rng& rng) const {
    if (data_.empty()) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    std::vector<const Transition*> out(k);
    for (auto& p : out) p = &data_[pick(rng)];
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& t : data_) items.push_back(tnqas::to_json(t));
    return {{"capacity", capacity_}, {"head", head_}, {"items", items}};
  }
  static ReplayBuffer from_json(const nlohmann::json& j) {
    ReplayBuffer b(j.at("capacity").get<std::size_t>());
    for (const auto& t : j.at("items")) b.data_.push_back(transition_from_json(t));
    b.head_ = j.at("head");
    return b;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> data_;
};

/// Turns single steps into n-step transitions; a terminal step flushes the
/// window with truncated returns.
class NStepAccumulator {
 public:
  NStepAccumulator(std::size_t n, double gamma) : n_(n), gamma_(gamma) {}

  bool empty() const { return window_.empty(); }

  std::vector<Transition> push(const SparseVector& s, std::size_t a, double r, const SparseVector& next, bool done,
                               const std::vector<std::uint8_t>& next_mask) {
    window_.push_back({s, a, r});
    std::vector<Transition> out;
    if (done) {
      while (!window_.empty()) {
        out.push_back(make(window_.size(), next, true, next_mask));
        window_.pop_front();
      }
    } else if (window_.size() == n_) {
      out.push_back(make(n_, next, false, next_mask));
      window_.pop_front();
    }
    return out;
  }

 private:
  struct Step {
    SparseVector s;
    std::size_t a;
    double r;
  };

  Transition make(std::size_t len, const SparseVector& next, bool done, const std::vector<std::uint8_t>& mask) const {
    std::vector<double> rs;
    for (std::size_t i = 0; i < len; ++i) rs.push_back(window_[i].r);
    return {window_.front().s, static_cast<std::uint32_t>(window_.front().a), n_step_return(rs, gamma_), next, done,
            done ? 0.0 : std::pow(gamma_, static_cast<double>(len)), mask};
  }

  std::size_t n_;
  double gamma_;
  std::deque<Step> window_;
};

/// Bootstrapped targets; action chosen by `online`, valued by `target`.
inline Eigen::VectorXd ddqn_targets(const Mlp& online, const Mlp& target, std::span<const Transition* const> batch) {
  std::vector<SparseVector> next;
  for (const auto* t : batch) next.push_back(t->next);
  const Eigen::MatrixXd q_on = online.forward(next), q_tg = target.forward(next);
  Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Transition& t = *batch[j];
    const auto jj = static_cast<Eigen::Index>(j);
    y[jj] = t.ret;
    if (t.done) continue;
    Eigen::Index best = -1;
    for (std::size_t a = 0; a < t.next_mask.size(); ++a)
      if (t.next_mask[a] && (best < 0 || q_on(static_cast<Eigen::Index>(a), jj) > q_on(best, jj))) best = static_cast<Eigen::Index>(a);
    if (best < 0) continue;  // no legal continuation
    y[jj] += t.discount * q_tg(best, jj);
  }
  return y;
}

/// One Adam step on the mean squared TD error; returns the loss before the step.
inline double ddqn_train_step(Mlp& online, const Mlp& target, AdamOptimizer& opt, std::span<const Transition* const> batch) {
  if (batch.empty()) throw std::invalid_argument("ddqn_train_step: empty batch");
  const Eigen::VectorXd y = ddqn_targets(online, target, batch);
  std::vector<SparseVector> states;
  for (const auto* t : batch) states.push_back(t->state);
  Mlp::Tape tape;
  const Eigen::MatrixXd q = online.forward(states, &tape);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double loss = 0.0;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const auto a = static_cast<Eigen::Index>(batch[j]->action);
    const double err = q(a, jj) - y[jj];
    loss += err * err * inv;
    d(a, jj) = 2.0 * err * inv;
  }
  opt.step(online, online.backward(states, tape, d));
  return loss;
}

inline void sync_target(const Mlp& online, Mlp& target) { target = online; }

class DdqnAgent {
 public:
  DdqnAgent(std::size_t input, std::size_t actions, DdqnConfig cfg, Rng rng)
      : cfg_(std::move(cfg)), rng_(std::move(rng)), buffer_(cfg_.buffer), nstep_(cfg_.n_step, cfg_.gamma) {
    cfg_.validate();
    std::vector<std::size_t> widths{input};
    widths.insert(widths.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    widths.push_back(actions);
    online_ = Mlp(widths, Activation::leaky_relu, rng_);
    target_ = online_;
    opt_ = AdamOptimizer(online_, cfg_.learning_rate);
  }

  const DdqnConfig& config() const { return cfg_; }
  std::size_t steps() const { return steps_; }
  double epsilon() const { return epsilon_at(steps_, cfg_); }
  double last_loss() const { return last_loss_; }
  const Mlp& online() const { return online_; }
  const Mlp& target() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  std::size_t act(const SparseVector& s, const std::vector<std::uint8_t>& mask) {
    const Eigen::VectorXd q = online_.forward(std::span<const SparseVector>(&s, 1)).col(0);
    return select_action(q, mask, epsilon(), rng_);
  }

  /// Records one environment step, then trains and syncs on schedule.
  void observe(const SparseVector& s, std::size_t a, double r, const SparseVector& next, bool done,
               const std::vector<std::uint8_t>& next_mask) {
    for (auto& t : nstep_.push(s, a, r, next, done, next_mask)) buffer_.push(std::move(t));
    ++steps_;
    if (buffer_.size() >= cfg_.batch && steps_ % cfg_.train_every == 0) {
      const auto batch = buffer_.sample(cfg_.batch, rng_);
      last_loss_ = ddqn_train_step(online_, target_, opt_, batch);
    }
    if (steps_ % cfg_.target_sync == 0) sync_target(online_, target_);
  }

  /// Full learner state; valid at episode boundaries (empty n-step window).
  nlohmann::json to_json() const {
    if (!nstep_.empty()) throw std::logic_error("DdqnAgent::to_json: checkpoint only between episodes");
    return {{"online", online_.to_json()}, {"target", target_.to_json()}, {"adam", opt_.to_json()},
            {"buffer", buffer_.to_json()}, {"steps", steps_},             {"rng", rng_state(rng_)},
            {"last_loss", last_loss_}};
  }

  void load_json(const nlohmann::json& j) {
    online_ = Mlp::from_json(j.at("online"));
    target_ = Mlp::from_json(j.at("target"));
    opt_ = AdamOptimizer(online_, cfg_.learning_rate);
    opt_.load_json(j.at("adam"));
    buffer_ = ReplayBuffer::from_json(j.at("buffer"));
    steps_ = j.at("steps");
    set_rng_state(rng_, j.at("rng").get<std::string>());
    last_loss_ = j.at("last_loss");
  }

 private:
  DdqnConfig cfg_;
  Rng rng_;
  Mlp online_, target_;
  AdamOptimizer opt_;
  ReplayBuffer buffer_;
  NStepAccumulator nstep_;
  std::size_t steps_ = 0;
  double last_loss_ = 0.0;
};

}  // namespace tnqas
