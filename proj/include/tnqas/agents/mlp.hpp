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
 * Small fully connected network with hand-written backprop and Adam.
 * Inputs arrive as sparse vectors (the circuit encoding is mostly zeros), so
 * the first layer is applied column by column; later layers are dense.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tnqas/core/rng.hpp"

namespace tnqas {

struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;
};

inline SparseVector sparse_from_dense(const Eigen::VectorXd& x) {
  SparseVector s;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) {
      s.index.push_back(static_cast<std::uint32_t>(i));
      s.value.push_back(x[i]);
    }
  return s;
}

enum class Activation { leaky_relu, identity };

inline constexpr double kLeakySlope = 0.01;

struct DenseLayer {
  Eigen::MatrixXd w;  // out x in
  Eigen::VectorXd b;
};

class Mlp {
 public:
  struct Tape {
    std::vector<Eigen::MatrixXd> pre;   // pre-activations per layer
    std::vector<Eigen::MatrixXd> post;  // activations per layer
  };

  Mlp() = default;

  /// He-uniform weights, zero biases.
  Mlp(const std::vector<std::size_t>& widths, Activation hidden, Rng& rng) : Mlp(zeros(widths, hidden)) {
    for (auto& l : layers_) {
      const double bound = std::sqrt(6.0 / static_cast<double>(l.w.cols()));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index i = 0; i < l.w.size(); ++i) l.w.data()[i] = u(rng);
    }
  }

  static Mlp zeros(const std::vector<std::size_t>& widths, Activation hidden) {
    if (widths.size() < 2) throw std::invalid_argument("Mlp: need at least input and output widths");
    for (const auto w : widths)
      if (w == 0) throw std::invalid_argument("Mlp: zero layer width");
    Mlp m;
    m.hidden_ = hidden;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
      const auto in = static_cast<Eigen::Index>(widths[i]), out = static_cast<Eigen::Index>(widths[i + 1]);
      m.layers_.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
    }
    return m;
  }

  std::size_t input_size() const { return static_cast<std::size_t>(layers_.front().w.cols()); }
  std::size_t output_size() const { return static_cast<std::size_t>(layers_.back().w.rows()); }
  Activation hidden_activation() const { return hidden_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::vector<std::size_t> widths() const {
    std::vector<std::size_t> w{input_size()};
    for (const auto& l : layers_) w.push_back(static_cast<std::size_t>(l.w.rows()));
    return w;
  }

  /// Output matrix, one column per batch entry.
  Eigen::MatrixXd forward(std::span<const SparseVector> batch, Tape* tape = nullptr) const {
    const auto bsz = static_cast<Eigen::Index>(batch.size());
    const DenseLayer& first = layers_.front();
    Eigen::MatrixXd z(first.w.rows(), bsz);
    for (Eigen::Index j = 0; j < bsz; ++j) {
      const SparseVector& x = batch[static_cast<std::size_t>(j)];
      auto col = z.col(j);
      col = first.b;
      for (std::size_t k = 0; k < x.index.size(); ++k) {
        if (x.index[k] >= input_size()) throw std::out_of_range("Mlp::forward: input index out of range");
        col += first.w.col(x.index[k]) * x.value[k];
      }
    }
    if (tape) {
      tape->pre.clear();
      tape->post.clear();
    }
    for (std::size_t l = 0;; ++l) {
      const bool last = l + 1 == layers_.size();
      Eigen::MatrixXd a = last ? z : activate(z);
      if (tape) {
        tape->pre.push_back(z);
        tape->post.push_back(a);
      }
      if (last) return a;
      z = (layers_[l + 1].w * a).colwise() + layers_[l + 1].b;
    }
  }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const {
    if (static_cast<std::size_t>(x.size()) != input_size())
      throw std::invalid_argument("Mlp::forward: expected input of size " + std::to_string(input_size()));
    const SparseVector s = sparse_from_dense(x);
    return forward(std::span<const SparseVector>(&s, 1)).col(0);
  }

  /// Gradients of sum_j <d_out_j, out_j> with respect to every parameter.
  std::vector<DenseLayer> backward(std::span<const SparseVector> batch, const Tape& tape, const Eigen::MatrixXd& d_out) const {
    std::vector<DenseLayer> g(layers_.size());
    Eigen::MatrixXd delta = d_out;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      if (l + 1 < layers_.size()) delta = delta.cwiseProduct(derivative(tape.pre[l]));
      g[l].b = delta.rowwise().sum();
      if (l > 0) {
        g[l].w = delta * tape.post[l - 1].transpose();
        delta = layers_[l].w.transpose() * delta;
      } else {
        g[l].w = Eigen::MatrixXd::Zero(layers_[0].w.rows(), layers_[0].w.cols());
        for (Eigen::Index j = 0; j < delta.cols(); ++j) {
          const SparseVector& x = batch[static_cast<std::size_t>(j)];
          for (std::size_t k = 0; k < x.index.size(); ++k) g[l].w.col(x.index[k]) += delta.col(j) * x.value[k];
        }
      }
    }
    return g;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["widths"] = widths();
    j["activation"] = hidden_ == Activation::leaky_relu ? "leaky_relu" : "identity";
    j["layers"] = nlohmann::json::array();
    for (const auto& l : layers_) {
      j["layers"].push_back({{"w", std::vector<double>(l.w.data(), l.w.data() + l.w.size())},
                             {"b", std::vector<double>(l.b.data(), l.b.data() + l.b.size())}});
    }
    return j;
  }

  static Mlp from_json(const nlohmann::json& j) {
    const std::string act = j.at("activation").get<std::string>();
    if (act != "leaky_relu" && act != "identity") throw std::invalid_argument("Mlp::from_json: unknown activation " + act);
    Mlp m = zeros(j.at("widths").get<std::vector<std::size_t>>(), act == "leaky_relu" ? Activation::leaky_relu : Activation::identity);
    const auto& layers = j.at("layers");
    if (layers.size() != m.layers_.size()) throw std::invalid_argument("Mlp::from_json: layer count mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto w = layers[i].at("w").get<std::vector<double>>();
      const auto b = layers[i].at("b").get<std::vector<double>>();
      auto& l = m.layers_[i];
      if (w.size() != static_cast<std::size_t>(l.w.size()) || b.size() != static_cast<std::size_t>(l.b.size()))
        throw std::invalid_argument("Mlp::from_json: weight shape mismatch in layer " + std::to_string(i));
      l.w = Eigen::Map<const Eigen::MatrixXd>(w.data(), l.w.rows(), l.w.cols());
      l.b = Eigen::Map<const Eigen::VectorXd>(b.data(), l.b.size());
    }
    return m;
  }

 private:
  Eigen::MatrixXd activate(const Eigen::MatrixXd& z) const {
    if (hidden_ == Activation::identity) return z;
    return z.unaryExpr([](double v) { return v > 0.0 ? v : kLeakySlope * v; });
  }
  Eigen::MatrixXd derivative(const Eigen::MatrixXd& z) const {
    if (hidden_ == Activation::identity) return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : kLeakySlope; });
  }

  Activation hidden_ = Activation::leaky_relu;
  std::vector<DenseLayer> layers_;
};

/// Standard Adam over all network parameters.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
    for (const auto& l : net.layers()) {
      m_.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()), Eigen::VectorXd::Zero(l.b.size())});
      v_.push_back(m_.back());
    }
  }

  std::size_t steps() const { return t_; }

  void step(Mlp& net, const std::vector<DenseLayer>& g) {
    if (g.size() != m_.size()) throw std::invalid_argument("AdamOptimizer: gradient layer count mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_)), c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < g.size(); ++i) {
      update(net.layers()[i].w, m_[i].w, v_[i].w, g[i].w, c1, c2);
      update(net.layers()[i].b, m_[i].b, v_[i].b, g[i].b, c1, c2);
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"lr", lr_}, {"beta1", b1_}, {"beta2", b2_}, {"eps", eps_}, {"t", t_}};
    auto dump = [](const std::vector<DenseLayer>& ls) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& l : ls)
        a.push_back({{"w", std::vector<double>(l.w.data(), l.w.data() + l.w.size())},
                     {"b", std::vector<double>(l.b.data(), l.b.data() + l.b.size())}});
      return a;
    };
    j["m"] = dump(m_);
    j["v"] = dump(v_);
    return j;
  }

  /// Restores moments into an optimizer built for the same network shape.
  void load_json(const nlohmann::json& j) {
    lr_ = j.at("lr");
    b1_ = j.at("beta1");
    b2_ = j.at("beta2");
    eps_ = j.at("eps");
    t_ = j.at("t");
    auto load = [](std::vector<DenseLayer>& ls, const nlohmann::json& a) {
      if (a.size() != ls.size()) throw std::invalid_argument("AdamOptimizer: layer count mismatch");
      for (std::size_t i = 0; i < ls.size(); ++i) {
        const auto w = a[i].at("w").get<std::vector<double>>();
        const auto b = a[i].at("b").get<std::vector<double>>();
        if (w.size() != static_cast<std::size_t>(ls[i].w.size()) || b.size() != static_cast<std::size_t>(ls[i].b.size()))
          throw std::invalid_argument("AdamOptimizer: moment shape mismatch");
        ls[i].w = Eigen::Map<const Eigen::MatrixXd>(w.data(), ls[i].w.rows(), ls[i].w.cols());
        ls[i].b = Eigen::Map<const Eigen::VectorXd>(b.data(), ls[i].b.size());
      }
    };
    load(m_, j.at("m"));
    load(v_, j.at("v"));
  }

 private:
  template <typename P, typename G>
  void update(P& p, P& m, P& v, const G& g, double c1, double c2) {
    m = b1_ * m + (1 - b1_) * g;
    v = b2_ * v + (1 - b2_) * g.cwiseProduct(g);
    p.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }

  double lr_ = 3e-4, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
  std::size_t t_ = 0;
  std::vector<DenseLayer> m_, v_;
};

}  // namespace tnqas
