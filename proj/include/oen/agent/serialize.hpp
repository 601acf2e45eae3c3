// Copyright 2026 The OEN Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oen/agent/config.hpp"
#include "oen/agent/replay.hpp"
#include "oen/game/engine.hpp"
#include "oen/nn/adam.hpp"
#include "oen/nn/dense.hpp"
#include "oen/rng.hpp"
#include "oen/setnet/oen.hpp"

// Little-endian binary encoding for checkpoints. Doubles are stored by bit
// pattern so a restored run continues bit-exactly.
namespace oen::agent::io {

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os_.write(reinterpret_cast<const char*>(b), 8);
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void boolean(bool v) { u64(v ? 1 : 0); }
  void str(const std::string& s) {
    u64(s.size());
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  template <class Derived>
  void matrix(const Eigen::MatrixBase<Derived>& m) {
    i64(m.rows());
    i64(m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
  }
  bool ok() const { return static_cast<bool>(os_); }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  std::uint64_t u64() {
    unsigned char b[8];
    is_.read(reinterpret_cast<char*>(b), 8);
    if (!is_) throw std::runtime_error("checkpoint: unexpected end of file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool boolean() { return u64() != 0; }
  std::string str() {
    const auto n = u64();
    if (n > (1ULL << 32)) throw std::runtime_error("checkpoint: implausible string length");
    std::string s(n, '\0');
    is_.read(s.data(), static_cast<std::streamsize>(n));
    if (!is_) throw std::runtime_error("checkpoint: unexpected end of file");
    return s;
  }
  nn::Matrix matrix() {
    const auto rows = i64();
    const auto cols = i64();
    if (rows < 0 || cols < 0 || rows * cols > (1LL << 32)) throw std::runtime_error("checkpoint: bad matrix shape");
    nn::Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f64();
    return m;
  }
  Eigen::VectorXd vector() {
    nn::Matrix m = matrix();
    if (m.cols() != 1) throw std::runtime_error("checkpoint: expected a column vector");
    return m.col(0);
  }

 private:
  std::istream& is_;
};

inline void write(Writer& w, const nn::Matrix& m) { w.matrix(m); }
inline void write(Writer& w, const Eigen::VectorXd& v) { w.matrix(v); }
inline void read(Reader& r, nn::Matrix& m) { m = r.matrix(); }
inline void read(Reader& r, Eigen::VectorXd& v) { v = r.vector(); }

inline void write(Writer& w, const nn::Network& net) {
  w.u64(net.layers.size());
  for (const auto& l : net.layers) {
    w.u64(l.activation == nn::Activation::kRelu ? 1 : 0);
    w.matrix(l.weights);
    w.matrix(l.biases);
  }
}
inline void read(Reader& r, nn::Network& net) {
  net.layers.resize(r.u64());
  for (auto& l : net.layers) {
    l.activation = r.u64() ? nn::Activation::kRelu : nn::Activation::kLinear;
    l.weights = r.matrix();
    l.biases = r.vector();
  }
}

inline void write(Writer& w, const nn::Gradients& g) {
  w.u64(g.size());
  for (const auto& l : g) {
    w.matrix(l.weights);
    w.matrix(l.biases);
  }
}
inline void read(Reader& r, nn::Gradients& g) {
  g.resize(r.u64());
  for (auto& l : g) {
    l.weights = r.matrix();
    l.biases = r.vector();
  }
}

inline void write(Writer& w, const nn::AdamState& s) {
  w.f64(s.options.learning_rate);
  w.f64(s.options.beta1);
  w.f64(s.options.beta2);
  w.f64(s.options.epsilon);
  write(w, s.first_moment);
  write(w, s.second_moment);
  w.i64(s.timestep);
}
inline void read(Reader& r, nn::AdamState& s) {
  s.options.learning_rate = r.f64();
  s.options.beta1 = r.f64();
  s.options.beta2 = r.f64();
  s.options.epsilon = r.f64();
  read(r, s.first_moment);
  read(r, s.second_moment);
  s.timestep = r.i64();
}

inline void write(Writer& w, const setnet::OenParams& p) {
  write(w, p.embedding);
  write(w, p.head);
  w.boolean(p.transform_inputs);
}
inline void read(Reader& r, setnet::OenParams& p) {
  read(r, p.embedding);
  read(r, p.head);
  p.transform_inputs = r.boolean();
}

inline void write(Writer& w, const setnet::OenAdamState& s) {
  write(w, s.embedding);
  write(w, s.head);
}
inline void read(Reader& r, setnet::OenAdamState& s) {
  read(r, s.embedding);
  read(r, s.head);
}

inline void write(Writer& w, const Rng& rng) { w.u64(rng.state()); }
inline void read(Reader& r, Rng& rng) { rng.set_state(r.u64()); }

inline void write(Writer& w, const game::GameState& s) {
  w.i64(s.grid_width);
  w.i64(s.grid_height);
  w.u64(s.objects.size());
  for (const auto& o : s.objects) {
    w.i64(o.id);
    w.i64(o.class_id);
    w.i64(o.x);
    w.i64(o.y);
    w.i64(static_cast<std::int64_t>(o.orientation));
    w.u64(o.resources.size());
    for (auto v : o.resources) w.i64(v);
    w.boolean(o.alive);
  }
  w.i64(s.score);
  w.i64(s.tick);
  w.i64(s.next_id);
  write(w, s.rng);
  w.boolean(s.terminal);
  w.boolean(s.won);
  w.boolean(s.timed_out);
}
inline void read(Reader& r, game::GameState& s) {
  s.grid_width = static_cast<int>(r.i64());
  s.grid_height = static_cast<int>(r.i64());
  s.objects.resize(r.u64());
  for (auto& o : s.objects) {
    o.id = r.i64();
    o.class_id = static_cast<int>(r.i64());
    o.x = static_cast<int>(r.i64());
    o.y = static_cast<int>(r.i64());
    o.orientation = static_cast<game::Orientation>(r.i64());
    o.resources.resize(r.u64());
    for (auto& v : o.resources) v = r.i64();
    o.alive = r.boolean();
  }
  s.score = r.i64();
  s.tick = r.i64();
  s.next_id = r.i64();
  read(r, s.rng);
  s.terminal = r.boolean();
  s.won = r.boolean();
  s.timed_out = r.boolean();
}

inline void write(Writer& w, const AgentConfig& c) {
  w.f64(c.gamma);
  w.f64(c.epsilon_start);
  w.f64(c.epsilon_final);
  w.i64(c.epsilon_anneal_steps);
  w.f64(c.learning_rate);
  w.f64(c.adam_beta1);
  w.f64(c.adam_beta2);
  w.f64(c.adam_epsilon);
  w.i64(c.batch_size);
  w.i64(c.train_every);
  w.i64(c.target_sync_every);
  w.i64(c.replay_capacity);
  w.i64(c.learn_start);
  w.i64(c.max_steps);
  w.f64(c.init_stddev);
  w.f64(c.eval_epsilon);
  w.i64(static_cast<std::int64_t>(c.bootstrap));
  w.boolean(c.timeout_is_terminal);
  w.boolean(c.baseline_relu_output);
  w.boolean(c.normalize_coordinates);
  w.boolean(c.transform_inputs);
}
inline void read(Reader& r, AgentConfig& c) {
  c.gamma = r.f64();
  c.epsilon_start = r.f64();
  c.epsilon_final = r.f64();
  c.epsilon_anneal_steps = r.i64();
  c.learning_rate = r.f64();
  c.adam_beta1 = r.f64();
  c.adam_beta2 = r.f64();
  c.adam_epsilon = r.f64();
  c.batch_size = static_cast<int>(r.i64());
  c.train_every = r.i64();
  c.target_sync_every = r.i64();
  c.replay_capacity = r.i64();
  c.learn_start = r.i64();
  c.max_steps = r.i64();
  c.init_stddev = r.f64();
  c.eval_epsilon = r.f64();
  c.bootstrap = static_cast<BootstrapRule>(r.i64());
  c.timeout_is_terminal = r.boolean();
  c.baseline_relu_output = r.boolean();
  c.normalize_coordinates = r.boolean();
  c.transform_inputs = r.boolean();
}

template <class Obs>
void write(Writer& w, const Transition<Obs>& t) {
  w.u64(t.id);
  write(w, t.observation);
  w.i64(t.action);
  w.f64(t.reward);
  write(w, t.next_observation);
  w.boolean(t.terminal);
}
template <class Obs>
void read(Reader& r, Transition<Obs>& t) {
  t.id = r.u64();
  read(r, t.observation);
  t.action = static_cast<int>(r.i64());
  t.reward = r.f64();
  read(r, t.next_observation);
  t.terminal = r.boolean();
}

}  // namespace oen::agent::io
