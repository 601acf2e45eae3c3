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

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oen/rng.hpp"

namespace oen::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Activation { kRelu, kLinear };

inline const char* to_string(Activation a) { return a == Activation::kRelu ? "relu" : "linear"; }

/// Fully connected layer: y = act(x W^T + b), one input per row.
struct DenseLayer {
  Matrix weights;  // out_dim x in_dim
  Vector biases;   // out_dim
  Activation activation = Activation::kRelu;

  Index in_dim() const { return weights.cols(); }
  Index out_dim() const { return weights.rows(); }

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.activation == b.activation && a.weights.rows() == b.weights.rows() &&
           a.weights.cols() == b.weights.cols() && a.weights == b.weights && a.biases == b.biases;
  }
};

/// A stack of dense layers. Also serves as the parameter container for every
/// network in the engine (embedding stack, task head, baseline MLP).
struct Network {
  std::vector<DenseLayer> layers;

  Index in_dim() const { return layers.front().in_dim(); }
  Index out_dim() const { return layers.back().out_dim(); }
  std::size_t depth() const { return layers.size(); }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.biases.size());
    return n;
  }
  std::vector<Index> dims() const {
    std::vector<Index> d;
    if (layers.empty()) return d;
    d.push_back(in_dim());
    for (const auto& l : layers) d.push_back(l.out_dim());
    return d;
  }

  friend bool operator==(const Network&, const Network&) = default;
};

struct LayerGradient {
  Matrix weights;
  Vector biases;
};

/// Per-layer gradients, shaped like the layers of the network they belong to.
using Gradients = std::vector<LayerGradient>;

/// Inputs and pre-activations of one layer, kept for the backward pass.
struct LayerCache {
  Matrix input;
  Matrix pre_activation;
};

struct ForwardRecord {
  std::vector<LayerCache> layers;
  bool populated() const { return !layers.empty(); }
};

/// Gaussian weights (mean 0, standard deviation `stddev`), zero biases.
/// Hidden layers use `hidden`, the last layer uses `output`.
inline Network init_params(std::span<const Index> layer_dims, std::uint64_t seed,
                           Activation hidden = Activation::kRelu,
                           Activation output = Activation::kLinear, double stddev = 0.1) {
  if (layer_dims.size() < 2) throw std::invalid_argument("init_params: need at least two layer dims");
  for (Index d : layer_dims) {
    if (d < 1) throw std::invalid_argument("init_params: layer dims must be >= 1, got " + std::to_string(d));
  }
  Rng rng(seed);
  Network net;
  net.layers.reserve(layer_dims.size() - 1);
  for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i) {
    DenseLayer layer;
    layer.weights.resize(layer_dims[i + 1], layer_dims[i]);
    for (Index r = 0; r < layer.weights.rows(); ++r)
      for (Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = stddev * rng.normal();
    layer.biases = Vector::Zero(layer_dims[i + 1]);
    layer.activation = (i + 2 == layer_dims.size()) ? output : hidden;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

inline Network init_params(std::initializer_list<Index> layer_dims, std::uint64_t seed,
                           Activation hidden = Activation::kRelu,
                           Activation output = Activation::kLinear, double stddev = 0.1) {
  std::vector<Index> dims(layer_dims);
  return init_params(std::span<const Index>(dims), seed, hidden, output, stddev);
}

inline Gradients zero_gradients(const Network& net) {
  Gradients g;
  g.reserve(net.layers.size());
  for (const auto& l : net.layers)
    g.push_back({Matrix::Zero(l.weights.rows(), l.weights.cols()), Vector::Zero(l.biases.size())});
  return g;
}

inline void set_zero(Gradients& grads) {
  for (auto& g : grads) {
    g.weights.setZero();
    g.biases.setZero();
  }
}

inline void apply_activation(Matrix& z, Activation a) {
  if (a == Activation::kRelu) z = z.cwiseMax(0.0);
}

/// input * weights^T, without the bias.
inline Matrix bias_free_pre_activation(const Matrix& input, const DenseLayer& layer) {
  if (input.cols() != layer.in_dim())
    throw std::invalid_argument("dense_forward: input width " + std::to_string(input.cols()) +
                                " != layer in_dim " + std::to_string(layer.in_dim()));
  return input * layer.weights.transpose();
}

inline Matrix pre_activation(const Matrix& input, const DenseLayer& layer) {
  Matrix z = bias_free_pre_activation(input, layer);
  z.rowwise() += layer.biases.transpose();
  return z;
}

inline Matrix dense_forward(const Matrix& input, const DenseLayer& layer) {
  Matrix z = pre_activation(input, layer);
  apply_activation(z, layer.activation);
  return z;
}

/// Forward pass that fills `cache` for a later dense_backward.
inline Matrix dense_forward(const Matrix& input, const DenseLayer& layer, LayerCache& cache) {
  cache.input = input;
  cache.pre_activation = pre_activation(input, layer);
  Matrix out = cache.pre_activation;
  apply_activation(out, layer.activation);
  return out;
}

/// Accumulates parameter gradients into `grad` and returns dL/d(input).
/// ReLU passes gradient only where the pre-activation is strictly positive.
inline Matrix dense_backward(const DenseLayer& layer, const LayerCache& cache, const Matrix& grad_output,
                             LayerGradient& grad) {
  if (cache.pre_activation.rows() != grad_output.rows() || cache.pre_activation.cols() != grad_output.cols())
    throw std::invalid_argument("dense_backward: gradient shape does not match cached forward pass");
  Matrix dz = grad_output;
  if (layer.activation == Activation::kRelu) {
    dz = (cache.pre_activation.array() > 0.0).select(grad_output.array(), 0.0).matrix();
  }
  grad.weights.noalias() += dz.transpose() * cache.input;
  grad.biases += dz.colwise().sum().transpose();
  return dz * layer.weights;
}

inline Matrix forward(const Network& net, const Matrix& input) {
  Matrix h = input;
  for (const auto& layer : net.layers) h = dense_forward(h, layer);
  return h;
}

inline Matrix forward(const Network& net, const Matrix& input, ForwardRecord& record) {
  record.layers.resize(net.layers.size());
  Matrix h = input;
  for (std::size_t i = 0; i < net.layers.size(); ++i) h = dense_forward(h, net.layers[i], record.layers[i]);
  return h;
}

/// Chain rule through the whole stack. Gradients are added to `grads`;
/// the return value is dL/d(input).
inline Matrix backprop(const Network& net, const ForwardRecord& record, const Matrix& loss_grad,
                       Gradients& grads) {
  if (!record.populated() || record.layers.size() != net.layers.size())
    throw std::logic_error("backprop: no forward pass recorded for this network");
  if (grads.size() != net.layers.size()) grads = zero_gradients(net);
  Matrix g = loss_grad;
  for (std::size_t i = net.layers.size(); i-- > 0;) g = dense_backward(net.layers[i], record.layers[i], g, grads[i]);
  return g;
}

/// Visits every scalar parameter: per layer, weights row-major then biases.
template <class F>
void for_each_parameter(Network& net, F&& f) {
  for (auto& l : net.layers) {
    for (Index i = 0; i < l.weights.size(); ++i) f(l.weights.data()[i]);
    for (Index i = 0; i < l.biases.size(); ++i) f(l.biases.data()[i]);
  }
}

/// Same visiting order as for_each_parameter(Network&).
template <class F>
void for_each_parameter(const Gradients& grads, F&& f) {
  for (const auto& g : grads) {
    for (Index i = 0; i < g.weights.size(); ++i) f(g.weights.data()[i]);
    for (Index i = 0; i < g.biases.size(); ++i) f(g.biases.data()[i]);
  }
}

inline bool all_finite(const Gradients& grads) {
  for (const auto& g : grads)
    if (!g.weights.allFinite() || !g.biases.allFinite()) return false;
  return true;
}

inline bool all_finite(const Network& net) {
  for (const auto& l : net.layers)
    if (!l.weights.allFinite() || !l.biases.allFinite()) return false;
  return true;
}

}  // namespace oen::nn
