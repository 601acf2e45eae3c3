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

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oen/nn/adam.hpp"
#include "oen/nn/dense.hpp"
#include "oen/rng.hpp"
#include "oen/setnet/set_ops.hpp"

namespace oen::setnet {

struct OenConfig {
  std::vector<Index> embedding_widths{128, 128, 128, 128};
  std::vector<Index> head_widths{128, 128, 128};
  // Apply x - maxpool(X) to the raw features as well as between hidden layers.
  bool transform_inputs = true;
  double init_stddev = 0.1;
};

/// Shared per-object embedding stack (all relu) followed by the task head
/// (relu hidden layers, linear output of one value per action).
struct OenParams {
  nn::Network embedding;
  nn::Network head;
  bool transform_inputs = true;

  Index feature_dim() const { return embedding.in_dim(); }
  Index action_count() const { return head.out_dim(); }
  Index representation_dim() const { return embedding.out_dim(); }
  std::size_t parameter_count() const { return embedding.parameter_count() + head.parameter_count(); }

  friend bool operator==(const OenParams&, const OenParams&) = default;
};

struct OenGradients {
  nn::Gradients embedding;
  nn::Gradients head;
};

inline OenParams make_oen_params(Index feature_dim, Index action_count, std::uint64_t seed,
                                 const OenConfig& config = {}) {
  if (config.embedding_widths.empty()) throw std::invalid_argument("OEN needs at least one embedding layer");
  std::vector<Index> embed_dims{feature_dim};
  embed_dims.insert(embed_dims.end(), config.embedding_widths.begin(), config.embedding_widths.end());
  std::vector<Index> head_dims{config.embedding_widths.back()};
  head_dims.insert(head_dims.end(), config.head_widths.begin(), config.head_widths.end());
  head_dims.push_back(action_count);

  OenParams p;
  p.embedding = nn::init_params(std::span<const Index>(embed_dims), derive_seed(seed, 1), nn::Activation::kRelu,
                                nn::Activation::kRelu, config.init_stddev);
  p.head = nn::init_params(std::span<const Index>(head_dims), derive_seed(seed, 2), nn::Activation::kRelu,
                           nn::Activation::kLinear, config.init_stddev);
  p.transform_inputs = config.transform_inputs;
  return p;
}

inline OenGradients zero_gradients(const OenParams& p) {
  return {nn::zero_gradients(p.embedding), nn::zero_gradients(p.head)};
}

inline void set_zero(OenGradients& g) {
  nn::set_zero(g.embedding);
  nn::set_zero(g.head);
}

struct OenForwardRecord {
  SetLayout layout;
  std::vector<nn::LayerCache> embedding;
  std::vector<ArgMax> transform_argmax;  // one per embedding layer (unused when not transformed)
  std::vector<bool> transformed;
  ArgMax pool_argmax;
  nn::ForwardRecord head;
  bool populated() const { return !embedding.empty() && head.populated(); }
};

namespace detail {

inline Matrix embed_impl(const FeatureSetBatch& batch, const OenParams& params, OenForwardRecord* record) {
  batch.layout.validate();
  if (batch.dim() != params.feature_dim())
    throw std::invalid_argument("embed: feature width " + std::to_string(batch.dim()) + " != network input " +
                                std::to_string(params.feature_dim()));
  const auto& layers = params.embedding.layers;
  if (record) {
    record->layout = batch.layout;
    record->embedding.resize(layers.size());
    record->transform_argmax.resize(layers.size());
    record->transformed.assign(layers.size(), false);
  }
  // The transform in front of layer i > 0 is fused with layer i-1's relu.
  Matrix x = params.transform_inputs
                 ? equivariant_transform(batch.data, batch.layout, record ? &record->transform_argmax[0] : nullptr)
                 : batch.data;
  if (record) record->transformed[0] = params.transform_inputs;
  Matrix h;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    if (layer.activation != nn::Activation::kRelu) throw std::invalid_argument("embed: embedding layers must be relu");
    const Matrix u = nn::bias_free_pre_activation(x, layer);
    Matrix z = u;
    z.rowwise() += layer.biases.transpose();
    if (record) {
      record->embedding[i].input = x;
      record->embedding[i].pre_activation = z;
    }
    if (i + 1 < layers.size()) {
      x = relu_equivariant_transform(u, layer.biases, batch.layout,
                                     record ? &record->transform_argmax[i + 1] : nullptr);
      if (record) record->transformed[i + 1] = true;
    } else {
      h = z.cwiseMax(0.0);
      zero_padding(h, batch.layout);
    }
  }
  return h;
}

}  // namespace detail

/// Per-object embeddings, (batch * k_max) x embedding width; padded rows are zero.
inline Matrix embed(const FeatureSetBatch& batch, const OenParams& params) {
  return detail::embed_impl(batch, params, nullptr);
}

/// Unified representation: masked max pool of the embeddings, batch x width.
inline Matrix unified_representation(const FeatureSetBatch& batch, const OenParams& params) {
  return masked_max_pool(embed(batch, params), batch.layout);
}

/// Action values, batch x M.
inline Matrix oen_forward(const FeatureSetBatch& batch, const OenParams& params) {
  return nn::forward(params.head, unified_representation(batch, params));
}

inline Matrix oen_forward(const FeatureSetBatch& batch, const OenParams& params, OenForwardRecord& record) {
  const Matrix h = detail::embed_impl(batch, params, &record);
  const Matrix r = masked_max_pool(h, batch.layout, &record.pool_argmax);
  return nn::forward(params.head, r, record.head);
}

/// Accumulates dL/dtheta for both sub-networks given dL/dQ (batch x M).
inline void oen_backward(const OenParams& params, const OenForwardRecord& record, const Matrix& grad_q,
                         OenGradients& grads) {
  if (!record.populated()) throw std::logic_error("oen_backward: no forward pass recorded");
  if (grads.embedding.size() != params.embedding.layers.size() || grads.head.size() != params.head.layers.size())
    grads = zero_gradients(params);
  const Matrix grad_r = nn::backprop(params.head, record.head, grad_q, grads.head);
  Matrix g = masked_max_pool_backward(grad_r, record.pool_argmax, record.layout);
  const auto& layers = params.embedding.layers;
  for (std::size_t i = layers.size(); i-- > 0;) {
    zero_padding(g, record.layout);
    g = nn::dense_backward(layers[i], record.embedding[i], g, grads.embedding[i]);
    if (record.transformed[i]) g = equivariant_transform_backward(g, record.transform_argmax[i], record.layout);
  }
}

template <class F>
void for_each_parameter(OenParams& p, F&& f) {
  nn::for_each_parameter(p.embedding, f);
  nn::for_each_parameter(p.head, f);
}

template <class F>
void for_each_parameter(const OenGradients& g, F&& f) {
  nn::for_each_parameter(g.embedding, f);
  nn::for_each_parameter(g.head, f);
}

struct OenAdamState {
  nn::AdamState embedding;
  nn::AdamState head;
  std::int64_t timestep() const { return head.timestep; }
};

inline OenAdamState make_adam_state(const OenParams& p, nn::AdamOptions options = {}) {
  return {nn::make_adam_state(p.embedding, options), nn::make_adam_state(p.head, options)};
}

inline void adam_step(OenParams& p, const OenGradients& g, OenAdamState& state) {
  if (!nn::all_finite(g.embedding) || !nn::all_finite(g.head))
    throw std::domain_error("adam_step: non-finite gradient");
  nn::adam_step(p.embedding, g.embedding, state.embedding);
  nn::adam_step(p.head, g.head, state.head);
}

}  // namespace oen::setnet
