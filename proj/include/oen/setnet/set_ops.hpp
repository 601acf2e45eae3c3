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

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "oen/nn/dense.hpp"

namespace oen::setnet {

using nn::Index;
using nn::Matrix;

/// Shape of a padded batch of sets: row b holds set_sizes[b] real entries at
/// positions 0..K_b-1 followed by padding up to k_max.
struct SetLayout {
  Index k_max = 0;
  std::vector<Index> set_sizes;

  Index batch() const { return static_cast<Index>(set_sizes.size()); }
  Index rows() const { return batch() * k_max; }
  Index row(Index b, Index k) const { return b * k_max + k; }
  bool valid(Index b, Index k) const { return k < set_sizes[static_cast<std::size_t>(b)]; }

  void validate() const {
    for (std::size_t b = 0; b < set_sizes.size(); ++b) {
      if (set_sizes[b] < 1)
        throw std::invalid_argument("set layout: row " + std::to_string(b) + " has no unmasked entries");
      if (set_sizes[b] > k_max)
        throw std::invalid_argument("set layout: row " + std::to_string(b) + " exceeds k_max");
    }
  }

  /// batch x k_max matrix of {0,1}.
  Matrix mask() const {
    Matrix m = Matrix::Zero(batch(), k_max);
    for (Index b = 0; b < batch(); ++b) m.row(b).head(set_sizes[static_cast<std::size_t>(b)]).setOnes();
    return m;
  }

  friend bool operator==(const SetLayout&, const SetLayout&) = default;
};

/// Padded batch of per-object feature vectors. `data` has one row per
/// (set, slot) pair in layout order; padded rows are zero.
struct FeatureSetBatch {
  SetLayout layout;
  Matrix data;

  Index batch() const { return layout.batch(); }
  Index k_max() const { return layout.k_max; }
  Index dim() const { return data.cols(); }
  Matrix mask() const { return layout.mask(); }

  void validate() const {
    layout.validate();
    if (data.rows() != layout.rows())
      throw std::invalid_argument("feature set batch: data rows do not match layout");
    for (Index b = 0; b < layout.batch(); ++b)
      for (Index k = layout.set_sizes[static_cast<std::size_t>(b)]; k < layout.k_max; ++k)
        if (!data.row(layout.row(b, k)).isZero(0.0))
          throw std::invalid_argument("feature set batch: padded entry is not a zero vector");
  }
};

/// Winning row per (set, column) of a masked max pool; batch x h, row indices
/// into the padded matrix.
using ArgMax = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Element-wise max over the unmasked entries of each set. Ties go to the
/// lowest slot, which is also where the backward pass routes the gradient.
inline Matrix masked_max_pool(const Matrix& values, const SetLayout& layout, ArgMax* argmax = nullptr) {
  layout.validate();
  if (values.rows() != layout.rows()) throw std::invalid_argument("masked_max_pool: rows do not match layout");
  const Index h = values.cols();
  Matrix pooled(layout.batch(), h);
  if (argmax) argmax->resize(layout.batch(), h);
  for (Index b = 0; b < layout.batch(); ++b) {
    const Index first = layout.row(b, 0);
    const Index count = layout.set_sizes[static_cast<std::size_t>(b)];
    for (Index j = 0; j < h; ++j) {
      Index best = first;
      double v = values(first, j);
      for (Index k = 1; k < count; ++k) {
        const double x = values(first + k, j);
        if (x > v) {
          v = x;
          best = first + k;
        }
      }
      pooled(b, j) = v;
      if (argmax) (*argmax)(b, j) = best;
    }
  }
  return pooled;
}

/// Routes a pooled gradient (batch x h) back to the argmax rows.
inline Matrix masked_max_pool_backward(const Matrix& grad_pooled, const ArgMax& argmax, const SetLayout& layout) {
  Matrix g = Matrix::Zero(layout.rows(), grad_pooled.cols());
  for (Index b = 0; b < grad_pooled.rows(); ++b)
    for (Index j = 0; j < grad_pooled.cols(); ++j) g(argmax(b, j), j) += grad_pooled(b, j);
  return g;
}

inline void zero_padding(Matrix& values, const SetLayout& layout) {
  for (Index b = 0; b < layout.batch(); ++b) {
    const Index count = layout.set_sizes[static_cast<std::size_t>(b)];
    if (count < layout.k_max) values.middleRows(layout.row(b, count), layout.k_max - count).setZero();
  }
}

/// x_k - maxpool(X) for every unmasked x_k of its own set; padded rows stay zero.
inline Matrix equivariant_transform(const Matrix& values, const SetLayout& layout, ArgMax* argmax = nullptr) {
  const Matrix pooled = masked_max_pool(values, layout, argmax);
  Matrix out = Matrix::Zero(values.rows(), values.cols());
  for (Index b = 0; b < layout.batch(); ++b) {
    const Index count = layout.set_sizes[static_cast<std::size_t>(b)];
    const Index first = layout.row(b, 0);
    out.middleRows(first, count) = values.middleRows(first, count).rowwise() - pooled.row(b);
  }
  return out;
}

/// equivariant_transform(relu(u + bias)) from the bias-free pre-activations
/// u. Where both an entry and its set's max are active the result is
/// u_k - u_max, so the shared bias never enters a cancelling subtraction.
/// Same value and argmax as the unfused composition.
inline Matrix relu_equivariant_transform(const Matrix& u, const Eigen::VectorXd& bias, const SetLayout& layout,
                                         ArgMax* argmax = nullptr) {
  layout.validate();
  if (u.rows() != layout.rows() || u.cols() != bias.size())
    throw std::invalid_argument("relu_equivariant_transform: shape mismatch");
  Matrix out = Matrix::Zero(u.rows(), u.cols());
  if (argmax) argmax->resize(layout.batch(), u.cols());
  for (Index b = 0; b < layout.batch(); ++b) {
    const Index first = layout.row(b, 0);
    const Index count = layout.set_sizes[static_cast<std::size_t>(b)];
    for (Index j = 0; j < u.cols(); ++j) {
      const double bj = bias(j);
      Index best = first;
      double zbest = u(first, j) + bj;
      for (Index k = 1; k < count; ++k) {
        const double z = u(first + k, j) + bj;
        if (z > zbest) {
          zbest = z;
          best = first + k;
        }
      }
      if (!(zbest > 0.0)) {  // whole column inactive: relu output is all zero, first slot wins the tie
        if (argmax) (*argmax)(b, j) = first;
        continue;
      }
      if (argmax) (*argmax)(b, j) = best;
      for (Index k = 0; k < count; ++k) {
        const Index r = first + k;
        out(r, j) = u(r, j) + bj > 0.0 ? u(r, j) - u(best, j) : -zbest;
      }
    }
  }
  return out;
}

/// Adjoint of equivariant_transform given the forward argmax.
inline Matrix equivariant_transform_backward(const Matrix& grad_out, const ArgMax& argmax, const SetLayout& layout) {
  Matrix g = Matrix::Zero(grad_out.rows(), grad_out.cols());
  for (Index b = 0; b < layout.batch(); ++b) {
    const Index count = layout.set_sizes[static_cast<std::size_t>(b)];
    const Index first = layout.row(b, 0);
    g.middleRows(first, count) = grad_out.middleRows(first, count);
    const Eigen::RowVectorXd column_sums = grad_out.middleRows(first, count).colwise().sum();
    for (Index j = 0; j < grad_out.cols(); ++j) g(argmax(b, j), j) -= column_sums(j);
  }
  return g;
}

enum class SetStatistic { kMax, kMean };

/// Concatenates each object's features with a statistic of its set: (x, x_hat).
inline FeatureSetBatch contextualize_concat(const FeatureSetBatch& batch, SetStatistic statistic) {
  const auto& layout = batch.layout;
  Matrix stat;
  if (statistic == SetStatistic::kMax) {
    stat = masked_max_pool(batch.data, layout);
  } else {
    layout.validate();
    stat.resize(layout.batch(), batch.dim());
    for (Index b = 0; b < layout.batch(); ++b) {
      const Index count = layout.set_sizes[static_cast<std::size_t>(b)];
      stat.row(b) = batch.data.middleRows(layout.row(b, 0), count).colwise().sum() / static_cast<double>(count);
    }
  }
  FeatureSetBatch out;
  out.layout = layout;
  out.data = Matrix::Zero(batch.data.rows(), 2 * batch.dim());
  for (Index b = 0; b < layout.batch(); ++b) {
    for (Index k = 0; k < layout.set_sizes[static_cast<std::size_t>(b)]; ++k) {
      const Index r = layout.row(b, k);
      out.data.row(r).head(batch.dim()) = batch.data.row(r);
      out.data.row(r).tail(batch.dim()) = stat.row(b);
    }
  }
  return out;
}

}  // namespace oen::setnet
