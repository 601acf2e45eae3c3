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
#include <cstdlib>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oen/game/engine.hpp"
#include "oen/game/spec.hpp"
#include "oen/nn/dense.hpp"
#include "oen/setnet/set_ops.hpp"

namespace oen::observe {

using nn::Index;
using nn::Matrix;

/// Which sprite classes the agent sees and in what one-hot order.
struct ClassRegistry {
  std::vector<std::string> class_names;  // relevant classes, one-hot order
  std::vector<int> one_hot_index;        // per game class id; -1 when filtered out
  std::vector<std::string> resource_names;
  int grid_width = 0;
  int grid_height = 0;
  int avatar_class = -1;
  bool normalize_coordinates = false;  // divide x, y by the grid size

  static ClassRegistry from_game(const game::GameSpec& spec, bool normalize_coordinates = false) {
    ClassRegistry r;
    r.one_hot_index.assign(spec.classes.size(), -1);
    for (std::size_t i = 0; i < spec.classes.size(); ++i) {
      if (!spec.classes[i].relevant) continue;
      r.one_hot_index[i] = static_cast<int>(r.class_names.size());
      r.class_names.push_back(spec.classes[i].name);
    }
    r.resource_names = spec.resources;
    r.grid_width = spec.width();
    r.grid_height = spec.height();
    r.avatar_class = spec.avatar_class;
    r.normalize_coordinates = normalize_coordinates;
    return r;
  }

  Index class_count() const { return static_cast<Index>(class_names.size()); }
  Index resource_count() const { return static_cast<Index>(resource_names.size()); }
  /// Per-object width: one-hot class, x, y, orientation (dx, dy), resources.
  Index feature_dim() const { return class_count() + 4 + resource_count(); }
  Index baseline_dim() const { return class_count() + resource_count(); }

  int index_of(int class_id) const {
    if (class_id < 0 || static_cast<std::size_t>(class_id) >= one_hot_index.size())
      throw std::invalid_argument("class registry: unknown class id " + std::to_string(class_id));
    return one_hot_index[static_cast<std::size_t>(class_id)];
  }
};

/// One row per relevant object, in object-id order.
inline Matrix process_observation(const game::ObjectList& objects, const ClassRegistry& registry) {
  const Index c = registry.class_count();
  const Index r = registry.resource_count();
  std::vector<const game::ObjectInfo*> kept;
  kept.reserve(objects.size());
  for (const auto& o : objects)
    if (registry.index_of(o.class_id) >= 0) kept.push_back(&o);
  std::stable_sort(kept.begin(), kept.end(), [](auto* a, auto* b) { return a->id < b->id; });

  const double sx = registry.normalize_coordinates ? 1.0 / registry.grid_width : 1.0;
  const double sy = registry.normalize_coordinates ? 1.0 / registry.grid_height : 1.0;
  Matrix out = Matrix::Zero(static_cast<Index>(kept.size()), registry.feature_dim());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto& o = *kept[k];
    if (static_cast<Index>(o.resources.size()) != r)
      throw std::invalid_argument("process_observation: object " + std::to_string(o.id) +
                                  " does not carry every registered resource");
    const auto row = static_cast<Index>(k);
    out(row, registry.index_of(o.class_id)) = 1.0;
    out(row, c) = o.x * sx;
    out(row, c + 1) = o.y * sy;
    out(row, c + 2) = game::delta_x(o.orientation);
    out(row, c + 3) = game::delta_y(o.orientation);
    for (Index i = 0; i < r; ++i) out(row, c + 4 + i) = static_cast<double>(o.resources[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Per relevant class, the Manhattan distance from the avatar to the nearest
/// instance (grid_width + grid_height when none is alive), then the avatar's
/// resources.
inline Eigen::VectorXd extract_features_baseline(const game::ObjectList& objects, const ClassRegistry& registry) {
  const game::ObjectInfo* avatar = nullptr;
  for (const auto& o : objects)
    if (o.is_avatar) avatar = &o;
  if (!avatar) throw std::invalid_argument("extract_features_baseline: no avatar in observation");

  const Index c = registry.class_count();
  const double unreachable = registry.grid_width + registry.grid_height;
  Eigen::VectorXd out = Eigen::VectorXd::Constant(registry.baseline_dim(), unreachable);
  for (const auto& o : objects) {
    if (&o == avatar) continue;
    const int idx = registry.index_of(o.class_id);
    if (idx < 0) continue;
    const double d = std::abs(o.x - avatar->x) + std::abs(o.y - avatar->y);
    out(idx) = std::min(out(idx), d);
  }
  for (Index i = 0; i < registry.resource_count(); ++i)
    out(c + i) = static_cast<double>(avatar->resources.at(static_cast<std::size_t>(i)));
  return out;
}

/// Zero-pads variable-size sets into one batch with a validity mask.
inline setnet::FeatureSetBatch pad_batch(std::span<const Matrix* const> sets) {
  if (sets.empty()) throw std::invalid_argument("pad_batch: no sets");
  const Index d = sets.front()->cols();
  setnet::FeatureSetBatch batch;
  batch.layout.set_sizes.reserve(sets.size());
  Index k_max = 0;
  for (const Matrix* s : sets) {
    if (s->rows() < 1) throw std::invalid_argument("pad_batch: empty set");
    if (s->cols() != d) throw std::invalid_argument("pad_batch: feature widths differ");
    k_max = std::max(k_max, s->rows());
    batch.layout.set_sizes.push_back(s->rows());
  }
  batch.layout.k_max = k_max;
  batch.data = Matrix::Zero(static_cast<Index>(sets.size()) * k_max, d);
  for (std::size_t b = 0; b < sets.size(); ++b)
    batch.data.middleRows(static_cast<Index>(b) * k_max, sets[b]->rows()) = *sets[b];
  return batch;
}

inline setnet::FeatureSetBatch pad_batch(const std::vector<Matrix>& sets) {
  std::vector<const Matrix*> ptrs;
  ptrs.reserve(sets.size());
  for (const auto& s : sets) ptrs.push_back(&s);
  return pad_batch(std::span<const Matrix* const>(ptrs));
}

}  // namespace oen::observe
