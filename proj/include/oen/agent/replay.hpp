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
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oen/rng.hpp"

namespace oen::agent {

template <class Observation>
struct Transition {
  std::uint64_t id = 0;  // insertion sequence number
  Observation observation;
  int action = 0;
  double reward = 0.0;
  Observation next_observation;
  bool terminal = false;  // no bootstrap from next_observation
};

/// Fixed-capacity FIFO ring buffer with uniform sampling.
template <class Observation>
class ReplayMemory {
 public:
  using Item = Transition<Observation>;

  explicit ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay memory capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return storage_.size(); }
  bool empty() const { return storage_.empty(); }
  std::uint64_t next_id() const { return next_id_; }

  /// Stores a transition, overwriting the oldest once full. Returns its id.
  std::uint64_t add(Item t) {
    t.id = next_id_++;
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(t));
    } else {
      storage_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
    return next_id_ - 1;
  }

  /// `n` distinct transitions chosen uniformly (Floyd's algorithm).
  std::vector<const Item*> sample(std::size_t n, Rng& rng) const {
    if (n > storage_.size()) throw std::invalid_argument("replay sample larger than memory");
    std::vector<std::size_t> picked;
    picked.reserve(n);
    const std::size_t m = storage_.size();
    for (std::size_t j = m - n; j < m; ++j) {
      const auto t = static_cast<std::size_t>(rng.below(j + 1));
      if (std::find(picked.begin(), picked.end(), t) == picked.end())
        picked.push_back(t);
      else
        picked.push_back(j);
    }
    std::vector<const Item*> out;
    out.reserve(n);
    for (std::size_t i : picked) out.push_back(&storage_[i]);
    return out;
  }

  /// Oldest first.
  std::vector<std::uint64_t> ids() const {
    std::vector<std::uint64_t> out;
    out.reserve(storage_.size());
    const std::size_t start = storage_.size() < capacity_ ? 0 : cursor_;
    for (std::size_t i = 0; i < storage_.size(); ++i) out.push_back(storage_[(start + i) % storage_.size()].id);
    return out;
  }

  const std::vector<Item>& raw() const { return storage_; }
  std::size_t cursor() const { return cursor_; }

  // Restores internal state exactly (checkpoint loading).
  void restore(std::vector<Item> storage, std::size_t cursor, std::uint64_t next_id) {
    if (storage.size() > capacity_ || cursor >= capacity_)
      throw std::invalid_argument("replay restore: inconsistent state");
    storage_ = std::move(storage);
    cursor_ = cursor;
    next_id_ = next_id;
  }

 private:
  std::size_t capacity_;
  std::vector<Item> storage_;
  std::size_t cursor_ = 0;
  std::uint64_t next_id_ = 0;
};

}  // namespace oen::agent
