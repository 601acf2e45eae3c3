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
#include <string>

namespace oen::agent {

enum class RowKind { kTrainEpisode, kEvalSummary };

inline const char* to_string(RowKind k) { return k == RowKind::kTrainEpisode ? "train_episode" : "eval_summary"; }

inline RowKind parse_row_kind(const std::string& s) {
  if (s == "train_episode") return RowKind::kTrainEpisode;
  if (s == "eval_summary") return RowKind::kEvalSummary;
  throw std::invalid_argument("unknown metrics row kind '" + s + "'");
}

/// One line of the metrics log. Train rows are written when an episode ends,
/// eval rows at every multiple of the evaluation interval.
struct MetricsRow {
  std::int64_t step = 0;
  std::int64_t episode = 0;
  RowKind kind = RowKind::kTrainEpisode;
  double reward = 0.0;
  std::int64_t episode_length = 0;
  double epsilon = 0.0;
  double loss_mean = 0.0;
  std::int64_t wall_ms = 0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

}  // namespace oen::agent
