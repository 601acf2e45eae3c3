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

#include <cstring>
#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>

#include "oen/agent/dqn.hpp"
#include "oen/agent/serialize.hpp"
#include "oen/game/parser.hpp"

namespace oen::agent {

inline constexpr char kCheckpointMagic[8] = {'O', 'E', 'N', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint64_t kCheckpointVersion = 1;

// Layout (all integers little-endian u64/i64, doubles by bit pattern):
//   magic[8] version kind game_source settings
//   step episode episode_return episode_length loss_sum loss_count
//   counters agent_rng env_state online target optimizer replay rows
struct CheckpointHeader {
  AgentKind kind = AgentKind::kOen;
  std::string game_source;
  RunSettings settings;
};

namespace detail {

inline void write_settings(io::Writer& w, const RunSettings& s) {
  w.i64(static_cast<std::int64_t>(s.kind));
  io::write(w, s.config);
  w.u64(s.agent_seed);
  w.u64(s.env_seed);
  w.u64(s.eval_seed);
  w.i64(s.eval_every);
  w.i64(s.eval_episodes);
  w.boolean(s.record_wall_time);
}

inline RunSettings read_settings(io::Reader& r) {
  RunSettings s;
  s.kind = static_cast<AgentKind>(r.i64());
  io::read(r, s.config);
  s.agent_seed = r.u64();
  s.env_seed = r.u64();
  s.eval_seed = r.u64();
  s.eval_every = r.i64();
  s.eval_episodes = static_cast<int>(r.i64());
  s.record_wall_time = r.boolean();
  return s;
}

}  // namespace detail

template <class Model>
void save_checkpoint(std::ostream& os, const TrainingSession<Model>& s, const std::string& game_source) {
  os.write(kCheckpointMagic, sizeof kCheckpointMagic);
  io::Writer w(os);
  w.u64(kCheckpointVersion);
  w.i64(static_cast<std::int64_t>(s.settings().kind));
  w.str(game_source);
  detail::write_settings(w, s.settings());

  w.i64(s.step());
  w.i64(s.episode());
  w.f64(s.episode_return());
  w.i64(s.episode_length());
  w.f64(s.episode_loss_sum());
  w.i64(s.episode_loss_count());

  const auto& c = s.counters();
  w.i64(c.optimizer_steps);
  w.i64(c.first_train_step);
  w.u64(c.target_sync_steps.size());
  for (auto v : c.target_sync_steps) w.i64(v);

  io::write(w, s.rng());
  io::write(w, s.env().state());
  io::write(w, s.nets().online);
  io::write(w, s.nets().target);
  io::write(w, s.nets().optimizer);

  const auto& replay = s.replay();
  w.u64(replay.capacity());
  w.u64(replay.cursor());
  w.u64(replay.next_id());
  w.u64(replay.raw().size());
  for (const auto& t : replay.raw()) io::write(w, t);

  w.u64(s.rows().size());
  for (const auto& row : s.rows()) {
    w.i64(row.step);
    w.i64(row.episode);
    w.i64(static_cast<std::int64_t>(row.kind));
    w.f64(row.reward);
    w.i64(row.episode_length);
    w.f64(row.epsilon);
    w.f64(row.loss_mean);
    w.i64(row.wall_ms);
  }
  if (!w.ok()) throw std::runtime_error("checkpoint: write failed");
}

inline CheckpointHeader read_checkpoint_header(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw std::runtime_error("checkpoint: not an OEN checkpoint file");
  io::Reader r(is);
  const auto version = r.u64();
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  CheckpointHeader h;
  h.kind = static_cast<AgentKind>(r.i64());
  h.game_source = r.str();
  h.settings = detail::read_settings(r);
  return h;
}

/// Reads the body following read_checkpoint_header into a fresh session.
template <class Model>
std::unique_ptr<TrainingSession<Model>> load_session(std::istream& is, const CheckpointHeader& h) {
  auto session = std::make_unique<TrainingSession<Model>>(game::parse_game(h.game_source), h.settings);
  auto in = session->internals();
  io::Reader r(is);
  *in.step = r.i64();
  *in.episode = r.i64();
  *in.episode_return = r.f64();
  *in.episode_length = r.i64();
  *in.episode_loss_sum = r.f64();
  *in.episode_loss_count = r.i64();

  in.counters->optimizer_steps = r.i64();
  in.counters->first_train_step = r.i64();
  in.counters->target_sync_steps.resize(r.u64());
  for (auto& v : in.counters->target_sync_steps) v = r.i64();

  io::read(r, *in.rng);
  io::read(r, in.env->mutable_state());
  io::read(r, in.nets->online);
  io::read(r, in.nets->target);
  io::read(r, in.nets->optimizer);

  const auto capacity = r.u64();
  if (capacity != in.replay->capacity()) throw std::runtime_error("checkpoint: replay capacity mismatch");
  const auto cursor = r.u64();
  const auto next_id = r.u64();
  std::vector<TransitionOf<Model>> items(r.u64());
  for (auto& t : items) io::read(r, t);
  in.replay->restore(std::move(items), cursor, next_id);

  in.rows->resize(r.u64());
  for (auto& row : *in.rows) {
    row.step = r.i64();
    row.episode = r.i64();
    row.kind = static_cast<RowKind>(r.i64());
    row.reward = r.f64();
    row.episode_length = r.i64();
    row.epsilon = r.f64();
    row.loss_mean = r.f64();
    row.wall_ms = r.i64();
  }
  return session;
}

}  // namespace oen::agent
