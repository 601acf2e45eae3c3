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
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "oen/game/spec.hpp"
#include "oen/rng.hpp"

namespace oen::game {

struct GameObject {
  std::int64_t id = 0;
  int class_id = 0;
  int x = 0;
  int y = 0;
  Orientation orientation = Orientation::kNone;
  std::vector<std::int64_t> resources;  // indexed like GameSpec::resources
  bool alive = true;

  friend bool operator==(const GameObject&, const GameObject&) = default;
};

/// A running game. Objects are kept sorted by id; only live objects remain
/// between steps.
struct GameState {
  int grid_width = 0;
  int grid_height = 0;
  std::vector<GameObject> objects;
  std::int64_t score = 0;
  std::int64_t tick = 0;
  std::int64_t next_id = 0;
  Rng rng;
  bool terminal = false;
  bool won = false;
  bool timed_out = false;

  friend bool operator==(const GameState&, const GameState&) = default;
};

/// What the agent sees of one object.
struct ObjectInfo {
  std::int64_t id = 0;
  int class_id = 0;
  int x = 0;
  int y = 0;
  Orientation orientation = Orientation::kNone;
  std::vector<std::int64_t> resources;
  bool is_avatar = false;

  friend bool operator==(const ObjectInfo&, const ObjectInfo&) = default;
};

using ObjectList = std::vector<ObjectInfo>;

struct StepResult {
  double reward = 0.0;
  bool terminal = false;
};

namespace detail {

inline GameObject make_object(const GameSpec& spec, GameState& s, int class_id, int x, int y) {
  GameObject o;
  o.id = s.next_id++;
  o.class_id = class_id;
  o.x = x;
  o.y = y;
  const auto& c = spec.classes[static_cast<std::size_t>(class_id)];
  o.orientation = is_static(c.behavior) ? Orientation::kNone : c.direction;
  o.resources.assign(spec.resources.size(), 0);
  return o;
}

class Stepper {
 public:
  Stepper(const GameSpec& spec, GameState& s) : spec_(spec), s_(s) {}

  StepResult run(int action) {
    const std::int64_t score_before = s_.score;
    s_.tick += 1;
    act_avatar(action);
    // Objects spawned during this tick are appended and move in the same pass.
    for (std::size_t i = 0; i < s_.objects.size(); ++i) {
      if (!s_.objects[i].alive) continue;
      const auto& c = spec_.classes[static_cast<std::size_t>(s_.objects[i].class_id)];
      if (is_avatar(c.behavior) || is_static(c.behavior)) continue;
      if (s_.tick % c.speed != 0) continue;
      act_npc(i, c);
    }
    std::erase_if(s_.objects, [](const GameObject& o) { return !o.alive; });
    std::int64_t bonus = 0;
    for (const auto& t : spec_.terminations) {
      if (satisfied(t)) {
        s_.terminal = true;
        s_.won = t.win;
        s_.timed_out = t.kind == TerminationKind::kTimeout;
        bonus = t.bonus;
        break;
      }
    }
    return {static_cast<double>(s_.score - score_before + bonus), s_.terminal};
  }

 private:
  static Orientation action_direction(int action) {
    switch (action) {
      case kUp: return Orientation::kNorth;
      case kRight: return Orientation::kEast;
      case kDown: return Orientation::kSouth;
      case kLeft: return Orientation::kWest;
      default: return Orientation::kNone;
    }
  }

  std::size_t avatar_index() const {
    for (std::size_t i = 0; i < s_.objects.size(); ++i)
      if (s_.objects[i].alive && s_.objects[i].class_id == spec_.avatar_class) return i;
    return s_.objects.size();
  }

  void act_avatar(int action) {
    const std::size_t a = avatar_index();
    if (a == s_.objects.size()) return;
    const auto& c = spec_.classes[static_cast<std::size_t>(spec_.avatar_class)];
    if (const Orientation dir = action_direction(action); dir != Orientation::kNone) {
      s_.objects[a].orientation = dir;
      try_move(a, dir);
    } else if (action == kFire && c.behavior == Behavior::kShooterAvatar) {
      const int pc = c.projectile_class;
      for (const auto& o : s_.objects)
        if (o.alive && o.class_id == pc) return;  // one projectile in flight at a time
      const auto& avatar = s_.objects[a];
      GameObject p = make_object(spec_, s_, pc, avatar.x, avatar.y);
      if (spec_.classes[static_cast<std::size_t>(pc)].direction == Orientation::kNone)
        p.orientation = avatar.orientation;
      s_.objects.push_back(std::move(p));
    }
  }

  void act_npc(std::size_t i, const SpriteClass& c) {
    switch (c.behavior) {
      case Behavior::kMissile: {
        if (s_.objects[i].orientation == Orientation::kNone) return;
        if (!try_move(i, s_.objects[i].orientation) && s_.objects[i].alive)
          s_.objects[i].orientation = reverse(s_.objects[i].orientation);
        return;
      }
      case Behavior::kRandomWalker: {
        random_move(i);
        return;
      }
      case Behavior::kChaser: {
        const auto& me = s_.objects[i];
        const GameObject* best = nullptr;
        int best_d = 0;
        for (const auto& o : s_.objects) {
          if (!o.alive || o.class_id != c.target_class || o.id == me.id) continue;
          const int d = std::abs(o.x - me.x) + std::abs(o.y - me.y);
          if (!best || d < best_d) {
            best = &o;
            best_d = d;
          }
        }
        if (!best) {
          random_move(i);
          return;
        }
        Orientation options[2];
        int n = 0;
        if (best->x > me.x) options[n++] = Orientation::kEast;
        if (best->x < me.x) options[n++] = Orientation::kWest;
        if (best->y > me.y) options[n++] = Orientation::kSouth;
        if (best->y < me.y) options[n++] = Orientation::kNorth;
        if (n == 0) return;
        const Orientation dir = n == 1 ? options[0] : options[s_.rng.below(2)];
        s_.objects[i].orientation = dir;
        try_move(i, dir);
        return;
      }
      default: return;
    }
  }

  void random_move(std::size_t i) {
    const auto dir = static_cast<Orientation>(1 + s_.rng.below(4));
    s_.objects[i].orientation = dir;
    try_move(i, dir);
  }

  // Moves object i one cell; returns false when blocked or killed.
  bool try_move(std::size_t i, Orientation dir) {
    const int nx = s_.objects[i].x + delta_x(dir);
    const int ny = s_.objects[i].y + delta_y(dir);
    if (nx < 0 || ny < 0 || nx >= s_.grid_width || ny >= s_.grid_height) return false;
    bool blocked = false;
    for (std::size_t j = 0; j < s_.objects.size() && s_.objects[i].alive; ++j) {
      if (j == i || !s_.objects[j].alive || s_.objects[j].x != nx || s_.objects[j].y != ny) continue;
      collide(i, j, blocked);
    }
    if (!s_.objects[i].alive || blocked) return false;
    s_.objects[i].x = nx;
    s_.objects[i].y = ny;
    return true;
  }

  // Mover i enters the cell of j.
  void collide(std::size_t i, std::size_t j, bool& blocked) {
    const int ci = s_.objects[i].class_id;
    const int cj = s_.objects[j].class_id;
    for (const auto& in : spec_.interactions) {
      std::size_t a = 0, b = 0;
      if (in.class_a == ci && in.class_b == cj) {
        a = i;
        b = j;
      } else if (in.class_a == cj && in.class_b == ci) {
        a = j;
        b = i;
      } else {
        continue;
      }
      for (const auto& e : in.effects) {
        switch (e.kind) {
          case EffectKind::kKillA: s_.objects[a].alive = false; break;
          case EffectKind::kKillB: s_.objects[b].alive = false; break;
          case EffectKind::kKillBoth:
            s_.objects[a].alive = false;
            s_.objects[b].alive = false;
            break;
          case EffectKind::kCollect:
            s_.objects[a].resources[static_cast<std::size_t>(e.resource)] += e.amount;
            s_.objects[b].alive = false;
            break;
          case EffectKind::kScore: s_.score += e.amount; break;
          case EffectKind::kBlock: blocked = true; break;
        }
      }
      return;  // first match wins
    }
  }

  bool satisfied(const Termination& t) const {
    if (t.kind == TerminationKind::kTimeout) return s_.tick >= t.count;
    std::int64_t n = 0;
    for (const auto& o : s_.objects)
      if (o.alive && o.class_id == t.class_id) ++n;
    return compare(n, t.op, t.count);
  }

  const GameSpec& spec_;
  GameState& s_;
};

}  // namespace detail

/// Instantiates the level grid row-major (ids in that order), score 0, tick 0.
inline GameState reset(const GameSpec& spec, std::uint64_t seed) {
  GameState s;
  s.grid_width = spec.width();
  s.grid_height = spec.height();
  s.rng.reseed(seed);
  for (int y = 0; y < spec.height(); ++y) {
    for (int x = 0; x < spec.width(); ++x) {
      const char g = spec.level[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
      if (g == '.') continue;
      for (int cls : spec.level_map.at(g)) s.objects.push_back(detail::make_object(spec, s, cls, x, y));
    }
  }
  return s;
}

/// Advances one tick: avatar action first, then NPCs in id order, then the
/// first satisfied termination. Reward is the score delta plus any
/// termination bonus.
inline StepResult step(const GameSpec& spec, GameState& state, int action) {
  if (state.terminal) throw std::logic_error("step: game is already terminal");
  if (action < 0 || action >= spec.action_count())
    throw std::invalid_argument("step: action " + std::to_string(action) + " out of range");
  return detail::Stepper(spec, state).run(action);
}

inline ObjectList get_objects(const GameSpec& spec, const GameState& state) {
  ObjectList out;
  out.reserve(state.objects.size());
  for (const auto& o : state.objects) {
    if (!o.alive) continue;
    out.push_back({o.id, o.class_id, o.x, o.y, o.orientation, o.resources, o.class_id == spec.avatar_class});
  }
  return out;
}

inline bool has_avatar(const GameSpec& spec, const GameState& state) {
  for (const auto& o : state.objects)
    if (o.alive && o.class_id == spec.avatar_class) return true;
  return false;
}

/// Convenience owner of a spec and its running state.
class Environment {
 public:
  explicit Environment(GameSpec spec) : spec_(std::move(spec)) {}

  const GameSpec& spec() const { return spec_; }
  const GameState& state() const { return state_; }
  GameState& mutable_state() { return state_; }
  int action_count() const { return spec_.action_count(); }

  void reset(std::uint64_t seed) { state_ = game::reset(spec_, seed); }
  StepResult step(int action) { return game::step(spec_, state_, action); }
  ObjectList objects() const { return get_objects(spec_, state_); }
  bool has_ended() const { return state_.terminal; }

 private:
  GameSpec spec_;
  GameState state_;
};

}  // namespace oen::game
