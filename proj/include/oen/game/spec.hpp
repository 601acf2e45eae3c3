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
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace oen::game {

enum class Behavior { kAvatar4Way, kShooterAvatar, kChaser, kRandomWalker, kMissile, kImmovable, kResource };

enum class Orientation : std::int8_t { kNone = 0, kNorth, kEast, kSouth, kWest };

enum class EffectKind { kKillA, kKillB, kKillBoth, kCollect, kScore, kBlock };

enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe };

enum class TerminationKind { kSpriteCount, kTimeout };

// Actions shared by every game. Movement games expose the first five,
// shooter games add kFire.
enum Action : int { kNoop = 0, kUp = 1, kRight = 2, kDown = 3, kLeft = 4, kFire = 5 };

inline bool is_avatar(Behavior b) { return b == Behavior::kAvatar4Way || b == Behavior::kShooterAvatar; }
inline bool is_static(Behavior b) { return b == Behavior::kImmovable || b == Behavior::kResource; }

// Unit step for an orientation, y grows downward.
inline int delta_x(Orientation o) { return o == Orientation::kEast ? 1 : o == Orientation::kWest ? -1 : 0; }
inline int delta_y(Orientation o) { return o == Orientation::kSouth ? 1 : o == Orientation::kNorth ? -1 : 0; }

inline Orientation reverse(Orientation o) {
  switch (o) {
    case Orientation::kNorth: return Orientation::kSouth;
    case Orientation::kSouth: return Orientation::kNorth;
    case Orientation::kEast: return Orientation::kWest;
    case Orientation::kWest: return Orientation::kEast;
    default: return Orientation::kNone;
  }
}

struct SpriteClass {
  std::string name;
  char glyph = '?';
  Behavior behavior = Behavior::kImmovable;
  int speed = 1;  // moves on ticks where tick % speed == 0
  Orientation direction = Orientation::kNone;  // initial / missile heading
  int target_class = -1;                       // chaser
  int projectile_class = -1;                   // shooter avatar
  bool relevant = false;                       // included in agent observations
};

struct Effect {
  EffectKind kind = EffectKind::kBlock;
  int resource = -1;  // collect
  int amount = 0;     // collect amount or score delta
};

/// Applies when an object of class_a and one of class_b meet in a cell
/// (in either role order). The first listed match per pair wins.
struct Interaction {
  int class_a = -1;
  int class_b = -1;
  std::vector<Effect> effects;
};

struct Termination {
  TerminationKind kind = TerminationKind::kTimeout;
  int class_id = -1;
  CompareOp op = CompareOp::kEq;
  std::int64_t count = 0;  // sprite count threshold or timeout ticks
  bool win = false;
  std::int64_t bonus = 0;
};

struct GameSpec {
  std::string name;
  std::vector<SpriteClass> classes;
  std::vector<std::string> resources;  // in order of first use
  std::vector<Interaction> interactions;
  std::vector<Termination> terminations;
  std::map<char, std::vector<int>> level_map;
  std::vector<std::string> level;  // rows, top to bottom
  int avatar_class = -1;

  int width() const { return level.empty() ? 0 : static_cast<int>(level.front().size()); }
  int height() const { return static_cast<int>(level.size()); }
  int action_count() const {
    return classes.at(static_cast<std::size_t>(avatar_class)).behavior == Behavior::kShooterAvatar ? 6 : 5;
  }
  int class_index(const std::string& n) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i].name == n) return static_cast<int>(i);
    return -1;
  }
  std::int64_t timeout() const {
    for (const auto& t : terminations)
      if (t.kind == TerminationKind::kTimeout) return t.count;
    return -1;
  }
};

inline const char* to_string(Behavior b) {
  switch (b) {
    case Behavior::kAvatar4Way: return "avatar4way";
    case Behavior::kShooterAvatar: return "shooter_avatar";
    case Behavior::kChaser: return "chaser";
    case Behavior::kRandomWalker: return "random_walker";
    case Behavior::kMissile: return "missile";
    case Behavior::kImmovable: return "immovable";
    case Behavior::kResource: return "resource";
  }
  return "?";
}

inline const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::kNorth: return "N";
    case Orientation::kEast: return "E";
    case Orientation::kSouth: return "S";
    case Orientation::kWest: return "W";
    default: return "-";
  }
}

inline const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "==";
    case CompareOp::kNe: return "!=";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
  }
  return "?";
}

inline bool compare(std::int64_t lhs, CompareOp op, std::int64_t rhs) {
  switch (op) {
    case CompareOp::kEq: return lhs == rhs;
    case CompareOp::kNe: return lhs != rhs;
    case CompareOp::kLt: return lhs < rhs;
    case CompareOp::kLe: return lhs <= rhs;
    case CompareOp::kGt: return lhs > rhs;
    case CompareOp::kGe: return lhs >= rhs;
  }
  return false;
}

/// Canonical, line-oriented dump of a parsed game. Used for golden comparisons.
inline std::string describe(const GameSpec& g) {
  std::ostringstream os;
  auto cls = [&](int id) { return id < 0 ? std::string("-") : g.classes[static_cast<std::size_t>(id)].name; };
  os << "game " << g.name << "\n";
  for (const auto& c : g.classes) {
    os << "class " << c.name << " glyph=" << c.glyph << " behavior=" << to_string(c.behavior)
       << " speed=" << c.speed << " dir=" << to_string(c.direction) << " target=" << cls(c.target_class)
       << " projectile=" << cls(c.projectile_class) << " relevant=" << (c.relevant ? 1 : 0) << "\n";
  }
  for (const auto& r : g.resources) os << "resource " << r << "\n";
  for (const auto& in : g.interactions) {
    os << "interaction " << cls(in.class_a) << " " << cls(in.class_b) << " >";
    for (const auto& e : in.effects) {
      switch (e.kind) {
        case EffectKind::kKillA: os << " kill_a"; break;
        case EffectKind::kKillB: os << " kill_b"; break;
        case EffectKind::kKillBoth: os << " kill_both"; break;
        case EffectKind::kBlock: os << " block"; break;
        case EffectKind::kScore: os << " score(" << e.amount << ")"; break;
        case EffectKind::kCollect:
          os << " collect(" << g.resources[static_cast<std::size_t>(e.resource)] << "," << e.amount << ")";
          break;
      }
    }
    os << "\n";
  }
  for (const auto& t : g.terminations) {
    if (t.kind == TerminationKind::kTimeout)
      os << "termination timeout(" << t.count << ")";
    else
      os << "termination sprite_count(" << cls(t.class_id) << "," << to_string(t.op) << "," << t.count << ")";
    os << " win=" << (t.win ? 1 : 0) << " bonus=" << t.bonus << "\n";
  }
  for (const auto& [glyph, ids] : g.level_map) {
    os << "map " << glyph << " >";
    for (int id : ids) os << " " << cls(id);
    os << "\n";
  }
  os << "level " << g.width() << "x" << g.height() << "\n";
  for (const auto& row : g.level) os << row << "\n";
  return os.str();
}

}  // namespace oen::game
