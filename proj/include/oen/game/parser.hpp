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

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oen/game/spec.hpp"

namespace oen::game {

/// Parse failure with a 1-based source location.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

namespace detail {

struct Token {
  std::string text;
  int column = 1;
};

struct SourceLine {
  int number = 0;
  int indent = 0;  // columns stripped from the left
  std::string text;
};

inline std::string_view trim(std::string_view s, int* stripped_left = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (stripped_left) *stripped_left = static_cast<int>(b);
  return s.substr(b, e - b);
}

// Whitespace-separated tokens; whitespace inside parentheses is dropped so
// that "collect(gem, 1)" is one token.
inline std::vector<Token> tokenize(const SourceLine& line) {
  std::vector<Token> out;
  const std::string& s = line.text;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    Token t;
    t.column = line.indent + static_cast<int>(i) + 1;
    int depth = 0;
    while (i < s.size() && (depth > 0 || !std::isspace(static_cast<unsigned char>(s[i])))) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (depth > 0 && std::isspace(static_cast<unsigned char>(s[i]))) {
        ++i;
        continue;
      }
      t.text.push_back(s[i]);
      ++i;
    }
    if (depth != 0) throw ParseError(line.number, t.column, "unbalanced parentheses in '" + t.text + "'");
    out.push_back(std::move(t));
  }
  return out;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

// "name(a,b,c)" -> {"a","b","c"}; nullopt when the token is not a call of `name`.
inline std::optional<std::vector<std::string>> call_args(std::string_view tok, std::string_view name) {
  if (tok.size() < name.size() + 2 || tok.substr(0, name.size()) != name || tok[name.size()] != '(' ||
      tok.back() != ')')
    return std::nullopt;
  std::vector<std::string> args;
  std::string_view inner = tok.substr(name.size() + 1, tok.size() - name.size() - 2);
  std::size_t start = 0;
  for (std::size_t i = 0; i <= inner.size(); ++i) {
    if (i == inner.size() || inner[i] == ',') {
      args.emplace_back(inner.substr(start, i - start));
      start = i + 1;
    }
  }
  return args;
}

inline std::optional<bool> to_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  return std::nullopt;
}

inline std::optional<Behavior> to_behavior(std::string_view s) {
  if (s == "avatar4way") return Behavior::kAvatar4Way;
  if (s == "shooter_avatar") return Behavior::kShooterAvatar;
  if (s == "chaser") return Behavior::kChaser;
  if (s == "random_walker") return Behavior::kRandomWalker;
  if (s == "missile") return Behavior::kMissile;
  if (s == "immovable") return Behavior::kImmovable;
  if (s == "resource") return Behavior::kResource;
  return std::nullopt;
}

inline std::optional<Orientation> to_orientation(std::string_view s) {
  if (s == "N") return Orientation::kNorth;
  if (s == "E") return Orientation::kEast;
  if (s == "S") return Orientation::kSouth;
  if (s == "W") return Orientation::kWest;
  return std::nullopt;
}

inline std::optional<CompareOp> to_op(std::string_view s) {
  if (s == "==") return CompareOp::kEq;
  if (s == "!=") return CompareOp::kNe;
  if (s == "<") return CompareOp::kLt;
  if (s == "<=") return CompareOp::kLe;
  if (s == ">") return CompareOp::kGt;
  if (s == ">=") return CompareOp::kGe;
  return std::nullopt;
}

inline constexpr std::string_view kSections[] = {"SpriteSet", "InteractionSet", "TerminationSet", "LevelMapping",
                                                 "Level"};

class Parser {
 public:
  explicit Parser(std::string_view source) { split(source); }

  GameSpec run() {
    for (auto name : kSections) {
      if (!sections_.count(std::string(name)))
        throw ParseError(last_line_, 1, "missing section '" + std::string(name) + "'");
      if (sections_[std::string(name)].lines.empty())
        throw ParseError(sections_[std::string(name)].header_line, 1,
                         "section '" + std::string(name) + "' is empty");
    }
    parse_sprites();
    parse_interactions();
    parse_terminations();
    parse_mapping();
    parse_level();
    return std::move(spec_);
  }

 private:
  struct Section {
    int header_line = 0;
    std::vector<SourceLine> lines;
  };

  void split(std::string_view source) {
    std::string current;
    int number = 0;
    std::size_t pos = 0;
    while (pos < source.size()) {
      std::size_t nl = source.find('\n', pos);
      if (nl == std::string_view::npos) nl = source.size();
      std::string_view raw = source.substr(pos, nl - pos);
      pos = nl + 1;
      ++number;
      if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      int indent = 0;
      std::string_view text = trim(raw, &indent);
      if (text.empty()) continue;
      last_line_ = number;
      bool header = false;
      for (auto name : kSections) {
        if (text == name) {
          if (sections_.count(std::string(name)))
            throw ParseError(number, indent + 1, "duplicate section '" + std::string(name) + "'");
          current = std::string(name);
          sections_[current].header_line = number;
          header = true;
        }
      }
      if (header) continue;
      if (current.empty()) {
        SourceLine line{number, indent, std::string(text)};
        auto toks = tokenize(line);
        if (toks.size() == 2 && toks[0].text == "Game") {
          spec_.name = toks[1].text;
          continue;
        }
        throw ParseError(number, indent + 1, "statement outside of any section: '" + std::string(text) + "'");
      }
      sections_[current].lines.push_back({number, indent, std::string(text)});
    }
  }

  int require_class(const Token& t, int line) const {
    const int id = spec_.class_index(t.text);
    if (id < 0) throw ParseError(line, t.column, "unknown sprite class '" + t.text + "'");
    return id;
  }

  int resource_index(const std::string& name) {
    for (std::size_t i = 0; i < spec_.resources.size(); ++i)
      if (spec_.resources[i] == name) return static_cast<int>(i);
    spec_.resources.push_back(name);
    return static_cast<int>(spec_.resources.size() - 1);
  }

  void parse_sprites() {
    struct Pending {
      int line;
      Token target, projectile;
    };
    std::vector<Pending> pending;
    for (const auto& line : sections_["SpriteSet"].lines) {
      auto toks = tokenize(line);
      SpriteClass c;
      c.name = toks[0].text;
      if (spec_.class_index(c.name) >= 0)
        throw ParseError(line.number, toks[0].column, "duplicate sprite class '" + c.name + "'");
      bool have_behavior = false;
      Pending p{line.number, {}, {}};
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const auto& t = toks[i];
        const auto eq = t.text.find('=');
        if (eq == std::string::npos || eq == 0)
          throw ParseError(line.number, t.column, "expected key=value, got '" + t.text + "'");
        const std::string key = t.text.substr(0, eq);
        const std::string value = t.text.substr(eq + 1);
        const int vcol = t.column + static_cast<int>(eq) + 1;
        if (key == "behavior") {
          auto b = to_behavior(value);
          if (!b) throw ParseError(line.number, vcol, "unknown behavior '" + value + "'");
          c.behavior = *b;
          have_behavior = true;
        } else if (key == "glyph") {
          if (value.size() != 1) throw ParseError(line.number, vcol, "glyph must be a single character");
          c.glyph = value[0];
        } else if (key == "speed") {
          auto v = to_int(value);
          if (!v || *v < 1) throw ParseError(line.number, vcol, "speed must be a positive integer");
          c.speed = static_cast<int>(*v);
        } else if (key == "dir") {
          auto o = to_orientation(value);
          if (!o) throw ParseError(line.number, vcol, "dir must be one of N, E, S, W");
          c.direction = *o;
        } else if (key == "target") {
          p.target = {value, vcol};
        } else if (key == "projectile") {
          p.projectile = {value, vcol};
        } else if (key == "relevant") {
          auto v = to_bool(value);
          if (!v) throw ParseError(line.number, vcol, "relevant must be true or false");
          c.relevant = *v;
        } else {
          throw ParseError(line.number, t.column, "unknown sprite attribute '" + key + "'");
        }
      }
      if (!have_behavior) throw ParseError(line.number, toks[0].column, "sprite '" + c.name + "' has no behavior");
      if (c.behavior == Behavior::kShooterAvatar && p.projectile.text.empty())
        throw ParseError(line.number, toks[0].column, "shooter_avatar '" + c.name + "' needs projectile=<class>");
      if (c.behavior == Behavior::kChaser && p.target.text.empty())
        throw ParseError(line.number, toks[0].column, "chaser '" + c.name + "' needs target=<class>");
      if (is_avatar(c.behavior)) {
        if (spec_.avatar_class >= 0)
          throw ParseError(line.number, toks[0].column, "more than one avatar class ('" + c.name + "')");
        spec_.avatar_class = static_cast<int>(spec_.classes.size());
        c.relevant = true;
        if (c.direction == Orientation::kNone) c.direction = Orientation::kNorth;
      }
      spec_.classes.push_back(std::move(c));
      pending.push_back(std::move(p));
    }
    if (spec_.avatar_class < 0)
      throw ParseError(sections_["SpriteSet"].header_line, 1, "SpriteSet declares no avatar class");
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (!pending[i].target.text.empty())
        spec_.classes[i].target_class = require_class(pending[i].target, pending[i].line);
      if (!pending[i].projectile.text.empty())
        spec_.classes[i].projectile_class = require_class(pending[i].projectile, pending[i].line);
    }
  }

  void parse_interactions() {
    for (const auto& line : sections_["InteractionSet"].lines) {
      auto toks = tokenize(line);
      if (toks.size() < 4 || toks[2].text != ">")
        throw ParseError(line.number, toks[0].column, "expected '<classA> <classB> > effect...'");
      Interaction in;
      in.class_a = require_class(toks[0], line.number);
      in.class_b = require_class(toks[1], line.number);
      for (std::size_t i = 3; i < toks.size(); ++i) {
        const auto& t = toks[i];
        Effect e;
        if (t.text == "kill_a") {
          e.kind = EffectKind::kKillA;
        } else if (t.text == "kill_b") {
          e.kind = EffectKind::kKillB;
        } else if (t.text == "kill_both") {
          e.kind = EffectKind::kKillBoth;
        } else if (t.text == "block") {
          e.kind = EffectKind::kBlock;
        } else if (auto a = call_args(t.text, "score")) {
          auto v = a->size() == 1 ? to_int((*a)[0]) : std::nullopt;
          if (!v) throw ParseError(line.number, t.column, "score takes one integer");
          e.kind = EffectKind::kScore;
          e.amount = static_cast<int>(*v);
        } else if (auto c = call_args(t.text, "collect")) {
          auto v = c->size() == 2 ? to_int((*c)[1]) : std::nullopt;
          if (!v || (*c)[0].empty()) throw ParseError(line.number, t.column, "collect takes (resource, amount)");
          e.kind = EffectKind::kCollect;
          e.resource = resource_index((*c)[0]);
          e.amount = static_cast<int>(*v);
        } else {
          throw ParseError(line.number, t.column, "unknown effect '" + t.text + "'");
        }
        in.effects.push_back(e);
      }
      spec_.interactions.push_back(std::move(in));
    }
  }

  void parse_terminations() {
    for (const auto& line : sections_["TerminationSet"].lines) {
      auto toks = tokenize(line);
      Termination term;
      const auto& head = toks[0];
      if (auto a = call_args(head.text, "timeout")) {
        auto v = a->size() == 1 ? to_int((*a)[0]) : std::nullopt;
        if (!v || *v < 1) throw ParseError(line.number, head.column, "timeout takes one positive integer");
        term.kind = TerminationKind::kTimeout;
        term.count = *v;
      } else if (auto s = call_args(head.text, "sprite_count")) {
        if (s->size() != 3) throw ParseError(line.number, head.column, "sprite_count takes (class, op, n)");
        term.kind = TerminationKind::kSpriteCount;
        term.class_id = require_class({(*s)[0], head.column}, line.number);
        auto op = to_op((*s)[1]);
        if (!op) throw ParseError(line.number, head.column, "unknown comparison '" + (*s)[1] + "'");
        term.op = *op;
        auto n = to_int((*s)[2]);
        if (!n) throw ParseError(line.number, head.column, "sprite_count threshold must be an integer");
        term.count = *n;
      } else {
        throw ParseError(line.number, head.column, "unknown termination '" + head.text + "'");
      }
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const auto& t = toks[i];
        const auto eq = t.text.find('=');
        const std::string key = eq == std::string::npos ? t.text : t.text.substr(0, eq);
        const std::string value = eq == std::string::npos ? "" : t.text.substr(eq + 1);
        if (key == "win") {
          auto b = to_bool(value);
          if (!b) throw ParseError(line.number, t.column, "win must be true or false");
          term.win = *b;
        } else if (key == "bonus") {
          auto v = to_int(value);
          if (!v) throw ParseError(line.number, t.column, "bonus must be an integer");
          term.bonus = *v;
        } else {
          throw ParseError(line.number, t.column, "unknown termination attribute '" + key + "'");
        }
      }
      spec_.terminations.push_back(term);
    }
  }

  void parse_mapping() {
    for (const auto& line : sections_["LevelMapping"].lines) {
      auto toks = tokenize(line);
      if (toks.size() < 3 || toks[0].text.size() != 1 || toks[1].text != ">")
        throw ParseError(line.number, toks[0].column, "expected '<glyph> > class...'");
      const char glyph = toks[0].text[0];
      if (glyph == '.') throw ParseError(line.number, toks[0].column, "'.' is reserved for empty cells");
      if (spec_.level_map.count(glyph))
        throw ParseError(line.number, toks[0].column, std::string("glyph '") + glyph + "' mapped twice");
      std::vector<int> ids;
      for (std::size_t i = 2; i < toks.size(); ++i) ids.push_back(require_class(toks[i], line.number));
      spec_.level_map[glyph] = std::move(ids);
    }
  }

  void parse_level() {
    const auto& lines = sections_["Level"].lines;
    int avatars = 0;
    for (const auto& line : lines) {
      if (!spec_.level.empty() && line.text.size() != spec_.level.front().size())
        throw ParseError(line.number, line.indent + 1, "level rows must all have the same width");
      for (std::size_t i = 0; i < line.text.size(); ++i) {
        const char g = line.text[i];
        if (g == '.') continue;
        auto it = spec_.level_map.find(g);
        if (it == spec_.level_map.end())
          throw ParseError(line.number, line.indent + static_cast<int>(i) + 1,
                           std::string("level glyph '") + g + "' has no LevelMapping entry");
        for (int id : it->second)
          if (id == spec_.avatar_class) ++avatars;
      }
      spec_.level.push_back(line.text);
    }
    if (avatars != 1)
      throw ParseError(sections_["Level"].header_line, 1,
                       "level must place exactly one avatar, found " + std::to_string(avatars));
  }

  std::map<std::string, Section> sections_;
  GameSpec spec_;
  int last_line_ = 1;
};

}  // namespace detail

/// Parses the sectioned game-description format. Throws ParseError.
inline GameSpec parse_game(std::string_view source) { return detail::Parser(source).run(); }

}  // namespace oen::game
