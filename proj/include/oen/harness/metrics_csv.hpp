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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oen/agent/metrics.hpp"

namespace oen::harness {

using agent::MetricsRow;

inline constexpr const char* kMetricsHeader = "step,episode,kind,reward,episode_length,epsilon,loss_mean,wall_ms";

/// 17 significant digits: round-trips every double.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Provenance lines (prefixed "# "), the column header, then one line per row.
inline void write_metrics(std::ostream& os, const std::vector<MetricsRow>& rows,
                          const std::vector<std::string>& provenance = {}) {
  for (const auto& p : provenance) os << "# " << p << "\n";
  os << kMetricsHeader << "\n";
  for (const auto& r : rows) {
    os << r.step << ',' << r.episode << ',' << agent::to_string(r.kind) << ',' << format_real(r.reward) << ','
       << r.episode_length << ',' << format_real(r.epsilon) << ',' << format_real(r.loss_mean) << ',' << r.wall_ms
       << "\n";
  }
}

inline void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows,
                          const std::vector<std::string>& provenance = {}) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open metrics file for writing: " + path);
  write_metrics(os, rows, provenance);
  os.flush();
  if (!os) throw std::runtime_error("failed writing metrics file: " + path);
}

inline std::vector<MetricsRow> read_metrics(std::istream& is) {
  std::vector<MetricsRow> rows;
  std::string line;
  bool header = false;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kMetricsHeader) throw std::runtime_error("metrics: unexpected header at line " + std::to_string(number));
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw std::runtime_error("metrics: expected 8 fields at line " + std::to_string(number));
    MetricsRow r;
    r.step = std::stoll(f[0]);
    r.episode = std::stoll(f[1]);
    r.kind = agent::parse_row_kind(f[2]);
    r.reward = std::strtod(f[3].c_str(), nullptr);
    r.episode_length = std::stoll(f[4]);
    r.epsilon = std::strtod(f[5].c_str(), nullptr);
    r.loss_mean = std::strtod(f[6].c_str(), nullptr);
    r.wall_ms = std::stoll(f[7]);
    rows.push_back(r);
  }
  if (!header) throw std::runtime_error("metrics: missing header line");
  return rows;
}

inline std::vector<MetricsRow> read_metrics(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open metrics file: " + path);
  return read_metrics(is);
}

}  // namespace oen::harness
