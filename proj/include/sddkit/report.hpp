/* Copyright 2026 The sddkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Tabular report output as CSV or JSON lines. Numbers are pre-formatted
// with fixed precision so both encodings carry identical digits.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sddkit/analytics.hpp"
#include "sddkit/config.hpp"
#include "sddkit/eval.hpp"

namespace sddkit {

inline constexpr int kPercentDecimals = 2;
inline constexpr int kSeriesDecimals = 6;

struct Cell {
  std::string text;
  bool numeric = false;
};

inline Cell str_cell(std::string s) { return {std::move(s), false}; }
inline Cell num_cell(double v, int decimals) { return {fixed(v, decimals), true}; }
inline Cell int_cell(std::int64_t v) { return {std::to_string(v), true}; }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i].text);
    }
    out += '\n';
  }
  return out;
}

inline std::string to_jsonl(const Table& t) {
  std::string out;
  for (const auto& row : t.rows) {
    out += '{';
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += nlohmann::json(t.columns[i]).dump() + ':';
      out += row[i].numeric ? row[i].text : nlohmann::json(row[i].text).dump();
    }
    out += "}\n";
  }
  return out;
}

inline std::string render(const Table& t, ExportFormat f) {
  return f == ExportFormat::kCsv ? to_csv(t) : to_jsonl(t);
}

inline std::string extension(ExportFormat f) { return f == ExportFormat::kCsv ? ".csv" : ".jsonl"; }

inline Table lost_stats_table(std::span<const LostStatsRow> rows) {
  Table t{{"scene", "trajectories", "start_pct", "middle_pct", "end_pct"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({str_cell(r.scene), int_cell(static_cast<std::int64_t>(r.trajectories)),
                      num_cell(r.start_pct, kPercentDecimals), num_cell(r.middle_pct, kPercentDecimals),
                      num_cell(r.end_pct, kPercentDecimals)});
  }
  return t;
}

inline Table class_distribution_table(std::span<const ClassDistributionRow> rows,
                                      std::span<const AgentClass> classes) {
  Table t{{"group", "tracks"}, {}};
  for (AgentClass c : classes) t.columns.emplace_back(to_string(c));
  for (const auto& r : rows) {
    std::vector<Cell> row{str_cell(r.group), int_cell(static_cast<std::int64_t>(r.tracks))};
    for (AgentClass c : classes) {
      auto it = r.percent.find(c);
      row.push_back(num_cell(it == r.percent.end() ? 0.0 : it->second, kPercentDecimals));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table overlap_table(std::span<const OverlapRow> rows) {
  Table t{{"scene", "location_overlap", "time_overlap", "split_videos"}, {}};
  for (const auto& r : rows) {
    std::string groups;
    for (const auto& g : r.groups) groups += (groups.empty() ? "" : "; ") + g;
    if (groups.empty()) groups = "None";
    t.rows.push_back({str_cell(r.scene), str_cell(std::string(to_string(r.location))),
                      str_cell(std::string(to_string(r.time))), str_cell(groups)});
  }
  return t;
}

inline Table split_candidates_table() {
  return {{"video", "predecessor", "successor", "frame_gap", "spatial_gap", "score"}, {}};
}

inline void append_split_candidates(Table& t, const std::string& video,
                                    std::span<const SplitCandidate> cands) {
  for (const auto& c : cands) {
    t.rows.push_back({str_cell(video), str_cell(c.predecessor), str_cell(c.successor),
                      int_cell(c.frame_gap), num_cell(c.spatial_gap, kSeriesDecimals),
                      num_cell(c.score, kSeriesDecimals)});
  }
}

inline Table eval_table(std::span<const EvalReport> reports) {
  Table t{{"config", "group", "windows", "ade", "fde"}, {}};
  for (const auto& r : reports) {
    t.rows.push_back({str_cell(r.config), str_cell(r.group),
                      int_cell(static_cast<std::int64_t>(r.windows)),
                      num_cell(r.ade, kSeriesDecimals), num_cell(r.fde, kSeriesDecimals)});
  }
  return t;
}

inline Table series_table(const MeasureSeries& s) {
  Table t{{"frame", "agent_x", "agent_y", "other_x", "other_y", "mi", "rho", "aim"}, {}};
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    t.rows.push_back({int_cell(s.frames[i]), num_cell(s.agent_pos[i].x, kSeriesDecimals),
                      num_cell(s.agent_pos[i].y, kSeriesDecimals),
                      num_cell(s.other_pos[i].x, kSeriesDecimals),
                      num_cell(s.other_pos[i].y, kSeriesDecimals), num_cell(s.mi[i], kSeriesDecimals),
                      num_cell(s.rho[i], kSeriesDecimals), num_cell(s.aim[i], kSeriesDecimals)});
  }
  return t;
}

}  // namespace sddkit
