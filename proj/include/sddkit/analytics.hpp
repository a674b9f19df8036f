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

// Dataset characterization: lost-annotation frequencies, class
// distributions, split-trajectory candidates and the scene overlap table.

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sddkit/preprocess.hpp"
#include "sddkit/registry.hpp"

namespace sddkit {

struct LostStatsRow {
  std::string scene;
  std::size_t trajectories = 0;
  double start_pct = 0.0;
  double middle_pct = 0.0;
  double end_pct = 0.0;
};

// Percent of trajectories with a lost run at the start, in the middle and at
// the end. Expects raw (unfiltered) trajectories.
inline LostStatsRow lost_stats_row(std::string scene, std::span<const Trajectory> trajectories) {
  LostStatsRow row;
  row.scene = std::move(scene);
  row.trajectories = trajectories.size();
  std::size_t s = 0, m = 0, e = 0;
  for (const auto& t : trajectories) {
    const auto pos = classify_lost_positions(t);
    s += pos.start;
    m += pos.middle;
    e += pos.end;
  }
  if (row.trajectories > 0) {
    const double n = static_cast<double>(row.trajectories);
    row.start_pct = 100.0 * static_cast<double>(s) / n;
    row.middle_pct = 100.0 * static_cast<double>(m) / n;
    row.end_pct = 100.0 * static_cast<double>(e) / n;
  }
  return row;
}

// One row per scene; all videos of a scene are pooled by the caller.
inline std::vector<LostStatsRow> lost_stats(
    const std::map<std::string, std::vector<Trajectory>>& by_scene) {
  std::vector<LostStatsRow> rows;
  for (const auto& [scene, trajs] : by_scene) rows.push_back(lost_stats_row(scene, trajs));
  return rows;
}

struct ClassDistributionRow {
  std::string group;
  std::size_t tracks = 0;
  std::map<AgentClass, double> percent;  // every reported class present, possibly 0

  double sum() const {
    double s = 0.0;
    for (const auto& [c, v] : percent) s += v;
    return s;
  }
};

inline constexpr std::array<AgentClass, 6> kSddClasses = {
    AgentClass::kPedestrian, AgentClass::kBiker, AgentClass::kCar,
    AgentClass::kBus,        AgentClass::kSkater, AgentClass::kCart};
inline constexpr std::array<AgentClass, 4> kIndClasses = {
    AgentClass::kPedestrian, AgentClass::kBiker, AgentClass::kCar, AgentClass::kTruckBus};

// Share of unique tracks per class. Tracks split into segments count once.
inline ClassDistributionRow class_distribution_row(std::string group,
                                                   std::span<const Trajectory> trajectories,
                                                   std::span<const AgentClass> classes) {
  ClassDistributionRow row;
  row.group = std::move(group);
  std::map<std::pair<SourceRef, std::int64_t>, AgentClass> unique;
  for (const auto& t : trajectories) unique.emplace(std::make_pair(t.source, t.track_id), t.label);
  row.tracks = unique.size();
  std::map<AgentClass, std::size_t> counts;
  for (const auto& [key, label] : unique) ++counts[label];
  for (AgentClass c : classes) row.percent[c] = 0.0;
  for (const auto& [c, n] : counts) {
    row.percent[c] = row.tracks ? 100.0 * static_cast<double>(n) / static_cast<double>(row.tracks) : 0.0;
  }
  return row;
}

inline std::vector<ClassDistributionRow> class_distribution(
    const std::map<std::string, std::vector<Trajectory>>& by_group,
    std::span<const AgentClass> classes) {
  std::vector<ClassDistributionRow> rows;
  for (const auto& [group, trajs] : by_group) {
    rows.push_back(class_distribution_row(group, trajs, classes));
  }
  return rows;
}

// Groups inD trajectories by the registry's intersection ranges.
inline std::map<std::string, std::vector<Trajectory>> group_by_intersection(
    std::span<const Trajectory> trajectories, const DatasetInfo& ind, Diagnostics* diag = nullptr) {
  std::map<std::string, std::vector<Trajectory>> out;
  for (const auto& g : ind.intersections) out[g.label];
  for (const auto& t : trajectories) {
    auto label = ind.intersection_of(t.source.video);
    if (!label) {
      warn(diag, "recording " + std::to_string(t.source.video) + " is in no intersection group");
      continue;
    }
    out[*label].push_back(t);
  }
  return out;
}

struct SplitCandidate {
  std::string predecessor;
  std::string successor;
  std::int64_t frame_gap = 0;
  double spatial_gap = 0.0;
  double score = 0.0;
};

struct SplitGates {
  std::int64_t max_frame_gap = 60;
  double max_spatial_gap = 50.0;
  // Tolerated overlap: successor may start up to this many frames before the
  // predecessor ends.
  std::int64_t overlap_slack = 0;
};

// Pairs (A, B) where B starts shortly after and close to where A ends.
// score = (1 - gap/max_gap) * (1 - dist/max_dist), sorted by descending score.
inline std::vector<SplitCandidate> detect_split_candidates(std::span<const Trajectory> trajectories,
                                                           const SplitGates& gates = {}) {
  std::vector<SplitCandidate> out;
  for (const auto& a : trajectories) {
    if (a.points.empty()) continue;
    const auto& end = a.points.back();
    for (const auto& b : trajectories) {
      if (&a == &b || b.points.empty()) continue;
      const auto& start = b.points.front();
      const std::int64_t gap = start.frame - end.frame;
      if (gap < -gates.overlap_slack || gap > gates.max_frame_gap) continue;
      const double dist = distance(end.pos, start.pos);
      if (dist > gates.max_spatial_gap) continue;
      SplitCandidate c;
      c.predecessor = a.id_string();
      c.successor = b.id_string();
      c.frame_gap = gap;
      c.spatial_gap = dist;
      const double fg = gates.max_frame_gap > 0
                            ? static_cast<double>(std::max<std::int64_t>(gap, 0)) /
                                  static_cast<double>(gates.max_frame_gap)
                            : 0.0;
      const double sg = gates.max_spatial_gap > 0.0 ? dist / gates.max_spatial_gap : 0.0;
      c.score = (1.0 - fg) * (1.0 - sg);
      out.push_back(std::move(c));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.predecessor != y.predecessor) return x.predecessor < y.predecessor;
    return x.successor < y.successor;
  });
  return out;
}

// Greedy chains: each track links to its best-scoring successor, each
// successor is claimed once. Returns chains with at least `min_links` links.
inline std::vector<std::vector<std::string>> link_split_chains(std::span<const SplitCandidate> candidates,
                                                               std::size_t min_links = 1) {
  std::map<std::string, std::string> next;
  std::map<std::string, std::string> prev;
  for (const auto& c : candidates) {  // already in descending score order
    if (next.count(c.predecessor) || prev.count(c.successor)) continue;
    // Refuse links that would close a cycle.
    std::string cur = c.predecessor;
    bool cycle = false;
    while (true) {
      if (cur == c.successor) {
        cycle = true;
        break;
      }
      auto it = prev.find(cur);
      if (it == prev.end()) break;
      cur = it->second;
    }
    if (cycle) continue;
    next[c.predecessor] = c.successor;
    prev[c.successor] = c.predecessor;
  }
  std::vector<std::vector<std::string>> chains;
  for (const auto& [head, unused] : next) {
    if (prev.count(head)) continue;
    std::vector<std::string> chain{head};
    for (auto it = next.find(head); it != next.end(); it = next.find(it->second)) {
      chain.push_back(it->second);
    }
    if (chain.size() - 1 >= min_links) chains.push_back(std::move(chain));
  }
  return chains;
}

struct OverlapRow {
  std::string scene;  // display name
  OverlapLevel location = OverlapLevel::kNone;
  OverlapLevel time = OverlapLevel::kNone;
  std::vector<std::string> groups;  // verbatim group labels
};

// The curated overlap table, in registry scene order.
inline std::vector<OverlapRow> overlap_report(const DatasetRegistry& reg,
                                              std::string_view dataset_id = "sdd") {
  std::vector<OverlapRow> rows;
  for (const auto& [key, s] : reg.dataset(dataset_id).scenes) {
    OverlapRow r{s.display_name, s.location_overlap, s.time_overlap, {}};
    for (const auto& g : s.simultaneous_groups) r.groups.push_back(g.label);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace sddkit
