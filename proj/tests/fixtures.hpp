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

// Small builders shared by the unit and acceptance tests.

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "sddkit/dataset_io.hpp"

namespace sddkit::testing {

// One point per frame starting at `first`, positions from `pos`.
inline Trajectory make_track(std::int64_t id, std::int64_t first, std::vector<Point2> pos,
                             std::vector<bool> lost = {},
                             AgentClass label = AgentClass::kPedestrian) {
  Trajectory t;
  t.track_id = id;
  t.label = label;
  t.source = {"sdd", "test", 0};
  for (std::size_t i = 0; i < pos.size(); ++i) {
    TrackPoint p;
    p.frame = first + static_cast<std::int64_t>(i);
    p.pos = pos[i];
    p.lost = i < lost.size() && lost[i];
    t.points.push_back(p);
  }
  return t;
}

// Flags only; positions walk along x one pixel per frame.
inline Trajectory flags_track(std::vector<bool> lost) {
  std::vector<Point2> pos;
  for (std::size_t i = 0; i < lost.size(); ++i) pos.push_back({static_cast<double>(i), 0.0});
  return make_track(1, 0, pos, lost);
}

// Straight line: start + k * step.
inline std::vector<Point2> line(Point2 start, Point2 step, std::size_t n) {
  std::vector<Point2> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

inline std::vector<bool> flags_of(const Trajectory& t) {
  std::vector<bool> out;
  for (const auto& p : t.points) out.push_back(p.lost);
  return out;
}

inline std::vector<std::int64_t> frames_of(const Trajectory& t) {
  std::vector<std::int64_t> out;
  for (const auto& p : t.points) out.push_back(p.frame);
  return out;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  // Per-process, so parallel ctest runs never share a directory.
  auto p = std::filesystem::temp_directory_path() /
           ("sddkit_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace sddkit::testing
